#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pgnbsc/dataset.hpp"
#include "pgnbsc/errors.hpp"
#include "pgnbsc/pipeline.hpp"
#include "pgnbsc/signal_io.hpp"
#include "pgnbsc/textio.hpp"

using namespace pgnbsc;
using namespace pgnbsc::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pgnbsc_test_pipeline" / name;
  fs::create_directories(dir);
  return dir;
}

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv = {"pgnbsc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

// six tight clusters on feature 0, mild jitter on the rest
dataset::FeatureMatrix clustered(int per_class, const std::string& prefix,
                                 std::uint64_t seed) {
  static const std::vector<std::string> names = {"a.std_dev", "a.energy", "b.katz_fd"};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.05);
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  const auto classes = m.scheme.classes();
  for (std::size_t k = 0; k < classes.size(); ++k) {
    for (int i = 0; i < per_class; ++i) {
      features::FeatureVector fv;
      fv.label = classes[k];
      fv.source_id = prefix + "_" + seizure_name(classes[k]) + "_" + std::to_string(i);
      fv.window_index = i;
      fv.names = names;
      fv.values = {10.0 * double(k) + g(rng), g(rng), 1.0 + g(rng)};
      m.rows.push_back(std::move(fv));
    }
  }
  return m;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("model table drives scheme and selection") {
  const ModelConfig m1 = ModelConfig::for_model(1);
  CHECK_FALSE(m1.use_bgwo);
  CHECK(m1.scheme.classes().size() == 6);
  const ModelConfig m2 = ModelConfig::for_model(2, 7);
  CHECK(m2.use_bgwo);
  CHECK(m2.scheme.classes().size() == 6);
  CHECK(m2.seed == 7);
  const ModelConfig m3 = ModelConfig::for_model(3);
  CHECK(m3.use_bgwo);
  CHECK(m3.scheme.classes().size() == 5);
  CHECK_THROWS_AS(ModelConfig::for_model(4), Error);

  ModelConfig bad = m3;
  bad.filter.resample_target_hz = 200.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = m3;
  bad.bgwo.population = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("windows csv round trips sample-exactly") {
  std::vector<EpochWindow> windows(2);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 20.0);
  for (int w = 0; w < 2; ++w) {
    windows[w].label = w == 0 ? SeizureType::Absence : SeizureType::Myoclonic;
    windows[w].source_id = "rec";
    windows[w].window_index = w;
    windows[w].channel_names = {"Fp1", "Cz"};
    for (int c = 0; c < 2; ++c) {
      std::vector<double> s(kWindowSamples);
      for (auto& v : s) v = g(rng);
      windows[w].samples.push_back(std::move(s));
    }
  }
  const std::string path = (tmp_dir("windows") / "w.csv").string();
  write_windows_csv(windows, path);
  const auto back = read_windows_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == SeizureType::Absence);
  CHECK(back[1].window_index == 1);
  CHECK(back[0].channel_names == windows[0].channel_names);
  CHECK(back[0].samples == windows[0].samples);
  CHECK(back[1].samples == windows[1].samples);

  textio::write_file(path, "source_id,window_index,label,channel,s0\nr,0,absence,Fp1,1.0\n");
  CHECK_THROWS_AS(read_windows_csv(path), MalformedFile);
}

TEST_CASE("extract_features maps windows onto the six-class registry") {
  const Recording rec = signal_io::synth_recording(SeizureType::Tonic, 4.0, 250.0, 2);
  EpochWindow w;
  w.label = SeizureType::Tonic;
  w.source_id = rec.source_id;
  w.window_index = 0;
  for (const auto& ch : rec.channels) {
    w.channel_names.push_back(ch.label);
    w.samples.emplace_back(ch.samples.begin(), ch.samples.begin() + kWindowSamples);
  }
  const auto m = extract_features({w, w}, {});
  REQUIRE(m.rows.size() == 2);
  CHECK(m.registry().size() == std::size_t(kFeatureVectorWidth));
  CHECK(m.scheme.classes().size() == 6);
}

TEST_CASE("run_model 1 is perfect on separable six-class clusters") {
  const auto train = clustered(4, "train", 1);
  const auto test = clustered(2, "test", 2);
  const ModelOutput out = run_model(ModelConfig::for_model(1), train, test);
  CHECK_FALSE(out.is_ensemble);
  CHECK(out.predictions.size() == test.rows.size());
  CHECK(out.report.micro_accuracy == doctest::Approx(1.0));
  CHECK(out.selections.empty());
  CHECK(out.manifest.data.at("config").at("model") == 1);
  CHECK(out.manifest.data.at("stage_ms").contains("train"));
  CHECK(out.manifest.data.at("inputs").at("train_rows") == train.rows.size());
}

TEST_CASE("run_model 3 selects per merged class and stays deterministic") {
  const auto train = clustered(6, "train", 3);
  const auto test = clustered(2, "test", 4);
  ModelConfig cfg = ModelConfig::for_model(3);
  cfg.bgwo.max_iterations = 8;

  const ModelOutput out = run_model(cfg, train, test);
  CHECK(out.is_ensemble);
  REQUIRE(out.selections.size() == 5);
  REQUIRE(out.ensemble.targets.size() == 5);
  CHECK(out.ensemble.targets[1] == SeizureType::Focal);
  CHECK(out.report.micro_accuracy >= 0.8);
  CHECK(out.manifest.data.at("selection").size() == 5);
  for (const auto& s : out.selections) {
    CHECK(std::count(s.mask.begin(), s.mask.end(), true) >= 1);
  }

  const ModelOutput again = run_model(cfg, train, test);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(again.selections[k].mask == out.selections[k].mask);
  }
  CHECK(again.predictions == out.predictions);
}

TEST_CASE("run_model rejects leaking sources") {
  const auto train = clustered(2, "same", 1);
  const auto test = clustered(1, "same", 1);
  CHECK_THROWS_AS(run_model(ModelConfig::for_model(1), train, test), Error);
}

TEST_CASE("synthetic corpus builds once and reloads from its manifest") {
  const fs::path dir = tmp_dir("corpus");
  const Corpus corpus = build_synthetic_corpus(dir.string(), 123);
  CHECK(corpus.train.size() == 12);
  CHECK(corpus.test.size() == 6);
  for (const auto& e : corpus.train) {
    CHECK(fs::exists(e.recording));
    CHECK(fs::exists(e.annotations));
  }
  CHECK(fs::exists(dir / "corpus.json"));

  const Corpus again = ensure_corpus(dir.string(), 123);
  REQUIRE(again.train.size() == corpus.train.size());
  CHECK(again.train[0].recording == corpus.train[0].recording);
  CHECK(again.test[5].annotations == corpus.test[5].annotations);

  // entries must parse all the way through the readers
  const Recording rec = signal_io::read_recording(corpus.train[0].recording);
  CHECK(rec.rate_hz == doctest::Approx(256.0));
  CHECK(signal_io::select_montage(rec, MontageSpec::standard_10_20()).channels.size() ==
        kMontageChannels);
  const auto anns = signal_io::read_annotations(corpus.train[0].annotations);
  REQUIRE(anns.size() == 1);
  CHECK(anns[0].label == SeizureType::Absence);
  CHECK(anns[0].stop_s - anns[0].start_s == doctest::Approx(22 * 1.8));
}

TEST_CASE("cli surfaces usage, success and data errors as exit codes") {
  CHECK(run_cli({"--print-config"}) == 0);
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({}) == 1);                         // no subcommand
  CHECK(run_cli({"--no-such-flag"}) == 1);         // usage error
  CHECK(run_cli({"synth"}) == 1);                  // missing required --out
  CHECK(run_cli({"evaluate", "--model", "/nonexistent/m.txt", "--in", "x.csv",
                 "--report", (tmp_dir("cli") / "rep").string()}) == 2);
}

TEST_CASE("cli chains synth, preprocess, features, select, train, evaluate") {
  const fs::path dir = tmp_dir("cli_chain");
  const std::string corpus = (dir / "corpus").string();
  CHECK(run_cli({"synth", "--out", corpus, "--seed", "123"}) == 0);

  const std::string windows = (dir / "w.csv").string();
  CHECK(run_cli({"preprocess", "--in", corpus + "/train/tonic_0.edf", "--ann",
                 corpus + "/train/tonic_0.ann", "--out", windows}) == 0);
  const auto ws = read_windows_csv(windows);
  CHECK(ws.size() == 18);  // tonic training span: (22-4) windows
  CHECK(ws[0].label == SeizureType::Tonic);

  const std::string feats = (dir / "f.csv").string();
  CHECK(run_cli({"features", "--in", windows, "--out", feats}) == 0);
  const auto m = dataset::read_features_csv(feats);
  CHECK(m.rows.size() == 18);

  // hand-made six-class matrices exercise the model subcommands quickly
  const std::string train_csv = (dir / "train.csv").string();
  const std::string test_csv = (dir / "test.csv").string();
  dataset::write_features_csv(clustered(6, "tr", 5), train_csv);
  dataset::write_features_csv(clustered(2, "te", 6), test_csv);

  const std::string mask = (dir / "mask.json").string();
  CHECK(run_cli({"select", "--in", train_csv, "--target", "absence", "--seed", "9",
                 "--out", mask, "--bgwo.max-iterations", "8"}) == 0);
  CHECK(fs::exists(mask));

  const std::string model = (dir / "model.txt").string();
  CHECK(run_cli({"train", "--in", train_csv, "--model", "1", "--out", model}) == 0);
  const std::string report = (dir / "report").string();
  CHECK(run_cli({"evaluate", "--model", model, "--in", test_csv, "--report", report}) == 0);
  CHECK(fs::exists(fs::path(report) / "metrics.csv"));
  CHECK(fs::exists(fs::path(report) / "heatmap.svg"));
  CHECK(fs::exists(fs::path(report) / "summary.txt"));
}

}  // TEST_SUITE
