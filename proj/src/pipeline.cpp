#include "pgnbsc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/signal_io.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::pipeline {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

long ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

std::string content_hash(const std::string& text) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(textio::fnv1a(text)));
  return buf;
}

nlohmann::json config_json(const ModelConfig& cfg) {
  nlohmann::json j;
  j["model"] = cfg.model_id;
  j["seed"] = cfg.seed;
  j["scheme"] = cfg.scheme.name();
  j["use_bgwo"] = cfg.use_bgwo;
  j["plain_gaussian"] = cfg.plain_gaussian;
  j["bgwo"] = {{"population", cfg.bgwo.population},
               {"max_iterations", cfg.bgwo.max_iterations},
               {"early_stop_window", cfg.bgwo.early_stop_window},
               {"early_stop_ratio", cfg.bgwo.early_stop_ratio},
               {"bias_margin", cfg.bgwo.bias_margin},
               {"a_start", cfg.bgwo.a_start}};
  j["features"] = {{"entropy_bins", cfg.features.entropy_bins},
                   {"higuchi_kmax", cfg.features.higuchi_kmax},
                   {"spectral_subwin", cfg.features.spectral_subwin},
                   {"spectral_hop", cfg.features.spectral_hop}};
  j["filter"] = {{"resample_target_hz", cfg.filter.resample_target_hz},
                 {"notch_center_hz", cfg.filter.notch_center_hz},
                 {"notch_bandwidth_hz", cfg.filter.notch_bandwidth_hz},
                 {"fir_taps", cfg.filter.fir_taps},
                 {"emd_max_sift", cfg.filter.emd_max_sift},
                 {"emd_sd_threshold", cfg.filter.emd_sd_threshold}};
  return j;
}

struct TrainedModel {
  bool is_ensemble = false;
  nbayes::NbClassifier single;
  nbayes::NbEnsemble ensemble;
  std::vector<bgwo::SelectionResult> selections;
  long balance_ms = 0, select_ms = 0, train_ms = 0;
};

TrainedModel fit_model(const ModelConfig& cfg, const dataset::FeatureMatrix& train_raw) {
  const dataset::FeatureMatrix strain = dataset::apply_scheme(train_raw, cfg.scheme);

  auto t0 = Clock::now();
  const dataset::FeatureMatrix balanced = dataset::balance_upsample(strain);
  TrainedModel out;
  out.balance_ms = ms_since(t0);

  const std::vector<SeizureType> classes = cfg.scheme.classes();
  const std::size_t width = balanced.registry().size();

  if (!cfg.use_bgwo) {
    t0 = Clock::now();
    out.single = nbayes::train(balanced, std::vector<bool>(width, true), classes,
                               cfg.plain_gaussian);
    out.train_ms = ms_since(t0);
    return out;
  }

  out.is_ensemble = true;
  t0 = Clock::now();
  const auto [ftrain, feval] = bgwo::fitness_split(balanced);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    out.selections.push_back(
        bgwo::select_features(ftrain, feval, classes[k], cfg.bgwo, cfg.seed + k));
  }
  out.select_ms = ms_since(t0);

  t0 = Clock::now();
  for (std::size_t k = 0; k < classes.size(); ++k) {
    out.ensemble.targets.push_back(classes[k]);
    out.ensemble.classifiers.push_back(nbayes::train_one_vs_all(
        balanced, out.selections[k].mask, classes[k], cfg.plain_gaussian));
  }
  out.train_ms = ms_since(t0);
  return out;
}

}  // namespace

ModelConfig ModelConfig::for_model(int id, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.model_id = id;
  cfg.seed = seed;
  switch (id) {
    case 1:
      cfg.scheme = dataset::LabelScheme::six_class();
      cfg.use_bgwo = false;
      break;
    case 2:
      cfg.scheme = dataset::LabelScheme::six_class();
      cfg.use_bgwo = true;
      break;
    case 3:
      cfg.scheme = dataset::LabelScheme::five_class_focal();
      cfg.use_bgwo = true;
      break;
    default:
      throw Error("model must be 1, 2 or 3; got " + std::to_string(id));
  }
  return cfg;
}

void ModelConfig::validate() const {
  if (model_id < 1 || model_id > 3) {
    throw Error("model must be 1, 2 or 3; got " + std::to_string(model_id));
  }
  bgwo.validate();
  features.validate();
  if (filter.resample_target_hz != kTargetRateHz) {
    throw Error("the pipeline is fixed at a 250 Hz working rate");
  }
  if (filter.notch_bandwidth_hz <= 0 || filter.notch_center_hz <= 0) {
    throw Error("notch center and bandwidth must be positive");
  }
  if (filter.emd_max_sift < 1 || filter.emd_sd_threshold <= 0) {
    throw Error("EMD sift budget and threshold must be positive");
  }
}

void RunManifest::add_output(const std::string& name, const std::string& path) {
  data["outputs"][name] = content_hash(textio::read_file(path));
}

ModelOutput run_model(const ModelConfig& cfg, const dataset::FeatureMatrix& train,
                      const dataset::FeatureMatrix& test) {
  cfg.validate();
  train.validate();
  test.validate();
  if (train.registry() != test.registry()) {
    throw RegistryMismatch("train and test matrices disagree on column names");
  }
  dataset::check_disjoint_sources(train, test);

  ModelOutput out;
  TrainedModel fitted = fit_model(cfg, train);
  out.is_ensemble = fitted.is_ensemble;
  out.single = std::move(fitted.single);
  out.ensemble = std::move(fitted.ensemble);
  out.selections = std::move(fitted.selections);

  const dataset::FeatureMatrix stest = dataset::apply_scheme(test, cfg.scheme);
  const auto t0 = Clock::now();
  for (const auto& row : stest.rows) {
    out.truths.push_back(row.label);
    if (out.is_ensemble) {
      out.predictions.push_back(nbayes::predict_ensemble(out.ensemble, row.values).resolved);
    } else {
      const std::string name =
          nbayes::predict(out.single, out.single.apply_mask(row.values));
      out.predictions.push_back(seizure_from_text(name));
    }
  }
  const long evaluate_ms = ms_since(t0);
  out.report = evalreport::build_report(out.truths, out.predictions, cfg.scheme);

  nlohmann::json& j = out.manifest.data;
  j["toolkit_version"] = kToolkitVersion;
  j["config"] = config_json(cfg);
  j["inputs"] = {{"train_rows", train.rows.size()},
                 {"test_rows", test.rows.size()},
                 {"train_hash", content_hash(dataset::features_csv_text(train))},
                 {"test_hash", content_hash(dataset::features_csv_text(test))}};
  j["stage_ms"] = {{"balance", fitted.balance_ms},
                   {"select", fitted.select_ms},
                   {"train", fitted.train_ms},
                   {"evaluate", evaluate_ms}};
  if (out.is_ensemble) {
    nlohmann::json sel = nlohmann::json::array();
    const std::vector<SeizureType> classes = cfg.scheme.classes();
    for (std::size_t k = 0; k < out.selections.size(); ++k) {
      const auto& s = out.selections[k];
      sel.push_back({{"class", seizure_name(classes[k])},
                     {"iterations", s.iterations},
                     {"early_stopped", s.early_stopped},
                     {"best_fitness", s.trace.empty() ? -1.0 : s.trace.back()},
                     {"selected_count",
                      std::count(s.mask.begin(), s.mask.end(), true)}});
    }
    j["selection"] = std::move(sel);
  }
  j["metrics"] = {{"micro_accuracy", out.report.micro_accuracy}};
  j["outputs"] = nlohmann::json::object();
  return out;
}

// ---------------------------------------------------------------------------
// Window CSV
// ---------------------------------------------------------------------------

void write_windows_csv(const std::vector<EpochWindow>& windows, const std::string& path) {
  std::ostringstream os;
  os << "source_id,window_index,label,channel";
  for (int i = 0; i < kWindowSamples; ++i) os << ",s" << i;
  os << "\n";
  for (const auto& w : windows) {
    for (std::size_t c = 0; c < w.samples.size(); ++c) {
      os << w.source_id << "," << w.window_index << "," << seizure_name(w.label) << ","
         << w.channel_names[c];
      for (double v : w.samples[c]) os << "," << textio::format_double(v);
      os << "\n";
    }
  }
  textio::write_file(path, os.str());
}

std::vector<EpochWindow> read_windows_csv(const std::string& path) {
  const std::string body = textio::read_file(path);
  std::istringstream is(body);
  std::string line;
  if (!std::getline(is, line)) throw MalformedFile(path + ": empty windows file");
  const auto header = textio::split(textio::trim(line), ',');
  if (header.size() != 4 + kWindowSamples || header[0] != "source_id" ||
      header[1] != "window_index" || header[2] != "label" || header[3] != "channel") {
    throw MalformedFile(path + ": expected source_id,window_index,label,channel,s0..s" +
                        std::to_string(kWindowSamples - 1) + " header");
  }

  std::vector<EpochWindow> windows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (textio::trim(line).empty()) continue;
    const auto cells = textio::split(line, ',');
    if (cells.size() != header.size()) {
      throw MalformedFile(path + ":" + std::to_string(line_no) + ": wrong cell count");
    }
    const std::string& source = cells[0];
    const int index = static_cast<int>(textio::parse_long(cells[1], path));
    const SeizureType label = seizure_from_text(cells[2]);

    if (windows.empty() || windows.back().source_id != source ||
        windows.back().window_index != index) {
      EpochWindow w;
      w.source_id = source;
      w.window_index = index;
      w.label = label;
      windows.push_back(std::move(w));
    }
    EpochWindow& w = windows.back();
    if (w.label != label) {
      throw MalformedFile(path + ":" + std::to_string(line_no) +
                          ": window rows disagree on the label");
    }
    w.channel_names.push_back(cells[3]);
    std::vector<double> samples;
    samples.reserve(kWindowSamples);
    for (std::size_t i = 4; i < cells.size(); ++i) {
      samples.push_back(textio::parse_double(cells[i], path));
    }
    w.samples.push_back(std::move(samples));
  }
  return windows;
}

dataset::FeatureMatrix extract_features(const std::vector<EpochWindow>& windows,
                                        const features::FeatureParams& params) {
  params.validate();
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  m.rows.reserve(windows.size());
  for (const auto& w : windows) m.rows.push_back(features::extract_all(w, params));
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

namespace {

const std::vector<SeizureType>& corpus_classes() {
  static const std::vector<SeizureType> classes = {
      SeizureType::Absence,       SeizureType::ComplexPartial, SeizureType::Myoclonic,
      SeizureType::SimplePartial, SeizureType::Tonic,          SeizureType::TonicClonic};
  return classes;
}

}  // namespace

Corpus build_synthetic_corpus(const std::string& dir, std::uint64_t seed) {
  fs::create_directories(fs::path(dir) / "train");
  fs::create_directories(fs::path(dir) / "test");

  Corpus corpus;
  nlohmann::json manifest;
  manifest["version"] = 1;
  manifest["seed"] = seed;
  nlohmann::json jtrain = nlohmann::json::array();
  nlohmann::json jtest = nlohmann::json::array();

  const auto& classes = corpus_classes();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const SeizureType cls = classes[c];
    const std::string name = seizure_name(cls);
    // per-class training span: 22-c whole windows per recording, so class
    // sizes differ and the balancing stage has real work under the merge
    const int train_windows = 22 - static_cast<int>(c);
    const double train_span = train_windows * kWindowSeconds;
    for (int r = 0; r < 2; ++r) {
      const std::string rel_rec = "train/" + name + "_" + std::to_string(r) + ".edf";
      const std::string rel_ann = "train/" + name + "_" + std::to_string(r) + ".ann";
      const Recording rec =
          signal_io::synth_recording(cls, 45.0, 256.0, seed + 100 * c + r);
      signal_io::write_recording_edf(rec, (fs::path(dir) / rel_rec).string());
      signal_io::write_annotations({{2.0, 2.0 + train_span, cls}},
                                   (fs::path(dir) / rel_ann).string());
      corpus.train.push_back(
          {(fs::path(dir) / rel_rec).string(), (fs::path(dir) / rel_ann).string()});
      jtrain.push_back({{"recording", rel_rec}, {"annotations", rel_ann}});
    }
    // readers derive source_id from the file stem, so test stems must not
    // collide with train stems or the leakage guard trips
    const std::string rel_rec = "test/" + name + "_test.edf";
    const std::string rel_ann = "test/" + name + "_test.ann";
    const Recording rec = signal_io::synth_recording(cls, 20.0, 256.0, seed + 100 * c + 9);
    signal_io::write_recording_edf(rec, (fs::path(dir) / rel_rec).string());
    signal_io::write_annotations({{2.0, 2.0 + 9 * kWindowSeconds, cls}},
                                 (fs::path(dir) / rel_ann).string());
    corpus.test.push_back(
        {(fs::path(dir) / rel_rec).string(), (fs::path(dir) / rel_ann).string()});
    jtest.push_back({{"recording", rel_rec}, {"annotations", rel_ann}});
  }
  manifest["train"] = std::move(jtrain);
  manifest["test"] = std::move(jtest);
  textio::write_file((fs::path(dir) / "corpus.json").string(), manifest.dump(2) + "\n");
  return corpus;
}

Corpus ensure_corpus(const std::string& dir, std::uint64_t seed) {
  const fs::path manifest_path = fs::path(dir) / "corpus.json";
  if (!fs::exists(manifest_path)) return build_synthetic_corpus(dir, seed);

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(textio::read_file(manifest_path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(manifest_path.string() + ": " + e.what());
  }
  Corpus corpus;
  auto load_side = [&](const char* key, std::vector<CorpusEntry>& side) {
    for (const auto& entry : manifest.at(key)) {
      side.push_back({(fs::path(dir) / entry.at("recording").get<std::string>()).string(),
                      (fs::path(dir) / entry.at("annotations").get<std::string>()).string()});
    }
  };
  load_side("train", corpus.train);
  load_side("test", corpus.test);
  return corpus;
}

dataset::FeatureMatrix features_from_corpus(const std::vector<CorpusEntry>& entries,
                                            const ModelConfig& cfg) {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  const MontageSpec montage = MontageSpec::standard_10_20();
  for (const auto& entry : entries) {
    const Recording raw = signal_io::read_recording(entry.recording);
    const Recording rec = signal_io::select_montage(raw, montage);
    const auto anns = signal_io::read_annotations(entry.annotations);
    const auto windowed = preprocess::run(rec, anns, cfg.filter);
    for (const auto& w : windowed.windows) {
      m.rows.push_back(features::extract_all(w, cfg.features));
    }
  }
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

void write_report_files(const evalreport::EvalReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  textio::write_file((dir / "metrics.csv").string(), evalreport::metrics_csv(report));
  evalreport::write_heatmap_csv(report.heatmap, (dir / "heatmap.csv").string());
  evalreport::write_heatmap_svg(report.heatmap, (dir / "heatmap.svg").string());
  textio::write_file((dir / "summary.txt").string(), evalreport::summary_text(report));
}

int cmd_synth(const std::string& out_dir, std::uint64_t seed) {
  const Corpus corpus = build_synthetic_corpus(out_dir, seed);
  std::cout << "synthetic corpus: " << corpus.train.size() << " training and "
            << corpus.test.size() << " test recordings in " << out_dir << "\n";
  return 0;
}

int cmd_preprocess(const ModelConfig& cfg, const std::string& in, const std::string& ann,
                   const std::string& out) {
  const Recording raw = signal_io::read_recording(in);
  const Recording rec = signal_io::select_montage(raw, MontageSpec::standard_10_20());
  const auto anns = signal_io::read_annotations(ann);
  const auto windowed = preprocess::run(rec, anns, cfg.filter, [](const std::string& stage) {
    std::cout << "stage: " << stage << "\n";
  });
  write_windows_csv(windowed.windows, out);
  std::cout << windowed.windows.size() << " windows written to " << out;
  if (windowed.skipped_spans > 0) {
    std::cout << " (" << windowed.skipped_spans << " spans shorter than one window skipped)";
  }
  std::cout << "\n";
  return 0;
}

int cmd_features(const ModelConfig& cfg, const std::string& in, const std::string& out) {
  const auto windows = read_windows_csv(in);
  const dataset::FeatureMatrix m = extract_features(windows, cfg.features);
  dataset::write_features_csv(m, out);
  std::cout << m.rows.size() << " feature vectors written to " << out << "\n";
  return 0;
}

int cmd_select(const ModelConfig& cfg, const std::string& in, const std::string& target_text,
               std::uint64_t seed, const std::string& out) {
  dataset::FeatureMatrix m = dataset::read_features_csv(in);
  const SeizureType target = seizure_from_text(target_text);
  if (target == SeizureType::Focal) {
    m = dataset::apply_scheme(m, dataset::LabelScheme::five_class_focal());
  }
  const dataset::FeatureMatrix balanced = dataset::balance_upsample(m);
  const auto [ftrain, feval] = bgwo::fitness_split(balanced);
  const auto result = bgwo::select_features(ftrain, feval, target, cfg.bgwo, seed);
  bgwo::save_mask(result, m.registry(), target, seed, out);
  std::cout << std::count(result.mask.begin(), result.mask.end(), true) << " of "
            << result.mask.size() << " features selected after " << result.iterations
            << " iterations" << (result.early_stopped ? " (early stop)" : "") << "; mask in "
            << out << "\n";
  return 0;
}

int cmd_train(const ModelConfig& cfg, const std::string& in, const std::string& out,
              const std::string& masks_dir) {
  const dataset::FeatureMatrix m = dataset::read_features_csv(in);
  const TrainedModel fitted = fit_model(cfg, m);
  if (fitted.is_ensemble) {
    nbayes::save_ensemble(fitted.ensemble, out);
  } else {
    nbayes::save_model(fitted.single, out);
  }
  if (!masks_dir.empty() && fitted.is_ensemble) {
    fs::create_directories(masks_dir);
    const std::vector<SeizureType> classes = cfg.scheme.classes();
    for (std::size_t k = 0; k < classes.size(); ++k) {
      bgwo::save_mask(fitted.selections[k], m.registry(), classes[k], cfg.seed + k,
                      (fs::path(masks_dir) / ("mask_" + seizure_name(classes[k]) + ".json"))
                          .string());
    }
  }
  std::cout << "model " << cfg.model_id << " written to " << out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& in,
                 const std::string& report_dir) {
  const std::string body = textio::read_file(model_path);
  const bool is_ensemble = body.rfind("pgnbsc-ensemble", 0) == 0;

  dataset::LabelScheme scheme = dataset::LabelScheme::six_class();
  nbayes::NbEnsemble ensemble;
  nbayes::NbClassifier single;
  if (is_ensemble) {
    ensemble = nbayes::load_ensemble(model_path);
    for (SeizureType t : ensemble.targets) {
      if (t == SeizureType::Focal) scheme = dataset::LabelScheme::five_class_focal();
    }
  } else {
    single = nbayes::model_from_text(body, model_path);
    for (const auto& cm : single.classes) {
      if (cm.name == seizure_name(SeizureType::Focal)) {
        scheme = dataset::LabelScheme::five_class_focal();
      }
    }
  }

  const dataset::FeatureMatrix test =
      dataset::apply_scheme(dataset::read_features_csv(in), scheme);
  std::vector<SeizureType> truths, predictions;
  for (const auto& row : test.rows) {
    truths.push_back(row.label);
    if (is_ensemble) {
      predictions.push_back(nbayes::predict_ensemble(ensemble, row.values).resolved);
    } else {
      predictions.push_back(
          seizure_from_text(nbayes::predict(single, single.apply_mask(row.values))));
    }
  }
  const evalreport::EvalReport report = evalreport::build_report(truths, predictions, scheme);
  write_report_files(report, report_dir);
  std::cout << evalreport::summary_text(report);
  std::cout << "report written to " << report_dir << "\n";
  return 0;
}

int cmd_run_all(const ModelConfig& cfg, const std::string& corpus_dir,
                const std::string& report_dir) {
  const Corpus corpus = ensure_corpus(corpus_dir);
  std::cout << "corpus: " << corpus.train.size() << " train / " << corpus.test.size()
            << " test recordings\n";

  const auto t0 = Clock::now();
  const dataset::FeatureMatrix train = features_from_corpus(corpus.train, cfg);
  const dataset::FeatureMatrix test = features_from_corpus(corpus.test, cfg);
  const long preprocess_ms = ms_since(t0);
  std::cout << "features: " << train.rows.size() << " train / " << test.rows.size()
            << " test windows (" << preprocess_ms << " ms)\n";

  const fs::path dir(report_dir);
  fs::create_directories(dir);
  dataset::write_features_csv(train, (dir / "train_features.csv").string());
  dataset::write_features_csv(test, (dir / "test_features.csv").string());

  const dataset::SplitReport split = dataset::split_report(
      dataset::apply_scheme(train, cfg.scheme), dataset::apply_scheme(test, cfg.scheme));
  textio::write_file((dir / "split_report.txt").string(), split.text);
  textio::write_file((dir / "split_report.csv").string(), split.csv);
  std::cout << split.text;

  ModelOutput out = run_model(cfg, train, test);

  const fs::path model_path = dir / "model.txt";
  if (out.is_ensemble) {
    nbayes::save_ensemble(out.ensemble, model_path.string());
    const std::vector<SeizureType> classes = cfg.scheme.classes();
    for (std::size_t k = 0; k < classes.size(); ++k) {
      const std::string mask_name = "mask_" + seizure_name(classes[k]) + ".json";
      bgwo::save_mask(out.selections[k], train.registry(), classes[k], cfg.seed + k,
                      (dir / mask_name).string());
      out.manifest.add_output(mask_name, (dir / mask_name).string());
    }
  } else {
    nbayes::save_model(out.single, model_path.string());
  }
  write_report_files(out.report, dir);

  out.manifest.data["stage_ms"]["preprocess"] = preprocess_ms;
  for (const char* name : {"model.txt", "metrics.csv", "heatmap.csv", "heatmap.svg",
                           "summary.txt", "train_features.csv", "test_features.csv",
                           "split_report.txt", "split_report.csv"}) {
    out.manifest.add_output(name, (dir / name).string());
  }
  textio::write_file((dir / "manifest.json").string(), out.manifest.to_text());

  std::cout << evalreport::summary_text(out.report);
  std::cout << "report written to " << report_dir << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"pgnbsc: seizure classification from EEG recordings\n"
               "Preprocesses recordings (resample/notch/IMF1/window), extracts 247\n"
               "features, optionally selects features with a binary grey wolf\n"
               "optimizer, and trains/evaluates kernel naive-Bayes models."};
  app.name("pgnbsc");
  app.fallthrough(true);
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "INI config file; sections mirror the option groups");

  bgwo::BgwoConfig gb;
  features::FeatureParams gf;
  preprocess::FilterSpec gfl;
  bool plain_gaussian = false;
  bool print_config = false;

  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
  app.add_option("--bgwo.population", gb.population, "Wolf pack size")
      ->capture_default_str();
  app.add_option("--bgwo.max-iterations", gb.max_iterations, "Optimizer iteration budget")
      ->capture_default_str();
  app.add_option("--bgwo.early-stop-window", gb.early_stop_window,
                 "Recent best values examined by the early stop")
      ->capture_default_str();
  app.add_option("--bgwo.early-stop-ratio", gb.early_stop_ratio,
                 "Stop when recent spread < ratio * total spread")
      ->capture_default_str();
  app.add_option("--bgwo.bias-margin", gb.bias_margin,
                 "Leader acceptance margin at the final iteration")
      ->capture_default_str();
  app.add_option("--bgwo.a-start", gb.a_start, "Initial exploration parameter")
      ->capture_default_str();
  app.add_option("--features.entropy-bins", gf.entropy_bins,
                 "Amplitude histogram bins for Shannon entropy")
      ->capture_default_str();
  app.add_option("--features.higuchi-kmax", gf.higuchi_kmax, "Higuchi maximum scale")
      ->capture_default_str();
  app.add_option("--features.spectral-subwin", gf.spectral_subwin,
                 "Spectral entropy sub-window length (samples)")
      ->capture_default_str();
  app.add_option("--features.spectral-hop", gf.spectral_hop,
                 "Spectral entropy sub-window hop (samples)")
      ->capture_default_str();
  app.add_option("--filter.notch-bandwidth-hz", gfl.notch_bandwidth_hz,
                 "Notch -3 dB bandwidth")
      ->capture_default_str();
  app.add_option("--filter.fir-taps", gfl.fir_taps,
                 "Resampler FIR length (odd; 0 = derive from the rate ratio)")
      ->capture_default_str();
  app.add_option("--filter.emd-max-sift", gfl.emd_max_sift, "EMD sifting budget")
      ->capture_default_str();
  app.add_option("--filter.emd-sd-threshold", gfl.emd_sd_threshold,
                 "EMD sifting convergence threshold")
      ->capture_default_str();
  app.add_flag("--nbayes.plain-gaussian", plain_gaussian,
               "Use a single Gaussian per class and feature instead of a kernel density");

  auto* synth = app.add_subcommand("synth", "Generate the deterministic synthetic corpus");
  std::string synth_out;
  std::uint64_t synth_seed = kCorpusSeed;
  synth->add_option("--out", synth_out, "Corpus directory")->required();
  synth->add_option("--seed", synth_seed, "Corpus seed")->capture_default_str();
  synth->configurable();

  auto* pre = app.add_subcommand(
      "preprocess", "Resample, notch, extract IMF1 and window one recording");
  std::string pre_in, pre_ann, pre_out;
  pre->add_option("--in", pre_in, "Recording file (.edf/.rec or signal CSV)")->required();
  pre->add_option("--ann", pre_ann, "Annotation CSV (start_s,stop_s,label)")->required();
  pre->add_option("--out", pre_out, "Output windows CSV")->required();
  pre->configurable();

  auto* feat = app.add_subcommand("features", "Extract feature vectors from windows");
  std::string feat_in, feat_out;
  feat->add_option("--in", feat_in, "Windows CSV")->required();
  feat->add_option("--out", feat_out, "Output features CSV")->required();
  feat->configurable();

  auto* sel = app.add_subcommand("select", "Wrapper feature selection for one class");
  std::string sel_in, sel_target, sel_out;
  std::uint64_t sel_seed = 42;
  sel->add_option("--in", sel_in, "Training features CSV")->required();
  sel->add_option("--target", sel_target,
                  "Target class (absence, complex_partial, myoclonic, simple_partial, "
                  "tonic, tonic_clonic, or focal)")
      ->required();
  sel->add_option("--seed", sel_seed, "Optimizer seed")->capture_default_str();
  sel->add_option("--out", sel_out, "Output mask file")->required();
  sel->configurable();

  auto* train = app.add_subcommand("train", "Train a model from a features CSV");
  std::string train_in, train_out, train_masks;
  int train_model = 3;
  std::uint64_t train_seed = 42;
  train->add_option("--in", train_in, "Training features CSV")->required();
  train->add_option("--model", train_model, "Model: 1, 2 or 3")->capture_default_str();
  train->add_option("--seed", train_seed, "Base seed for per-class selection")
      ->capture_default_str();
  train->add_option("--out", train_out, "Output model file")->required();
  train->add_option("--masks-dir", train_masks, "Also write per-class mask files here");
  train->configurable();

  auto* eval = app.add_subcommand("evaluate", "Evaluate a model on a features CSV");
  std::string eval_model, eval_in, eval_report;
  eval->add_option("--model", eval_model, "Model file from `train` or `run-all`")->required();
  eval->add_option("--in", eval_in, "Test features CSV")->required();
  eval->add_option("--report", eval_report, "Report directory")->required();
  eval->configurable();

  auto* runall = app.add_subcommand(
      "run-all", "Corpus -> preprocess -> features -> select -> train -> report");
  int runall_model = 3;
  std::uint64_t runall_seed = 42;
  std::string runall_corpus = "corpus", runall_report = "report";
  runall->add_option("--model", runall_model, "Model: 1, 2 or 3")->capture_default_str();
  runall->add_option("--seed", runall_seed, "Base seed")->capture_default_str();
  runall->add_option("--corpus", runall_corpus, "Corpus directory (built when missing)")
      ->capture_default_str();
  runall->add_option("--report", runall_report, "Report directory")->capture_default_str();
  runall->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (print_config) {
      std::cout << app.config_to_str(true, true);
      return 0;
    }
    auto make_config = [&](int model_id, std::uint64_t seed) {
      ModelConfig cfg = ModelConfig::for_model(model_id, seed);
      cfg.bgwo = gb;
      cfg.features = gf;
      cfg.filter = gfl;
      cfg.plain_gaussian = plain_gaussian;
      cfg.validate();
      return cfg;
    };

    if (app.got_subcommand(synth)) return cmd_synth(synth_out, synth_seed);
    if (app.got_subcommand(pre)) {
      return cmd_preprocess(make_config(3, 42), pre_in, pre_ann, pre_out);
    }
    if (app.got_subcommand(feat)) return cmd_features(make_config(3, 42), feat_in, feat_out);
    if (app.got_subcommand(sel)) {
      return cmd_select(make_config(3, sel_seed), sel_in, sel_target, sel_seed, sel_out);
    }
    if (app.got_subcommand(train)) {
      return cmd_train(make_config(train_model, train_seed), train_in, train_out,
                       train_masks);
    }
    if (app.got_subcommand(eval)) return cmd_evaluate(eval_model, eval_in, eval_report);
    if (app.got_subcommand(runall)) {
      return cmd_run_all(make_config(runall_model, runall_seed), runall_corpus,
                         runall_report);
    }
    std::cerr << app.help();
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace pgnbsc::pipeline
