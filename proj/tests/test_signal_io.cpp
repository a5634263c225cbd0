#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/signal_io.hpp"
#include "pgnbsc/textio.hpp"
#include "pgnbsc/types.hpp"

using namespace pgnbsc;
namespace fs = std::filesystem;

namespace {

std::string tmp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pgnbsc_test_signal_io";
  fs::create_directories(dir);
  return (dir / name).string();
}

Recording small_recording() {
  Recording rec;
  rec.source_id = "unit";
  rec.rate_hz = 250.0;
  rec.channels.push_back({"a", {0.0, 1.5, -2.25, 3.0, 0.125}});
  rec.channels.push_back({"b", {5.0, -5.0, 0.0, 2.5, -1.75}});
  return rec;
}

}  // namespace

TEST_SUITE("signal_io") {

TEST_CASE("csv recording round trip is exact") {
  const Recording rec = small_recording();
  const std::string path = tmp_path("rt.csv");
  signal_io::write_recording_csv(rec, path);
  const Recording back = signal_io::read_recording_csv(path);
  CHECK(back.rate_hz == rec.rate_hz);
  REQUIRE(back.channels.size() == rec.channels.size());
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    CHECK(back.channels[c].label == rec.channels[c].label);
    REQUIRE(back.channels[c].samples.size() == rec.channels[c].samples.size());
    for (std::size_t i = 0; i < rec.channels[c].samples.size(); ++i) {
      CHECK(back.channels[c].samples[i] == rec.channels[c].samples[i]);
    }
  }
}

TEST_CASE("read_recording dispatches on extension") {
  const Recording rec = small_recording();
  const std::string path = tmp_path("dispatch.csv");
  signal_io::write_recording_csv(rec, path);
  CHECK(signal_io::read_recording(path).channels.size() == 2);
  CHECK_THROWS_AS(signal_io::read_recording(tmp_path("missing.csv")), IoError);
}

TEST_CASE("edf write/read round trip preserves shape and quantized samples") {
  const Recording rec = signal_io::synth_recording(SeizureType::Tonic, 3.0, 256.0, 11);
  const std::string path = tmp_path("rt.edf");
  signal_io::write_recording_edf(rec, path);
  const Recording back = signal_io::read_recording_edf(path);

  CHECK(back.rate_hz == doctest::Approx(256.0));
  REQUIRE(back.channels.size() == rec.channels.size());
  REQUIRE(back.length() == rec.length());

  // int16 quantization: error bounded by one digital step of the value span
  double pmin = 1e300, pmax = -1e300;
  for (const auto& ch : rec.channels) {
    for (double v : ch.samples) {
      pmin = std::min(pmin, v);
      pmax = std::max(pmax, v);
    }
  }
  const double step = (std::ceil(pmax) - std::floor(pmin)) / 65535.0;
  double worst = 0.0;
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    for (std::size_t i = 0; i < rec.length(); ++i) {
      worst = std::max(worst,
                       std::abs(back.channels[c].samples[i] - rec.channels[c].samples[i]));
    }
  }
  CHECK(worst <= step);
  // labels carry the montage name with an EEG prefix and reference suffix
  CHECK(back.channels[0].label.find("Fp1") != std::string::npos);
}

TEST_CASE("edf writer rejects fractional rates and partial records") {
  Recording rec = small_recording();
  rec.rate_hz = 250.5;
  CHECK_THROWS_AS(signal_io::write_recording_edf(rec, tmp_path("bad.edf")), Error);
  rec = small_recording();  // 5 samples at 250 Hz: not a whole second
  CHECK_THROWS_AS(signal_io::write_recording_edf(rec, tmp_path("bad.edf")), Error);
}

TEST_CASE("select_montage strips suffixes and matches case-insensitively") {
  Recording rec;
  rec.source_id = "m";
  rec.rate_hz = 250.0;
  const MontageSpec spec = MontageSpec::standard_10_20();
  for (const auto& name : spec.required_names) {
    std::string label = "EEG " + name + "-REF";
    for (auto& ch : label) ch = static_cast<char>(std::toupper(ch));
    rec.channels.push_back({label, {0.0, 1.0}});
  }
  rec.channels.push_back({"EKG", {0.0, 1.0}});  // extra channel is dropped

  const Recording sel = signal_io::select_montage(rec, spec);
  REQUIRE(sel.channels.size() == spec.required_names.size());
  for (std::size_t i = 0; i < spec.required_names.size(); ++i) {
    CHECK(sel.channels[i].label == spec.required_names[i]);  // canonical rename
  }
}

TEST_CASE("select_montage reports missing and ambiguous channels") {
  Recording rec;
  rec.source_id = "m";
  rec.rate_hz = 250.0;
  rec.channels.push_back({"EEG FP1-REF", {0.0}});
  CHECK_THROWS_AS(signal_io::select_montage(rec, MontageSpec::standard_10_20()),
                  MissingChannel);

  const MontageSpec one{{"Fp1"}};
  rec.channels.push_back({"EEG FP1-LE", {0.0}});
  CHECK_THROWS_AS(signal_io::select_montage(rec, one), AmbiguousChannel);
}

TEST_CASE("annotation io round-trips sorted and validates") {
  const std::string path = tmp_path("ann.csv");
  std::vector<SeizureAnnotation> anns = {{12.0, 14.0, SeizureType::Tonic},
                                         {1.5, 4.25, SeizureType::Absence}};
  signal_io::write_annotations(anns, path);
  const auto back = signal_io::read_annotations(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].start_s == 1.5);  // sorted by start
  CHECK(back[0].label == SeizureType::Absence);
  CHECK(back[1].stop_s == 14.0);

  textio::write_file(path, "# bad interval\n3.0,2.0,tnsz\n");
  CHECK_THROWS_AS(signal_io::read_annotations(path), InvertedInterval);
  textio::write_file(path, "1.0,2.0,zzsz\n");
  CHECK_THROWS_AS(signal_io::read_annotations(path), UnknownLabel);
}

TEST_CASE("synth recordings are deterministic per seed and class-shaped") {
  const Recording a = signal_io::synth_recording(SeizureType::Absence, 2.0, 256.0, 5);
  const Recording b = signal_io::synth_recording(SeizureType::Absence, 2.0, 256.0, 5);
  const Recording c = signal_io::synth_recording(SeizureType::Absence, 2.0, 256.0, 6);
  REQUIRE(a.channels.size() == kMontageChannels);
  CHECK(a.length() == 512);
  CHECK(a.channels[0].samples == b.channels[0].samples);
  CHECK(a.channels[0].samples != c.channels[0].samples);
  CHECK(a.source_id != c.source_id);
  CHECK_THROWS_AS(signal_io::synth_recording(SeizureType::Focal, 2.0, 256.0, 5), Error);
}

TEST_CASE("focal templates drive only their designated channels") {
  const Recording sp =
      signal_io::synth_recording(SeizureType::SimplePartial, 4.0, 250.0, 9);
  const Recording cp =
      signal_io::synth_recording(SeizureType::ComplexPartial, 4.0, 250.0, 9);
  auto power = [](const Channel& ch) {
    double s = 0.0;
    for (double v : ch.samples) s += v * v;
    return s / ch.samples.size();
  };
  // channel F7 (index 10) carries the rhythm in both; Cz (17) only in
  // complex partial; Fp2 (index 1) stays noise-only in both
  CHECK(power(sp.channels[10]) > 4.0 * power(sp.channels[1]));
  CHECK(power(cp.channels[17]) > 4.0 * power(cp.channels[1]));
  CHECK(power(sp.channels[17]) < 2.0 * power(sp.channels[1]));
}

}  // TEST_SUITE
