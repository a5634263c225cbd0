#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "pgnbsc/dataset.hpp"
#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

using namespace pgnbsc;
using namespace pgnbsc::dataset;

namespace {

features::FeatureVector row(SeizureType label, const std::string& source, int index,
                            std::vector<double> values) {
  features::FeatureVector fv;
  fv.values = std::move(values);
  fv.names = {"a.std_dev", "a.energy", "b.katz_fd"};
  fv.names.resize(fv.values.size());
  for (std::size_t i = 3; i < fv.values.size(); ++i) {
    fv.names[i] = "x" + std::to_string(i) + ".energy";
  }
  fv.label = label;
  fv.source_id = source;
  fv.window_index = index;
  return fv;
}

FeatureMatrix matrix_with_counts(const std::map<SeizureType, int>& counts) {
  FeatureMatrix m;
  m.scheme = LabelScheme::six_class();
  int idx = 0;
  for (const auto& [label, count] : counts) {
    for (int i = 0; i < count; ++i) {
      m.rows.push_back(row(label, "src_" + seizure_name(label), i,
                           {double(idx), double(i), 0.5 * idx}));
      ++idx;
    }
  }
  return m;
}

std::string tmp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pgnbsc_test_dataset";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("label scheme maps partial types to focal in five-class mode") {
  const LabelScheme six = LabelScheme::six_class();
  const LabelScheme five = LabelScheme::five_class_focal();
  CHECK(six.map(SeizureType::ComplexPartial) == SeizureType::ComplexPartial);
  CHECK(five.map(SeizureType::ComplexPartial) == SeizureType::Focal);
  CHECK(five.map(SeizureType::SimplePartial) == SeizureType::Focal);
  CHECK(five.map(SeizureType::Tonic) == SeizureType::Tonic);
  CHECK(five.map(SeizureType::Focal) == SeizureType::Focal);  // idempotent
  CHECK(six.classes().size() == 6);
  CHECK(five.classes().size() == 5);
  CHECK(five.classes()[1] == SeizureType::Focal);
  CHECK(six.name() != five.name());
}

TEST_CASE("apply_scheme rewrites labels and preserves order") {
  FeatureMatrix m = matrix_with_counts(
      {{SeizureType::SimplePartial, 2}, {SeizureType::Tonic, 1}});
  const FeatureMatrix five = apply_scheme(m, LabelScheme::five_class_focal());
  REQUIRE(five.rows.size() == 3);
  CHECK(five.rows[0].label == SeizureType::Focal);
  CHECK(five.rows[1].label == SeizureType::Focal);
  CHECK(five.rows[2].label == SeizureType::Tonic);
  CHECK(five.rows[0].values == m.rows[0].values);
  const auto counts = five.class_counts();
  CHECK(counts.at(SeizureType::Focal) == 2);
}

TEST_CASE("balance_upsample duplicates minorities by a rounded factor") {
  const FeatureMatrix m = matrix_with_counts(
      {{SeizureType::Absence, 100}, {SeizureType::Tonic, 30}});
  const FeatureMatrix b = balance_upsample(m);
  const auto counts = b.class_counts();
  CHECK(counts.at(SeizureType::Absence) == 100);  // factor 1
  CHECK(counts.at(SeizureType::Tonic) == 90);     // factor 3
  CHECK(b.rows.size() == 190);

  // duplicates are bytewise copies of originals, appended after them
  CHECK(b.rows[130].source_id == b.rows[100].source_id);
  CHECK(b.rows[130].window_index == b.rows[100].window_index);
  CHECK(b.rows[130].values == b.rows[100].values);
}

TEST_CASE("balance_upsample leaves near-balanced data alone") {
  const FeatureMatrix m = matrix_with_counts(
      {{SeizureType::Absence, 100}, {SeizureType::Tonic, 70}});
  const FeatureMatrix b = balance_upsample(m);
  CHECK(b.rows.size() == 170);  // round(100/70) = 1
  CHECK(b.class_counts().at(SeizureType::Tonic) == 70);
}

TEST_CASE("validate rejects rows with diverging registries") {
  FeatureMatrix m = matrix_with_counts({{SeizureType::Absence, 2}});
  m.rows[1].names[2] = "b.energy";
  CHECK_THROWS_AS(m.validate(), RegistryMismatch);
}

TEST_CASE("split_report lists per-class window counts and 1.8 s durations") {
  FeatureMatrix train = matrix_with_counts({{SeizureType::Absence, 253}});
  FeatureMatrix test = matrix_with_counts({{SeizureType::Absence, 10}});
  for (auto& r : test.rows) r.source_id = "other";
  const SplitReport rep = split_report(train, test);
  CHECK(rep.text.find("253") != std::string::npos);
  CHECK(rep.text.find("455.4") != std::string::npos);  // 253 x 1.8 s
  CHECK(rep.text.find("18.0") != std::string::npos);   // 10 x 1.8 s
  CHECK(rep.csv.find("absence,253,10,455.4,18.0") != std::string::npos);
}

TEST_CASE("check_disjoint_sources trips on shared recordings") {
  FeatureMatrix train = matrix_with_counts({{SeizureType::Absence, 2}});
  FeatureMatrix test = matrix_with_counts({{SeizureType::Absence, 1}});
  CHECK_THROWS_AS(check_disjoint_sources(train, test), Error);
  for (auto& r : test.rows) r.source_id = "elsewhere";
  CHECK_NOTHROW(check_disjoint_sources(train, test));
}

TEST_CASE("features csv round trip is exact") {
  FeatureMatrix m = matrix_with_counts(
      {{SeizureType::Myoclonic, 3}, {SeizureType::TonicClonic, 2}});
  m.rows[0].values = {0.1, -2.5e-17, 3.141592653589793};
  const std::string path = tmp_path("rt.csv");
  write_features_csv(m, path);
  const FeatureMatrix back = read_features_csv(path);
  REQUIRE(back.rows.size() == m.rows.size());
  CHECK(back.registry() == m.registry());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    CHECK(back.rows[i].values == m.rows[i].values);
    CHECK(back.rows[i].label == m.rows[i].label);
    CHECK(back.rows[i].source_id == m.rows[i].source_id);
    CHECK(back.rows[i].window_index == m.rows[i].window_index);
  }
}

TEST_CASE("features csv reader rejects malformed input") {
  const std::string path = tmp_path("bad.csv");
  textio::write_file(path, "a.std_dev,label,source_id,window_index\nnot_a_number,absence,s,0\n");
  CHECK_THROWS_AS(read_features_csv(path), MalformedFile);
  textio::write_file(path, "a.std_dev,label,source_id,window_index\n1.0,absence,s\n");
  CHECK_THROWS_AS(read_features_csv(path), MalformedFile);
}

}  // TEST_SUITE
