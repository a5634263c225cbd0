#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pgnbsc/dataset.hpp"
#include "pgnbsc/errors.hpp"
#include "pgnbsc/nbayes.hpp"
#include "pgnbsc/textio.hpp"

using namespace pgnbsc;
using namespace pgnbsc::nbayes;

namespace {

features::FeatureVector row2(SeizureType label, const std::string& source, int index,
                             double a, double b) {
  features::FeatureVector fv;
  fv.values = {a, b};
  fv.names = {"c1.std_dev", "c2.energy"};
  fv.label = label;
  fv.source_id = source;
  fv.window_index = index;
  return fv;
}

// deliberately separate reimplementation of the expected scoring math, kept
// in test code as the reference the classifier must agree with
double oracle_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * (v.size() - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - (pos - lo)) + v[lo + 1] * (pos - lo);
}

double oracle_bandwidth(const std::vector<double>& col) {
  double mean = 0.0;
  for (double x : col) mean += x;
  mean /= col.size();
  double var = 0.0;
  for (double x : col) var += (x - mean) * (x - mean);
  const double sigma = std::sqrt(var / col.size());
  const double iqr = oracle_quantile(col, 0.75) - oracle_quantile(col, 0.25);
  const double h = 0.9 * std::min(sigma, iqr / 1.34) * std::pow(double(col.size()), -0.2);
  return std::max(h, 1e-6 * (1.0 + std::fabs(mean)));
}

double oracle_log_posterior(const std::vector<std::vector<double>>& cols, double n_classes,
                            const std::vector<double>& x) {
  double score = -std::log(n_classes);
  for (std::size_t f = 0; f < cols.size(); ++f) {
    const double h = oracle_bandwidth(cols[f]);
    double dens = 0.0;
    for (double v : cols[f]) dens += std::exp(-0.5 * ((x[f] - v) / h) * ((x[f] - v) / h));
    dens /= cols[f].size() * h * std::sqrt(2.0 * std::acos(-1.0));
    score += std::log(std::max(dens, 1e-300));
  }
  return score;
}

std::string tmp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pgnbsc_test_nbayes";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("nbayes") {

TEST_CASE("log_posterior matches a direct kernel sum on random cases") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> nrows(1, 5);

  for (int trial = 0; trial < 100; ++trial) {
    dataset::FeatureMatrix m;
    m.scheme = dataset::LabelScheme::six_class();
    std::vector<std::vector<double>> cols_a(2), cols_b(2);
    const int na = nrows(rng), nb = nrows(rng);
    for (int i = 0; i < na; ++i) {
      const double v0 = u(rng), v1 = u(rng);
      m.rows.push_back(row2(SeizureType::Absence, "sa", i, v0, v1));
      cols_a[0].push_back(v0);
      cols_a[1].push_back(v1);
    }
    for (int i = 0; i < nb; ++i) {
      const double v0 = u(rng), v1 = u(rng);
      m.rows.push_back(row2(SeizureType::Tonic, "sb", i, v0, v1));
      cols_b[0].push_back(v0);
      cols_b[1].push_back(v1);
    }
    const NbClassifier c =
        train(m, {true, true}, {SeizureType::Absence, SeizureType::Tonic});
    const std::vector<double> x = {u(rng), u(rng)};
    const auto scores = log_posterior(c, x);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == doctest::Approx(oracle_log_posterior(cols_a, 2.0, x)).epsilon(1e-9));
    CHECK(scores[1] == doctest::Approx(oracle_log_posterior(cols_b, 2.0, x)).epsilon(1e-9));
  }
}

TEST_CASE("plain gaussian mode equals the closed-form likelihood") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  const std::vector<double> col = {1.0, 2.0, 4.0, 5.0};
  for (std::size_t i = 0; i < col.size(); ++i) {
    m.rows.push_back(row2(SeizureType::Absence, "s", int(i), col[i], 0.5));
    m.rows.push_back(row2(SeizureType::Tonic, "t", int(i), col[i] + 10.0, 0.5));
  }
  const NbClassifier c =
      train(m, {true, false}, {SeizureType::Absence, SeizureType::Tonic}, true);

  const double mean = 3.0;
  const double sigma = std::sqrt((4.0 + 1.0 + 1.0 + 4.0) / 4.0);
  const double x = 2.2;
  const double expected = -std::log(2.0) +
                          std::log(std::exp(-0.5 * (x - mean) * (x - mean) / (sigma * sigma)) /
                                   (sigma * std::sqrt(2.0 * std::acos(-1.0))));
  CHECK(log_posterior(c, {x})[0] == doctest::Approx(expected).epsilon(1e-12));
  REQUIRE(c.classes[0].values[0].size() == 1);  // collapsed to the mean
}

TEST_CASE("bandwidth floor keeps constant features usable") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  for (int i = 0; i < 4; ++i) {
    m.rows.push_back(row2(SeizureType::Absence, "s", i, 7.0, double(i)));
    m.rows.push_back(row2(SeizureType::Tonic, "t", i, -7.0, double(i)));
  }
  const NbClassifier c =
      train(m, {true, true}, {SeizureType::Absence, SeizureType::Tonic});
  CHECK(c.classes[0].bandwidth[0] == doctest::Approx(8e-6));  // 1e-6 * (1 + 7)
  const auto scores = log_posterior(c, {7.0, 1.5});
  CHECK(std::isfinite(scores[0]));
  CHECK(std::isfinite(scores[1]));
  CHECK(scores[0] > scores[1]);
}

TEST_CASE("prediction ties resolve to the earlier class") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  for (int i = 0; i < 3; ++i) {
    m.rows.push_back(row2(SeizureType::Tonic, "a", i, double(i), 1.0));
    m.rows.push_back(row2(SeizureType::Absence, "b", i, double(i), 1.0));
  }
  const NbClassifier c =
      train(m, {true, true}, {SeizureType::Tonic, SeizureType::Absence});
  CHECK(predict(c, {1.0, 1.0}) == seizure_name(SeizureType::Tonic));
}

TEST_CASE("train rejects unusable inputs") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  m.rows.push_back(row2(SeizureType::Absence, "s", 0, 1.0, 2.0));
  CHECK_THROWS_AS(train(m, {true, true}, {SeizureType::Absence, SeizureType::Tonic}),
                  EmptyClass);
  CHECK_THROWS_AS(train(m, {false, false}, {SeizureType::Absence}), EmptyMask);
  CHECK_THROWS_AS(train(m, {true}, {SeizureType::Absence}), RegistryMismatch);
  CHECK_THROWS_AS(train_one_vs_all(m, {true, true}, SeizureType::Tonic), EmptyClass);
}

TEST_CASE("apply_mask projects registry columns") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  m.rows.push_back(row2(SeizureType::Absence, "s", 0, 1.0, 2.0));
  m.rows.push_back(row2(SeizureType::Tonic, "t", 0, 5.0, 6.0));
  const NbClassifier c =
      train(m, {false, true}, {SeizureType::Absence, SeizureType::Tonic});
  CHECK(c.apply_mask({10.0, 20.0}) == std::vector<double>{20.0});
  CHECK(c.feature_names == std::vector<std::string>{"c2.energy"});
  CHECK_THROWS_AS(c.apply_mask({1.0}), WidthMismatch);
  CHECK_THROWS_AS(log_posterior(c, {1.0, 2.0}), WidthMismatch);
}

TEST_CASE("ensemble vote resolves by max log-odds with forced fallback") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  for (int i = 0; i < 4; ++i) {
    m.rows.push_back(row2(SeizureType::Absence, "a", i, -5.0 + 0.1 * i, 0.0));
    m.rows.push_back(row2(SeizureType::Tonic, "t", i, 5.0 + 0.1 * i, 0.0));
  }
  NbEnsemble e;
  e.targets = {SeizureType::Absence, SeizureType::Tonic};
  e.classifiers.push_back(train_one_vs_all(m, {true, true}, SeizureType::Absence));
  e.classifiers.push_back(train_one_vs_all(m, {true, true}, SeizureType::Tonic));

  const EnsembleVote near_a = predict_ensemble(e, {-5.0, 0.0});
  CHECK(near_a.resolved == SeizureType::Absence);
  CHECK(near_a.votes[0]);
  CHECK(near_a.log_odds.size() == 2);

  // far from both clusters: typically nobody votes, the best loser wins
  const EnsembleVote forced = predict_ensemble(e, {300.0, 0.0});
  CHECK((forced.resolved == SeizureType::Absence || forced.resolved == SeizureType::Tonic));
}

TEST_CASE("model text round trip is byte-stable and prediction-identical") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 6; ++i) {
    m.rows.push_back(row2(SeizureType::Absence, "a", i, u(rng), u(rng)));
    m.rows.push_back(row2(SeizureType::Tonic, "t", i, u(rng) + 2.5, u(rng)));
  }
  const NbClassifier c =
      train(m, {true, true}, {SeizureType::Absence, SeizureType::Tonic});
  const std::string text = model_to_text(c);
  const NbClassifier back = model_from_text(text, "unit");
  CHECK(model_to_text(back) == text);
  CHECK(back.plain_gaussian == c.plain_gaussian);
  CHECK(back.registry_width == c.registry_width);
  for (double x0 : {-1.0, 0.3, 2.8}) {
    CHECK(predict(back, {x0, 0.1}) == predict(c, {x0, 0.1}));
    CHECK(log_posterior(back, {x0, 0.1}) == log_posterior(c, {x0, 0.1}));
  }

  const std::string path = tmp_path("model.txt");
  save_model(c, path);
  const NbClassifier loaded = load_model(path);
  CHECK(model_to_text(loaded) == text);

  CHECK_THROWS_AS(model_from_text("pgnbsc-nb 1\nmode kde\n", "unit"), MalformedFile);
  CHECK_THROWS_AS(model_from_text("other-format 9\n", "unit"), MalformedFile);
}

TEST_CASE("ensemble serialization round trips") {
  dataset::FeatureMatrix m;
  m.scheme = dataset::LabelScheme::six_class();
  for (int i = 0; i < 4; ++i) {
    m.rows.push_back(row2(SeizureType::Absence, "a", i, double(i), 1.0));
    m.rows.push_back(row2(SeizureType::Tonic, "t", i, double(i) + 4.0, 1.0));
  }
  NbEnsemble e;
  e.targets = {SeizureType::Absence, SeizureType::Tonic};
  e.classifiers.push_back(train_one_vs_all(m, {true, false}, SeizureType::Absence));
  e.classifiers.push_back(train_one_vs_all(m, {false, true}, SeizureType::Tonic));

  const std::string path = tmp_path("ensemble.txt");
  save_ensemble(e, path);
  const NbEnsemble back = load_ensemble(path);
  REQUIRE(back.targets == e.targets);
  REQUIRE(back.classifiers.size() == 2);
  CHECK(model_to_text(back.classifiers[0]) == model_to_text(e.classifiers[0]));
  CHECK(model_to_text(back.classifiers[1]) == model_to_text(e.classifiers[1]));
  const std::vector<double> x = {1.5, 1.0};
  CHECK(predict_ensemble(back, x).resolved == predict_ensemble(e, x).resolved);
}

}  // TEST_SUITE
