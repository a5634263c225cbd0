#include "pgnbsc/nbayes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::nbayes {

namespace {

constexpr double kDensityFloor = 1e-300;

double population_std(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Linear-interpolation quantile (the common "R-7" definition).
double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

// Silverman's rule of thumb with a positivity floor for degenerate spreads.
double silverman_bandwidth(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  const double floor = 1e-6 * (1.0 + std::fabs(mean));
  const double sigma = population_std(v, mean);
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  const double spread = std::min(sigma, iqr / 1.34);
  const double h = 0.9 * spread * std::pow(static_cast<double>(v.size()), -0.2);
  return std::max(h, floor);
}

std::vector<int> mask_to_indices(const std::vector<bool>& mask, std::size_t width) {
  if (mask.size() != width) {
    throw RegistryMismatch("mask width " + std::to_string(mask.size()) +
                           " does not match registry width " + std::to_string(width));
  }
  std::vector<int> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) idx.push_back(static_cast<int>(i));
  }
  if (idx.empty()) throw EmptyMask("mask selects no features");
  return idx;
}

NbClassifier train_named(const dataset::FeatureMatrix& m, const std::vector<bool>& mask,
                         const std::vector<std::string>& class_names,
                         const std::vector<std::vector<const features::FeatureVector*>>& members,
                         bool plain_gaussian) {
  NbClassifier c;
  c.registry_width = m.registry().size();
  c.plain_gaussian = plain_gaussian;
  c.feature_indices = mask_to_indices(mask, c.registry_width);
  for (int idx : c.feature_indices) c.feature_names.push_back(m.registry()[idx]);

  for (std::size_t k = 0; k < class_names.size(); ++k) {
    if (members[k].empty()) {
      throw EmptyClass("class '" + class_names[k] + "' has no training rows");
    }
    NbClassifier::ClassModel model;
    model.name = class_names[k];
    model.values.resize(c.feature_indices.size());
    model.bandwidth.resize(c.feature_indices.size());
    for (std::size_t f = 0; f < c.feature_indices.size(); ++f) {
      std::vector<double>& col = model.values[f];
      col.reserve(members[k].size());
      for (const auto* row : members[k]) col.push_back(row->values[c.feature_indices[f]]);
      const double h = silverman_bandwidth(col);
      if (plain_gaussian) {
        double mean = 0.0;
        for (double x : col) mean += x;
        mean /= static_cast<double>(col.size());
        const double sigma = population_std(col, mean);
        model.bandwidth[f] = std::max(sigma, 1e-6 * (1.0 + std::fabs(mean)));
        col.assign(1, mean);
      } else {
        model.bandwidth[f] = h;
      }
    }
    c.classes.push_back(std::move(model));
  }
  return c;
}

}  // namespace

NbClassifier train(const dataset::FeatureMatrix& m, const std::vector<bool>& mask,
                   const std::vector<SeizureType>& classes, bool plain_gaussian) {
  m.validate();
  std::vector<std::string> names;
  std::vector<std::vector<const features::FeatureVector*>> members(classes.size());
  for (SeizureType t : classes) names.push_back(seizure_name(t));
  for (const auto& row : m.rows) {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      if (row.label == classes[k]) {
        members[k].push_back(&row);
        break;
      }
    }
  }
  return train_named(m, mask, names, members, plain_gaussian);
}

NbClassifier train_one_vs_all(const dataset::FeatureMatrix& m, const std::vector<bool>& mask,
                              SeizureType target, bool plain_gaussian) {
  m.validate();
  std::vector<std::string> names = {seizure_name(target), "rest"};
  std::vector<std::vector<const features::FeatureVector*>> members(2);
  for (const auto& row : m.rows) {
    members[row.label == target ? 0 : 1].push_back(&row);
  }
  return train_named(m, mask, names, members, plain_gaussian);
}

std::vector<double> NbClassifier::apply_mask(const std::vector<double>& full) const {
  if (full.size() != registry_width) {
    throw WidthMismatch("expected full vector of width " + std::to_string(registry_width) +
                        ", got " + std::to_string(full.size()));
  }
  std::vector<double> x;
  x.reserve(feature_indices.size());
  for (int idx : feature_indices) x.push_back(full[idx]);
  return x;
}

std::vector<double> log_posterior(const NbClassifier& c, const std::vector<double>& x) {
  if (x.size() != c.feature_indices.size()) {
    throw WidthMismatch("expected masked vector of width " +
                        std::to_string(c.feature_indices.size()) + ", got " +
                        std::to_string(x.size()));
  }
  constexpr double inv_sqrt_2pi = 0.3989422804014327;  // 1/sqrt(2*pi)
  std::vector<double> scores;
  scores.reserve(c.classes.size());
  const double log_prior = -std::log(static_cast<double>(c.classes.size()));
  for (const auto& model : c.classes) {
    double score = log_prior;
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double h = model.bandwidth[f];
      double density = 0.0;
      for (double v : model.values[f]) {
        const double z = (x[f] - v) / h;
        density += std::exp(-0.5 * z * z);
      }
      density *= inv_sqrt_2pi / (h * static_cast<double>(model.values[f].size()));
      score += std::log(std::max(density, kDensityFloor));
    }
    scores.push_back(score);
  }
  return scores;
}

std::string predict(const NbClassifier& c, const std::vector<double>& x) {
  const std::vector<double> scores = log_posterior(c, x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = k;  // strict: ties keep the earlier class
  }
  return c.classes[best].name;
}

EnsembleVote predict_ensemble(const NbEnsemble& e, const std::vector<double>& x) {
  EnsembleVote out;
  out.votes.reserve(e.classifiers.size());
  out.log_odds.reserve(e.classifiers.size());
  for (const auto& c : e.classifiers) {
    const std::vector<double> scores = log_posterior(c, c.apply_mask(x));
    const double odds = scores[0] - scores[1];  // positive class is declared first
    out.votes.push_back(odds > 0.0);
    out.log_odds.push_back(odds);
  }
  int best = -1;
  for (std::size_t k = 0; k < e.classifiers.size(); ++k) {
    if (!out.votes[k]) continue;
    if (best < 0 || out.log_odds[k] > out.log_odds[best]) best = static_cast<int>(k);
  }
  if (best < 0) {  // forced decision: nobody claimed the sample
    best = 0;
    for (std::size_t k = 1; k < e.classifiers.size(); ++k) {
      if (out.log_odds[k] > out.log_odds[best]) best = static_cast<int>(k);
    }
  }
  out.resolved = e.targets[best];
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s, const std::string& origin) {
  return textio::parse_double(s, origin);  // strtod handles the %a format
}

std::vector<std::string> next_tokens(std::istringstream& is, const std::string& origin) {
  std::string line;
  while (std::getline(is, line)) {
    if (!textio::trim(line).empty()) return textio::split(textio::trim(line), ' ');
  }
  throw MalformedFile(origin + ": truncated model file");
}

void expect(const std::vector<std::string>& tokens, const std::string& word,
            const std::string& origin) {
  if (tokens.empty() || tokens[0] != word) {
    throw MalformedFile(origin + ": expected '" + word + "' record");
  }
}

}  // namespace

std::string model_to_text(const NbClassifier& c) {
  std::ostringstream os;
  os << "pgnbsc-nb 1\n";
  os << "mode " << (c.plain_gaussian ? "gaussian" : "kde") << "\n";
  os << "registry_width " << c.registry_width << "\n";
  os << "features " << c.feature_indices.size() << "\n";
  for (std::size_t f = 0; f < c.feature_indices.size(); ++f) {
    os << "f " << c.feature_indices[f] << " " << c.feature_names[f] << "\n";
  }
  os << "classes " << c.classes.size() << "\n";
  for (const auto& model : c.classes) {
    os << "class " << model.name << " " << model.values.front().size() << "\n";
    os << "bw";
    for (double h : model.bandwidth) os << " " << hex_double(h);
    os << "\n";
    for (std::size_t f = 0; f < model.values.size(); ++f) {
      os << "v " << f;
      for (double v : model.values[f]) os << " " << hex_double(v);
      os << "\n";
    }
  }
  os << "end\n";
  return os.str();
}

NbClassifier model_from_text(const std::string& body, const std::string& origin) {
  std::istringstream is(body);
  NbClassifier c;

  auto tokens = next_tokens(is, origin);
  if (tokens.size() != 2 || tokens[0] != "pgnbsc-nb" || tokens[1] != "1") {
    throw MalformedFile(origin + ": not a version-1 model file");
  }
  tokens = next_tokens(is, origin);
  expect(tokens, "mode", origin);
  c.plain_gaussian = tokens.at(1) == "gaussian";
  tokens = next_tokens(is, origin);
  expect(tokens, "registry_width", origin);
  c.registry_width = static_cast<std::size_t>(textio::parse_long(tokens.at(1), origin));
  tokens = next_tokens(is, origin);
  expect(tokens, "features", origin);
  const long n_features = textio::parse_long(tokens.at(1), origin);
  for (long f = 0; f < n_features; ++f) {
    tokens = next_tokens(is, origin);
    expect(tokens, "f", origin);
    c.feature_indices.push_back(static_cast<int>(textio::parse_long(tokens.at(1), origin)));
    c.feature_names.push_back(tokens.at(2));
  }
  tokens = next_tokens(is, origin);
  expect(tokens, "classes", origin);
  const long n_classes = textio::parse_long(tokens.at(1), origin);
  for (long k = 0; k < n_classes; ++k) {
    tokens = next_tokens(is, origin);
    expect(tokens, "class", origin);
    NbClassifier::ClassModel model;
    model.name = tokens.at(1);
    const long n_rows = textio::parse_long(tokens.at(2), origin);
    tokens = next_tokens(is, origin);
    expect(tokens, "bw", origin);
    if (static_cast<long>(tokens.size()) != n_features + 1) {
      throw MalformedFile(origin + ": bandwidth record has wrong width");
    }
    for (long f = 0; f < n_features; ++f) {
      model.bandwidth.push_back(parse_hex_double(tokens[1 + f], origin));
    }
    model.values.resize(n_features);
    for (long f = 0; f < n_features; ++f) {
      tokens = next_tokens(is, origin);
      expect(tokens, "v", origin);
      if (textio::parse_long(tokens.at(1), origin) != f) {
        throw MalformedFile(origin + ": feature rows out of order");
      }
      if (static_cast<long>(tokens.size()) != n_rows + 2) {
        throw MalformedFile(origin + ": value record has wrong width");
      }
      for (long i = 0; i < n_rows; ++i) {
        model.values[f].push_back(parse_hex_double(tokens[2 + i], origin));
      }
    }
    c.classes.push_back(std::move(model));
  }
  tokens = next_tokens(is, origin);
  expect(tokens, "end", origin);
  return c;
}

void save_model(const NbClassifier& c, const std::string& path) {
  textio::write_file(path, model_to_text(c));
}

NbClassifier load_model(const std::string& path) {
  return model_from_text(textio::read_file(path), path);
}

void save_ensemble(const NbEnsemble& e, const std::string& path) {
  std::ostringstream os;
  os << "pgnbsc-ensemble 1\n";
  os << "classifiers " << e.classifiers.size() << "\n";
  for (std::size_t k = 0; k < e.classifiers.size(); ++k) {
    os << "target " << seizure_name(e.targets[k]) << "\n";
    os << model_to_text(e.classifiers[k]);
  }
  textio::write_file(path, os.str());
}

NbEnsemble load_ensemble(const std::string& path) {
  const std::string body = textio::read_file(path);
  std::istringstream is(body);
  auto tokens = next_tokens(is, path);
  if (tokens.size() != 2 || tokens[0] != "pgnbsc-ensemble" || tokens[1] != "1") {
    throw MalformedFile(path + ": not a version-1 ensemble file");
  }
  tokens = next_tokens(is, path);
  expect(tokens, "classifiers", path);
  const long n = textio::parse_long(tokens.at(1), path);

  NbEnsemble e;
  std::string line;
  for (long k = 0; k < n; ++k) {
    tokens = next_tokens(is, path);
    expect(tokens, "target", path);
    e.targets.push_back(seizure_from_text(tokens.at(1)));
    // collect lines until the classifier's "end" marker
    std::ostringstream block;
    while (std::getline(is, line)) {
      block << line << "\n";
      if (textio::trim(line) == "end") break;
    }
    e.classifiers.push_back(model_from_text(block.str(), path));
  }
  return e;
}

}  // namespace pgnbsc::nbayes
