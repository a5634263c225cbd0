#ifndef PGNBSC_FEATURES_HPP
#define PGNBSC_FEATURES_HPP

#include <string>
#include <vector>

#include "pgnbsc/types.hpp"

namespace pgnbsc::features {

// Tuning knobs for the per-window feature extractors.
struct FeatureParams {
  int entropy_bins = 64;
  int higuchi_kmax = 8;
  int spectral_subwin = 128;
  int spectral_hop = 64;

  void validate() const;  // throws Error on out-of-range values
};

// One row of the feature matrix: 13 features x 19 channels.
struct FeatureVector {
  std::vector<double> values;     // kFeatureVectorWidth entries, always finite
  std::vector<std::string> names; // "<channel>.<feature>", fixed order
  SeizureType label = SeizureType::Absence;
  std::string source_id;
  int window_index = 0;
  bool degraded = false;  // any channel fell back to sentinel values
};

// The 13 per-channel feature names, in registry order.
const std::vector<std::string>& feature_names();

double std_dev(const std::vector<double>& x);
double shannon_entropy(const std::vector<double>& x, int bins);
double kurtosis(const std::vector<double>& x);

struct HjorthResult {
  double mobility = 0.0;
  double complexity = 0.0;
};
HjorthResult hjorth(const std::vector<double>& x);

double skewness(const std::vector<double>& x);
double energy(const std::vector<double>& x);
double nonlinear_energy(const std::vector<double>& x);
double higuchi_fd(const std::vector<double>& x, int kmax);
double katz_fd(const std::vector<double>& x);

struct SpectralEntropyStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
};
SpectralEntropyStats spectral_entropy_stats(const std::vector<double>& x,
                                            const FeatureParams& params);

// Full registry extraction; per-channel failures become sentinels (0, or 1
// for the fractal dimensions) and set the degraded flag instead of throwing.
FeatureVector extract_all(const EpochWindow& w, const FeatureParams& params);

}  // namespace pgnbsc::features

#endif
