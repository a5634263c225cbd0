#ifndef PGNBSC_BGWO_HPP
#define PGNBSC_BGWO_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pgnbsc/dataset.hpp"
#include "pgnbsc/types.hpp"

namespace pgnbsc::bgwo {

struct Wolf {
  std::vector<bool> mask;
  double fitness = 0.0;  // infinity until evaluated or when the mask is empty
};

struct WolfPack {
  std::vector<Wolf> wolves;
  Wolf w1, w2, w3;  // leaders, best first; copies survive population moves
  int t = 0;        // completed iterations
  int max_iterations = 0;
  std::vector<double> best_history;  // best-so-far after each iteration
  std::uint64_t rng_seed = 0;
};

struct BgwoConfig {
  int population = 8;
  int max_iterations = 100;
  int early_stop_window = 6;
  double early_stop_ratio = 0.05;
  double bias_margin = 0.01;  // leader-acceptance margin at the final iteration
  double a_start = 2.0;       // exploration parameter, decays linearly to 0

  void validate() const;
};

using FitnessFn = std::function<double(const std::vector<bool>&)>;

// Wrapper fitness: train a positive-vs-rest kernel-NB on the masked columns
// of `train`, score `eval`, and return 1 - F1 for the target class. Empty
// masks and undefined F1 both cost infinity.
double fitness(const std::vector<bool>& mask, const dataset::FeatureMatrix& train,
               const dataset::FeatureMatrix& eval, SeizureType target);

// Deterministic 70/30 row split keyed by hashing source_id:window_index, so
// duplicated (upsampled) rows always land on the same side.
std::pair<dataset::FeatureMatrix, dataset::FeatureMatrix> fitness_split(
    const dataset::FeatureMatrix& m, double train_fraction = 0.7);

// Random Bernoulli(1/2) masks, all evaluated; leaders are the best three.
WolfPack init_pack(std::size_t width, const BgwoConfig& cfg, std::uint64_t seed,
                   const FitnessFn& fit);

// One iteration of the binary grey wolf update: per dimension, three
// leader-guided sigmoid/Bernoulli moves combined by uniform choice, then
// leader updates gated by a margin that tightens with the iteration count.
WolfPack step(const WolfPack& pack, const BgwoConfig& cfg, const FitnessFn& fit);

// True once the window is full and the spread of the recent best values has
// collapsed below early_stop_ratio of the whole history's spread.
bool should_stop(const WolfPack& pack, const BgwoConfig& cfg);

struct SelectionResult {
  std::vector<bool> mask;
  std::vector<double> trace;  // best_history copy
  int iterations = 0;
  bool early_stopped = false;
};

// Full wrapper selection loop for one target class.
SelectionResult select_features(const dataset::FeatureMatrix& train,
                                const dataset::FeatureMatrix& eval, SeizureType target,
                                const BgwoConfig& cfg, std::uint64_t seed);

// Mask file I/O: structured text listing the selected registry names plus
// the fitness trace.
void save_mask(const SelectionResult& r, const std::vector<std::string>& registry,
               SeizureType target, std::uint64_t seed, const std::string& path);
std::vector<bool> load_mask(const std::string& path, const std::vector<std::string>& registry);

}  // namespace pgnbsc::bgwo

#endif
