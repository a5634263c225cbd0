#include "pgnbsc/bgwo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include <json.hpp>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/evalreport.hpp"
#include "pgnbsc/nbayes.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::bgwo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64 finalizer; mixes (seed, iteration, wolf) into one substream
// seed so evaluation order can never affect the draws.
std::uint64_t mix(std::uint64_t seed, std::uint64_t iteration, std::uint64_t wolf) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (iteration + 1) +
                    0xbf58476d1ce4e5b9ULL * (wolf + 1);
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

struct Stream {
  std::uint64_t state;
  // xorshift-multiply generator; stdlib distributions are avoided so the
  // byte-identical determinism contract does not depend on libstdc++.
  std::uint64_t next_u64() {
    std::uint64_t z = state += 0x9e3779b97f4a7c15ULL;
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

double population_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

bool empty_mask(const std::vector<bool>& mask) {
  return std::none_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

// Insert a candidate into the leader triple when it beats a slot by more
// than the margin; better slots shift down.
void offer_leadership(WolfPack& pack, const Wolf& w, double margin) {
  if (w.fitness < pack.w1.fitness - margin) {
    pack.w3 = pack.w2;
    pack.w2 = pack.w1;
    pack.w1 = w;
  } else if (w.fitness < pack.w2.fitness - margin) {
    pack.w3 = pack.w2;
    pack.w2 = w;
  } else if (w.fitness < pack.w3.fitness - margin) {
    pack.w3 = w;
  }
}

}  // namespace

void BgwoConfig::validate() const {
  if (population < 4) throw Error("population must be at least 4");
  if (early_stop_window < 2) throw Error("early_stop_window must be at least 2");
  if (max_iterations < 0) throw Error("max_iterations must be non-negative");
  if (early_stop_ratio <= 0.0) throw Error("early_stop_ratio must be positive");
  if (bias_margin < 0.0) throw Error("bias_margin must be non-negative");
  if (a_start <= 0.0) throw Error("a_start must be positive");
}

double fitness(const std::vector<bool>& mask, const dataset::FeatureMatrix& train,
               const dataset::FeatureMatrix& eval, SeizureType target) {
  if (train.registry() != eval.registry()) {
    throw RegistryMismatch("fitness train/eval matrices disagree on column names");
  }
  if (empty_mask(mask)) return kInf;

  const nbayes::NbClassifier c = nbayes::train_one_vs_all(train, mask, target);
  const std::string positive = seizure_name(target);
  evalreport::ConfusionCounts counts;
  for (const auto& row : eval.rows) {
    const bool truth_pos = row.label == target;
    const bool pred_pos = nbayes::predict(c, c.apply_mask(row.values)) == positive;
    if (truth_pos && pred_pos) ++counts.tp;
    else if (!truth_pos && !pred_pos) ++counts.tn;
    else if (pred_pos) ++counts.fp;
    else ++counts.fn;
  }
  const std::optional<double> score = evalreport::f1(counts);
  if (!score) return kInf;  // no positives anywhere: treat like the empty-mask fail-safe
  return 1.0 - *score;
}

std::pair<dataset::FeatureMatrix, dataset::FeatureMatrix> fitness_split(
    const dataset::FeatureMatrix& m, double train_fraction) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw Error("train_fraction must lie strictly between 0 and 1");
  }
  std::vector<bool> go_left(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& row = m.rows[i];
    const std::uint64_t h =
        textio::fnv1a(row.source_id + ":" + std::to_string(row.window_index));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    go_left[i] = u < train_fraction;
  }
  // a class with two or more rows must land on both sides, otherwise the
  // per-class fitness has nothing to train or nothing to score against;
  // flip the first row of any stranded class to the empty side
  std::map<SeizureType, std::array<std::size_t, 2>> counts;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    ++counts[m.rows[i].label][go_left[i] ? 0 : 1];
  }
  for (const auto& [label, sides] : counts) {
    if (sides[0] + sides[1] < 2 || (sides[0] > 0 && sides[1] > 0)) continue;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
      if (m.rows[i].label == label) {
        go_left[i] = !go_left[i];
        break;
      }
    }
  }
  dataset::FeatureMatrix left, right;
  left.scheme = m.scheme;
  right.scheme = m.scheme;
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    (go_left[i] ? left : right).rows.push_back(m.rows[i]);
  }
  return {std::move(left), std::move(right)};
}

WolfPack init_pack(std::size_t width, const BgwoConfig& cfg, std::uint64_t seed,
                   const FitnessFn& fit) {
  cfg.validate();
  if (width == 0) throw EmptyMask("cannot optimize over zero features");

  WolfPack pack;
  pack.rng_seed = seed;
  pack.max_iterations = cfg.max_iterations;
  pack.wolves.resize(cfg.population);
  for (int i = 0; i < cfg.population; ++i) {
    Stream g{mix(seed, 0, static_cast<std::uint64_t>(i))};
    Wolf& w = pack.wolves[i];
    w.mask.assign(width, false);
    do {
      for (std::size_t d = 0; d < width; ++d) w.mask[d] = g.u01() < 0.5;
    } while (empty_mask(w.mask));  // fail-safe: start every wolf with a live mask
    w.fitness = fit(w.mask);
  }

  std::vector<int> order(pack.wolves.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pack.wolves[a].fitness < pack.wolves[b].fitness;
  });
  pack.w1 = pack.wolves[order[0]];
  pack.w2 = pack.wolves[order[1]];
  pack.w3 = pack.wolves[order[2]];
  return pack;
}

WolfPack step(const WolfPack& pack, const BgwoConfig& cfg, const FitnessFn& fit) {
  cfg.validate();
  if (pack.t >= pack.max_iterations) {
    throw Exhausted("iteration budget of " + std::to_string(pack.max_iterations) +
                    " already spent");
  }
  const std::size_t width = pack.w1.mask.size();
  const double a =
      cfg.a_start * (1.0 - static_cast<double>(pack.t) / pack.max_iterations);
  const double margin =
      cfg.bias_margin * (static_cast<double>(pack.t) / pack.max_iterations);

  WolfPack next = pack;
  const Wolf* leaders[3] = {&pack.w1, &pack.w2, &pack.w3};
  for (std::size_t i = 0; i < pack.wolves.size(); ++i) {
    Stream g{mix(pack.rng_seed, static_cast<std::uint64_t>(pack.t) + 1, i)};
    Wolf& w = next.wolves[i];
    for (std::size_t d = 0; d < width; ++d) {
      bool cand[3];
      for (int L = 0; L < 3; ++L) {
        const double leader_bit = leaders[L]->mask[d] ? 1.0 : 0.0;
        const double wolf_bit = pack.wolves[i].mask[d] ? 1.0 : 0.0;
        const double A = 2.0 * a * g.u01() - a;
        const double C = 2.0 * g.u01();
        const double D = std::fabs(C * leader_bit - wolf_bit);
        const double cstep = 1.0 / (1.0 + std::exp(-10.0 * (A * D - 0.5)));
        const bool bstep = g.u01() < cstep;
        cand[L] = leaders[L]->mask[d] || bstep;
      }
      const int pick = std::min(2, static_cast<int>(g.u01() * 3.0));
      w.mask[d] = cand[pick];
    }
    w.fitness = fit(w.mask);
  }
  for (const Wolf& w : next.wolves) offer_leadership(next, w, margin);
  next.t = pack.t + 1;
  next.best_history.push_back(next.w1.fitness);
  return next;
}

bool should_stop(const WolfPack& pack, const BgwoConfig& cfg) {
  const std::size_t window = static_cast<std::size_t>(cfg.early_stop_window);
  if (pack.t < cfg.early_stop_window || pack.best_history.size() < window) return false;
  const double total = population_std(pack.best_history);
  if (total == 0.0) return true;  // flat from the start
  const std::vector<double> tail(pack.best_history.end() - window, pack.best_history.end());
  return population_std(tail) < cfg.early_stop_ratio * total;
}

SelectionResult select_features(const dataset::FeatureMatrix& train,
                                const dataset::FeatureMatrix& eval, SeizureType target,
                                const BgwoConfig& cfg, std::uint64_t seed) {
  train.validate();
  eval.validate();
  const FitnessFn fit = [&](const std::vector<bool>& mask) {
    return fitness(mask, train, eval, target);
  };
  WolfPack pack = init_pack(train.registry().size(), cfg, seed, fit);
  SelectionResult result;
  while (pack.t < pack.max_iterations) {
    pack = step(pack, cfg, fit);
    if (should_stop(pack, cfg)) {
      result.early_stopped = true;
      break;
    }
  }
  result.mask = pack.w1.mask;
  result.trace = pack.best_history;
  result.iterations = pack.t;
  return result;
}

void save_mask(const SelectionResult& r, const std::vector<std::string>& registry,
               SeizureType target, std::uint64_t seed, const std::string& path) {
  if (r.mask.size() != registry.size()) {
    throw RegistryMismatch("mask width does not match registry width");
  }
  nlohmann::json j;
  j["target"] = seizure_name(target);
  j["seed"] = seed;
  j["iterations"] = r.iterations;
  j["early_stopped"] = r.early_stopped;
  nlohmann::json names = nlohmann::json::array();
  for (std::size_t i = 0; i < r.mask.size(); ++i) {
    if (r.mask[i]) names.push_back(registry[i]);
  }
  j["selected"] = std::move(names);
  j["trace"] = r.trace;
  textio::write_file(path, j.dump(2) + "\n");
}

std::vector<bool> load_mask(const std::string& path,
                            const std::vector<std::string>& registry) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(textio::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(path + ": " + e.what());
  }
  std::vector<bool> mask(registry.size(), false);
  for (const auto& name : j.at("selected")) {
    const auto it = std::find(registry.begin(), registry.end(), name.get<std::string>());
    if (it == registry.end()) {
      throw MalformedFile(path + ": unknown feature '" + name.get<std::string>() + "'");
    }
    mask[static_cast<std::size_t>(it - registry.begin())] = true;
  }
  return mask;
}

}  // namespace pgnbsc::bgwo
