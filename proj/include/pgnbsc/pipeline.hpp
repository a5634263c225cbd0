#ifndef PGNBSC_PIPELINE_HPP
#define PGNBSC_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pgnbsc/bgwo.hpp"
#include "pgnbsc/dataset.hpp"
#include "pgnbsc/evalreport.hpp"
#include "pgnbsc/features.hpp"
#include "pgnbsc/nbayes.hpp"
#include "pgnbsc/preprocess.hpp"
#include "pgnbsc/types.hpp"

namespace pgnbsc::pipeline {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr std::uint64_t kCorpusSeed = 7000;  // fixed corpus identity

/// Everything one model run needs. Models: 1 = single multiclass classifier
/// on all features; 2 = six one-vs-all classifiers with wrapper selection;
/// 3 = five one-vs-all classifiers on the merged focal scheme.
struct ModelConfig {
  int model_id = 3;
  dataset::LabelScheme scheme = dataset::LabelScheme::five_class_focal();
  bool use_bgwo = true;
  bgwo::BgwoConfig bgwo;
  features::FeatureParams features;
  preprocess::FilterSpec filter;
  std::uint64_t seed = 42;
  bool plain_gaussian = false;

  static ModelConfig for_model(int id, std::uint64_t seed = 42);
  void validate() const;
};

struct RunManifest {
  nlohmann::json data;
  std::string to_text() const { return data.dump(2) + "\n"; }
  void add_output(const std::string& name, const std::string& path);
};

struct ModelOutput {
  bool is_ensemble = false;
  nbayes::NbClassifier single;                    // model 1
  nbayes::NbEnsemble ensemble;                    // models 2/3
  std::vector<bgwo::SelectionResult> selections;  // parallel to the ensemble
  std::vector<SeizureType> truths, predictions;
  evalreport::EvalReport report;
  RunManifest manifest;
};

/// Scheme application, balancing, optional per-class wrapper selection
/// (seeded seed + class index), training, and evaluation.
ModelOutput run_model(const ModelConfig& cfg, const dataset::FeatureMatrix& train,
                      const dataset::FeatureMatrix& test);

/// Window CSV: one row per (window, channel) holding all 450 samples, so
/// the preprocess and features CLI stages can hand off through a file.
void write_windows_csv(const std::vector<EpochWindow>& windows, const std::string& path);
std::vector<EpochWindow> read_windows_csv(const std::string& path);

dataset::FeatureMatrix extract_features(const std::vector<EpochWindow>& windows,
                                        const features::FeatureParams& params);

/// One corpus entry: an EDF recording plus its annotation CSV.
struct CorpusEntry {
  std::string recording;
  std::string annotations;
};
struct Corpus {
  std::vector<CorpusEntry> train;
  std::vector<CorpusEntry> test;
};

/// Deterministic 6-class corpus: two 45 s training recordings and one 20 s
/// test recording per class at 256 Hz, with per-class ictal spans sized so
/// training window counts vary between 34 and 44. Writes corpus.json.
Corpus build_synthetic_corpus(const std::string& dir, std::uint64_t seed = kCorpusSeed);

/// Loads corpus.json, or builds the corpus when the manifest is missing.
Corpus ensure_corpus(const std::string& dir, std::uint64_t seed = kCorpusSeed);

/// read -> montage -> resample -> notch -> IMF1 -> window -> features, for
/// each corpus entry.
dataset::FeatureMatrix features_from_corpus(const std::vector<CorpusEntry>& entries,
                                            const ModelConfig& cfg);

int cli_main(int argc, const char* const* argv);

}  // namespace pgnbsc::pipeline

#endif
