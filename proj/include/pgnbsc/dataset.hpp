#ifndef PGNBSC_DATASET_HPP
#define PGNBSC_DATASET_HPP

#include <map>
#include <string>
#include <vector>

#include "pgnbsc/features.hpp"
#include "pgnbsc/types.hpp"

namespace pgnbsc::dataset {

// Effective label scheme: six raw seizure types, or five with the two
// partial-seizure types merged into a focal-onset label.
struct LabelScheme {
  enum class Mode { SixClass, FiveClassFocal };
  Mode mode = Mode::SixClass;

  static LabelScheme six_class() { return {Mode::SixClass}; }
  static LabelScheme five_class_focal() { return {Mode::FiveClassFocal}; }

  SeizureType map(SeizureType t) const;
  std::vector<SeizureType> classes() const;
  std::string name() const;
};

struct FeatureMatrix {
  std::vector<features::FeatureVector> rows;
  LabelScheme scheme;

  const std::vector<std::string>& registry() const;  // shared column names
  std::map<SeizureType, int> class_counts() const;
  void validate() const;  // every row must share the registry
};

// Rewrite labels per the scheme; row order preserved, idempotent.
FeatureMatrix apply_scheme(const FeatureMatrix& m, const LabelScheme& scheme);

// Upsample minority classes by whole-row duplication with factor
// f = round(count_max / count_class), f >= 1. Originals keep their order;
// duplicates are appended class by class. Never removes rows.
FeatureMatrix balance_upsample(const FeatureMatrix& m);

struct SplitReport {
  std::string text;  // aligned table, one row per class plus totals
  std::string csv;   // same content, machine readable
};
SplitReport split_report(const FeatureMatrix& train, const FeatureMatrix& test);

// Guards against train/test leakage: throws if any source_id is shared.
void check_disjoint_sources(const FeatureMatrix& train, const FeatureMatrix& test);

std::string features_csv_text(const FeatureMatrix& m);
void write_features_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_features_csv(const std::string& path);

}  // namespace pgnbsc::dataset

#endif
