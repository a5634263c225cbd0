#ifndef PGNBSC_EVALREPORT_HPP
#define PGNBSC_EVALREPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "pgnbsc/dataset.hpp"
#include "pgnbsc/types.hpp"

namespace pgnbsc::evalreport {

struct ConfusionCounts {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  long total() const { return tp + tn + fp + fn; }
};

// accuracy = (TP+TN) / (TP+TN+FP+FN)
double accuracy(const ConfusionCounts& c);

// F1 = TP / (TP + (FP+FN)/2); absent (not 0) when TP+FP+FN = 0
std::optional<double> f1(const ConfusionCounts& c);

// Class-by-class prediction grid with the FP/FN summary rows appended
// underneath, one column per classifier.
struct HeatmapGrid {
  std::vector<SeizureType> classes;
  std::vector<std::vector<long>> grid;  // [true class][predicted class]
  std::vector<long> fp_row, fn_row;     // per predicted / per true class
  long total() const;
};

HeatmapGrid build_heatmap(const std::vector<SeizureType>& truths,
                          const std::vector<SeizureType>& predictions,
                          const dataset::LabelScheme& scheme);

// One-vs-all counts for class k of the grid.
ConfusionCounts counts_for(const HeatmapGrid& g, std::size_t k);

void write_heatmap_csv(const HeatmapGrid& g, const std::string& path);
HeatmapGrid read_heatmap_csv(const std::string& path);
void write_heatmap_svg(const HeatmapGrid& g, const std::string& path);

struct ClassMetrics {
  SeizureType label = SeizureType::Absence;
  ConfusionCounts counts;
  double accuracy = 0.0;
  std::optional<double> f1;
};

struct EvalReport {
  dataset::LabelScheme scheme;
  HeatmapGrid heatmap;
  std::vector<ClassMetrics> per_class;
  double micro_accuracy = 0.0;  // grid diagonal / total; the headline number
  long total = 0;
};

// Aggregates predictions and cross-checks every derived figure against an
// independent recount of the raw pairs.
EvalReport build_report(const std::vector<SeizureType>& truths,
                        const std::vector<SeizureType>& predictions,
                        const dataset::LabelScheme& scheme);

std::string metrics_csv(const EvalReport& r);
std::string summary_text(const EvalReport& r);

}  // namespace pgnbsc::evalreport

#endif
