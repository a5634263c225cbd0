#include "pgnbsc/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::evalreport {

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyEval("accuracy over zero samples");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::optional<double> f1(const ConfusionCounts& c) {
  if (c.tp + c.fp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) /
         (static_cast<double>(c.tp) + static_cast<double>(c.fp + c.fn) / 2.0);
}

long HeatmapGrid::total() const {
  long t = 0;
  for (const auto& row : grid) {
    for (long v : row) t += v;
  }
  return t;
}

HeatmapGrid build_heatmap(const std::vector<SeizureType>& truths,
                          const std::vector<SeizureType>& predictions,
                          const dataset::LabelScheme& scheme) {
  if (truths.size() != predictions.size()) {
    throw LengthMismatch("truth and prediction sequences differ in length");
  }
  HeatmapGrid g;
  g.classes = scheme.classes();
  const std::size_t k = g.classes.size();
  g.grid.assign(k, std::vector<long>(k, 0));
  g.fp_row.assign(k, 0);
  g.fn_row.assign(k, 0);

  auto index_of = [&](SeizureType t) {
    for (std::size_t i = 0; i < k; ++i) {
      if (g.classes[i] == t) return i;
    }
    throw UnknownLabel("label '" + seizure_name(t) + "' not in scheme " + scheme.name());
  };

  for (std::size_t i = 0; i < truths.size(); ++i) {
    ++g.grid[index_of(truths[i])][index_of(predictions[i])];
  }
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t p = 0; p < k; ++p) {
      if (t == p) continue;
      g.fp_row[p] += g.grid[t][p];  // predicted p, truly something else
      g.fn_row[t] += g.grid[t][p];  // truly t, predicted something else
    }
  }
  return g;
}

ConfusionCounts counts_for(const HeatmapGrid& g, std::size_t k) {
  ConfusionCounts c;
  c.tp = g.grid[k][k];
  c.fp = g.fp_row[k];
  c.fn = g.fn_row[k];
  c.tn = g.total() - c.tp - c.fp - c.fn;
  return c;
}

void write_heatmap_csv(const HeatmapGrid& g, const std::string& path) {
  std::ostringstream os;
  os << "truth\\pred";
  for (SeizureType t : g.classes) os << "," << seizure_name(t);
  os << "\n";
  for (std::size_t t = 0; t < g.classes.size(); ++t) {
    os << seizure_name(g.classes[t]);
    for (long v : g.grid[t]) os << "," << v;
    os << "\n";
  }
  os << "FP";
  for (long v : g.fp_row) os << "," << v;
  os << "\nFN";
  for (long v : g.fn_row) os << "," << v;
  os << "\n";
  textio::write_file(path, os.str());
}

HeatmapGrid read_heatmap_csv(const std::string& path) {
  const std::string body = textio::read_file(path);
  std::istringstream is(body);
  std::string line;
  if (!std::getline(is, line)) throw MalformedFile(path + ": empty heatmap file");
  const auto header = textio::split(textio::trim(line), ',');
  if (header.empty() || header[0] != "truth\\pred") {
    throw MalformedFile(path + ": missing truth\\pred header");
  }

  HeatmapGrid g;
  for (std::size_t i = 1; i < header.size(); ++i) {
    g.classes.push_back(seizure_from_text(header[i]));
  }
  const std::size_t k = g.classes.size();

  auto read_row = [&](const std::string& expect_label) {
    if (!std::getline(is, line)) throw MalformedFile(path + ": truncated heatmap file");
    const auto cells = textio::split(textio::trim(line), ',');
    if (cells.size() != k + 1 || cells[0] != expect_label) {
      throw MalformedFile(path + ": bad row '" + line + "'");
    }
    std::vector<long> row;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      row.push_back(textio::parse_long(cells[i], path));
    }
    return row;
  };

  for (SeizureType t : g.classes) g.grid.push_back(read_row(seizure_name(t)));
  g.fp_row = read_row("FP");
  g.fn_row = read_row("FN");
  return g;
}

void write_heatmap_svg(const HeatmapGrid& g, const std::string& path) {
  const std::size_t k = g.classes.size();
  const int cell = 44, label_w = 120, label_h = 28;
  const int width = label_w + cell * static_cast<int>(k) + 8;
  const int height = label_h + cell * static_cast<int>(k + 2) + 8;

  long vmax = 1;
  for (const auto& row : g.grid) {
    for (long v : row) vmax = std::max(vmax, v);
  }
  for (long v : g.fp_row) vmax = std::max(vmax, v);
  for (long v : g.fn_row) vmax = std::max(vmax, v);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  auto cell_rect = [&](std::size_t row, std::size_t col, long v) {
    const int x = label_w + static_cast<int>(col) * cell;
    const int y = label_h + static_cast<int>(row) * cell;
    const int shade = 255 - static_cast<int>(std::lround(215.0 * v / vmax));
    os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
       << cell << "\" fill=\"rgb(255," << shade << "," << shade
       << ")\" stroke=\"black\"/>\n";
    os << "  <text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
       << "\" text-anchor=\"middle\">" << v << "</text>\n";
  };

  for (std::size_t p = 0; p < k; ++p) {
    os << "  <text x=\"" << label_w + static_cast<int>(p) * cell + cell / 2 << "\" y=\""
       << label_h - 8 << "\" text-anchor=\"middle\">" << seizure_code(g.classes[p])
       << "</text>\n";
  }
  std::vector<std::string> row_labels;
  for (SeizureType t : g.classes) row_labels.push_back(seizure_name(t));
  row_labels.push_back("FP");
  row_labels.push_back("FN");
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    os << "  <text x=\"" << label_w - 6 << "\" y=\""
       << label_h + static_cast<int>(r) * cell + cell / 2 + 4
       << "\" text-anchor=\"end\">" << row_labels[r] << "</text>\n";
  }
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t p = 0; p < k; ++p) cell_rect(t, p, g.grid[t][p]);
  }
  for (std::size_t p = 0; p < k; ++p) cell_rect(k, p, g.fp_row[p]);
  for (std::size_t p = 0; p < k; ++p) cell_rect(k + 1, p, g.fn_row[p]);
  os << "</svg>\n";
  textio::write_file(path, os.str());
}

EvalReport build_report(const std::vector<SeizureType>& truths,
                        const std::vector<SeizureType>& predictions,
                        const dataset::LabelScheme& scheme) {
  if (truths.empty()) throw EmptyEval("no samples to evaluate");
  EvalReport r;
  r.scheme = scheme;
  r.heatmap = build_heatmap(truths, predictions, scheme);
  r.total = static_cast<long>(truths.size());

  long diagonal = 0;
  for (std::size_t k = 0; k < r.heatmap.classes.size(); ++k) {
    ClassMetrics m;
    m.label = r.heatmap.classes[k];
    m.counts = counts_for(r.heatmap, k);
    m.accuracy = accuracy(m.counts);
    m.f1 = f1(m.counts);
    diagonal += m.counts.tp;
    r.per_class.push_back(m);
  }
  r.micro_accuracy = static_cast<double>(diagonal) / static_cast<double>(r.total);

  // independent recount straight from the pairs; any disagreement is a bug
  long correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] == predictions[i]) ++correct;
  }
  for (const auto& m : r.per_class) {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const bool truth_pos = truths[i] == m.label;
      const bool pred_pos = predictions[i] == m.label;
      if (truth_pos && pred_pos) ++tp;
      else if (!truth_pos && !pred_pos) ++tn;
      else if (pred_pos) ++fp;
      else ++fn;
    }
    if (tp != m.counts.tp || tn != m.counts.tn || fp != m.counts.fp || fn != m.counts.fn) {
      throw Error("internal metric cross-check failed for class " + seizure_name(m.label));
    }
  }
  if (correct != diagonal) throw Error("internal micro-accuracy cross-check failed");
  return r;
}

std::string metrics_csv(const EvalReport& r) {
  std::ostringstream os;
  os << "class,tp,tn,fp,fn,accuracy,f1\n";
  for (const auto& m : r.per_class) {
    os << seizure_name(m.label) << "," << m.counts.tp << "," << m.counts.tn << ","
       << m.counts.fp << "," << m.counts.fn << "," << textio::format_double(m.accuracy) << ",";
    if (m.f1) os << textio::format_double(*m.f1);
    os << "\n";
  }
  os << "micro,,,,," << textio::format_double(r.micro_accuracy) << ",\n";
  return os.str();
}

std::string summary_text(const EvalReport& r) {
  std::ostringstream os;
  os << "samples: " << r.total << "  scheme: " << r.scheme.name() << "\n";
  os << "micro accuracy (grid diagonal / total): " << textio::format_double(r.micro_accuracy)
     << "\n\n";
  os << "class            tp    fp    fn  accuracy  f1\n";
  for (const auto& m : r.per_class) {
    std::ostringstream row;
    row << std::left;
    row.width(15);
    row << seizure_name(m.label);
    row << std::right;
    row.width(5);
    row << m.counts.tp;
    row.width(6);
    row << m.counts.fp;
    row.width(6);
    row << m.counts.fn;
    row << "  ";
    row.setf(std::ios::fixed);
    row.precision(4);
    row << m.accuracy << "  ";
    if (m.f1) {
      row << *m.f1;
    } else {
      row << "absent";
    }
    os << row.str() << "\n";
  }
  return os.str();
}

}  // namespace pgnbsc::evalreport
