#include "pgnbsc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::dataset {

SeizureType LabelScheme::map(SeizureType t) const {
  if (mode == Mode::FiveClassFocal &&
      (t == SeizureType::ComplexPartial || t == SeizureType::SimplePartial)) {
    return SeizureType::Focal;
  }
  return t;
}

std::vector<SeizureType> LabelScheme::classes() const {
  if (mode == Mode::FiveClassFocal) {
    return {SeizureType::Absence, SeizureType::Focal, SeizureType::Myoclonic,
            SeizureType::Tonic, SeizureType::TonicClonic};
  }
  return {SeizureType::Absence,       SeizureType::ComplexPartial,
          SeizureType::Myoclonic,     SeizureType::SimplePartial,
          SeizureType::Tonic,         SeizureType::TonicClonic};
}

std::string LabelScheme::name() const {
  return mode == Mode::FiveClassFocal ? "five_class_focal" : "six_class";
}

const std::vector<std::string>& FeatureMatrix::registry() const {
  static const std::vector<std::string> empty;
  return rows.empty() ? empty : rows.front().names;
}

std::map<SeizureType, int> FeatureMatrix::class_counts() const {
  std::map<SeizureType, int> counts;
  for (const auto& r : rows) ++counts[r.label];
  return counts;
}

void FeatureMatrix::validate() const {
  for (const auto& r : rows) {
    if (r.names != registry()) {
      throw RegistryMismatch("feature matrix rows disagree on column names");
    }
    if (r.values.size() != r.names.size()) {
      throw RegistryMismatch("feature row width does not match its registry");
    }
  }
}

FeatureMatrix apply_scheme(const FeatureMatrix& m, const LabelScheme& scheme) {
  FeatureMatrix out = m;
  out.scheme = scheme;
  for (auto& r : out.rows) r.label = scheme.map(r.label);
  return out;
}

FeatureMatrix balance_upsample(const FeatureMatrix& m) {
  m.validate();
  const auto counts = m.class_counts();
  if (counts.size() < 2) {
    throw EmptyClass("balancing needs at least 2 nonempty classes");
  }
  int count_max = 0;
  for (const auto& [label, c] : counts) count_max = std::max(count_max, c);

  FeatureMatrix out = m;
  for (const auto& [label, c] : counts) {
    const long f = std::max<long>(1, std::lround(static_cast<double>(count_max) / c));
    for (long rep = 1; rep < f; ++rep) {
      for (const auto& r : m.rows) {
        if (r.label == label) out.rows.push_back(r);
      }
    }
  }
  return out;
}

namespace {

std::string duration_1dp(int windows) {
  std::ostringstream os;
  const double seconds = windows * kWindowSeconds;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << seconds;
  return os.str();
}

struct ReportRow {
  std::string label;
  int train = 0, test = 0;
};

}  // namespace

SplitReport split_report(const FeatureMatrix& train, const FeatureMatrix& test) {
  if (!train.rows.empty() && !test.rows.empty() && train.registry() != test.registry()) {
    throw RegistryMismatch("train and test matrices disagree on column names");
  }
  const auto train_counts = train.class_counts();
  const auto test_counts = test.class_counts();

  std::vector<ReportRow> rows;
  for (SeizureType t : train.scheme.classes()) {
    ReportRow r;
    r.label = seizure_name(t);
    if (auto it = train_counts.find(t); it != train_counts.end()) r.train = it->second;
    if (auto it = test_counts.find(t); it != test_counts.end()) r.test = it->second;
    rows.push_back(r);
  }
  ReportRow total;
  total.label = "total";
  for (const auto& r : rows) {
    total.train += r.train;
    total.test += r.test;
  }
  rows.push_back(total);

  std::size_t label_w = 5;
  for (const auto& r : rows) label_w = std::max(label_w, r.label.size());

  std::ostringstream text, csv;
  text << std::left;
  text.width(static_cast<std::streamsize>(label_w));
  text << "label";
  text << "  wtrain  wtest  train_s  test_s\n";
  csv << "label,wtrain,wtest,train_s,test_s\n";
  for (const auto& r : rows) {
    const std::string tr_s = duration_1dp(r.train);
    const std::string te_s = duration_1dp(r.test);
    text << std::left;
    text.width(static_cast<std::streamsize>(label_w));
    text << r.label;
    text << "  ";
    text << std::right;
    text.width(6);
    text << r.train;
    text << "  ";
    text.width(5);
    text << r.test;
    text << "  ";
    text.width(7);
    text << tr_s;
    text << "  ";
    text.width(6);
    text << te_s;
    text << "\n";
    csv << r.label << "," << r.train << "," << r.test << "," << tr_s << "," << te_s << "\n";
  }
  return {text.str(), csv.str()};
}

void check_disjoint_sources(const FeatureMatrix& train, const FeatureMatrix& test) {
  std::set<std::string> train_sources;
  for (const auto& r : train.rows) train_sources.insert(r.source_id);
  for (const auto& r : test.rows) {
    if (train_sources.count(r.source_id)) {
      throw Error("source '" + r.source_id + "' appears in both train and test");
    }
  }
}

std::string features_csv_text(const FeatureMatrix& m) {
  m.validate();
  std::ostringstream os;
  const auto& registry = m.registry();
  for (const auto& name : registry) os << name << ",";
  os << "label,source_id,window_index\n";
  for (const auto& r : m.rows) {
    if (r.source_id.find(',') != std::string::npos) {
      throw IoError("source_id may not contain commas: " + r.source_id);
    }
    for (double v : r.values) os << textio::format_double(v) << ",";
    os << seizure_name(r.label) << "," << r.source_id << "," << r.window_index << "\n";
  }
  return os.str();
}

void write_features_csv(const FeatureMatrix& m, const std::string& path) {
  textio::write_file(path, features_csv_text(m));
}

FeatureMatrix read_features_csv(const std::string& path) {
  const std::string body = textio::read_file(path);
  std::istringstream is(body);
  std::string line;
  if (!std::getline(is, line)) throw MalformedFile(path + ": empty features file");

  const std::vector<std::string> header = textio::split(line, ',');
  if (header.size() < 4) throw MalformedFile(path + ": header too short");
  const std::size_t width = header.size() - 3;
  if (header[width] != "label" || header[width + 1] != "source_id" ||
      header[width + 2] != "window_index") {
    throw MalformedFile(path + ": header must end with label,source_id,window_index");
  }
  const std::vector<std::string> registry(header.begin(), header.begin() + width);

  FeatureMatrix m;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (textio::trim(line).empty()) continue;
    const std::vector<std::string> cells = textio::split(line, ',');
    if (cells.size() != header.size()) {
      throw MalformedFile(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " cells, got " +
                          std::to_string(cells.size()));
    }
    features::FeatureVector fv;
    fv.values.reserve(width);
    for (std::size_t i = 0; i < width; ++i) {
      fv.values.push_back(textio::parse_double(cells[i], path));
    }
    fv.names = registry;
    fv.label = seizure_from_text(cells[width]);
    fv.source_id = cells[width + 1];
    fv.window_index = static_cast<int>(textio::parse_long(cells[width + 2], path));
    m.rows.push_back(std::move(fv));
  }
  m.validate();
  return m;
}

}  // namespace pgnbsc::dataset
