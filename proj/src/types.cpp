#include "pgnbsc/types.hpp"

#include <array>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc {

namespace {

struct LabelEntry {
  SeizureType type;
  const char* name;
  const char* code;
};

constexpr std::array<LabelEntry, 7> kLabels = {{
    {SeizureType::Absence, "absence", "absz"},
    {SeizureType::ComplexPartial, "complex_partial", "cpsz"},
    {SeizureType::Myoclonic, "myoclonic", "mysz"},
    {SeizureType::SimplePartial, "simple_partial", "spsz"},
    {SeizureType::Tonic, "tonic", "tnsz"},
    {SeizureType::TonicClonic, "tonic_clonic", "tcsz"},
    {SeizureType::Focal, "focal", "fnsz"},
}};

}  // namespace

const std::string& seizure_name(SeizureType t) {
  static const std::array<std::string, 7> names = [] {
    std::array<std::string, 7> out;
    for (std::size_t i = 0; i < kLabels.size(); ++i) out[i] = kLabels[i].name;
    return out;
  }();
  return names[static_cast<std::size_t>(t)];
}

const std::string& seizure_code(SeizureType t) {
  static const std::array<std::string, 7> codes = [] {
    std::array<std::string, 7> out;
    for (std::size_t i = 0; i < kLabels.size(); ++i) out[i] = kLabels[i].code;
    return out;
  }();
  return codes[static_cast<std::size_t>(t)];
}

SeizureType seizure_from_text(const std::string& text) {
  const std::string t = textio::lower(textio::trim(text));
  for (const auto& e : kLabels) {
    if (t == e.name || t == e.code) return e.type;
  }
  throw UnknownLabel("unknown seizure label: '" + text + "'");
}

void Recording::validate() const {
  if (channels.empty()) throw Error("recording has no channels");
  if (rate_hz <= 0) throw Error("recording rate must be positive");
  const std::size_t n = channels.front().samples.size();
  if (n < 1) throw Error("recording channels are empty");
  for (const auto& ch : channels) {
    if (ch.samples.size() != n) {
      throw Error("channel '" + ch.label + "' length differs from the rest");
    }
  }
}

MontageSpec MontageSpec::standard_10_20() {
  return MontageSpec{{
      "Fp1", "Fp2", "F3", "F4", "C3", "C4", "P3", "P4", "O1", "O2",
      "F7", "F8", "T3", "T4", "T5", "T6", "Fz", "Cz", "Pz",
  }};
}

}  // namespace pgnbsc
