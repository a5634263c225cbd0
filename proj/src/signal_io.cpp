#include "pgnbsc/signal_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::signal_io {

namespace {

using textio::parse_double;
using textio::split;
using textio::trim;

bool ends_with_ci(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return textio::lower(s.substr(s.size() - suffix.size())) == textio::lower(suffix);
}

std::string stem_of(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

Recording read_recording(const std::string& path) {
  if (ends_with_ci(path, ".edf") || ends_with_ci(path, ".rec")) {
    return read_recording_edf(path);
  }
  return read_recording_csv(path);
}

Recording read_recording_csv(const std::string& path) {
  const std::string content = textio::read_file(path);
  std::istringstream in(content);
  std::string line;

  if (!std::getline(in, line)) throw MalformedFile("empty signal file: " + path);
  Recording rec;
  rec.source_id = stem_of(path);
  for (const std::string& name : split(trim(line))) {
    rec.channels.push_back({trim(name), {}});
  }
  if (rec.channels.empty()) throw MalformedFile("no channel names in " + path);

  if (!std::getline(in, line)) throw MalformedFile("missing rate row in " + path);
  auto rate_row = split(trim(line));
  if (rate_row.size() != 2 || textio::lower(trim(rate_row[0])) != "rate") {
    throw MalformedFile("second row must be 'rate,<Hz>' in " + path);
  }
  rec.rate_hz = parse_double(trim(rate_row[1]));
  if (rec.rate_hz <= 0) throw MalformedFile("non-positive rate in " + path);

  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != rec.channels.size()) {
      throw MalformedFile("sample row width " + std::to_string(cells.size()) +
                          " != channel count " + std::to_string(rec.channels.size()) + " in " + path);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      rec.channels[c].samples.push_back(parse_double(trim(cells[c])));
    }
  }
  if (rec.length() < 1) throw MalformedFile("no samples in " + path);
  return rec;
}

void write_recording_csv(const Recording& rec, const std::string& path) {
  rec.validate();
  std::ostringstream out;
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    if (c) out << ',';
    out << rec.channels[c].label;
  }
  out << "\nrate," << textio::format_double(rec.rate_hz) << '\n';
  const std::size_t n = rec.length();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      if (c) out << ',';
      out << textio::format_double(rec.channels[c].samples[i]);
    }
    out << '\n';
  }
  textio::write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// EDF
// ---------------------------------------------------------------------------

namespace {

// Left-justified, space-padded fixed-width ASCII field.
void edf_put(std::string& out, std::size_t offset, std::size_t len, const std::string& value) {
  if (value.size() > len) throw Error("EDF field value too wide: '" + value + "'");
  for (std::size_t i = 0; i < value.size(); ++i) out[offset + i] = value[i];
}

std::string edf_field(const std::string& raw, std::size_t offset, std::size_t len) {
  if (offset + len > raw.size()) throw MalformedFile("EDF header too short");
  return trim(raw.substr(offset, len));
}

double edf_number(const std::string& raw, std::size_t offset, std::size_t len,
                  const char* what) {
  const std::string field = edf_field(raw, offset, len);
  try {
    return parse_double(field);
  } catch (const MalformedFile&) {
    throw MalformedFile(std::string("bad EDF ") + what + " field: '" + field + "'");
  }
}

}  // namespace

Recording read_recording_edf(const std::string& path) {
  const std::string raw = textio::read_file(path);
  if (raw.size() < 256) throw MalformedFile("EDF header truncated: " + path);

  const long header_bytes = std::lround(edf_number(raw, 184, 8, "header size"));
  long ndr = std::lround(edf_number(raw, 236, 8, "record count"));
  const double record_dur = edf_number(raw, 244, 8, "record duration");
  const long ns = std::lround(edf_number(raw, 252, 4, "signal count"));

  if (ns <= 0) throw MalformedFile("EDF has no signals: " + path);
  if (record_dur <= 0) throw MalformedFile("EDF record duration must be positive: " + path);
  if (header_bytes != 256 + ns * 256) {
    throw MalformedFile("EDF header size field inconsistent with signal count: " + path);
  }
  if (raw.size() < static_cast<std::size_t>(header_bytes)) {
    throw MalformedFile("EDF signal headers truncated: " + path);
  }

  auto sig_field = [&](std::size_t block_offset, std::size_t width, long i) {
    return raw.substr(256 + block_offset * ns + width * i, width);
  };

  struct SigHeader {
    std::string label;
    double phys_min, phys_max, dig_min, dig_max;
    long nsamp;
  };
  std::vector<SigHeader> sigs(ns);
  std::size_t samples_per_record = 0;
  for (long i = 0; i < ns; ++i) {
    SigHeader& s = sigs[i];
    s.label = trim(sig_field(0, 16, i));
    // offsets within the signal header area, in bytes per field block:
    // label 16, transducer 80, dim 8, physMin 8, physMax 8, digMin 8,
    // digMax 8, prefilter 80, samples/record 8, reserved 32
    std::size_t base = 0;
    auto next = [&](std::size_t width) {
      std::size_t off = base;
      base += width;
      return off;
    };
    next(16);  // label
    next(80);  // transducer
    next(8);   // physical dimension
    s.phys_min = parse_double(trim(sig_field(next(8), 8, i)));
    s.phys_max = parse_double(trim(sig_field(next(8), 8, i)));
    s.dig_min = parse_double(trim(sig_field(next(8), 8, i)));
    s.dig_max = parse_double(trim(sig_field(next(8), 8, i)));
    next(80);  // prefilter
    s.nsamp = std::lround(parse_double(trim(sig_field(next(8), 8, i))));
    if (s.nsamp <= 0) throw MalformedFile("EDF signal '" + s.label + "' has no samples per record");
    if (s.dig_max == s.dig_min) {
      throw MalformedFile("EDF signal '" + s.label + "' has equal digital min/max");
    }
    samples_per_record += static_cast<std::size_t>(s.nsamp);
  }

  const std::size_t record_bytes = samples_per_record * 2;
  const std::size_t data_bytes = raw.size() - static_cast<std::size_t>(header_bytes);
  if (ndr < 0) {
    if (data_bytes % record_bytes != 0) {
      throw MalformedFile("EDF data area is not a whole number of records: " + path);
    }
    ndr = static_cast<long>(data_bytes / record_bytes);
  }
  if (data_bytes < static_cast<std::size_t>(ndr) * record_bytes) {
    throw MalformedFile("EDF data records truncated: " + path);
  }

  const double first_rate = static_cast<double>(sigs[0].nsamp) / record_dur;
  for (const auto& s : sigs) {
    const double rate = static_cast<double>(s.nsamp) / record_dur;
    if (rate != first_rate) {
      throw InconsistentRates("EDF signal '" + s.label + "' rate " +
                              textio::format_double(rate) + " != " +
                              textio::format_double(first_rate));
    }
  }

  Recording rec;
  rec.source_id = stem_of(path);
  rec.rate_hz = first_rate;
  rec.channels.resize(ns);
  for (long i = 0; i < ns; ++i) {
    rec.channels[i].label = sigs[i].label;
    rec.channels[i].samples.reserve(static_cast<std::size_t>(ndr) * sigs[i].nsamp);
  }

  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(raw.data()) + header_bytes;
  for (long r = 0; r < ndr; ++r) {
    for (long i = 0; i < ns; ++i) {
      const SigHeader& s = sigs[i];
      const double scale = (s.phys_max - s.phys_min) / (s.dig_max - s.dig_min);
      for (long k = 0; k < s.nsamp; ++k) {
        const std::int16_t dig =
            static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0]) |
                                      (static_cast<std::uint16_t>(p[1]) << 8));
        p += 2;
        rec.channels[i].samples.push_back(s.phys_min + (dig - s.dig_min) * scale);
      }
    }
  }
  if (rec.length() < 1) throw MalformedFile("EDF contains no data records: " + path);
  return rec;
}

void write_recording_edf(const Recording& rec, const std::string& path) {
  rec.validate();
  const long rate = std::lround(rec.rate_hz);
  if (static_cast<double>(rate) != rec.rate_hz) {
    throw BadRate("EDF writer needs an integral sampling rate, got " +
                  textio::format_double(rec.rate_hz));
  }
  const std::size_t n = rec.length();
  if (n % static_cast<std::size_t>(rate) != 0) {
    throw BadDuration("EDF writer needs a whole number of 1 s records; " +
                      std::to_string(n) + " samples at " + std::to_string(rate) + " Hz");
  }
  const long ns = static_cast<long>(rec.channels.size());
  const long ndr = static_cast<long>(n) / rate;
  const long header_bytes = 256 + 256 * ns;

  std::string header(static_cast<std::size_t>(header_bytes), ' ');
  edf_put(header, 0, 8, "0");
  edf_put(header, 8, 80, "X X X X");
  edf_put(header, 88, 80, "Startdate X X X X " + rec.source_id.substr(0, 50));
  edf_put(header, 168, 8, "01.01.00");
  edf_put(header, 176, 8, "00.00.00");
  edf_put(header, 184, 8, std::to_string(header_bytes));
  edf_put(header, 236, 8, std::to_string(ndr));
  edf_put(header, 244, 8, "1");
  edf_put(header, 252, 4, std::to_string(ns));

  struct Scale {
    double pmin, pmax;
  };
  std::vector<Scale> scales;
  scales.reserve(rec.channels.size());
  std::size_t base = 256;
  auto put_block = [&](std::size_t width, auto&& value_of) {
    for (long i = 0; i < ns; ++i) {
      edf_put(header, base + width * static_cast<std::size_t>(i), width, value_of(i));
    }
    base += width * static_cast<std::size_t>(ns);
  };
  for (const auto& ch : rec.channels) {
    const auto [lo, hi] = std::minmax_element(ch.samples.begin(), ch.samples.end());
    double pmin = std::floor(*lo), pmax = std::ceil(*hi);
    if (pmin == pmax) pmax = pmin + 1.0;  // flat channel still needs a range
    scales.push_back({pmin, pmax});
  }
  put_block(16, [&](long i) { return "EEG " + rec.channels[i].label + "-REF"; });
  put_block(80, [&](long) { return std::string("AgAgCl electrode"); });
  put_block(8, [&](long) { return std::string("uV"); });
  put_block(8, [&](long i) { return std::to_string(static_cast<long>(scales[i].pmin)); });
  put_block(8, [&](long i) { return std::to_string(static_cast<long>(scales[i].pmax)); });
  put_block(8, [&](long) { return std::string("-32768"); });
  put_block(8, [&](long) { return std::string("32767"); });
  put_block(80, [&](long) { return std::string(); });
  put_block(8, [&](long) { return std::to_string(rate); });
  put_block(32, [&](long) { return std::string(); });

  std::string data;
  data.reserve(static_cast<std::size_t>(ndr) * rec.channels.size() *
               static_cast<std::size_t>(rate) * 2);
  for (long r = 0; r < ndr; ++r) {
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      const Scale& s = scales[c];
      const double gain = 65535.0 / (s.pmax - s.pmin);
      for (long k = 0; k < rate; ++k) {
        const double v = rec.channels[c].samples[static_cast<std::size_t>(r * rate + k)];
        long dig = std::lround((v - s.pmin) * gain) - 32768;
        dig = std::clamp(dig, -32768L, 32767L);
        data.push_back(static_cast<char>(dig & 0xff));
        data.push_back(static_cast<char>((dig >> 8) & 0xff));
      }
    }
  }
  textio::write_file(path, header + data);
}

// ---------------------------------------------------------------------------
// Montage
// ---------------------------------------------------------------------------

namespace {

const std::array<const char*, 4> kReferenceSuffixes = {"-ref", "-le", "-ar", "-avg"};

std::string strip_reference(const std::string& label) {
  std::string s = textio::lower(trim(label));
  for (const char* suffix : kReferenceSuffixes) {
    if (ends_with_ci(s, suffix)) {
      s = s.substr(0, s.size() - std::strlen(suffix));
      break;
    }
  }
  return s;
}

}  // namespace

Recording select_montage(const Recording& rec, const MontageSpec& spec) {
  rec.validate();
  std::vector<std::string> stripped;
  stripped.reserve(rec.channels.size());
  for (const auto& ch : rec.channels) stripped.push_back(strip_reference(ch.label));

  Recording out;
  out.source_id = rec.source_id;
  out.rate_hz = rec.rate_hz;
  for (const std::string& want : spec.required_names) {
    const std::string needle = textio::lower(want);
    long found = -1;
    for (std::size_t c = 0; c < stripped.size(); ++c) {
      if (stripped[c].find(needle) == std::string::npos) continue;
      if (found >= 0) throw AmbiguousChannel("montage name '" + want + "' matches both '" +
                                             rec.channels[found].label + "' and '" +
                                             rec.channels[c].label + "'");
      found = static_cast<long>(c);
    }
    if (found < 0) throw MissingChannel("montage channel not found: " + want);
    Channel picked = rec.channels[found];
    picked.label = want;  // canonical montage name
    out.channels.push_back(std::move(picked));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotations
// ---------------------------------------------------------------------------

std::vector<SeizureAnnotation> read_annotations(const std::string& path) {
  const std::string content = textio::read_file(path);
  std::istringstream in(content);
  std::string line;
  std::vector<SeizureAnnotation> anns;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (cells.size() != 3) {
      throw MalformedFile("annotation line " + std::to_string(lineno) +
                          " needs start,stop,label: '" + line + "'");
    }
    SeizureAnnotation a;
    a.start_s = parse_double(trim(cells[0]));
    a.stop_s = parse_double(trim(cells[1]));
    a.label = seizure_from_text(cells[2]);
    if (a.start_s < 0 || a.stop_s <= a.start_s) {
      throw InvertedInterval("annotation line " + std::to_string(lineno) + ": [" +
                             textio::format_double(a.start_s) + ", " +
                             textio::format_double(a.stop_s) + ") is not a forward interval");
    }
    anns.push_back(a);
  }
  std::stable_sort(anns.begin(), anns.end(),
                   [](const SeizureAnnotation& x, const SeizureAnnotation& y) {
                     return x.start_s < y.start_s;
                   });
  return anns;
}

void write_annotations(const std::vector<SeizureAnnotation>& anns, const std::string& path) {
  std::ostringstream out;
  for (const auto& a : anns) {
    out << textio::format_double(a.start_s) << ',' << textio::format_double(a.stop_s) << ','
        << seizure_code(a.label) << '\n';
  }
  textio::write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Synthetic recordings
// ---------------------------------------------------------------------------

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Channel indices of the focal 6 Hz rhythm (montage order).
constexpr std::array<int, 4> kSimplePartialSet = {10, 12, 14, 8};  // F7 T3 T5 O1
constexpr std::array<int, 10> kComplexPartialSet = {10, 12, 14, 8, 0, 2, 4, 6, 17, 18};

bool in_set(int ch, const int* set, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (set[i] == ch) return true;
  return false;
}

double template_value(SeizureType cls, int ch, double t) {
  const double phase = 0.3 * ch;
  switch (cls) {
    case SeizureType::Absence:
      // spike-and-wave approximated with a 3 Hz stack of harmonics
      return synth::kAbsenceAmp * (std::sin(kTau * 3.0 * t + phase) +
                                   0.6 * std::sin(kTau * 6.0 * t + 2 * phase) +
                                   0.35 * std::sin(kTau * 9.0 * t + 3 * phase));
    case SeizureType::Tonic:
      return synth::kTonicAmp * std::sin(kTau * 20.0 * t + phase);
    case SeizureType::TonicClonic: {
      const double burst = 0.5 + 0.5 * std::fabs(std::sin(kTau * 1.25 * t));
      return synth::kTonicClonicAmp * burst * std::sin(kTau * 10.0 * t + phase);
    }
    case SeizureType::Myoclonic: {
      // transient every 0.7 s; position grid is seed-independent
      const double period = 0.7;
      const double tk = std::round(t / period) * period;
      const double dt = t - tk;
      if (std::fabs(dt) > 0.08) return 0.0;
      return synth::kMyoclonicAmp * std::exp(-(dt * dt) / (2 * 0.02 * 0.02)) *
             std::sin(kTau * 15.0 * dt);
    }
    case SeizureType::SimplePartial:
      if (!in_set(ch, kSimplePartialSet.data(), kSimplePartialSet.size())) return 0.0;
      return synth::kFocalAmp * std::sin(kTau * 6.0 * t + phase);
    case SeizureType::ComplexPartial:
      if (!in_set(ch, kComplexPartialSet.data(), kComplexPartialSet.size())) return 0.0;
      return synth::kFocalAmp * std::sin(kTau * 6.0 * t + phase);
    case SeizureType::Focal:
      break;
  }
  throw Error("synth_recording: 'focal' is a merged label, generate a concrete class");
}

}  // namespace

Recording synth_recording(SeizureType cls, double duration_s, double rate_hz,
                          std::uint64_t seed) {
  if (duration_s < kWindowSeconds) {
    throw BadDuration("synthetic recording must cover at least one 1.8 s window");
  }
  if (rate_hz < 100.0) throw BadRate("synthetic rate must be at least 100 Hz");
  if (cls == SeizureType::Focal) {
    throw Error("synth_recording: 'focal' is a merged label, generate a concrete class");
  }

  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const MontageSpec montage = MontageSpec::standard_10_20();

  Recording rec;
  rec.source_id = "synth_" + seizure_name(cls) + "_" + std::to_string(seed);
  rec.rate_hz = rate_hz;
  rec.channels.resize(kMontageChannels);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, synth::kNoiseSigma);
  for (int ch = 0; ch < kMontageChannels; ++ch) {
    Channel& out = rec.channels[ch];
    out.label = montage.required_names[ch];
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate_hz;
      out.samples[i] = template_value(cls, ch, t) + noise(rng);
    }
  }
  return rec;
}

}  // namespace pgnbsc::signal_io
