#ifndef PGNBSC_TYPES_HPP
#define PGNBSC_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pgnbsc {

inline constexpr double kTargetRateHz = 250.0;
inline constexpr double kWindowSeconds = 1.8;
inline constexpr int kWindowSamples = 450;  // 1.8 s at 250 Hz
inline constexpr int kMontageChannels = 19;
inline constexpr int kFeaturesPerChannel = 13;
inline constexpr int kFeatureVectorWidth = kMontageChannels * kFeaturesPerChannel;  // 247

/// Seizure classes. Focal is the merged complex-partial + simple-partial
/// label and only appears when the five-class scheme is active.
enum class SeizureType {
  Absence,
  ComplexPartial,
  Myoclonic,
  SimplePartial,
  Tonic,
  TonicClonic,
  Focal,
};

/// Long name, e.g. "complex_partial". Used in window/feature CSVs.
const std::string& seizure_name(SeizureType t);

/// Short annotation code, e.g. "cpsz". Used in annotation CSVs.
const std::string& seizure_code(SeizureType t);

/// Parses either a long name or a short code; throws UnknownLabel.
SeizureType seizure_from_text(const std::string& text);

struct Channel {
  std::string label;
  std::vector<double> samples;  // microvolts
};

struct Recording {
  std::string source_id;
  double rate_hz = 0.0;
  std::vector<Channel> channels;

  std::size_t length() const { return channels.empty() ? 0 : channels.front().samples.size(); }
  double duration_s() const { return rate_hz > 0 ? static_cast<double>(length()) / rate_hz : 0.0; }

  /// Throws Error unless all channels share one length, rate > 0, length >= 1.
  void validate() const;
};

struct SeizureAnnotation {
  double start_s = 0.0;
  double stop_s = 0.0;
  SeizureType label = SeizureType::Absence;
};

/// The 19 channels of the International 10-20 system used by the pipeline.
/// Channel names match case-insensitively as substrings after reference
/// suffixes ("-REF", "-LE", "-AR", "-AVG") are stripped, so "Fp1" finds
/// "EEG FP1-REF".
struct MontageSpec {
  std::vector<std::string> required_names;

  static MontageSpec standard_10_20();
};

struct EpochWindow {
  std::vector<std::vector<double>> samples;  // [channel][kWindowSamples]
  SeizureType label = SeizureType::Absence;
  std::string source_id;
  int window_index = 0;

  std::vector<std::string> channel_names;  // montage order, same length as samples
};

}  // namespace pgnbsc

#endif
