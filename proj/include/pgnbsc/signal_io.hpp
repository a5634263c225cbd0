#ifndef PGNBSC_SIGNAL_IO_HPP
#define PGNBSC_SIGNAL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pgnbsc/types.hpp"

namespace pgnbsc::signal_io {

/// Reads an EDF container (".edf"/".rec" extension) or the toolkit CSV
/// signal format (anything else). Keeps every stored channel; montage
/// filtering is a separate step.
Recording read_recording(const std::string& path);

Recording read_recording_csv(const std::string& path);
Recording read_recording_edf(const std::string& path);

/// Toolkit CSV signal format: row 1 = channel names, row 2 = "rate,<Hz>",
/// then one sample per channel per row. Values round-trip exactly.
void write_recording_csv(const Recording& rec, const std::string& path);

/// Writes an EDF file with 1-second data records and int16 samples scaled
/// to each channel's physical range, so values round-trip only to within
/// the 16-bit quantization step. Requires an integral rate and a sample
/// count divisible by the rate.
void write_recording_edf(const Recording& rec, const std::string& path);

/// Picks the 19 montage channels in spec order. Each spec name must match
/// exactly one stored channel.
Recording select_montage(const Recording& rec, const MontageSpec& spec);

/// Annotation CSV: "start_s,stop_s,label" per line, labels absz/cpsz/mysz/
/// spsz/tnsz/tcsz. Output is sorted by start time.
std::vector<SeizureAnnotation> read_annotations(const std::string& path);
void write_annotations(const std::vector<SeizureAnnotation>& anns, const std::string& path);

namespace synth {
// Template constants for the synthetic recordings, exposed so tests can
// reason about expected signal levels (all in microvolts).
// Keep the floor well below the slow-rhythm slew rate (~9 uV/sample for the
// 6 Hz templates): stronger noise rides the carriers as the fastest mode and
// the first IMF would strip the rhythms the classifier needs.
inline constexpr double kNoiseSigma = 0.75;
inline constexpr double kAbsenceAmp = 60.0;    // 3 Hz spike-wave stack
inline constexpr double kTonicAmp = 80.0;      // sustained 20 Hz
inline constexpr double kTonicClonicAmp = 70.0;  // 10 Hz bursts
inline constexpr double kMyoclonicAmp = 150.0;   // sparse transients
inline constexpr double kFocalAmp = 60.0;        // 6 Hz focal rhythm
inline constexpr int kSimplePartialChannels = 4;
inline constexpr int kComplexPartialChannels = 10;
}  // namespace synth

/// Deterministic 19-channel synthetic recording for one seizure class.
/// Rhythm templates depend only on (class, channel, time); the additive
/// Gaussian noise is the only seed-dependent part.
Recording synth_recording(SeizureType cls, double duration_s, double rate_hz, std::uint64_t seed);

}  // namespace pgnbsc::signal_io

#endif
