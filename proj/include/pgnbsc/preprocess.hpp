#ifndef PGNBSC_PREPROCESS_HPP
#define PGNBSC_PREPROCESS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pgnbsc/types.hpp"

namespace pgnbsc::preprocess {

struct FilterSpec {
  double resample_target_hz = kTargetRateHz;
  double notch_center_hz = 60.0;
  double notch_bandwidth_hz = 2.0;
  int fir_taps = 0;  // 0 = derive an odd length from the resample ratio
  int emd_max_sift = 50;
  double emd_sd_threshold = 0.3;
};

/// Rational-factor polyphase resampling to 250 Hz: upsample by p, Kaiser
/// FIR low-pass at min(pi/p, pi/q), downsample by q, with p/q = 250/rate
/// in lowest terms. A 250 Hz input is returned unchanged.
Recording resample_250(const Recording& rec, const FilterSpec& spec = {});

/// Second-order IIR notch (biquad), forward pass per channel.
Recording notch_60(const Recording& rec, const FilterSpec& spec = {});

struct ImfResult {
  std::vector<double> imf;
  bool no_extrema = false;  // monotone input returned unchanged
  int sift_iterations = 0;
};

/// First intrinsic mode function by EMD sifting: cubic-spline envelopes
/// through maxima/minima with mirrored boundary extension, repeated until
/// the sifting residual criterion drops below emd_sd_threshold or
/// emd_max_sift is reached.
ImfResult first_imf(const std::vector<double>& x, const FilterSpec& spec = {});

struct WindowedIctal {
  std::vector<EpochWindow> windows;
  std::size_t skipped_spans = 0;  // annotations shorter than one window
};

/// Cuts each annotated span into non-overlapping 450-sample windows from
/// the span start; a span holding one window but not two yields a single
/// window centered on the span midpoint.
WindowedIctal window_ictal(const Recording& rec, const std::vector<SeizureAnnotation>& anns);

using StageObserver = std::function<void(const std::string&)>;

/// Full chain in fixed order: resample -> notch -> imf -> window.
/// The observer, when set, receives each stage name as it starts.
WindowedIctal run(const Recording& rec, const std::vector<SeizureAnnotation>& anns,
                  const FilterSpec& spec = {}, const StageObserver& observer = {});

}  // namespace pgnbsc::preprocess

#endif
