#include "pgnbsc/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pgnbsc/errors.hpp"
#include "pgnbsc/textio.hpp"

namespace pgnbsc::preprocess {

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Polyphase resampler
// ---------------------------------------------------------------------------

// p/q = target/rate in lowest terms; rates are meaningful to 1e-3 Hz.
std::pair<long, long> resample_ratio(double target, double rate) {
  const long p_raw = std::lround(target * 1000.0);
  const long q_raw = std::lround(rate * 1000.0);
  if (std::fabs(rate * 1000.0 - static_cast<double>(q_raw)) > 1e-6) {
    throw BadRate("sampling rate has sub-mHz precision: " + textio::format_double(rate));
  }
  const long g = std::gcd(p_raw, q_raw);
  return {p_raw / g, q_raw / g};
}

double bessel_i0(double x) {
  // series expansion; converges quickly for the beta range used here
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= (x / (2.0 * k)) * (x / (2.0 * k));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

std::vector<double> kaiser_lowpass(int taps, double cutoff_rad, double beta) {
  const int m = (taps - 1) / 2;
  std::vector<double> h(taps);
  const double i0b = bessel_i0(beta);
  for (int k = 0; k < taps; ++k) {
    const int d = k - m;
    const double ideal = d == 0 ? cutoff_rad / kPi : std::sin(cutoff_rad * d) / (kPi * d);
    const double r = static_cast<double>(d) / m;
    const double window = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
    h[k] = ideal * window;
  }
  return h;
}

std::vector<double> polyphase_resample(const std::vector<double>& x, long p, long q,
                                       const std::vector<double>& h) {
  const long taps = static_cast<long>(h.size());
  const long delay = (taps - 1) / 2;
  const long in_len = static_cast<long>(x.size());
  const long out_len = std::lround(static_cast<double>(in_len) * p / q);
  std::vector<double> y(out_len, 0.0);
  for (long n = 0; n < out_len; ++n) {
    const long center = n * q + delay;  // causal end of the filter in the upsampled grid
    const long jlo = center - (taps - 1);
    long j = jlo >= 0 ? ((jlo + p - 1) / p) * p : -((-jlo) / p) * p;
    double acc = 0.0;
    for (; j <= center; j += p) {
      const long xi = j / p;
      if (xi < 0) continue;
      if (xi >= in_len) break;
      acc += h[center - j] * x[xi];
    }
    y[n] = acc;
  }
  return y;
}

}  // namespace

Recording resample_250(const Recording& rec, const FilterSpec& spec) {
  rec.validate();
  if (rec.rate_hz < 100.0) {
    throw RateTooLow("cannot resample from " + textio::format_double(rec.rate_hz) +
                     " Hz; rates below 100 Hz clip the band of interest");
  }
  const auto [p, q] = resample_ratio(spec.resample_target_hz, rec.rate_hz);
  if (p == q) {
    Recording out = rec;
    out.rate_hz = spec.resample_target_hz;
    return out;
  }

  int taps = spec.fir_taps;
  if (taps <= 0) taps = static_cast<int>(40 * std::max(p, q)) + 1;
  if (taps % 2 == 0) throw Error("fir_taps must be odd");
  const double cutoff = std::min(kPi / p, kPi / q);
  std::vector<double> h = kaiser_lowpass(taps, cutoff, 8.0);
  const double gain = static_cast<double>(p) / std::accumulate(h.begin(), h.end(), 0.0);
  for (double& v : h) v *= gain;

  Recording out;
  out.source_id = rec.source_id;
  out.rate_hz = spec.resample_target_hz;
  out.channels.reserve(rec.channels.size());
  for (const auto& ch : rec.channels) {
    out.channels.push_back({ch.label, polyphase_resample(ch.samples, p, q, h)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// 60 Hz notch
// ---------------------------------------------------------------------------

Recording notch_60(const Recording& rec, const FilterSpec& spec) {
  rec.validate();
  if (rec.rate_hz != spec.resample_target_hz) {
    throw WrongRate("notch expects " + textio::format_double(spec.resample_target_hz) +
                    " Hz input, got " + textio::format_double(rec.rate_hz));
  }
  if (spec.notch_center_hz >= rec.rate_hz / 2) {
    throw Error("notch center must lie below the Nyquist rate");
  }

  const double w0 = 2.0 * kPi * spec.notch_center_hz / rec.rate_hz;
  const double quality = spec.notch_center_hz / spec.notch_bandwidth_hz;
  const double alpha = std::sin(w0) / (2.0 * quality);
  const double a0 = 1.0 + alpha;
  const double b0 = 1.0 / a0;
  const double b1 = -2.0 * std::cos(w0) / a0;
  const double b2 = 1.0 / a0;
  const double a1 = -2.0 * std::cos(w0) / a0;
  const double a2 = (1.0 - alpha) / a0;

  Recording out;
  out.source_id = rec.source_id;
  out.rate_hz = rec.rate_hz;
  out.channels.reserve(rec.channels.size());
  for (const auto& ch : rec.channels) {
    Channel filtered{ch.label, std::vector<double>(ch.samples.size())};
    double z1 = 0.0, z2 = 0.0;  // direct form II transposed
    for (std::size_t i = 0; i < ch.samples.size(); ++i) {
      const double x = ch.samples[i];
      const double y = b0 * x + z1;
      z1 = b1 * x - a1 * y + z2;
      z2 = b2 * x - a2 * y;
      filtered.samples[i] = y;
    }
    out.channels.push_back(std::move(filtered));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Empirical mode decomposition (first IMF)
// ---------------------------------------------------------------------------

namespace {

struct Extrema {
  std::vector<long> max_idx, min_idx;
  std::vector<double> max_val, min_val;
};

// Strict extrema on the run-compressed series; plateaus count once, at
// their middle sample. Boundary samples are never extrema.
Extrema find_extrema(const std::vector<double>& x) {
  Extrema e;
  const long n = static_cast<long>(x.size());
  long prev_rep = -1;
  double prev_val = 0.0;
  long prev2_rep = -1;
  double prev2_val = 0.0;
  for (long i = 0; i < n;) {
    long j = i;
    while (j + 1 < n && x[j + 1] == x[i]) ++j;
    const long rep = (i + j) / 2;
    const double val = x[i];
    if (prev2_rep >= 0) {
      if (val < prev_val && prev_val > prev2_val && prev_rep > 0) {
        e.max_idx.push_back(prev_rep);
        e.max_val.push_back(prev_val);
      } else if (val > prev_val && prev_val < prev2_val && prev_rep > 0) {
        e.min_idx.push_back(prev_rep);
        e.min_val.push_back(prev_val);
      }
    }
    prev2_rep = prev_rep;
    prev2_val = prev_val;
    prev_rep = rep;
    prev_val = val;
    i = j + 1;
  }
  return e;
}

// Natural cubic spline through (t, v), evaluated at 0..n-1.
std::vector<double> spline_eval(const std::vector<double>& t, const std::vector<double>& v,
                                long n) {
  const std::size_t m = t.size();
  std::vector<double> out(n);
  if (m == 1) {
    std::fill(out.begin(), out.end(), v[0]);
    return out;
  }
  if (m == 2) {
    const double slope = (v[1] - v[0]) / (t[1] - t[0]);
    for (long i = 0; i < n; ++i) out[i] = v[0] + slope * (i - t[0]);
    return out;
  }

  // second derivatives, natural boundary (y''=0 at the ends)
  std::vector<double> y2(m, 0.0), u(m, 0.0);
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double sig = (t[i] - t[i - 1]) / (t[i + 1] - t[i - 1]);
    const double p = sig * y2[i - 1] + 2.0;
    y2[i] = (sig - 1.0) / p;
    u[i] = (v[i + 1] - v[i]) / (t[i + 1] - t[i]) - (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
    u[i] = (6.0 * u[i] / (t[i + 1] - t[i - 1]) - sig * u[i - 1]) / p;
  }
  for (std::size_t k = m - 1; k-- > 1;) {
    y2[k] = y2[k] * y2[k + 1] + u[k];
  }
  y2[0] = y2[m - 1] = 0.0;

  std::size_t seg = 0;
  for (long i = 0; i < n; ++i) {
    const double xi = static_cast<double>(i);
    while (seg + 2 < m && t[seg + 1] < xi) ++seg;
    const double hseg = t[seg + 1] - t[seg];
    const double a = (t[seg + 1] - xi) / hseg;
    const double b = (xi - t[seg]) / hseg;
    out[i] = a * v[seg] + b * v[seg + 1] +
             ((a * a * a - a) * y2[seg] + (b * b * b - b) * y2[seg + 1]) * (hseg * hseg) / 6.0;
  }
  return out;
}

// Mirror up to two boundary extrema past each end so the envelope spline
// covers the whole support.
void mirror_extend(std::vector<long>& idx, std::vector<double>& val, long n) {
  const std::size_t m = idx.size();
  std::vector<long> t;
  std::vector<double> v;
  const std::size_t reflect = std::min<std::size_t>(2, m);
  for (std::size_t k = reflect; k-- > 0;) {
    t.push_back(-idx[k]);
    v.push_back(val[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    t.push_back(idx[k]);
    v.push_back(val[k]);
  }
  for (std::size_t k = 0; k < reflect; ++k) {
    t.push_back(2 * (n - 1) - idx[m - 1 - k]);
    v.push_back(val[m - 1 - k]);
  }
  idx = std::move(t);
  val = std::move(v);
}

}  // namespace

ImfResult first_imf(const std::vector<double>& x, const FilterSpec& spec) {
  if (x.size() < 8) throw TooShort("first_imf needs at least 8 samples");
  const long n = static_cast<long>(x.size());

  std::vector<double> h = x;
  ImfResult result;
  for (int sift = 0; sift < spec.emd_max_sift; ++sift) {
    Extrema e = find_extrema(h);
    if (e.max_idx.size() + e.min_idx.size() < 2) {
      if (sift == 0) {
        result.imf = x;
        result.no_extrema = true;
        return result;
      }
      break;  // sifting flattened the residual; h is the IMF
    }

    mirror_extend(e.max_idx, e.max_val, n);
    mirror_extend(e.min_idx, e.min_val, n);
    std::vector<double> tmax(e.max_idx.begin(), e.max_idx.end());
    std::vector<double> tmin(e.min_idx.begin(), e.min_idx.end());
    const std::vector<double> upper = spline_eval(tmax, e.max_val, n);
    const std::vector<double> lower = spline_eval(tmin, e.min_val, n);

    double num = 0.0, den = 0.0;
    for (long i = 0; i < n; ++i) {
      const double mean = 0.5 * (upper[i] + lower[i]);
      num += mean * mean;
      den += h[i] * h[i];
      h[i] -= mean;
    }
    result.sift_iterations = sift + 1;
    if (den == 0.0) break;
    if (num / den < spec.emd_sd_threshold) break;
  }
  result.imf = std::move(h);
  return result;
}

// ---------------------------------------------------------------------------
// Ictal windowing
// ---------------------------------------------------------------------------

WindowedIctal window_ictal(const Recording& rec, const std::vector<SeizureAnnotation>& anns) {
  rec.validate();
  if (rec.rate_hz != kTargetRateHz) {
    throw WrongRate("window_ictal expects a 250 Hz recording");
  }

  std::vector<std::string> names;
  names.reserve(rec.channels.size());
  for (const auto& ch : rec.channels) names.push_back(ch.label);

  WindowedIctal out;
  int window_index = 0;
  for (const auto& ann : anns) {
    long s0 = std::lround(ann.start_s * kTargetRateHz);
    long s1 = std::lround(ann.stop_s * kTargetRateHz);
    s0 = std::max<long>(s0, 0);
    s1 = std::min<long>(s1, static_cast<long>(rec.length()));
    const long span = s1 - s0;

    std::vector<long> starts;
    if (span >= 2 * kWindowSamples) {
      const long count = span / kWindowSamples;
      for (long w = 0; w < count; ++w) starts.push_back(s0 + w * kWindowSamples);
    } else if (span >= kWindowSamples) {
      starts.push_back(s0 + (span - kWindowSamples) / 2);  // centered single window
    } else {
      ++out.skipped_spans;
      continue;
    }

    for (long start : starts) {
      EpochWindow w;
      w.label = ann.label;
      w.source_id = rec.source_id;
      w.window_index = window_index++;
      w.channel_names = names;
      w.samples.reserve(rec.channels.size());
      for (const auto& ch : rec.channels) {
        w.samples.emplace_back(ch.samples.begin() + start,
                               ch.samples.begin() + start + kWindowSamples);
      }
      out.windows.push_back(std::move(w));
    }
  }
  return out;
}

WindowedIctal run(const Recording& rec, const std::vector<SeizureAnnotation>& anns,
                  const FilterSpec& spec, const StageObserver& observer) {
  auto mark = [&](const char* stage) {
    if (observer) observer(stage);
  };

  mark("resample");
  Recording r = resample_250(rec, spec);
  mark("notch");
  r = notch_60(r, spec);
  mark("imf");
  for (auto& ch : r.channels) {
    ch.samples = first_imf(ch.samples, spec).imf;
  }
  mark("window");
  return window_ictal(r, anns);
}

}  // namespace pgnbsc::preprocess
