#include "pgnbsc/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "pgnbsc/errors.hpp"

namespace pgnbsc::features {

namespace {

struct Moments {
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

Moments central_moments(const std::vector<double>& x) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m.m2 += d2;
    m.m3 += d2 * d;
    m.m4 += d2 * d2;
  }
  m.m2 /= n;
  m.m3 /= n;
  m.m4 /= n;
  return m;
}

double population_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return var / static_cast<double>(x.size());
}

std::vector<double> first_difference(const std::vector<double>& x) {
  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
  return d;
}

}  // namespace

void FeatureParams::validate() const {
  if (entropy_bins < 2) throw Error("entropy_bins must be at least 2");
  if (higuchi_kmax < 2) throw Error("higuchi_kmax must be at least 2");
  if (spectral_subwin < 8 || spectral_subwin > kWindowSamples) {
    throw Error("spectral_subwin must lie in [8, 450]");
  }
  if (spectral_hop < 1) throw Error("spectral_hop must be positive");
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "std_dev",         "shannon_entropy",       "kurtosis",
      "hjorth_mobility", "hjorth_complexity",     "skewness",
      "energy",          "nonlinear_energy",      "higuchi_fd",
      "katz_fd",         "spectral_entropy_mean", "spectral_entropy_max",
      "spectral_entropy_min"};
  return names;
}

double std_dev(const std::vector<double>& x) {
  if (x.size() < 2) throw TooShort("std_dev needs at least 2 samples");
  return std::sqrt(central_moments(x).m2);
}

double shannon_entropy(const std::vector<double>& x, int bins) {
  if (x.size() < 2) throw TooShort("shannon_entropy needs at least 2 samples");
  if (bins < 2) throw Error("shannon_entropy needs at least 2 bins");
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) return 0.0;  // constant signal occupies a single bin

  std::vector<long> counts(bins, 0);
  const double width = (hi - lo) / bins;
  for (double v : x) {
    int b = static_cast<int>((v - lo) / width);
    if (b >= bins) b = bins - 1;  // the maximum lands on the closing edge
    ++counts[b];
  }
  double h = 0.0;
  const double n = static_cast<double>(x.size());
  for (long c : counts) {
    if (c == 0) continue;
    const double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

double kurtosis(const std::vector<double>& x) {
  if (x.size() < 4) throw TooShort("kurtosis needs at least 4 samples");
  const Moments m = central_moments(x);
  if (m.m2 == 0.0) throw ZeroVariance("kurtosis of a constant signal");
  return m.m4 / (m.m2 * m.m2);
}

HjorthResult hjorth(const std::vector<double>& x) {
  if (x.size() < 3) throw TooShort("hjorth needs at least 3 samples");
  const std::vector<double> d1 = first_difference(x);
  const std::vector<double> d2 = first_difference(d1);
  const double v0 = population_variance(x);
  const double v1 = population_variance(d1);
  const double v2 = population_variance(d2);
  if (v0 == 0.0 || v1 == 0.0) throw ZeroVariance("hjorth of a (piecewise) constant signal");
  HjorthResult r;
  r.mobility = std::sqrt(v1 / v0);
  r.complexity = std::sqrt(v2 / v1) / r.mobility;
  return r;
}

double skewness(const std::vector<double>& x) {
  if (x.size() < 3) throw TooShort("skewness needs at least 3 samples");
  const Moments m = central_moments(x);
  if (m.m2 == 0.0) throw ZeroVariance("skewness of a constant signal");
  return m.m3 / std::pow(m.m2, 1.5);
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double nonlinear_energy(const std::vector<double>& x) {
  if (x.size() < 3) throw TooShort("nonlinear_energy needs at least 3 samples");
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    sum += x[i] * x[i] - x[i - 1] * x[i + 1];
  }
  return sum / static_cast<double>(x.size() - 2);
}

double higuchi_fd(const std::vector<double>& x, int kmax) {
  if (kmax < 2) throw TooShort("higuchi_fd needs kmax >= 2 for the slope fit");
  const long n = static_cast<long>(x.size());
  if (n < 2 * kmax + 2) throw TooShort("higuchi_fd needs at least 2*kmax+2 samples");

  std::vector<double> log_inv_k, log_len;
  for (int k = 1; k <= kmax; ++k) {
    double total = 0.0;
    int used = 0;
    for (int m = 1; m <= k; ++m) {
      const long r = (n - m) / k;
      if (r < 1) continue;
      double path = 0.0;
      for (long i = 1; i <= r; ++i) {
        path += std::fabs(x[m - 1 + i * k] - x[m - 1 + (i - 1) * k]);
      }
      total += path * static_cast<double>(n - 1) / (static_cast<double>(r) * k) / k;
      ++used;
    }
    if (used == 0) continue;
    const double lk = total / used;
    if (lk <= 0.0) continue;  // stride aligned with a perfect period; drop the point
    log_inv_k.push_back(std::log(1.0 / k));
    log_len.push_back(std::log(lk));
  }
  if (log_inv_k.size() < 2) throw TooShort("higuchi_fd fit needs at least 2 usable scales");

  const std::size_t pts = log_inv_k.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < pts; ++i) {
    sx += log_inv_k[i];
    sy += log_len[i];
    sxx += log_inv_k[i] * log_inv_k[i];
    sxy += log_inv_k[i] * log_len[i];
  }
  return (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
}

double katz_fd(const std::vector<double>& x) {
  if (x.size() < 3) throw TooShort("katz_fd needs at least 3 samples");
  const std::size_t n_steps = x.size() - 1;
  double variation = 0.0, length = 0.0, dmax = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dx = x[i] - x[i - 1];
    variation += std::fabs(dx);
    length += std::sqrt(1.0 + dx * dx);  // unit abscissa per sample
    const double dy = x[i] - x[0];
    dmax = std::max(dmax, std::sqrt(static_cast<double>(i) * i + dy * dy));
  }
  if (variation == 0.0) throw DegeneratePath("katz_fd of a constant signal");
  const double logn = std::log10(static_cast<double>(n_steps));
  return logn / (logn + std::log10(dmax / length));
}

namespace {

// FFTW plans are cached per transform size; FFTW planning and the shared
// buffers are not thread-safe, so the whole transform is serialized.
class PowerSpectrum {
 public:
  static std::vector<double> compute(const double* x, int n) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    static std::map<int, PowerSpectrum> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, PowerSpectrum(n)).first;
    return it->second.run(x);
  }

  PowerSpectrum(PowerSpectrum&& other) noexcept
      : n_(other.n_), in_(other.in_), out_(other.out_), plan_(other.plan_) {
    other.in_ = nullptr;
    other.out_ = nullptr;
    other.plan_ = nullptr;
  }
  PowerSpectrum(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(const PowerSpectrum&) = delete;
  PowerSpectrum& operator=(PowerSpectrum&&) = delete;

  ~PowerSpectrum() {
    if (plan_) fftw_destroy_plan(plan_);
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
  }

 private:
  explicit PowerSpectrum(int n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }

  std::vector<double> run(const double* x) const {
    std::copy(x, x + n_, in_);
    fftw_execute(plan_);
    std::vector<double> power(n_ / 2 + 1);
    for (int k = 0; k <= n_ / 2; ++k) {
      power[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
    }
    return power;
  }

  int n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

double subwindow_entropy(const double* x, int n) {
  const std::vector<double> power = PowerSpectrum::compute(x, n);
  const int bins = n / 2;  // k = 1..n/2, DC excluded
  double total = 0.0;
  for (int k = 1; k <= bins; ++k) total += power[k];
  if (total == 0.0) return 0.0;  // silent sub-window carries no information
  double h = 0.0;
  for (int k = 1; k <= bins; ++k) {
    if (power[k] == 0.0) continue;
    const double p = power[k] / total;
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(bins));
}

}  // namespace

SpectralEntropyStats spectral_entropy_stats(const std::vector<double>& x,
                                            const FeatureParams& params) {
  params.validate();
  const int sub = params.spectral_subwin;
  if (static_cast<int>(x.size()) < sub) {
    throw TooShort("spectral_entropy_stats needs at least one full sub-window");
  }
  SpectralEntropyStats s;
  s.min = 1.0;
  double sum = 0.0;
  int count = 0;
  for (std::size_t start = 0; start + sub <= x.size(); start += params.spectral_hop) {
    const double h = subwindow_entropy(x.data() + start, sub);
    sum += h;
    s.max = std::max(s.max, h);
    s.min = std::min(s.min, h);
    ++count;
  }
  s.mean = sum / count;
  return s;
}

FeatureVector extract_all(const EpochWindow& w, const FeatureParams& params) {
  params.validate();
  FeatureVector fv;
  fv.label = w.label;
  fv.source_id = w.source_id;
  fv.window_index = w.window_index;
  fv.values.reserve(w.samples.size() * feature_names().size());
  fv.names.reserve(fv.values.capacity());

  for (std::size_t ch = 0; ch < w.samples.size(); ++ch) {
    const std::vector<double>& x = w.samples[ch];
    const std::string& channel = w.channel_names[ch];
    // Degenerate channels (flat electrodes) fall back to sentinels: 0 for
    // moment/entropy features, 1 for the fractal dimensions.
    auto guarded = [&](double sentinel, auto&& fn) {
      try {
        const double v = fn();
        if (!std::isfinite(v)) {
          fv.degraded = true;
          return sentinel;
        }
        return v;
      } catch (const Error&) {
        fv.degraded = true;
        return sentinel;
      }
    };

    HjorthResult hj;
    bool hjorth_ok = true;
    try {
      hj = hjorth(x);
      if (!std::isfinite(hj.mobility) || !std::isfinite(hj.complexity)) hjorth_ok = false;
    } catch (const Error&) {
      hjorth_ok = false;
    }
    if (!hjorth_ok) fv.degraded = true;

    SpectralEntropyStats se{};
    bool spectral_ok = true;
    try {
      se = spectral_entropy_stats(x, params);
      if (!std::isfinite(se.mean) || !std::isfinite(se.max) || !std::isfinite(se.min)) {
        spectral_ok = false;
      }
    } catch (const Error&) {
      spectral_ok = false;
    }
    if (!spectral_ok) {
      fv.degraded = true;
      se = SpectralEntropyStats{};
    }

    fv.values.push_back(guarded(0.0, [&] { return std_dev(x); }));
    fv.values.push_back(guarded(0.0, [&] { return shannon_entropy(x, params.entropy_bins); }));
    fv.values.push_back(guarded(0.0, [&] { return kurtosis(x); }));
    fv.values.push_back(hjorth_ok ? hj.mobility : 0.0);
    fv.values.push_back(hjorth_ok ? hj.complexity : 0.0);
    fv.values.push_back(guarded(0.0, [&] { return skewness(x); }));
    fv.values.push_back(guarded(0.0, [&] { return energy(x); }));
    fv.values.push_back(guarded(0.0, [&] { return nonlinear_energy(x); }));
    fv.values.push_back(guarded(1.0, [&] { return higuchi_fd(x, params.higuchi_kmax); }));
    fv.values.push_back(guarded(1.0, [&] { return katz_fd(x); }));
    fv.values.push_back(se.mean);
    fv.values.push_back(se.max);
    fv.values.push_back(se.min);
    for (const std::string& fname : feature_names()) {
      fv.names.push_back(channel + "." + fname);
    }
  }
  return fv;
}

}  // namespace pgnbsc::features
