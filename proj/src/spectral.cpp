#include "mgi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mgi {

namespace {

using cd = std::complex<double>;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// e^{-2 pi i k / n}, with k reduced mod n for accuracy at large k.
cd twiddle(std::uint64_t k, std::uint64_t n) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

void radix2_inplace(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    // Twiddles computed per stage from the exact angle rather than by repeated
    // multiplication, which drifts for large n.
    std::vector<cd> w(n / 2);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            w[k] = twiddle(k, len);
            if (inverse) w[k] = std::conj(w[k]);
        }
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + half] * w[k];
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

std::vector<cd> bluestein(std::span<const cd> x) {
    const std::size_t n = x.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    // chirp_k = e^{-i pi k^2 / n}; k^2 reduced mod 2n keeps the angle small.
    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        chirp[k] = twiddle(k2, 2 * n);
    }
    std::vector<cd> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    radix2_inplace(a, false);
    radix2_inplace(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    radix2_inplace(a, true);

    std::vector<cd> out(n);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
    return out;
}

std::vector<double> checked_values(const Series& series) {
    if (series.has_gaps()) throw std::invalid_argument("spectral analysis needs a gap-free series");
    if (series.size() < 4) throw std::invalid_argument("series too short for spectral analysis");
    return series.dense_values();
}

std::vector<cd> transform_prepared(const Series& series, const SpectrumOptions& options,
                                   std::vector<double>& prepared) {
    prepared = prepare_signal(checked_values(series), options.detrend, options.window);
    std::vector<double> padded = prepared;
    if (options.pad_to > padded.size()) padded.resize(options.pad_to, 0.0);
    return fft(padded);
}

std::vector<double> bin_frequencies(std::size_t m, Duration step) {
    std::vector<double> f(m / 2 + 1);
    const double resolution = static_cast<double>(kSecondsPerDay) / (static_cast<double>(m) * step);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * resolution;
    return f;
}

} // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input) {
    const std::size_t n = input.size();
    if (n == 0) return {};
    if (n == 1) return {input[0]};
    if (is_power_of_two(n)) {
        std::vector<cd> a(input.begin(), input.end());
        radix2_inplace(a, false);
        return a;
    }
    return bluestein(input);
}

std::vector<std::complex<double>> fft(std::span<const double> input) {
    std::vector<cd> c(input.begin(), input.end());
    return fft(std::span<const cd>(c));
}

std::vector<double> prepare_signal(std::span<const double> values, Detrend detrend, Window window) {
    std::vector<double> x(values.begin(), values.end());
    const std::size_t n = x.size();
    if (n == 0) return x;

    if (detrend == Detrend::Mean) {
        const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
        for (double& v : x) v -= mean;
    } else if (detrend == Detrend::Linear && n >= 2) {
        const double tm = (static_cast<double>(n) - 1.0) / 2.0;
        const double ym = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dt = static_cast<double>(i) - tm;
            sxy += dt * (x[i] - ym);
            sxx += dt * dt;
        }
        const double slope = sxy / sxx;
        for (std::size_t i = 0; i < n; ++i) x[i] -= ym + slope * (static_cast<double>(i) - tm);
    }

    if (window == Window::Hann) {
        // Periodic Hann: an integer-cycle tone lands in exactly three bins.
        for (std::size_t i = 0; i < n; ++i) {
            x[i] *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(n));
        }
    }
    return x;
}

Spectrum dft(const Series& series, const SpectrumOptions& options) {
    std::vector<double> prepared;
    const auto X = transform_prepared(series, options, prepared);
    Spectrum s;
    s.kind = SpectrumKind::Amplitude;
    s.transform_length = X.size();
    s.frequencies_cpd = bin_frequencies(X.size(), series.step());
    s.magnitudes.resize(s.frequencies_cpd.size());
    for (std::size_t k = 0; k < s.magnitudes.size(); ++k) s.magnitudes[k] = std::abs(X[k]);
    return s;
}

Spectrum psd(const Series& series, const SpectrumOptions& options) {
    std::vector<double> prepared;
    const auto X = transform_prepared(series, options, prepared);
    const std::size_t m = X.size();
    const double n = static_cast<double>(prepared.size());
    Spectrum s;
    s.kind = SpectrumKind::PowerDensity;
    s.transform_length = m;
    s.frequencies_cpd = bin_frequencies(m, series.step());
    const double df = s.frequencies_cpd.size() > 1 ? s.frequencies_cpd[1] : 1.0;
    s.magnitudes.resize(s.frequencies_cpd.size());
    for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
        // Fold negative frequencies onto positive ones; DC and Nyquist have no mirror.
        const bool unique = k == 0 || (m % 2 == 0 && k == m / 2);
        const double fold = unique ? 1.0 : 2.0;
        s.magnitudes[k] = fold * std::norm(X[k]) / (n * static_cast<double>(m) * df);
    }
    return s;
}

std::vector<AcfPoint> autocorrelation(const Series& series, Duration max_lag) {
    if (series.has_gaps()) throw std::invalid_argument("autocorrelation needs a gap-free series");
    const Duration span = static_cast<Duration>(series.size()) * series.step();
    if (max_lag < 0 || max_lag >= span) throw std::invalid_argument("max_lag must lie in [0, span)");
    const auto x = series.dense_values();
    const std::size_t n = x.size();
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);

    std::vector<double> d(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = x[i] - mean;
        denom += d[i] * d[i];
    }
    if (!(denom > 0.0)) throw std::domain_error("autocorrelation of a constant series is undefined");

    const auto max_k = static_cast<std::size_t>(max_lag / series.step());
    std::vector<AcfPoint> out;
    out.reserve(max_k + 1);
    for (std::size_t k = 0; k <= max_k; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) acc += d[t] * d[t + k];
        out.push_back({static_cast<Duration>(k) * series.step(), k == 0 ? 1.0 : acc / denom});
    }
    return out;
}

PeriodicityReport detect_periods(const Spectrum& spectrum, std::size_t top_k, double min_strength) {
    PeriodicityReport report;
    const auto& mag = spectrum.magnitudes;
    const std::size_t m = mag.size();
    if (m < 2) return report;

    std::vector<double> power(m);
    for (std::size_t k = 0; k < m; ++k) {
        power[k] = spectrum.kind == SpectrumKind::Amplitude ? mag[k] * mag[k] : mag[k];
    }
    const double total = std::accumulate(power.begin() + 1, power.end(), 0.0);
    if (!(total > 0.0)) return report;

    for (std::size_t k = 1; k < m; ++k) {
        const bool above_left = power[k] > power[k - 1];
        const bool not_below_right = k + 1 >= m || power[k] >= power[k + 1];
        if (!above_left || !not_below_right) continue;
        const double strength = power[k] / total;
        if (strength < min_strength || strength <= 0.0) continue;
        const double f = spectrum.frequencies_cpd[k];
        report.peaks.push_back({24.0 / f, strength, f});
    }
    std::stable_sort(report.peaks.begin(), report.peaks.end(),
                     [](const PeriodPeak& a, const PeriodPeak& b) {
                         // Strengths equal up to rounding count as ties.
                         if (std::abs(a.strength - b.strength) > 1e-12 * std::max(a.strength, b.strength)) {
                             return a.strength > b.strength;
                         }
                         return a.period_hours > b.period_hours;
                     });
    if (report.peaks.size() > top_k) report.peaks.resize(top_k);
    return report;
}

PeriodicityReport detect_periods(std::span<const AcfPoint> acf, std::size_t top_k,
                                 double min_correlation) {
    PeriodicityReport report;
    for (std::size_t k = 1; k + 1 < acf.size(); ++k) {
        if (acf[k].r > acf[k - 1].r && acf[k].r >= acf[k + 1].r && acf[k].r >= min_correlation) {
            report.acf_peaks.push_back(
                {static_cast<double>(acf[k].lag) / static_cast<double>(kSecondsPerHour), acf[k].r});
        }
    }
    std::stable_sort(report.acf_peaks.begin(), report.acf_peaks.end(),
                     [](const AcfPeak& a, const AcfPeak& b) {
                         if (a.correlation != b.correlation) return a.correlation > b.correlation;
                         return a.lag_hours < b.lag_hours;
                     });
    if (report.acf_peaks.size() > top_k) report.acf_peaks.resize(top_k);
    return report;
}

} // namespace mgi
