#pragma once

#include "mgi/telemetry.hpp"

#include <complex>
#include <span>
#include <vector>

namespace mgi {

/// Discrete Fourier transform of any length: X_k = sum_t x_t exp(-2 pi i k t / n).
/// Powers of two use an iterative radix-2 FFT, other lengths Bluestein's chirp-z.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input);
std::vector<std::complex<double>> fft(std::span<const double> input);

enum class Detrend { None, Mean, Linear };
enum class Window { Rect, Hann };

struct SpectrumOptions {
    Detrend detrend = Detrend::Mean;
    Window window = Window::Hann;
    // Zero-pad to this length when larger than the series. 0 = no padding.
    std::size_t pad_to = 0;
};

// Detrended and windowed samples, as fed to the transform (before padding).
std::vector<double> prepare_signal(std::span<const double> values, Detrend detrend, Window window);

enum class SpectrumKind { Amplitude, PowerDensity };

struct Spectrum {
    std::vector<double> frequencies_cpd; // cycles per day, bins 0 .. floor(n/2)
    std::vector<double> magnitudes;
    SpectrumKind kind = SpectrumKind::Amplitude;
    std::size_t transform_length = 0;
};

// |X_k| for k = 0 .. floor(n/2). Throws on gaps or fewer than 4 samples.
Spectrum dft(const Series& series, const SpectrumOptions& options = {});

/// One-sided periodogram in units^2 per cycle/day. Summing magnitude * bin width
/// (cycles/day) gives the mean square of the prepared (windowed) signal.
Spectrum psd(const Series& series, const SpectrumOptions& options = {});

struct AcfPoint {
    Duration lag = 0;
    double r = 0.0;
};

/// Biased, normalized autocorrelation for lags 0 .. max_lag (in whole steps).
/// Throws std::invalid_argument on gaps or max_lag >= span, std::domain_error on a
/// constant series.
std::vector<AcfPoint> autocorrelation(const Series& series, Duration max_lag);

struct PeriodPeak {
    double period_hours = 0.0;
    double strength = 0.0; // share of non-DC power in the bin
    double frequency_cpd = 0.0;
};

struct AcfPeak {
    double lag_hours = 0.0;
    double correlation = 0.0;
};

struct PeriodicityReport {
    std::vector<PeriodPeak> peaks;
    std::vector<AcfPeak> acf_peaks;
};

/// Up to top_k non-DC local maxima of the spectrum with strength >= min_strength,
/// strongest first; strengths equal to within 1e-12 (relative) rank the longer period first.
PeriodicityReport detect_periods(const Spectrum& spectrum, std::size_t top_k,
                                 double min_strength = 0.01);

/// Local maxima of the ACF at positive lags with r >= min_correlation, highest first.
PeriodicityReport detect_periods(std::span<const AcfPoint> acf, std::size_t top_k,
                                 double min_correlation = 0.0);

} // namespace mgi
