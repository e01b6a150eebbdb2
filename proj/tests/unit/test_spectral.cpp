#include "mgi/spectral.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <chrono>
#include <random>

using namespace mgi;

namespace {

const Timestamp kStart = make_timestamp(2019, 1, 1);

double max_abs(const std::vector<std::complex<double>>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

double max_rel_error(const std::vector<std::complex<double>>& got, const std::vector<std::complex<double>>& want) {
    double err = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
    const double scale = max_abs(want);
    return scale > 0.0 ? err / scale : err;
}

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = g(rng);
    return x;
}

Series hourly(const std::vector<double>& v, ChannelKind kind = ChannelKind::LoadPower) {
    return Series::dense(kind, kStart, 3600, v);
}

// Sum of cosines with periods in hours on an hourly grid.
std::vector<double> tones(std::size_t n, const std::vector<std::pair<double, double>>& period_amp, double offset = 0.0) {
    std::vector<double> x(n, offset);
    for (std::size_t t = 0; t < n; ++t) {
        for (const auto& [p, a] : period_amp) x[t] += a * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / p);
    }
    return x;
}

const SpectrumOptions kRaw{Detrend::None, Window::Rect, 0};

} // namespace

TEST_SUITE("spectral.fft") {
    TEST_CASE("transform matches the naive DFT for every length up to 300") {
        std::mt19937_64 rng(1);
        for (std::size_t n = 1; n <= 300; ++n) {
            std::vector<std::complex<double>> x(n);
            std::normal_distribution<double> g;
            for (auto& z : x) z = {g(rng), g(rng)};
            REQUIRE(max_rel_error(fft(x), oracle::naive_dft(x)) < 1e-9);
        }
    }

    TEST_CASE("real input transform matches, including large primes") {
        std::mt19937_64 rng(2);
        for (std::size_t n : {509u, 512u, 997u, 1000u, 1024u}) {
            const auto x = noise(rng, n);
            CHECK(max_rel_error(fft(x), oracle::naive_dft(x)) < 1e-9);
        }
    }

    TEST_CASE("Parseval and linearity") {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 4 + rng() % 700;
            const auto x = noise(rng, n);
            const auto y = noise(rng, n);
            const auto X = fft(x);
            double time_energy = 0.0, freq_energy = 0.0;
            for (double v : x) time_energy += v * v;
            for (const auto& z : X) freq_energy += std::norm(z);
            CHECK(std::abs(freq_energy / static_cast<double>(n) - time_energy) / time_energy < 1e-9);

            const double a = 2.5, b = -0.75;
            std::vector<double> combo(n);
            for (std::size_t i = 0; i < n; ++i) combo[i] = a * x[i] + b * y[i];
            const auto C = fft(combo);
            const auto Y = fft(y);
            std::vector<std::complex<double>> expected(n);
            for (std::size_t i = 0; i < n; ++i) expected[i] = a * X[i] + b * Y[i];
            CHECK(max_rel_error(C, expected) < 1e-9);
        }
    }

    TEST_CASE("2^17 samples transform in well under a second") {
        std::mt19937_64 rng(4);
        const auto x = noise(rng, std::size_t{1} << 17);
        const auto t0 = std::chrono::steady_clock::now();
        const auto X = fft(x);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CHECK(X.size() == x.size());
        CHECK(secs < 1.0);
    }
}

TEST_SUITE("spectral.dft") {
    TEST_CASE("constant series puts everything in bin 0") {
        const auto s = dft(hourly(std::vector<double>(48, 3.0)), kRaw);
        CHECK(s.magnitudes[0] == doctest::Approx(144.0));
        for (std::size_t k = 1; k < s.magnitudes.size(); ++k) CHECK(s.magnitudes[k] < 1e-12);
    }

    TEST_CASE("24 sample sine over 96 samples hits bin 4 only") {
        std::vector<double> x(96);
        for (std::size_t t = 0; t < 96; ++t) x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 24.0);
        const auto s = dft(hourly(x), kRaw);
        REQUIRE(s.magnitudes.size() == 49);
        const auto oracle_X = oracle::naive_dft(x);
        for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
            CHECK(std::abs(s.magnitudes[k] - std::abs(oracle_X[k])) < 1e-9);
            if (k != 4) CHECK(s.magnitudes[k] < 1e-9);
        }
        CHECK(s.magnitudes[4] == doctest::Approx(48.0));
        CHECK(s.frequencies_cpd[4] == doctest::Approx(1.0)); // 4 cycles in 4 days
    }

    TEST_CASE("frequency axis runs from 0 to Nyquist in cycles per day") {
        const auto s = dft(Series::dense(ChannelKind::LoadPower, kStart, 600, std::vector<double>(144 * 3, 1.0)), kRaw);
        CHECK(s.frequencies_cpd.front() == 0.0);
        CHECK(s.frequencies_cpd.back() == doctest::Approx(72.0));
        for (std::size_t k = 1; k < s.frequencies_cpd.size(); ++k) CHECK(s.frequencies_cpd[k] > s.frequencies_cpd[k - 1]);
    }

    TEST_CASE("gaps and short series are rejected") {
        CHECK_THROWS_AS(dft(Series(ChannelKind::LoadPower, 0, 600, {1.0, std::nullopt, 1.0, 2.0, 3.0})),
                        std::invalid_argument);
        CHECK_THROWS_AS(dft(hourly({1.0, 2.0, 3.0})), std::invalid_argument);
    }

    TEST_CASE("explicit zero padding lengthens the transform") {
        const auto s = dft(hourly(tones(100, {{24.0, 1.0}})), {Detrend::Mean, Window::Hann, 128});
        CHECK(s.transform_length == 128);
        CHECK(s.magnitudes.size() == 65);
    }
}

TEST_SUITE("spectral.psd") {
    TEST_CASE("zero series has zero density") {
        const auto s = psd(hourly(std::vector<double>(64, 0.0)), kRaw);
        for (double v : s.magnitudes) CHECK(v == 0.0);
    }

    TEST_CASE("unit sine: one bin, integral equals the mean square") {
        const auto x = tones(96, {{24.0, 1.0}});
        const auto s = psd(hourly(x), kRaw);
        const double df = s.frequencies_cpd[1];
        double total = 0.0, others = 0.0;
        for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
            total += s.magnitudes[k] * df;
            if (k != 4) others += s.magnitudes[k] * df;
        }
        double mean_square = 0.0;
        for (double v : x) mean_square += v * v / 96.0;
        CHECK(std::abs(total - mean_square) < 1e-12);
        CHECK(others < 1e-20);
    }

    TEST_CASE("integral equals the windowed mean square for any length") {
        std::mt19937_64 rng(6);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 4 + rng() % 500;
            const auto x = noise(rng, n);
            const SpectrumOptions opt{Detrend::Mean, Window::Hann, 0};
            const auto s = psd(hourly(x), opt);
            const auto w = prepare_signal(x, opt.detrend, opt.window);
            double ms = 0.0;
            for (double v : w) ms += v * v / static_cast<double>(n);
            double total = 0.0;
            for (double v : s.magnitudes) total += v * s.frequencies_cpd[1];
            CHECK(std::abs(total - ms) / ms < 1e-9);
        }
    }

    TEST_CASE("white noise is flat on average") {
        const std::size_t n = 512;
        std::vector<double> avg(n / 2 + 1, 0.0);
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            std::mt19937_64 rng(seed);
            const auto s = psd(hourly(noise(rng, n)), kRaw);
            for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += s.magnitudes[k] / 100.0;
        }
        // Interior bins (both DC and Nyquist are unfolded) in 8 bands.
        double overall = 0.0;
        for (std::size_t k = 1; k < n / 2; ++k) overall += avg[k] / static_cast<double>(n / 2 - 1);
        const std::size_t band = (n / 2 - 1) / 8;
        for (std::size_t b = 0; b < 8; ++b) {
            double m = 0.0;
            for (std::size_t k = 1 + b * band; k < 1 + (b + 1) * band; ++k) m += avg[k] / static_cast<double>(band);
            CHECK(std::abs(m / overall - 1.0) < 0.2);
        }
    }
}

TEST_SUITE("spectral.acf") {
    std::vector<double> naive_acf(const std::vector<double>& x, std::size_t max_k) {
        const double n = static_cast<double>(x.size());
        double mean = 0.0;
        for (double v : x) mean += v / n;
        double den = 0.0;
        for (double v : x) den += (v - mean) * (v - mean);
        std::vector<double> r;
        for (std::size_t k = 0; k <= max_k; ++k) {
            double num = 0.0;
            for (std::size_t t = 0; t + k < x.size(); ++t) num += (x[t] - mean) * (x[t + k] - mean);
            r.push_back(num / den);
        }
        return r;
    }

    TEST_CASE("lag zero is one and values follow the biased definition") {
        std::mt19937_64 rng(12);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 10 + rng() % 300;
            const auto x = noise(rng, n);
            const auto acf = autocorrelation(hourly(x), static_cast<Duration>(n - 1) * 3600);
            const auto want = naive_acf(x, n - 1);
            REQUIRE(acf.size() == n);
            CHECK(acf[0].r == 1.0);
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(std::abs(acf[k].r - want[k]) < 1e-12);
                CHECK(std::abs(acf[k].r) <= 1.0 + 1e-12);
                CHECK(acf[k].lag == static_cast<Duration>(k) * 3600);
            }
        }
    }

    TEST_CASE("alternating signal at n = 8") {
        const auto acf = autocorrelation(hourly({1, -1, 1, -1, 1, -1, 1, -1}), 3600);
        CHECK(acf[1].r == doctest::Approx(-7.0 / 8.0));
    }

    TEST_CASE("daily signal has ACF maxima at 24 h and 48 h") {
        std::mt19937_64 rng(13);
        auto x = tones(24 * 10, {{24.0, 1.0}});
        for (double& v : x) v += 0.1 * std::normal_distribution<double>()(rng);
        const auto acf = autocorrelation(hourly(x), 72 * 3600);
        const auto report = detect_periods(std::span<const AcfPoint>(acf), 2);
        REQUIRE(report.acf_peaks.size() == 2);
        CHECK(report.acf_peaks[0].lag_hours == 24.0);
        CHECK(report.acf_peaks[1].lag_hours == 48.0);
    }

    TEST_CASE("errors") {
        CHECK_THROWS_AS(autocorrelation(hourly(std::vector<double>(10, 2.0)), 3600), std::domain_error);
        CHECK_THROWS_AS(autocorrelation(hourly({1, 2, 3, 4}), 4 * 3600), std::invalid_argument);
    }
}

TEST_SUITE("spectral.periods") {
    TEST_CASE("pure 24 h tone is a single full-strength peak") {
        const auto r = detect_periods(dft(hourly(tones(96, {{24.0, 2.0}})), kRaw), 5);
        REQUIRE(r.peaks.size() == 1);
        CHECK(r.peaks[0].period_hours == doctest::Approx(24.0));
        CHECK(r.peaks[0].strength == doctest::Approx(1.0));
    }

    TEST_CASE("equal 24 h and 12 h tones split the power") {
        const auto r = detect_periods(dft(hourly(tones(96, {{24.0, 1.0}, {12.0, 1.0}})), kRaw), 5);
        REQUIRE(r.peaks.size() == 2);
        // Equal strength: the longer period ranks first.
        CHECK(r.peaks[0].period_hours == doctest::Approx(24.0));
        CHECK(r.peaks[1].period_hours == doctest::Approx(12.0));
        CHECK(r.peaks[0].strength == doctest::Approx(0.5));
        CHECK(r.peaks[1].strength == doctest::Approx(0.5));
    }

    TEST_CASE("default settings find 24 h then 12 h in a shaped daily curve") {
        const auto r = detect_periods(dft(hourly(tones(24 * 30, {{24.0, 1.0}, {12.0, 0.4}}, 5.0))), 2);
        REQUIRE(r.peaks.size() == 2);
        CHECK(r.peaks[0].period_hours == doctest::Approx(24.0));
        CHECK(r.peaks[1].period_hours == doctest::Approx(12.0));
        for (const auto& p : r.peaks) {
            CHECK(p.strength > 0.0);
            CHECK(p.strength <= 1.0);
        }
    }

    TEST_CASE("peak set and ranking do not change with positive scaling") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 20; ++trial) {
            auto x = tones(24 * 8, {{24.0, 1.0}, {12.0, 0.5}, {8.0, 0.3}});
            for (double& v : x) v += 0.3 * std::normal_distribution<double>()(rng);
            const auto a = detect_periods(dft(hourly(x)), 6);
            for (double& v : x) v *= 37.5;
            const auto b = detect_periods(dft(hourly(x)), 6);
            REQUIRE(a.peaks.size() == b.peaks.size());
            for (std::size_t i = 0; i < a.peaks.size(); ++i) {
                CHECK(a.peaks[i].period_hours == b.peaks[i].period_hours);
                CHECK(a.peaks[i].strength == doctest::Approx(b.peaks[i].strength).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("an empty or flat spectrum yields no peaks") {
        const auto r = detect_periods(dft(hourly(std::vector<double>(32, 1.0))), 3);
        CHECK(r.peaks.empty());
    }
}
