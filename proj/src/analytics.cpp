#include "mgi/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mgi {

namespace {

DailyProfile build_profile(const Series& series, Duration period) {
    const Duration step = series.step();
    if (period % step != 0) throw std::invalid_argument("step must divide the profile period");
    if (static_cast<Duration>(series.size()) * step < kSecondsPerDay) {
        throw std::invalid_argument("profile needs at least one day of data");
    }
    DailyProfile p;
    p.channel = series.channel();
    p.step = step;
    p.period = period;
    const auto slots = static_cast<std::size_t>(period / step);
    p.slot_means.assign(slots, 0.0);
    p.slot_counts.assign(slots, 0);
    p.slot_stddev.assign(slots, 0.0);

    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i]) continue;
        const std::size_t s = profile_slot(p, series.time_at(i));
        p.slot_means[s] += *series[i];
        ++p.slot_counts[s];
    }
    for (std::size_t s = 0; s < slots; ++s) {
        if (p.slot_counts[s] > 0) p.slot_means[s] /= static_cast<double>(p.slot_counts[s]);
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i]) continue;
        const std::size_t s = profile_slot(p, series.time_at(i));
        const double d = *series[i] - p.slot_means[s];
        p.slot_stddev[s] += d * d;
    }
    for (std::size_t s = 0; s < slots; ++s) {
        if (p.slot_counts[s] > 0) {
            p.slot_stddev[s] = std::sqrt(p.slot_stddev[s] / static_cast<double>(p.slot_counts[s]));
        }
    }
    return p;
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    m.n = v.size();
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size()));
    return m;
}

// r over index pairs (i, i + lag) where both samples are present; nullopt when
// fewer than three pairs or either side is constant.
std::optional<double> pearson_at_lag(const Series& a, const Series& b, std::int64_t lag) {
    const auto n = static_cast<std::int64_t>(a.size());
    double sa = 0.0, sb = 0.0;
    std::size_t count = 0;
    for (std::int64_t i = std::max<std::int64_t>(0, -lag); i < n && i + lag < n; ++i) {
        const auto& x = a[static_cast<std::size_t>(i)];
        const auto& y = b[static_cast<std::size_t>(i + lag)];
        if (!x || !y) continue;
        sa += *x;
        sb += *y;
        ++count;
    }
    if (count < 3) return std::nullopt;
    const double ma = sa / static_cast<double>(count);
    const double mb = sb / static_cast<double>(count);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::int64_t i = std::max<std::int64_t>(0, -lag); i < n && i + lag < n; ++i) {
        const auto& x = a[static_cast<std::size_t>(i)];
        const auto& y = b[static_cast<std::size_t>(i + lag)];
        if (!x || !y) continue;
        sxy += (*x - ma) * (*y - mb);
        sxx += (*x - ma) * (*x - ma);
        syy += (*y - mb) * (*y - mb);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void require_same_grid(const Series& a, const Series& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("series are not on the same grid");
}

} // namespace

DailyProfile typical_day(const Series& series) { return build_profile(series, kSecondsPerDay); }

DailyProfile typical_week(const Series& series) { return build_profile(series, 7 * kSecondsPerDay); }

std::size_t profile_slot(const DailyProfile& profile, Timestamp t) {
    Duration offset = time_of_day(t);
    if (profile.period > kSecondsPerDay) offset += static_cast<Duration>(day_of_week(t)) * kSecondsPerDay;
    return static_cast<std::size_t>(offset / profile.step);
}

Series seasonal_adjust(const Series& series) {
    if (static_cast<Duration>(series.size()) * series.step() < 2 * kSecondsPerDay) {
        throw std::invalid_argument("seasonal adjustment needs at least two days");
    }
    const DailyProfile profile = typical_day(series);
    std::vector<std::optional<double>> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i]) out[i] = *series[i] - profile.slot_means[profile_slot(profile, series.time_at(i))];
    }
    return Series(series.channel(), series.start(), series.step(), std::move(out));
}

TrendReport trend(const Series& load, const std::vector<Timestamp>& year_starts) {
    if (load.channel() != ChannelKind::LoadPower) throw std::invalid_argument("trend needs a load series");
    if (!std::is_sorted(year_starts.begin(), year_starts.end())) {
        throw std::invalid_argument("year boundaries must be sorted");
    }

    auto group_of = [&](Timestamp t) -> std::optional<int> {
        if (year_starts.empty()) return calendar_year(t);
        auto it = std::upper_bound(year_starts.begin(), year_starts.end(), t);
        if (it == year_starts.begin()) return std::nullopt;
        return calendar_year(*std::prev(it));
    };

    std::map<int, std::pair<double, std::size_t>> sums;
    std::map<int, std::map<std::int64_t, double>> daily_max;
    for (std::size_t i = 0; i < load.size(); ++i) {
        if (!load[i]) continue;
        const Timestamp t = load.time_at(i);
        const auto year = group_of(t);
        if (!year) continue;
        auto& s = sums[*year];
        s.first += *load[i];
        ++s.second;
        auto [it, inserted] = daily_max[*year].try_emplace(day_number(t), *load[i]);
        if (!inserted) it->second = std::max(it->second, *load[i]);
    }
    if (sums.size() < 2) throw std::invalid_argument("trend needs at least two years of data");

    TrendReport r;
    for (const auto& [year, s] : sums) {
        r.per_year_mean[year] = s.first / static_cast<double>(s.second);
        const auto& days = daily_max[year];
        double acc = 0.0;
        for (const auto& [day, mx] : days) acc += mx;
        r.per_year_daily_max_mean[year] = acc / static_cast<double>(days.size());
        r.per_year_days[year] = days.size();
        if (days.size() >= kMinTrendDays) r.slope_years.push_back(year);
    }
    if (r.slope_years.size() < 2) {
        r.slope_years.clear();
        for (const auto& [year, s] : sums) r.slope_years.push_back(year);
    }

    double xm = 0.0, ym = 0.0;
    for (int y : r.slope_years) {
        xm += y;
        ym += r.per_year_mean[y];
    }
    xm /= static_cast<double>(r.slope_years.size());
    ym /= static_cast<double>(r.slope_years.size());
    double sxy = 0.0, sxx = 0.0;
    for (int y : r.slope_years) {
        sxy += (y - xm) * (r.per_year_mean[y] - ym);
        sxx += (y - xm) * (y - xm);
    }
    r.slope = sxy / sxx;

    const double first = r.per_year_daily_max_mean[r.slope_years.front()];
    const double last = r.per_year_daily_max_mean[r.slope_years.back()];
    if (first > 0.0) r.growth_pct = 100.0 * (last - first) / first;
    return r;
}

std::vector<Anomaly> detect_anomalies(const Series& series, double z_threshold, Baseline baseline) {
    if (!(z_threshold > 0.0)) throw std::invalid_argument("z threshold must be positive");
    std::vector<Anomaly> out;
    auto flag = [&](std::size_t i, double mu, double sd) {
        const double z = (*series[i] - mu) / sd;
        if (std::abs(z) >= z_threshold) {
            out.push_back({series.time_at(i), series.channel(), *series[i], z,
                           z > 0 ? AnomalyKind::Spike : AnomalyKind::Drop});
        }
    };

    if (baseline == Baseline::Global) {
        std::vector<double> present;
        for (const auto& v : series.values()) {
            if (v) present.push_back(*v);
        }
        const Moments m = moments(present);
        if (!(m.sd > 0.0)) throw std::domain_error("zero-variance baseline");
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series[i]) flag(i, m.mean, m.sd);
        }
        return out;
    }

    const DailyProfile p = typical_day(series);
    if (std::none_of(p.slot_stddev.begin(), p.slot_stddev.end(), [](double s) { return s > 0.0; })) {
        throw std::domain_error("zero-variance baseline in every slot");
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i]) continue;
        const std::size_t s = profile_slot(p, series.time_at(i));
        if (p.slot_stddev[s] > 0.0) flag(i, p.slot_means[s], p.slot_stddev[s]);
    }
    return out;
}

double pearson(const Series& a, const Series& b) {
    require_same_grid(a, b);
    std::size_t mutual = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && b[i]) ++mutual;
    }
    if (mutual < 3) throw std::invalid_argument("pearson needs at least three mutually present samples");
    const auto r = pearson_at_lag(a, b, 0);
    if (!r) throw std::domain_error("pearson undefined for zero-variance input");
    return *r;
}

std::vector<LagPoint> cross_correlation_curve(const Series& a, const Series& b, Duration max_lag) {
    require_same_grid(a, b);
    const Duration span = static_cast<Duration>(a.size()) * a.step();
    if (max_lag < 0 || 2 * max_lag >= span) throw std::invalid_argument("max_lag must be below half the span");
    const std::int64_t k = max_lag / a.step();
    std::vector<LagPoint> curve;
    for (std::int64_t lag = -k; lag <= k; ++lag) {
        curve.push_back({lag * a.step(), pearson_at_lag(a, b, lag)});
    }
    return curve;
}

LagResult cross_correlation(const Series& a, const Series& b, Duration max_lag) {
    const auto curve = cross_correlation_curve(a, b, max_lag);
    const std::int64_t k = static_cast<std::int64_t>(curve.size() / 2);
    std::optional<LagResult> best;
    auto consider = [&](std::int64_t lag) {
        const auto& point = curve[static_cast<std::size_t>(lag + k)];
        if (point.r && (!best || *point.r > best->r)) best = LagResult{point.lag, *point.r};
    };
    consider(0);
    for (std::int64_t d = 1; d <= k; ++d) {
        consider(d);
        consider(-d);
    }
    if (!best) throw std::domain_error("cross-correlation undefined at every lag");
    return *best;
}

double daily_peak_offset(const Series& a, const Series& b) {
    require_same_grid(a, b);
    const std::int64_t first_day = floor_div(a.start() + kSecondsPerDay - 1, kSecondsPerDay);
    const std::int64_t last_day = floor_div(a.end(), kSecondsPerDay); // exclusive

    auto peak_time = [](const Series& s, Timestamp from) -> std::optional<Duration> {
        const Series day = s.slice(from, from + kSecondsPerDay);
        std::optional<double> best;
        Duration when = 0;
        for (std::size_t i = 0; i < day.size(); ++i) {
            if (day[i] && (!best || *day[i] > *best)) {
                best = *day[i];
                when = day.time_at(i) - from;
            }
        }
        if (!best) return std::nullopt;
        return when;
    };

    double sum_sin = 0.0, sum_cos = 0.0;
    std::size_t days = 0;
    for (std::int64_t d = first_day; d < last_day; ++d) {
        const Timestamp from = d * kSecondsPerDay;
        const auto pa = peak_time(a, from);
        const auto pb = peak_time(b, from);
        if (!pa || !pb) continue;
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(*pb - *pa) /
                             static_cast<double>(kSecondsPerDay);
        sum_sin += std::sin(angle);
        sum_cos += std::cos(angle);
        ++days;
    }
    if (days == 0) throw std::invalid_argument("no complete day with data in both series");
    double hours = std::atan2(sum_sin, sum_cos) * 12.0 / std::numbers::pi;
    if (hours <= -12.0) hours += 24.0;
    return hours;
}

Series hourly_average(const Series& series) {
    const Timestamp start = floor_div(series.start(), kSecondsPerHour) * kSecondsPerHour;
    const Timestamp end = -floor_div(-series.end(), kSecondsPerHour) * kSecondsPerHour;
    const auto hours = static_cast<std::size_t>((end - start) / kSecondsPerHour);
    std::vector<double> sum(hours, 0.0);
    std::vector<std::size_t> count(hours, 0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series[i]) continue;
        const auto h = static_cast<std::size_t>((series.time_at(i) - start) / kSecondsPerHour);
        sum[h] += *series[i];
        ++count[h];
    }
    std::vector<std::optional<double>> out(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        if (count[h] > 0) out[h] = sum[h] / static_cast<double>(count[h]);
    }
    return Series(series.channel(), start, kSecondsPerHour, std::move(out));
}

CorrelationReport correlate(const Series& a, const Series& b, const CorrelationOptions& options) {
    const Series x = options.hourly ? hourly_average(a) : a;
    const Series y = options.hourly ? hourly_average(b) : b;
    CorrelationReport r;
    r.pearson_r = pearson(x, y);
    const LagResult lag = cross_correlation(x, y, options.max_lag);
    r.best_lag = lag.best_lag;
    r.best_lag_r = lag.r;
    r.daily_peak_offset = daily_peak_offset(x, y);
    return r;
}

} // namespace mgi
