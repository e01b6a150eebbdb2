#include "mgi/telemetry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

namespace mgi {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(pos)));
            break;
        }
        fields.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

bool is_null_token(std::string_view s) {
    static constexpr std::string_view tokens[] = {"n/a", "na", "#n/a", "null", "none", "nan", "-"};
    return std::any_of(std::begin(tokens), std::end(tokens),
                       [&](std::string_view t) { return iequals(s, t); });
}

Cell parse_cell(std::string_view text) {
    if (text.empty()) return {};
    if (is_null_token(text)) return {std::nullopt, DefectKind::Null};
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return {std::nullopt, DefectKind::NonNumeric};
    }
    return {value, std::nullopt};
}

} // namespace

std::string_view channel_name(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::Irradiance: return "irradiance";
    case ChannelKind::WindSpeed: return "wind";
    case ChannelKind::LoadPower: return "load";
    case ChannelKind::DcVoltage: return "voltage";
    }
    return "unknown";
}

std::optional<ChannelKind> channel_from_name(std::string_view name) {
    for (ChannelKind k : kAllChannels) {
        if (name == channel_name(k) || name == channel_column(k)) return k;
    }
    return std::nullopt;
}

std::string_view unit_symbol(Unit unit) {
    switch (unit) {
    case Unit::W_per_m2: return "W/m2";
    case Unit::m_per_s: return "m/s";
    case Unit::kW: return "kW";
    case Unit::V: return "V";
    }
    return "";
}

std::string_view channel_column(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::Irradiance: return "irradiance_w_m2";
    case ChannelKind::WindSpeed: return "wind_m_s";
    case ChannelKind::LoadPower: return "load_kw";
    case ChannelKind::DcVoltage: return "dc_voltage_v";
    }
    return "unknown";
}

bool in_physical_domain(ChannelKind kind, double value) {
    if (!std::isfinite(value)) return false;
    return kind == ChannelKind::DcVoltage ? value > 0.0 : value >= 0.0;
}

std::string_view defect_name(DefectKind kind) {
    switch (kind) {
    case DefectKind::Null: return "null";
    case DefectKind::NonNumeric: return "non_numeric";
    case DefectKind::OutOfRange: return "out_of_range";
    case DefectKind::DuplicateTimestamp: return "duplicate_timestamp";
    case DefectKind::Gap: return "gap";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

Series::Series(ChannelKind channel, Timestamp start, Duration step,
               std::vector<std::optional<double>> values)
    : channel_(channel), start_(start), step_(step), values_(std::move(values)) {
    if (step_ <= 0) throw std::invalid_argument("series step must be positive");
    if (values_.empty()) throw std::invalid_argument("series must not be empty");
}

Series Series::dense(ChannelKind channel, Timestamp start, Duration step,
                     const std::vector<double>& values) {
    return Series(channel, start, step, std::vector<std::optional<double>>(values.begin(), values.end()));
}

std::size_t Series::gap_count() const {
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](const auto& v) { return !v.has_value(); }));
}

std::vector<double> Series::dense_values() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) {
        if (!v) throw std::invalid_argument("series contains gaps");
        out.push_back(*v);
    }
    return out;
}

Series Series::slice(Timestamp from, Timestamp to) const {
    if (from >= to) throw std::invalid_argument("slice requires from < to");
    const auto n = static_cast<std::int64_t>(values_.size());
    const std::int64_t i0 = std::clamp<std::int64_t>(ceil_div(from - start_, step_), 0, n);
    const std::int64_t i1 = std::clamp<std::int64_t>(ceil_div(to - start_, step_), 0, n);
    if (i0 >= i1) throw std::invalid_argument("slice does not overlap the series");
    return Series(channel_, time_at(static_cast<std::size_t>(i0)), step_,
                  {values_.begin() + i0, values_.begin() + i1});
}

TelemetryFrame::TelemetryFrame(std::map<ChannelKind, Series> series, PeriodLabel label)
    : series_(std::move(series)), label_(std::move(label)) {
    if (series_.empty()) throw std::invalid_argument("frame needs at least one channel");
    const Series& ref = first();
    for (const auto& [kind, s] : series_) {
        if (s.channel() != kind) throw std::invalid_argument("frame key does not match series channel");
        if (!s.same_grid(ref)) throw std::invalid_argument("frame channels are not aligned");
    }
}

const Series& TelemetryFrame::at(ChannelKind kind) const {
    auto it = series_.find(kind);
    if (it == series_.end()) {
        throw std::out_of_range("frame has no channel " + std::string(channel_name(kind)));
    }
    return it->second;
}

TelemetryFrame slice_period(const TelemetryFrame& frame, Timestamp from, Timestamp to) {
    std::map<ChannelKind, Series> out;
    for (const auto& [kind, s] : frame.series()) {
        out.emplace(kind, s.slice(from, to));
    }
    return TelemetryFrame(std::move(out), frame.label());
}

// ---------------------------------------------------------------------------

ParsedCsv parse_csv(std::istream& in, const CsvSchema& schema) {
    if (!in) throw ParseError("unreadable input stream");
    std::string line;
    if (!std::getline(in, line)) throw ParseError("input has no header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    auto find_column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    };

    const auto ts_index = find_column(schema.timestamp_column);
    if (!ts_index) throw SchemaError("timestamp column '" + schema.timestamp_column + "' not found");

    std::vector<std::size_t> indices;
    std::set<ChannelKind> seen_channels;
    for (const auto& [name, kind] : schema.columns) {
        if (name == schema.timestamp_column) throw SchemaError("column '" + name + "' is the timestamp column");
        if (!seen_channels.insert(kind).second) {
            throw SchemaError("channel " + std::string(channel_name(kind)) + " mapped twice");
        }
        const auto idx = find_column(name);
        if (!idx) throw SchemaError("schema column '" + name + "' not found in header");
        indices.push_back(*idx);
    }

    ParsedCsv parsed{schema, {}};
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);

        RawRecord rec;
        rec.row = row++;
        if (*ts_index >= fields.size() || fields[*ts_index].empty()) {
            rec.timestamp_defect = DefectKind::Null;
        } else if (auto t = try_parse_timestamp(fields[*ts_index], schema.timestamp_format)) {
            rec.timestamp = *t;
        } else {
            rec.timestamp_defect = DefectKind::NonNumeric;
        }
        rec.cells.reserve(indices.size());
        for (std::size_t idx : indices) {
            if (idx >= fields.size()) {
                rec.cells.push_back({std::nullopt, DefectKind::Null});
            } else {
                rec.cells.push_back(parse_cell(fields[idx]));
            }
        }
        parsed.records.push_back(std::move(rec));
    }
    if (in.bad()) throw ParseError("read failure");
    return parsed;
}

RangeLimits RangeLimits::defaults() {
    RangeLimits r;
    r.limits = {{ChannelKind::Irradiance, {0.0, 1500.0}},
                {ChannelKind::WindSpeed, {0.0, 40.0}},
                {ChannelKind::LoadPower, {0.0, 8.0}},
                {ChannelKind::DcVoltage, {30.0, 60.0}}};
    return r;
}

CleanResult clean(const ParsedCsv& parsed, CleanPolicy policy, const RangeLimits& limits) {
    CleanResult result;
    CleanReport& report = result.report;
    report.rows_total = parsed.records.size();
    const auto& columns = parsed.schema.columns;

    std::set<Timestamp> seen;
    for (const RawRecord& rec : parsed.records) {
        if (!rec.timestamp) {
            report.defects.push_back({rec.row, parsed.schema.timestamp_column,
                                      rec.timestamp_defect.value_or(DefectKind::Null)});
            ++report.rows_dropped;
            continue;
        }
        if (!seen.insert(*rec.timestamp).second) {
            report.defects.push_back({rec.row, parsed.schema.timestamp_column,
                                      DefectKind::DuplicateTimestamp});
            ++report.rows_dropped;
            continue;
        }

        RawRecord out = rec;
        out.timestamp_defect.reset();
        bool row_bad = false;
        std::size_t nullified = 0;
        for (std::size_t j = 0; j < out.cells.size(); ++j) {
            Cell& cell = out.cells[j];
            const std::string& column = columns[j].first;
            std::optional<DefectKind> defect = cell.defect;
            if (!defect && cell.value) {
                auto lim = limits.limits.find(columns[j].second);
                if (lim != limits.limits.end() &&
                    (*cell.value < lim->second.first || *cell.value > lim->second.second)) {
                    defect = DefectKind::OutOfRange;
                }
            }
            if (defect) {
                report.defects.push_back({rec.row, column, *defect});
                cell.value.reset();
                cell.defect.reset();
                row_bad = true;
                ++nullified;
            } else if (!cell.value) {
                report.defects.push_back({rec.row, column, DefectKind::Gap});
            }
        }
        if (row_bad && policy == CleanPolicy::DropRow) {
            ++report.rows_dropped;
            continue;
        }
        report.cells_nullified += nullified;
        result.records.push_back(std::move(out));
    }
    return result;
}

// ---------------------------------------------------------------------------

namespace {

void check_records(const std::vector<RawRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no records to resample");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].timestamp) throw std::invalid_argument("record without timestamp");
        if (i > 0 && *records[i].timestamp <= *records[i - 1].timestamp) {
            throw std::invalid_argument("record timestamps are not strictly increasing");
        }
    }
}

std::size_t fill_gaps(std::vector<std::optional<double>>& v, GapFill fill) {
    if (fill.method == GapFill::Method::LeaveGap || fill.max_len == 0) return 0;
    std::size_t filled = 0;
    const std::size_t n = v.size();
    std::size_t i = 0;
    while (i < n) {
        if (v[i]) {
            ++i;
            continue;
        }
        const std::size_t a = i;
        while (i < n && !v[i]) ++i;
        const std::size_t b = i;
        const std::size_t len = b - a;
        if (len > fill.max_len || a == 0) continue;
        const double left = *v[a - 1];
        if (fill.method == GapFill::Method::HoldLast) {
            for (std::size_t k = a; k < b; ++k) v[k] = left;
            filled += len;
        } else if (b < n) {
            const double right = *v[b];
            const double span = static_cast<double>(b - (a - 1));
            for (std::size_t k = a; k < b; ++k) {
                v[k] = left + (right - left) * static_cast<double>(k - (a - 1)) / span;
            }
            filled += len;
        }
    }
    return filled;
}

} // namespace

Grid grid_for(const std::vector<RawRecord>& records, Duration step) {
    if (step <= 0) throw std::invalid_argument("step must be positive");
    check_records(records);
    const Timestamp first = floor_div(*records.front().timestamp, step) * step;
    const Timestamp last = floor_div(*records.back().timestamp, step) * step;
    return {first, step, static_cast<std::size_t>((last - first) / step + 1)};
}

Resampled resample(const std::vector<RawRecord>& records, std::size_t column, ChannelKind channel,
                   Duration step, GapFill gap_fill) {
    return resample(records, column, channel, grid_for(records, step), gap_fill);
}

Resampled resample(const std::vector<RawRecord>& records, std::size_t column, ChannelKind channel,
                   const Grid& grid, GapFill gap_fill) {
    if (grid.step <= 0 || grid.size == 0) throw std::invalid_argument("invalid grid");
    check_records(records);

    std::vector<double> sum(grid.size, 0.0);
    std::vector<std::size_t> count(grid.size, 0);
    for (const RawRecord& rec : records) {
        if (column >= rec.cells.size()) throw std::invalid_argument("record column out of range");
        const auto& value = rec.cells[column].value;
        if (!value) continue;
        const std::int64_t idx = floor_div(*rec.timestamp - grid.start, grid.step);
        if (idx < 0 || idx >= static_cast<std::int64_t>(grid.size)) continue;
        sum[static_cast<std::size_t>(idx)] += *value;
        ++count[static_cast<std::size_t>(idx)];
    }

    std::vector<std::optional<double>> values(grid.size);
    for (std::size_t i = 0; i < grid.size; ++i) {
        if (count[i] == 1) {
            values[i] = sum[i];
        } else if (count[i] > 1) {
            values[i] = sum[i] / static_cast<double>(count[i]);
        }
    }
    const std::size_t filled = fill_gaps(values, gap_fill);
    return {Series(channel, grid.start, grid.step, std::move(values)), filled};
}

FrameBuild build_frame(const CleanResult& cleaned, const CsvSchema& schema, Duration step,
                       GapFill gap_fill, PeriodLabel label) {
    if (schema.columns.empty()) throw SchemaError("schema maps no channels");
    const Grid grid = grid_for(cleaned.records, step);
    std::map<ChannelKind, Series> series;
    std::map<ChannelKind, std::size_t> filled;
    for (std::size_t j = 0; j < schema.columns.size(); ++j) {
        const ChannelKind kind = schema.columns[j].second;
        Resampled r = resample(cleaned.records, j, kind, grid, gap_fill);
        filled[kind] = r.filled;
        series.emplace(kind, std::move(r.series));
    }
    return {TelemetryFrame(std::move(series), std::move(label)), std::move(filled)};
}

} // namespace mgi
