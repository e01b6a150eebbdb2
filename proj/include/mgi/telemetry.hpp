#pragma once

#include "mgi/time.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mgi {

enum class ChannelKind { Irradiance, WindSpeed, LoadPower, DcVoltage };
enum class Unit { W_per_m2, m_per_s, kW, V };

inline constexpr ChannelKind kAllChannels[] = {ChannelKind::Irradiance, ChannelKind::WindSpeed,
                                               ChannelKind::LoadPower, ChannelKind::DcVoltage};

// The kind determines the unit; there is no way to pair them differently.
constexpr Unit unit_of(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::Irradiance: return Unit::W_per_m2;
    case ChannelKind::WindSpeed: return Unit::m_per_s;
    case ChannelKind::LoadPower: return Unit::kW;
    case ChannelKind::DcVoltage: return Unit::V;
    }
    return Unit::V;
}

// Short names used in file names and schema files: irradiance, wind, load, voltage.
std::string_view channel_name(ChannelKind kind);
std::optional<ChannelKind> channel_from_name(std::string_view name);
std::string_view unit_symbol(Unit unit);
// Column header used by the telemetry CSV format, e.g. "load_kw".
std::string_view channel_column(ChannelKind kind);

// Physical value domain: irradiance, wind and load >= 0, voltage > 0.
bool in_physical_domain(ChannelKind kind, double value);

/// One uniformly sampled channel. Sample i sits at start + i * step; an absent
/// value is a gap. Only the grid structure is enforced here; the physical value
/// domain is checked at ingestion, since derived series (residuals) may leave it.
class Series {
public:
    Series(ChannelKind channel, Timestamp start, Duration step,
           std::vector<std::optional<double>> values);

    static Series dense(ChannelKind channel, Timestamp start, Duration step,
                        const std::vector<double>& values);

    ChannelKind channel() const { return channel_; }
    Unit unit() const { return unit_of(channel_); }
    Timestamp start() const { return start_; }
    Duration step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    // One past the last sample.
    Timestamp end() const { return start_ + static_cast<Timestamp>(values_.size()) * step_; }
    Timestamp time_at(std::size_t i) const { return start_ + static_cast<Timestamp>(i) * step_; }

    const std::vector<std::optional<double>>& values() const { return values_; }
    const std::optional<double>& operator[](std::size_t i) const { return values_[i]; }

    std::size_t gap_count() const;
    bool has_gaps() const { return gap_count() > 0; }
    // Throws std::invalid_argument if any sample is absent.
    std::vector<double> dense_values() const;

    // Samples with timestamps in [from, to). Throws if the overlap is empty.
    Series slice(Timestamp from, Timestamp to) const;

    bool same_grid(const Series& other) const {
        return start_ == other.start_ && step_ == other.step_ && size() == other.size();
    }

    bool operator==(const Series&) const = default;

private:
    ChannelKind channel_;
    Timestamp start_;
    Duration step_;
    std::vector<std::optional<double>> values_;
};

struct PeriodLabel {
    enum class Kind { P1_2018_2019, P2_2020_2021, Custom };
    Kind kind = Kind::Custom;
    std::string name;

    static PeriodLabel period1() { return {Kind::P1_2018_2019, "P1_2018_2019"}; }
    static PeriodLabel period2() { return {Kind::P2_2020_2021, "P2_2020_2021"}; }
    static PeriodLabel custom(std::string n) { return {Kind::Custom, std::move(n)}; }

    bool operator==(const PeriodLabel&) const = default;
};

/// Time-aligned channels covering one collection period. All member series share
/// start, step and length.
class TelemetryFrame {
public:
    explicit TelemetryFrame(std::map<ChannelKind, Series> series,
                            PeriodLabel label = PeriodLabel::custom("unlabeled"));

    bool has(ChannelKind kind) const { return series_.count(kind) != 0; }
    const Series& at(ChannelKind kind) const;
    const std::map<ChannelKind, Series>& series() const { return series_; }
    const PeriodLabel& label() const { return label_; }

    Timestamp start() const { return first().start(); }
    Timestamp end() const { return first().end(); }
    Duration step() const { return first().step(); }
    std::size_t size() const { return first().size(); }

    bool operator==(const TelemetryFrame&) const = default;

private:
    const Series& first() const { return series_.begin()->second; }

    std::map<ChannelKind, Series> series_;
    PeriodLabel label_;
};

// Frame restricted to [from, to). Throws std::invalid_argument if from >= to or
// the overlap is empty.
TelemetryFrame slice_period(const TelemetryFrame& frame, Timestamp from, Timestamp to);

// ---------------------------------------------------------------------------
// Ingestion

enum class DefectKind { Null, NonNumeric, OutOfRange, DuplicateTimestamp, Gap };
std::string_view defect_name(DefectKind kind);

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string timestamp_format = std::string(kIsoFormat);
    // Data column name -> channel. Each channel may appear at most once.
    std::vector<std::pair<std::string, ChannelKind>> columns;
};

struct Cell {
    std::optional<double> value;
    std::optional<DefectKind> defect;

    bool operator==(const Cell&) const = default;
};

struct RawRecord {
    std::size_t row = 0; // 0-based data row (header excluded)
    std::optional<Timestamp> timestamp;
    std::optional<DefectKind> timestamp_defect;
    // Parallel to CsvSchema::columns.
    std::vector<Cell> cells;

    bool operator==(const RawRecord&) const = default;
};

struct ParsedCsv {
    CsvSchema schema;
    std::vector<RawRecord> records;
};

// Thrown for schema problems: missing timestamp column, schema column absent from
// the header, duplicate channel mapping.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when the byte stream cannot be read at all (no header, stream failure).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ParsedCsv parse_csv(std::istream& in, const CsvSchema& schema);

// Writes records back in CSV form using the schema's column names.
void write_records_csv(std::ostream& out, const CsvSchema& schema,
                       const std::vector<RawRecord>& records);

enum class CleanPolicy { DropRow, NullifyCell };

struct RangeLimits {
    std::map<ChannelKind, std::pair<double, double>> limits;

    // irradiance [0,1500] W/m2, wind [0,40] m/s, load [0,8] kW, voltage [30,60] V
    static RangeLimits defaults();
};

struct Defect {
    std::size_t row = 0;
    std::string column;
    DefectKind kind = DefectKind::Null;

    bool operator==(const Defect&) const = default;
};

struct CleanReport {
    std::size_t rows_total = 0;
    std::size_t rows_dropped = 0;
    std::size_t cells_nullified = 0;
    std::vector<Defect> defects;
};

struct CleanResult {
    std::vector<RawRecord> records;
    CleanReport report;
};

/// Output records carry only numeric or absent cells and a valid timestamp.
/// Rows with an unusable timestamp are always dropped; later duplicates of a
/// timestamp are dropped (first kept). Empty cells are listed as gap defects but
/// never counted as modifications.
CleanResult clean(const ParsedCsv& parsed, CleanPolicy policy,
                  const RangeLimits& limits = RangeLimits::defaults());

struct GapFill {
    enum class Method { HoldLast, Linear, LeaveGap };
    Method method = Method::LeaveGap;
    // Longest run of missing samples that may be filled.
    std::size_t max_len = 0;

    static GapFill hold_last(std::size_t n) { return {Method::HoldLast, n}; }
    static GapFill linear(std::size_t n) { return {Method::Linear, n}; }
    static GapFill leave_gap() { return {Method::LeaveGap, 0}; }
};

struct Grid {
    Timestamp start;
    Duration step;
    std::size_t size;
};

struct Resampled {
    Series series;
    std::size_t filled = 0;
};

// Grid spanning the records, with start floored to a multiple of step.
Grid grid_for(const std::vector<RawRecord>& records, Duration step);

/// Bins records onto a uniform grid: sample i averages the present values with
/// timestamps in [t_i, t_i + step). Empty bins become gaps, then gap_fill runs.
Resampled resample(const std::vector<RawRecord>& records, std::size_t column,
                   ChannelKind channel, Duration step, GapFill gap_fill);
Resampled resample(const std::vector<RawRecord>& records, std::size_t column,
                   ChannelKind channel, const Grid& grid, GapFill gap_fill);

struct FrameBuild {
    TelemetryFrame frame;
    std::map<ChannelKind, std::size_t> filled;
};

// Resamples every schema channel onto one shared grid.
FrameBuild build_frame(const CleanResult& cleaned, const CsvSchema& schema, Duration step,
                       GapFill gap_fill, PeriodLabel label = PeriodLabel::custom("unlabeled"));

// ---------------------------------------------------------------------------
// Telemetry CSV format: timestamp column followed by channel_column() headers.

void write_frame_csv(std::ostream& out, const TelemetryFrame& frame);
// Schema for a header line in the telemetry CSV format.
CsvSchema frame_schema_from_header(std::string_view header_line);
// Step 0 infers the grid step from the smallest timestamp spacing.
TelemetryFrame read_frame_csv(std::istream& in, Duration step = 0,
                              PeriodLabel label = PeriodLabel::custom("unlabeled"));

// Shortest round-trip decimal text for a double.
std::string format_number(double value);

} // namespace mgi
