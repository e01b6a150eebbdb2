#include "mgi/telemetry.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

namespace mgi {

std::string format_number(double value) {
    if (value == 0.0) value = 0.0; // drop the sign of -0
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_records_csv(std::ostream& out, const CsvSchema& schema,
                       const std::vector<RawRecord>& records) {
    out << schema.timestamp_column;
    for (const auto& [name, kind] : schema.columns) out << ',' << name;
    out << '\n';
    for (const RawRecord& rec : records) {
        if (rec.timestamp) out << format_timestamp(*rec.timestamp, schema.timestamp_format);
        for (const Cell& cell : rec.cells) {
            out << ',';
            if (cell.value) out << format_number(*cell.value);
        }
        out << '\n';
    }
}

void write_frame_csv(std::ostream& out, const TelemetryFrame& frame) {
    out << "timestamp";
    for (const auto& [kind, s] : frame.series()) out << ',' << channel_column(kind);
    out << '\n';
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out << format_timestamp(frame.start() + static_cast<Timestamp>(i) * frame.step());
        for (const auto& [kind, s] : frame.series()) {
            out << ',';
            if (s[i]) out << format_number(*s[i]);
        }
        out << '\n';
    }
}

CsvSchema frame_schema_from_header(std::string_view header_line) {
    CsvSchema schema;
    bool has_timestamp = false;
    std::size_t pos = 0;
    while (pos <= header_line.size()) {
        std::size_t comma = header_line.find(',', pos);
        if (comma == std::string_view::npos) comma = header_line.size();
        std::string_view name = header_line.substr(pos, comma - pos);
        while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.remove_suffix(1);
        if (name == "timestamp") {
            has_timestamp = true;
        } else if (auto kind = channel_from_name(name)) {
            schema.columns.emplace_back(std::string(name), *kind);
        }
        pos = comma + 1;
    }
    if (!has_timestamp) throw SchemaError("telemetry CSV has no timestamp column");
    if (schema.columns.empty()) throw SchemaError("telemetry CSV has no channel columns");
    return schema;
}

TelemetryFrame read_frame_csv(std::istream& in, Duration step, PeriodLabel label) {
    if (!in) throw ParseError("unreadable input stream");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto eol = text.find('\n');
    if (text.empty()) throw ParseError("empty telemetry file");
    const CsvSchema schema = frame_schema_from_header(std::string_view(text).substr(0, eol));

    std::istringstream body(text);
    const ParsedCsv parsed = parse_csv(body, schema);
    const CleanResult cleaned = clean(parsed, CleanPolicy::NullifyCell, RangeLimits{});
    if (cleaned.records.empty()) throw ParseError("telemetry CSV has no usable rows");

    if (step <= 0) {
        Duration smallest = std::numeric_limits<Duration>::max();
        for (std::size_t i = 1; i < cleaned.records.size(); ++i) {
            const Duration d = *cleaned.records[i].timestamp - *cleaned.records[i - 1].timestamp;
            if (d > 0 && d < smallest) smallest = d;
        }
        step = smallest == std::numeric_limits<Duration>::max() ? 10 * kSecondsPerMinute : smallest;
    }
    return build_frame(cleaned, schema, step, GapFill::leave_gap(), std::move(label)).frame;
}

} // namespace mgi
