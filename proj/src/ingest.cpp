#include "lifecast/ingest.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "lifecast/errors.hpp"
#include "lifecast/textio.hpp"

namespace lifecast {

namespace {

struct RawEvent {
    std::string cascade;
    std::string source;
    std::string target;
    double time = 0.0;
};

struct ColumnMap {
    int cascade = 0, source = 1, target = 2, time = 3;
    int width = 4;
};

bool parse_header(const std::vector<std::string>& fields, ColumnMap& cols) {
    ColumnMap m{-1, -1, -1, -1, static_cast<int>(fields.size())};
    for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        if (fields[i] == "cascade_id") m.cascade = i;
        else if (fields[i] == "source") m.source = i;
        else if (fields[i] == "target") m.target = i;
        else if (fields[i] == "t") m.time = i;
    }
    if (m.cascade < 0 || m.source < 0 || m.target < 0 || m.time < 0) return false;
    cols = m;
    return true;
}

std::optional<std::string> parse_json_row(const std::string& line, RawEvent& ev) {
    nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
    if (row.is_discarded() || !row.is_object()) return "malformed JSON object";
    for (const char* key : {"cascade_id", "source", "target", "t"}) {
        if (!row.contains(key)) return std::string("missing field: ") + key;
    }
    auto as_string = [](const nlohmann::json& v) -> std::optional<std::string> {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        return std::nullopt;
    };
    auto cascade = as_string(row["cascade_id"]);
    auto source = as_string(row["source"]);
    auto target = as_string(row["target"]);
    if (!cascade || !source || !target) return "id fields must be strings or integers";
    const auto& t = row["t"];
    std::optional<double> minutes;
    if (t.is_number()) {
        minutes = t.get<double>();
    } else if (t.is_string()) {
        minutes = textio::parse_time_minutes(t.get<std::string>());
    }
    if (!minutes) return "unparseable time";
    ev = {*cascade, *source, *target, *minutes};
    return std::nullopt;
}

}  // namespace

std::vector<Cascade> ingest_cascades(const std::vector<std::string>& lines,
                                     std::size_t min_size, NodeTable& names,
                                     IngestReport& report) {
    // cascade id -> (event, input order); map keeps output sorted by id
    std::map<std::string, std::vector<RawEvent>> grouped;
    ColumnMap cols;
    bool have_header = false;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        std::size_t line_no = i + 1;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        report.total_rows += 1;

        RawEvent ev;
        if (line.front() == '{') {
            if (auto err = parse_json_row(line, ev)) {
                report.rejected.push_back({line_no, *err});
                continue;
            }
        } else {
            auto fields = textio::split_fields(line);
            if (!have_header && i == 0 && parse_header(fields, cols)) {
                have_header = true;
                report.total_rows -= 1;
                continue;
            }
            if (static_cast<int>(fields.size()) < (have_header ? cols.width : 4)) {
                report.rejected.push_back({line_no, "expected 4 fields"});
                continue;
            }
            ColumnMap m = have_header ? cols : ColumnMap{};
            auto minutes = textio::parse_time_minutes(fields[m.time]);
            if (!minutes) {
                report.rejected.push_back({line_no, "unparseable time"});
                continue;
            }
            ev = {fields[m.cascade], fields[m.source], fields[m.target], *minutes};
        }
        if (ev.cascade.empty() || ev.source.empty() || ev.target.empty()) {
            report.rejected.push_back({line_no, "empty id field"});
            continue;
        }
        if (ev.source == ev.target) {
            report.rejected.push_back({line_no, "self-loop reshare"});
            continue;
        }
        grouped[ev.cascade].push_back(std::move(ev));
    }

    std::vector<Cascade> cascades;
    for (auto& [id, raws] : grouped) {
        if (raws.size() < min_size) {
            report.dropped_small_cascades += 1;
            continue;
        }
        std::stable_sort(raws.begin(), raws.end(),
                         [](const RawEvent& a, const RawEvent& b) { return a.time < b.time; });
        Cascade c;
        c.id = id;
        c.events.reserve(raws.size());
        double t0 = raws.front().time;
        for (const RawEvent& r : raws) {
            c.events.push_back({names.intern(r.source), names.intern(r.target), r.time - t0});
        }
        report.accepted_events += c.events.size();
        cascades.push_back(std::move(c));
    }
    return cascades;
}

std::vector<Cascade> ingest_cascades_file(const std::filesystem::path& path,
                                          std::size_t min_size, NodeTable& names,
                                          IngestReport& report) {
    return ingest_cascades(textio::read_lines(path), min_size, names, report);
}

HistoryGraph load_history_file(const std::filesystem::path& path, NodeTable& names) {
    HistoryGraph g;
    auto lines = textio::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = textio::split_fields(lines[i]);
        if (i == 0 && fields.size() >= 2 && fields[0] == "source" && fields[1] == "target") {
            continue;
        }
        if (fields.size() < 2) {
            throw ConfigError("history graph row " + std::to_string(i + 1) +
                              ": expected two node columns");
        }
        if (fields[0] == fields[1]) continue;
        g.add_edge(names.intern(fields[0]), names.intern(fields[1]));
    }
    g.finalize();
    return g;
}

std::string normalized_event_log(const std::vector<Cascade>& cascades,
                                 const NodeTable& names) {
    std::string out = "cascade_id,source,target,t\n";
    for (const Cascade& c : cascades) {
        for (const ReshareEvent& e : c.events) {
            out += c.id;
            out += ',';
            out += names.name(e.source);
            out += ',';
            out += names.name(e.target);
            out += ',';
            out += textio::format_double(e.time);
            out += '\n';
        }
    }
    return out;
}

}  // namespace lifecast
