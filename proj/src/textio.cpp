#include "lifecast/textio.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "lifecast/errors.hpp"

namespace lifecast::textio {

namespace {

std::vector<std::string> split_on(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// days since 1970-01-01 for a civil date; Howard Hinnant's algorithm
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<double> parse_iso_timestamp(std::string_view s) {
    // YYYY-MM-DD[T ]HH:MM[:SS[.frac]][Z]
    if (s.size() < 16 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
        return ec == std::errc{} && p == s.data() + pos + len;
    };
    int year, month, day, hour, minute;
    if (!num(0, 4, year) || !num(5, 2, month) || !num(8, 2, day) || !num(11, 2, hour) ||
        !num(14, 2, minute)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59) {
        return std::nullopt;
    }
    double seconds = 0.0;
    std::size_t rest = 16;
    if (rest < s.size() && s[rest] == ':') {
        std::size_t end = rest + 1;
        while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) {
            ++end;
        }
        auto sec = parse_number(s.substr(rest + 1, end - rest - 1));
        if (!sec || *sec < 0.0 || *sec >= 61.0) return std::nullopt;
        seconds = *sec;
        rest = end;
    }
    if (rest < s.size()) {
        if (s.substr(rest) != "Z") return std::nullopt;
    }
    double epoch_sec = static_cast<double>(days_from_civil(year, month, day)) * 86400.0 +
                       hour * 3600.0 + minute * 60.0 + seconds;
    return epoch_sec / 60.0;
}

}  // namespace

std::vector<std::string> split_fields(std::string_view line) {
    line = trim(line);
    if (line.find('\t') != std::string_view::npos) {
        auto fields = split_on(line, '\t');
        for (auto& f : fields) f = std::string(trim(f));
        return fields;
    }
    if (line.find(',') != std::string_view::npos) {
        auto fields = split_on(line, ',');
        for (auto& f : fields) f = std::string(trim(f));
        return fields;
    }
    std::vector<std::string> fields;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    return fields;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<double> parse_time_minutes(std::string_view s) {
    if (auto v = parse_number(s)) return v;
    return parse_iso_timestamp(trim(s));
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(std::move(line));
    return lines;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace lifecast::textio
