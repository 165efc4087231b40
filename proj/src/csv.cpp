#include "chaosforge/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chaosforge/artifact.hpp"

namespace chaosforge {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

static double parse_value(const std::string& tok, const std::string& path, size_t lineno) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t' || *(e - 1) == '\r')) --e;
    double v = 0.0;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw InputError(path + ":" + std::to_string(lineno) + ": bad numeric field '" + tok + "'");
    if (!std::isfinite(v))
        throw InputError(path + ":" + std::to_string(lineno) + ": non-finite value rejected");
    return v;
}

MultivariateSeries read_series_csv(const std::string& path, bool require_observation) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    size_t lineno = 0;
    // skip comment lines
    do {
        if (!std::getline(in, line)) throw InputError(path + ": empty file");
        ++lineno;
    } while (!line.empty() && line[0] == '#');
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "time")
        throw InputError(path + ": header must start with 'time' and have at least one channel");

    MultivariateSeries s;
    for (size_t i = 1; i < header.size(); ++i) {
        const std::string& h = header[i];
        auto pos = h.rfind(':');
        if (pos == std::string::npos)
            throw InputError(path + ": channel header '" + h + "' missing ':obs' or ':act' role");
        std::string role = h.substr(pos + 1);
        if (role == "obs")
            s.roles.push_back(Role::observation);
        else if (role == "act")
            s.roles.push_back(Role::action);
        else
            throw InputError(path + ": unknown channel role '" + role + "'");
        s.channel_names.push_back(h.substr(0, pos));
    }
    s.values.resize(s.channel_names.size());

    std::vector<double> times;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw InputError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        times.push_back(parse_value(fields[0], path, lineno));
        for (size_t c = 0; c < s.values.size(); ++c)
            s.values[c].push_back(parse_value(fields[c + 1], path, lineno));
    }
    if (times.empty()) throw InputError(path + ": no data rows");
    s.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    if (s.dt <= 0) s.dt = 1.0;
    s.validate(require_observation);
    return s;
}

void write_series_csv(const std::string& path, const MultivariateSeries& s,
                      const std::string& meta) {
    std::string out;
    if (!meta.empty()) out += "# " + meta + "\n";
    out += "time";
    for (size_t c = 0; c < s.channels(); ++c) {
        out += ",";
        out += s.channel_names[c];
        out += s.roles[c] == Role::observation ? ":obs" : ":act";
    }
    out += "\n";
    const size_t T = s.length();
    for (size_t i = 0; i < T; ++i) {
        out += format_double(static_cast<double>(i) * s.dt);
        for (size_t c = 0; c < s.channels(); ++c) {
            out += ",";
            out += format_double(s.values[c][i]);
        }
        out += "\n";
    }
    atomic_write(path, out);
}

std::vector<EventRecord> read_events_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    size_t lineno = 0;
    do {
        if (!std::getline(in, line)) throw InputError(path + ": empty file");
        ++lineno;
    } while (!line.empty() && line[0] == '#');
    std::vector<EventRecord> out;
    // first non-comment line is the header
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 3)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected 3 fields");
        EventRecord e;
        e.start_index = static_cast<long>(parse_value(f[0], path, lineno));
        e.duration = static_cast<long>(parse_value(f[1], path, lineno));
        e.magnitude = parse_value(f[2], path, lineno);
        out.push_back(e);
    }
    return out;
}

}  // namespace chaosforge
