#include "delfront/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "delfront/errors.hpp"
#include "delfront/version.hpp"

namespace delfront::io {

std::string fmt17(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_profile_csv(std::ostream& os, const WaveProfile& w) {
    os << "t,phi\n";
    for (size_t i = 0; i < w.t.size(); ++i)
        os << fmt17(w.t[i]) << ',' << fmt17(w.phi[i]) << '\n';
}

WaveProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile file: " + path);
    WaveProfile w;
    std::string line;
    bool header = true;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (header) { // tolerate a missing header if the first field parses
            header = false;
            if (line.find("t,") == 0 || line.find("t ,") == 0) continue;
        }
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw IoError("malformed profile row at line " + std::to_string(lineno) +
                          " of " + path);
        try {
            w.t.push_back(std::stod(a));
            w.phi.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw IoError("non-numeric profile row at line " + std::to_string(lineno) +
                          " of " + path);
        }
    }
    if (w.t.size() < 4) throw IoError("profile file too short: " + path);
    for (size_t i = 1; i < w.t.size(); ++i)
        if (!(w.t[i] > w.t[i - 1]))
            throw IoError("profile grid must increase strictly: " + path);
    return w;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    size_t lineno = 0;
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError("config line " + std::to_string(lineno) + " of " + path +
                                " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ArgumentError("config line " + std::to_string(lineno) + " of " + path +
                                " has an empty key or value");
        if (kv.count(key))
            throw ArgumentError("duplicate config key '" + key + "' in " + path);
        kv[key] = val;
    }
    return kv;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.parameters) params[k] = v;
    j["parameters"] = params;
    j["outputs"] = m.outputs;
    j["versions"] = {{"delfront", DELFRONT_VERSION},
                     {"compiler",
#if defined(__clang__)
                      "clang " __clang_version__
#elif defined(__GNUC__)
                      "gcc " __VERSION__
#else
                      "unknown"
#endif
                     }};
    j["wall_time_s"] = m.wall_time_s;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

} // namespace delfront::io
