#pragma once
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "delfront/wave.hpp"

namespace delfront::io {

// 17 significant digits; infinities serialize as "inf"/"-inf". Output files
// for fixed inputs are byte-identical across runs and --jobs settings.
std::string fmt17(double x);

void write_profile_csv(std::ostream& os, const WaveProfile& w); // header "t,phi"
WaveProfile read_profile_csv(const std::string& path);

// key = value pairs, '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> read_config(const std::string& path);

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;
};

// JSON with a stable key order; wall_time_s is the one field allowed to vary
// between runs.
void write_manifest(const std::string& path, const RunManifest& m);

} // namespace delfront::io
