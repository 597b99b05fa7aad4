#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wdmqkd/optimize.hpp"

namespace wdmqkd {

struct McConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
};

enum class OutputFormat { Table, Structured };

struct OutputConfig {
    std::string path;  // empty: stdout
    OutputFormat format = OutputFormat::Table;
};

struct SweepConfig {
    SweepAxis axis = SweepAxis::TauP;
    double from = 0.0;
    double to = 0.0;
    int points = 0;
    bool log_scale = true;
    bool optimize_mu = true;
    double mu_lo = kDefaultMuLo;
    double mu_hi = kDefaultMuHi;
    double tau_rec = 0.0;

    std::vector<double> make_grid() const;
};

// Full run description as read from a config file. Defaults follow the
// standard 100 GHz WDM grid with 50 GHz channels and symmetric T = 1e-3.
struct RunConfig {
    SourceParams source;
    bool optimize_mu = false;  // "mu = optimize"
    double mu_lo = kDefaultMuLo;
    double mu_hi = kDefaultMuHi;
    ChannelPlan channels;
    LinkParams link;
    std::optional<SweepConfig> sweep;
    McConfig mc;
    OutputConfig output;

    void validate() const;
};

RunConfig default_config();

// Parses the sectioned key = value format; errors carry "line N: section.key".
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical text of the effective configuration (defaults filled in); parsing
// it back yields an equivalent RunConfig.
std::string render_config(const RunConfig& cfg);

std::uint64_t config_hash(const RunConfig& cfg);

// "3 THz", "2pi 100 GHz", "333 ps", bare numbers in rad/s or s.
double parse_frequency(const std::string& text);  // -> rad/s
double parse_time(const std::string& text);       // -> s

}  // namespace wdmqkd
