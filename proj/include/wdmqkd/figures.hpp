#pragma once

#include <string>
#include <vector>

namespace wdmqkd {

// Flat numeric table with named columns; the common currency between sweeps,
// canned figure runs and the CLI writers.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;
};

struct FigureInfo {
    std::string id;
    std::string description;
};

// Registered parameter-study ids (3a..10 plus the channel-width study).
std::vector<FigureInfo> figure_registry();

// Runs the canned sweep behind one figure id; throws ConfigError for an
// unknown id.
Table run_figure(const std::string& id, int jobs = 0);

// Relative detuning (K_M - K_Poisson) / K_Poisson of the mu-optimized
// single-pair WDM rate when the exact M-mode pair statistics replaces the
// Poisson approximation; the quantity plotted by figure 10.
double appendix_delta_k(double sigma_cr, double tau_p, int modes, int jobs = 0);

}  // namespace wdmqkd
