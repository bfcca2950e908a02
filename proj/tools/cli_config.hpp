#pragma once

#include <string>
#include <vector>

#include "qwalk/recurrence.hpp"

namespace qwalk::cli {

/// Effective run parameters: defaults, overlaid by a key=value config file,
/// overlaid by command-line flags. Validated against the owning module's
/// preconditions before any computation starts.
struct RunConfig {
    double p = 0.5;
    int r = 1;
    double a = 1.0;
    double phi = 0.0;
    InitialVariant variant = InitialVariant::AsPrinted;
    CoinMode coin_mode = CoinMode::Corrected;
    Engine engine = Engine::Fourier;
    int t_max = 256;
    int grid_n = 0;  // 0 selects the aliasing-safe power of two
    std::string output_path = "out";
    double export_floor = 1e-15;
    double threshold_fraction = 0.5;
    int fit_lo = 0, fit_hi = 0;  // 0 selects [max(r+1, t_max/8), t_max]
    int seeds = 12;
    int threads = 0;
    bool force_nonunitary = false;
    bool plot_script = false;
    std::vector<double> scan_p{0.5};
    std::vector<int> scan_r{1};
    std::vector<double> scan_a{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> scan_phi{0.0, kPi / 2, kPi};

    BiasParams bias() const { return BiasParams{p, r}; }
    InitialCoinSpec initial() const { return InitialCoinSpec{a, phi, variant}; }
    int effective_grid_n() const;
    FitWindow effective_fit_window() const;

    /// Throws std::invalid_argument naming the offending key.
    void check() const;
};

/// Applies one key=value pair; throws std::invalid_argument on unknown keys
/// or malformed values. `where` prefixes error messages (e.g. "cfg.txt:3").
void apply_key(RunConfig& config, const std::string& key, const std::string& value,
               const std::string& where);

/// Defaults overlaid with a flat key=value file (blank lines and '#'
/// comments allowed). Errors carry the file name and line number.
RunConfig load_config(const std::string& path);

}  // namespace qwalk::cli
