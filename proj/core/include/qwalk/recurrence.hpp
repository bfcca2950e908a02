#pragma once

#include <optional>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/stationary.hpp"

namespace qwalk {

enum class Engine { Direct, Fourier };

struct ReturnSample {
    int t;
    double p0;
};

/// P(0,0,t) at the admissible times t = 0, r+1, 2(r+1), ... <= t_max.
/// Other times are identically zero by reachability and are omitted.
struct ReturnSeries {
    std::vector<ReturnSample> entries;
    BiasParams params;
    InitialCoinSpec initial;
};

ReturnSeries return_probability_series(const BiasParams& params, const InitialCoinSpec& initial,
                                       int t_max, Engine engine, int grid_n = 0,
                                       CoinMode coin_mode = CoinMode::Corrected);

struct FitWindow {
    int t_lo, t_hi;
};

/// Power-law fit p0(t) ~ e^{intercept} t^{-exponent} on the log-log
/// upper envelope (max over runs of 4 admissible times) within the window.
struct DecayFit {
    double exponent = 0.0;
    double intercept = 0.0;
    FitWindow window{0, 0};
    double residual = 0.0;  // RMS in log-log over the envelope points
    int points_used = 0;
};

/// Requires >= 8 admissible points with p0 > 0 inside the window.
DecayFit fit_decay_exponent(const ReturnSeries& series, FitWindow window);

/// Partial products Pi_{0 < t <= T} (1 - p0(t)) and the running estimate
/// 1 - Pi. The extrapolation integrates the fitted power-law tail; it is
/// omitted when the fit is absent or eta <= 1 (divergent sum => the
/// estimate tends to 1 on its own).
struct PolyaEstimate {
    std::vector<std::pair<int, double>> partial_products;
    std::vector<std::pair<int, double>> polya_partial;
    std::optional<double> extrapolated;
};
PolyaEstimate polya_partial_products(const ReturnSeries& series,
                                     const std::optional<DecayFit>& fit = std::nullopt);

struct MeanSample {
    int t;
    double mean_x, mean_y;
};
struct MeanTrajectory {
    std::vector<MeanSample> samples;
    BiasParams params;
    InitialCoinSpec initial;
};

/// (<x>, <y>)(t) for t = 0..t_max from the direct engine.
MeanTrajectory mean_value_probe(const BiasParams& params, const InitialCoinSpec& initial,
                                int t_max);

struct ScanRow {
    double p;
    int r;
    double a;
    double phi;
    InitialVariant variant;
    int t_max;
    double eta;
    double eta_residual;
    double polya_partial;
    double mean_x_over_t;
    double mean_y_over_t;
    bool hull_criterion;
};

/// Joint dataset over the parameter grid: decay fit, Pólya partial at t_max,
/// scaled means, and the velocity-hull criterion per cell. Rows ordered by
/// grid index (p outermost, phi innermost).
std::vector<ScanRow> conjecture_scan(const std::vector<double>& p_grid,
                                     const std::vector<int>& r_grid,
                                     const std::vector<double>& a_grid,
                                     const std::vector<double>& phi_grid,
                                     InitialVariant variant, int t_max);

/// Default fit window used by the scan and the CLI: [max(r+1, t_max/8), t_max].
FitWindow default_fit_window(const BiasParams& params, int t_max);

}  // namespace qwalk
