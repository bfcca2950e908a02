#include "qwalk/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qwalk/spectral.hpp"

namespace qwalk {

ReturnSeries return_probability_series(const BiasParams& params, const InitialCoinSpec& initial,
                                       int t_max, Engine engine, int grid_n,
                                       CoinMode coin_mode) {
    validate(params);
    if (t_max < params.r + 1)
        throw std::invalid_argument("t_max must be at least r+1");

    ReturnSeries series;
    series.params = params;
    series.initial = initial;

    const CoinMatrix coin = build_coin(params, coin_mode);
    const CoinState4 state = build_initial_state(initial);
    const int period = params.r + 1;

    if (engine == Engine::Direct) {
        AmplitudeField field = new_localized(params, state);
        series.entries.push_back({0, probability_at(field, 0, 0)});
        for (int t = 1; t <= t_max; ++t) {
            step(field, coin);
            if (t % period == 0) series.entries.push_back({t, probability_at(field, 0, 0)});
        }
    } else {
        std::vector<int> times;
        for (int t = 0; t <= t_max; t += period) times.push_back(t);
        const std::vector<Vec4c> amps =
            amplitude_at_origin_series(state, params, coin, times, grid_n);
        for (std::size_t i = 0; i < times.size(); ++i)
            series.entries.push_back({times[i], amps[i].squaredNorm()});
    }
    return series;
}

DecayFit fit_decay_exponent(const ReturnSeries& series, FitWindow window) {
    std::vector<ReturnSample> in_window;
    for (const ReturnSample& s : series.entries)
        if (s.t >= window.t_lo && s.t <= window.t_hi && s.t > 0) in_window.push_back(s);

    int positive = 0;
    for (const ReturnSample& s : in_window)
        if (s.p0 > 0.0) ++positive;
    if (positive < 8)
        throw std::invalid_argument("decay fit needs >= 8 admissible points with p0 > 0, have " +
                                    std::to_string(positive));

    // upper envelope: the max over each run of 4 admissible times
    std::vector<std::pair<double, double>> env;  // (log t, log p0)
    for (std::size_t i = 0; i < in_window.size(); i += 4) {
        const std::size_t end = std::min(i + 4, in_window.size());
        double best = 0.0;
        int best_t = 0;
        for (std::size_t j = i; j < end; ++j)
            if (in_window[j].p0 > best) {
                best = in_window[j].p0;
                best_t = in_window[j].t;
            }
        if (best > 0.0) env.emplace_back(std::log(double(best_t)), std::log(best));
    }
    if (env.size() < 2) throw std::invalid_argument("decay fit needs >= 2 envelope points");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : env) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(env.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;

    DecayFit fit;
    fit.exponent = -slope;
    fit.intercept = intercept;
    fit.window = window;
    fit.points_used = int(env.size());
    double ss = 0.0;
    for (const auto& [x, y] : env) {
        const double resid = y - (slope * x + intercept);
        ss += resid * resid;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

PolyaEstimate polya_partial_products(const ReturnSeries& series,
                                     const std::optional<DecayFit>& fit) {
    if (series.entries.empty()) throw std::invalid_argument("empty return series");
    PolyaEstimate est;
    double product = 1.0;
    int last_t = 0;
    for (const ReturnSample& s : series.entries) {
        if (s.t < 1) continue;  // returns are counted from t >= 1
        product *= (1.0 - s.p0);
        est.partial_products.emplace_back(s.t, product);
        est.polya_partial.emplace_back(s.t, 1.0 - product);
        last_t = s.t;
    }
    if (fit && fit->exponent > 1.0 && last_t > 0) {
        // sum_{t > T, admissible} A t^-eta ~ A T^(1-eta) / ((eta-1)(r+1));
        // log Pi_inf ~ log Pi_T - tail for small p0
        const double amp = std::exp(fit->intercept);
        const double spacing = series.params.r + 1;
        const double tail = amp * std::pow(double(last_t), 1.0 - fit->exponent) /
                            ((fit->exponent - 1.0) * spacing);
        est.extrapolated = product <= 0.0 ? 1.0 : 1.0 - product * std::exp(-tail);
    }
    return est;
}

MeanTrajectory mean_value_probe(const BiasParams& params, const InitialCoinSpec& initial,
                                int t_max) {
    validate(params);
    if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
    MeanTrajectory traj;
    traj.params = params;
    traj.initial = initial;
    const CoinMatrix coin = build_coin(params, CoinMode::Corrected);
    AmplitudeField field = new_localized(params, build_initial_state(initial));
    auto [mx0, my0] = mean_position(field);
    traj.samples.push_back({0, mx0, my0});
    for (int t = 1; t <= t_max; ++t) {
        step(field, coin);
        auto [mx, my] = mean_position(field);
        traj.samples.push_back({t, mx, my});
    }
    return traj;
}

FitWindow default_fit_window(const BiasParams& params, int t_max) {
    return FitWindow{std::max(params.r + 1, t_max / 8), t_max};
}

std::vector<ScanRow> conjecture_scan(const std::vector<double>& p_grid,
                                     const std::vector<int>& r_grid,
                                     const std::vector<double>& a_grid,
                                     const std::vector<double>& phi_grid,
                                     InitialVariant variant, int t_max) {
    if (p_grid.empty() || r_grid.empty() || a_grid.empty() || phi_grid.empty())
        throw std::invalid_argument("scan grids must be nonempty");
    std::vector<ScanRow> rows;
    for (double p : p_grid) {
        for (int r : r_grid) {
            const BiasParams params{p, r};
            validate(params);
            const HullTest hull = velocity_recurrence_criterion(peak_velocities_analytic(params));
            for (double a : a_grid) {
                for (double phi : phi_grid) {
                    const InitialCoinSpec initial{a, phi, variant};
                    const CoinMatrix coin = build_coin(params, CoinMode::Corrected);
                    AmplitudeField field = new_localized(params, build_initial_state(initial));
                    ReturnSeries series;
                    series.params = params;
                    series.initial = initial;
                    series.entries.push_back({0, probability_at(field, 0, 0)});
                    for (int t = 1; t <= t_max; ++t) {
                        step(field, coin);
                        if (t % (r + 1) == 0)
                            series.entries.push_back({t, probability_at(field, 0, 0)});
                    }
                    const auto [mx, my] = mean_position(field);

                    ScanRow row;
                    row.p = p;
                    row.r = r;
                    row.a = a;
                    row.phi = phi;
                    row.variant = variant;
                    row.t_max = t_max;
                    std::optional<DecayFit> fit;
                    try {
                        fit = fit_decay_exponent(series, default_fit_window(params, t_max));
                    } catch (const std::invalid_argument&) {
                        // cell with too few positive returns: eta is unavailable
                    }
                    row.eta = fit ? fit->exponent : std::nan("");
                    row.eta_residual = fit ? fit->residual : std::nan("");
                    const PolyaEstimate polya = polya_partial_products(series, fit);
                    row.polya_partial = polya.polya_partial.empty()
                                            ? 0.0
                                            : polya.polya_partial.back().second;
                    row.mean_x_over_t = mx / t_max;
                    row.mean_y_over_t = my / t_max;
                    row.hull_criterion = hull.contains_origin;
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

}  // namespace qwalk
