// Acceptance suite: one checkable criterion per function, each printing a
// single PASS/FAIL line with the measured values. Criteria 3, 6 and 7
// assert predictions of the closed forms under audit against the simulated
// walk; where the audit finds a discrepancy the criterion fails and prints
// the measurement instead of being weakened.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "qwalk/recurrence.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/stationary.hpp"

using namespace qwalk;

namespace {

CoinState4 symmetric_state() { return build_initial_state({0.5, kPi / 2}); }

bool criterion1_unitarity_conservation() {
    double worst_defect = 0.0;
    for (int i = 1; i <= 19; ++i)
        worst_defect = std::max(worst_defect, unitarity_certificate(build_coin({0.05 * i, 1})));

    double worst_conservation = 0.0;
    for (double p : {0.3, 0.5, 0.8})
        for (int r : {1, 2}) {
            const BiasParams params{p, r};
            AmplitudeField field = new_localized(params, symmetric_state());
            evolve(field, build_coin(params), 200);
            worst_conservation =
                std::max(worst_conservation, std::abs(total_probability(field) - 1.0));
        }

    const bool pass = worst_defect < 1e-12 && worst_conservation < 1e-11;
    std::printf("[%s] criterion 1: unitarity & conservation (coin defect %.3e < 1e-12, "
                "200-step conservation error %.3e < 1e-11)\n",
                pass ? "PASS" : "FAIL", worst_defect, worst_conservation);
    return pass;
}

bool criterion2_oracle_equivalence() {
    double worst = 0.0;
    for (double p : {0.5, 0.7})
        for (int r : {1, 2}) {
            const BiasParams params{p, r};
            const CoinMatrix coin = build_coin(params);
            const CoinState4 init = symmetric_state();
            AmplitudeField direct = new_localized(params, init);
            int t_done = 0;
            for (int t : {16, 32, 64}) {
                evolve(direct, coin, t - t_done);
                t_done = t;
                int n = 1;
                while (n < (r + 1) * t + 1) n *= 2;
                const AmplitudeField via_fourier =
                    inverse_transform(fourier_evolve(init, params, coin, t, n), params);
                for (int x = via_fourier.window.x_min; x <= via_fourier.window.x_max; ++x)
                    for (int y = via_fourier.window.y_min; y <= via_fourier.window.y_max; ++y) {
                        const Complex* a = via_fourier.site(x, y);
                        const Complex* b = direct.site(x, y);
                        for (int c = 0; c < 4; ++c) {
                            const Complex bv = b ? b[c] : Complex(0, 0);
                            worst = std::max(worst, std::abs(a[c] - bv));
                        }
                    }
            }
        }
    const bool pass = worst < 1e-10;
    std::printf("[%s] criterion 2: direct vs Fourier propagation, max amplitude "
                "difference %.3e < 1e-10 at t in {16,32,64}, (p,r) in {0.5,0.7}x{1,2}\n",
                pass ? "PASS" : "FAIL", worst);
    return pass;
}

bool criterion3_eigenvalue_reproduction() {
    auto grid_mismatch = [](const BiasParams& params) {
        const CoinMatrix coin = build_coin(params);
        double worst = 0.0;
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                const MomentumPoint k{-kPi + 2 * kPi * i / 64.0, -kPi + 2 * kPi * j / 64.0};
                const auto numeric = eigendecompose_numeric(momentum_operator(params, k, coin));
                worst = std::max(worst, eigenvalue_multiset_distance(
                                            eigenvalues_analytic(k, params), numeric.values));
            }
        return worst;
    };

    double worst_r1 = 0.0;
    for (double p : {0.3, 0.5, 0.8}) worst_r1 = std::max(worst_r1, grid_mismatch({p, 1}));
    const double r2_mismatch = grid_mismatch({0.5, 2});

    const bool pass = worst_r1 < 1e-10;
    std::printf("[%s] criterion 3: closed-form eigenvalues vs numeric diagonalization, "
                "r=1 max multiset mismatch %.3e (required < 1e-10); r=2 mismatch %.3e "
                "(measured and reported; determinant audit documents the closed-form "
                "inconsistency)\n",
                pass ? "PASS" : "FAIL", worst_r1, r2_mismatch);
    if (!pass)
        std::printf("       audit finding: the closed forms do not diagonalize the "
                    "momentum operator at any r, including r=1; see the spectral audit "
                    "report (eigenvalue_max_mismatch) and ledger\n");
    return pass;
}

bool criterion4_saddle_reproduction() {
    const BiasParams params{0.5, 1};
    const SaddleSearchResult analytic = saddle_points_analytic(params);
    bool pass = !analytic.complex_valued;

    const double targets[4][2] = {{kPi, 0.0}, {-kPi, 0.0}, {0.0, kPi}, {0.0, -kPi}};
    double worst_grad = 0.0;
    for (const SaddlePoint& pt : analytic.points) worst_grad = std::max(worst_grad, pt.grad_norm);
    for (const auto& target : targets) {
        bool found_analytic = false;
        for (const SaddlePoint& pt : analytic.points)
            if (torus_distance(pt.k0.kx, pt.k0.ky, target[0], target[1]) < 1e-8)
                found_analytic = true;
        pass = pass && found_analytic;
    }
    pass = pass && worst_grad < 1e-8;

    std::vector<SaddlePoint> numeric;
    for (int j = 1; j <= 4; ++j)
        for (const SaddlePoint& pt : saddle_points_numeric(j, params, 12)) numeric.push_back(pt);
    for (const auto& target : targets) {
        bool found_numeric = false;
        for (const SaddlePoint& pt : numeric)
            if (torus_distance(pt.k0.kx, pt.k0.ky, target[0], target[1]) < 1e-8)
                found_numeric = true;
        pass = pass && found_numeric;
    }

    int recurrent_cells = 0;
    for (int i = 1; i <= 19; ++i)
        for (int r : {1, 2, 3, 5})
            if (recurrence_condition({0.05 * i, r}).recurrent_by_closed_form) ++recurrent_cells;
    pass = pass && recurrent_cells == 19 * 4;

    std::printf("[%s] criterion 4: saddle candidates at p=0.5, r=1 are (+-pi, 0) and "
                "(0, +-pi) (radicand %.17g, max grad norm %.3e < 1e-8), Newton recovers "
                "them; recurrence condition holds on %d/76 grid cells (radicand <= 1 "
                "independent of r)\n",
                pass ? "PASS" : "FAIL", analytic.radicand, worst_grad, recurrent_cells);
    return pass;
}

bool criterion5_gradient_hessian_audit() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> dist(-kPi, kPi);
    double worst_grad = 0.0;
    const double h = 1e-6;
    for (double p : {0.3, 0.5, 0.8})
        for (int r : {1, 2}) {
            const BiasParams params{p, r};
            for (int j = 1; j <= 4; ++j)
                for (int i = 0; i < 200; ++i) {
                    const MomentumPoint k{dist(rng), dist(rng)};
                    const auto [ax, ay] = grad_w_analytic(j, k, params);
                    const double fx = (phase_surface(j, {k.kx + h, k.ky}, params) -
                                       phase_surface(j, {k.kx - h, k.ky}, params)) /
                                      (2 * h);
                    const double fy = (phase_surface(j, {k.kx, k.ky + h}, params) -
                                       phase_surface(j, {k.kx, k.ky - h}, params)) /
                                      (2 * h);
                    worst_grad = std::max({worst_grad, std::abs(ax - fx), std::abs(ay - fy)});
                }
        }
    bool pass = worst_grad < 1e-6;

    bool pure_blocks_ok = true;
    std::printf("       hessian finite-difference report (per surface, wxx/wyy/dkydkx/dkxdky):\n");
    for (double p : {0.3, 0.5, 0.8})
        for (int r : {1, 2}) {
            const HessianAudit audit = run_hessian_audit({p, r}, 100);
            std::printf("         p=%.1f r=%d:", p, r);
            for (int j = 0; j < 4; ++j) {
                pure_blocks_ok = pure_blocks_ok && audit.wxx_matches_fd[j] &&
                                 audit.wyy_matches_fd[j];
                std::printf(" j%d[%s/%s/%s/%s]", j + 1, audit.wxx_matches_fd[j] ? "ok" : "XX",
                            audit.wyy_matches_fd[j] ? "ok" : "XX",
                            audit.mixed_dky_dkx_matches_fd[j] ? "ok" : "XX",
                            audit.mixed_dkx_dky_matches_fd[j] ? "ok" : "XX");
            }
            std::printf("\n");
        }
    pass = pass && pure_blocks_ok;
    std::printf("[%s] criterion 5: gradient audit max |analytic - finite difference| "
                "%.3e < 1e-6 (200 random k per surface per cell); assembled second "
                "derivatives %s finite differences; the published mixed-partial "
                "variants are reported per block above\n",
                pass ? "PASS" : "FAIL", worst_grad, pure_blocks_ok ? "match" : "MISS");
    return pass;
}

bool criterion6_peak_velocities() {
    const BiasParams params{0.5, 1};
    const int t = 200;
    AmplitudeField field = new_localized(params, symmetric_state());
    evolve(field, build_coin(params), t);
    const std::vector<Peak> peaks = peak_positions(to_probability(field), 0.5);

    const VelocityProfile profile = peak_velocities_analytic(params);
    const Velocity targets[4] = {profile.right, profile.left, profile.up, profile.down};
    bool peaks_match = true;
    std::printf("       predicted peak velocities: (%.4f,%.4f) (%.4f,%.4f) (%.4f,%.4f) "
                "(%.4f,%.4f); %zu observed peak clusters at threshold 0.5, strongest "
                "first:\n",
                targets[0].vx, targets[0].vy, targets[1].vx, targets[1].vy, targets[2].vx,
                targets[2].vy, targets[3].vx, targets[3].vy, peaks.size());
    std::vector<Peak> by_weight = peaks;
    std::sort(by_weight.begin(), by_weight.end(),
              [](const Peak& a, const Peak& b) { return a.p > b.p; });
    for (std::size_t i = 0; i < by_weight.size() && i < 8; ++i)
        std::printf("         cluster at (x/t, y/t) = (%+.4f, %+.4f), P = %.3e\n",
                    double(by_weight[i].x) / t, double(by_weight[i].y) / t, by_weight[i].p);
    for (const Velocity& target : targets) {
        bool found = false;
        for (const Peak& peak : peaks)
            if (std::abs(double(peak.x) / t - target.vx) < 0.05 &&
                std::abs(double(peak.y) / t - target.vy) < 0.05)
                found = true;
        peaks_match = peaks_match && found;
    }

    const HullTest hull = velocity_recurrence_criterion(profile);
    const bool pass = peaks_match && hull.contains_origin;
    std::printf("[%s] criterion 6: empirical peaks at t=200 %s the predicted velocities "
                "{(+-0.7071,0),(0,+-0.7071)} within 0.05/component; hull criterion %s\n",
                pass ? "PASS" : "FAIL", peaks_match ? "match" : "DO NOT match",
                hull.contains_origin ? "true" : "false");
    if (!peaks_match)
        std::printf("       audit finding: the simulated walk concentrates its peaks "
                    "along the diagonals (see clusters above), not on the axes the "
                    "velocity formulas predict\n");
    return pass;
}

bool criterion7_recurrence_audit() {
    const BiasParams params{0.5, 1};
    const ReturnSeries series =
        return_probability_series(params, {1.0, 0.0}, 512, Engine::Fourier);
    const DecayFit fit = fit_decay_exponent(series, {64, 512});
    const PolyaEstimate polya = polya_partial_products(series, fit);

    bool monotone = true;
    for (std::size_t i = 1; i < polya.partial_products.size(); ++i) {
        monotone = monotone &&
                   polya.partial_products[i].second <= polya.partial_products[i - 1].second &&
                   polya.polya_partial[i].second >= polya.polya_partial[i - 1].second;
    }
    const double final_partial = polya.polya_partial.back().second;
    std::printf("       polya partial checkpoints:");
    for (const auto& [t, value] : polya.polya_partial)
        if (t == 64 || t == 128 || t == 256 || t == 512)
            std::printf(" 1-Pi(%d) = %.6f", t, value);
    std::printf("\n");

    std::printf("       decay-exponent juxtaposition: claimed amplitude ~ t^(-1/2) "
                "implies eta = 1; two-dimensional stationary phase with isolated "
                "nondegenerate saddles implies eta = 2; measured eta = %.4f "
                "(residual %.4f, window [64,512])\n",
                fit.exponent, fit.residual);
    std::printf("       polya partial products monotone: %s; partial sum estimate at "
                "t=512: %.6f%s\n",
                monotone ? "yes" : "NO", final_partial,
                polya.extrapolated
                    ? (" (tail-extrapolated: " + std::to_string(*polya.extrapolated) + ")").c_str()
                    : " (tail extrapolation omitted: eta <= 1, divergent sum)");

    const bool band = fit.exponent >= 1.7 && fit.exponent <= 2.3;
    const bool pass = band && monotone;
    std::printf("[%s] criterion 7: recurrence audit to t=512 (Fourier engine); "
                "measured eta %.4f %s the stability band [1.7, 2.3]\n",
                pass ? "PASS" : "FAIL", fit.exponent, band ? "inside" : "OUTSIDE");
    if (!band)
        std::printf("       audit finding: the simulated decay sits near the claimed "
                    "t^(-1/2)-amplitude rate (eta ~ 1), not the eta ~ 2 band this "
                    "criterion encodes\n");
    return pass;
}

bool criterion8_conjecture_scan() {
    const std::vector<double> a_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> phi_grid{0.0, kPi / 2, kPi};
    const auto rows =
        conjecture_scan({0.5}, {1}, a_grid, phi_grid, InitialVariant::AsPrinted, 256);
    const auto rows_again =
        conjecture_scan({0.5}, {1}, a_grid, phi_grid, InitialVariant::AsPrinted, 256);

    bool finite = rows.size() == 15;
    for (const ScanRow& row : rows)
        finite = finite && std::isfinite(row.eta) && std::isfinite(row.eta_residual) &&
                 std::isfinite(row.polya_partial) && std::isfinite(row.mean_x_over_t) &&
                 std::isfinite(row.mean_y_over_t);

    bool identical = rows.size() == rows_again.size();
    for (std::size_t i = 0; identical && i < rows.size(); ++i)
        identical = rows[i].eta == rows_again[i].eta &&
                    rows[i].eta_residual == rows_again[i].eta_residual &&
                    rows[i].polya_partial == rows_again[i].polya_partial &&
                    rows[i].mean_x_over_t == rows_again[i].mean_x_over_t &&
                    rows[i].mean_y_over_t == rows_again[i].mean_y_over_t &&
                    rows[i].hull_criterion == rows_again[i].hull_criterion;

    const bool pass = finite && identical;
    std::printf("[%s] criterion 8: 15-cell (a, phi) scan at p=0.5, r=1, t_max=256: "
                "%zu rows, all columns finite: %s, byte-identical across two runs: %s\n",
                pass ? "PASS" : "FAIL", rows.size(), finite ? "yes" : "NO",
                identical ? "yes" : "NO");
    return pass;
}

bool criterion9_decay_fit_calibration() {
    double worst_exact = 0.0, worst_osc = 0.0;
    for (double eta : {0.5, 1.0, 2.0, 3.0}) {
        ReturnSeries exact, wobbly;
        exact.params = wobbly.params = BiasParams{0.5, 1};
        for (int t = 2; t <= 4096; t += 2) {
            const double v = 5.0 * std::pow(double(t), -eta);
            exact.entries.push_back({t, v});
            wobbly.entries.push_back({t, v * (1.0 + 0.5 * std::sin(double(t)))});
        }
        worst_exact = std::max(
            worst_exact, std::abs(fit_decay_exponent(exact, {16, 4096}).exponent - eta));
        worst_osc = std::max(
            worst_osc, std::abs(fit_decay_exponent(wobbly, {16, 4096}).exponent - eta));
    }
    const bool pass = worst_exact < 1e-6 && worst_osc < 0.05;
    std::printf("[%s] criterion 9: decay-fit calibration, exact power laws recovered to "
                "%.2e (< 1e-6), oscillating to %.3f (< 0.05) for eta in {0.5,1,2,3}\n",
                pass ? "PASS" : "FAIL", worst_exact, worst_osc);
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
    }

    bool (*criteria[])() = {
        criterion1_unitarity_conservation, criterion2_oracle_equivalence,
        criterion3_eigenvalue_reproduction, criterion4_saddle_reproduction,
        criterion5_gradient_hessian_audit, criterion6_peak_velocities,
        criterion7_recurrence_audit, criterion8_conjecture_scan,
        criterion9_decay_fit_calibration,
    };

    int failures = 0;
    for (int i = 0; i < 9; ++i) {
        if (only != 0 && only != i + 1) continue;
        const auto start = std::chrono::steady_clock::now();
        const bool ok = criteria[i]();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("       (criterion %d took %.1f s)\n", i + 1, secs);
        if (!ok) ++failures;
    }
    return failures;
}
