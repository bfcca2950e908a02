#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qwalk/io.hpp"

namespace qwalk::cli {

namespace {

std::string out_path(const RunConfig& config, const std::string& name) {
    if (config.output_path.empty()) return name;
    return config.output_path + "/" + name;
}

void announce(const std::string& path) { std::printf("wrote %s\n", path.c_str()); }

void apply_threads(const RunConfig& config) {
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#else
    (void)config;
#endif
}

const char* variant_name(InitialVariant v) {
    return v == InitialVariant::AsPrinted ? "asprinted" : "tensor";
}

const char* kind_name(CriticalKind kind) {
    switch (kind) {
        case CriticalKind::Saddle: return "saddle";
        case CriticalKind::Extremum: return "extremum";
        default: return "degenerate";
    }
}

Json velocity_pair(const Velocity& v) {
    return Json::array().push(v.vx).push(v.vy);
}

Json saddle_point_json(const SaddlePoint& pt) {
    return Json::object()
        .set("kx", pt.k0.kx)
        .set("ky", pt.k0.ky)
        .set("surface", pt.surface.j)
        .set("grad_norm", pt.grad_norm)
        .set("hessian_det", pt.hessian_det)
        .set("classification", kind_name(pt.classification));
}

Json bool_array(const std::array<bool, 4>& flags) {
    Json arr = Json::array();
    for (bool b : flags) arr.push(b);
    return arr;
}

}  // namespace

std::string return_series_csv(const ReturnSeries& series) {
    std::string out = "t,p0\n";
    char buf[64];
    for (const ReturnSample& s : series.entries) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", s.t, s.p0);
        out += buf;
    }
    return out;
}

std::string decay_fit_json(const DecayFit& fit) {
    return Json::object()
        .set("eta", fit.exponent)
        .set("intercept", fit.intercept)
        .set("fit_window", Json::array().push(fit.window.t_lo).push(fit.window.t_hi))
        .set("residual", fit.residual)
        .set("points_used", fit.points_used)
        .dump();
}

std::string polya_csv(const PolyaEstimate& est) {
    std::string out = "t,partial_product,polya_partial\n";
    char buf[96];
    for (std::size_t i = 0; i < est.partial_products.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", est.partial_products[i].first,
                      est.partial_products[i].second, est.polya_partial[i].second);
        out += buf;
    }
    return out;
}

std::string polya_json(const PolyaEstimate& est, const std::optional<DecayFit>& fit,
                       const ReturnSeries& series) {
    Json j = Json::object();
    j.set("t_max", est.polya_partial.empty() ? 0 : est.polya_partial.back().first);
    j.set("polya_partial", est.polya_partial.empty() ? 0.0 : est.polya_partial.back().second);
    if (fit) {
        j.set("eta", fit->exponent);
        j.set("eta_residual", fit->residual);
    }
    if (est.extrapolated) {
        j.set("extrapolated", *est.extrapolated);
        if (fit) {
            // tail-estimate error bar: redo the tail with eta +/- residual
            DecayFit lo = *fit, hi = *fit;
            lo.exponent -= fit->residual;
            hi.exponent += fit->residual;
            const auto low = polya_partial_products(series, lo).extrapolated;
            const auto high = polya_partial_products(series, hi).extrapolated;
            if (low && high) {
                j.set("extrapolated_low", std::min(*low, *high));
                j.set("extrapolated_high", std::max(*low, *high));
            }
        }
    } else {
        j.set("extrapolated", Json());
        j.set("note", "tail extrapolation omitted (no fit or eta <= 1: divergent sum)");
    }
    return j.dump();
}

std::string mean_csv(const MeanTrajectory& traj) {
    std::string out = "t,mean_x,mean_y\n";
    char buf[96];
    for (const MeanSample& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", s.t, s.mean_x, s.mean_y);
        out += buf;
    }
    return out;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::string out =
        "p,r,a,phi,variant,t_max,eta,eta_residual,polya_partial,mean_x_over_t,mean_y_over_t,"
        "hull_criterion\n";
    char buf[512];
    for (const ScanRow& row : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                      row.p, row.r, row.a, row.phi, variant_name(row.variant), row.t_max,
                      row.eta, row.eta_residual, row.polya_partial, row.mean_x_over_t,
                      row.mean_y_over_t, row.hull_criterion ? "true" : "false");
        out += buf;
    }
    return out;
}

std::string scan_jsonl(const std::vector<ScanRow>& rows) {
    std::string out;
    for (const ScanRow& row : rows) {
        Json j = Json::object();
        j.set("p", row.p)
            .set("r", row.r)
            .set("a", row.a)
            .set("phi", row.phi)
            .set("variant", variant_name(row.variant))
            .set("t_max", row.t_max)
            .set("eta", row.eta)
            .set("eta_residual", row.eta_residual)
            .set("polya_partial", row.polya_partial)
            .set("mean_x_over_t", row.mean_x_over_t)
            .set("mean_y_over_t", row.mean_y_over_t)
            .set("hull_criterion", row.hull_criterion);
        out += j.dump(0);
    }
    return out;
}

std::string spectral_audit_json(const SpectralAuditReport& report) {
    return Json::object()
        .set("p", report.p)
        .set("r", report.r)
        .set("grid_n", report.grid_n)
        .set("eigenvalue_max_mismatch", report.eigenvalue_max_mismatch)
        .set("eigenvector_max_residual", report.eigenvector_max_residual)
        .set("det_identity_max_error", report.det_identity_max_error)
        .set("fourier_oracle_max_error", report.fourier_oracle_max_error)
        .dump();
}

std::string saddle_audit_json(const SaddleAuditReport& report) {
    Json analytic = Json::array();
    for (const SaddlePoint& pt : report.analytic.points) analytic.push(saddle_point_json(pt));
    Json numeric = Json::array();
    for (const SaddlePoint& pt : report.numeric) numeric.push(saddle_point_json(pt));
    Json extras = Json::array();
    for (const SaddlePoint& pt : report.extras) extras.push(saddle_point_json(pt));
    const VelocityProfile& v = report.velocity_profile;
    return Json::object()
        .set("p", report.params.p)
        .set("r", report.params.r)
        .set("radicand", report.analytic.radicand)
        .set("closed_form_complex_valued", report.analytic.complex_valued)
        .set("analytic_saddles", std::move(analytic))
        .set("numeric_saddles", std::move(numeric))
        .set("extras", std::move(extras))
        .set("velocity_profile", Json::object()
                                     .set("R", velocity_pair(v.right))
                                     .set("L", velocity_pair(v.left))
                                     .set("U", velocity_pair(v.up))
                                     .set("D", velocity_pair(v.down)))
        .set("hull_criterion", report.hull.contains_origin)
        .set("hull_degenerate", report.hull.degenerate)
        .set("hessian_audit",
             Json::object()
                 .set("wxx_matches_fd", bool_array(report.hessian.wxx_matches_fd))
                 .set("wyy_matches_fd", bool_array(report.hessian.wyy_matches_fd))
                 .set("mixed_dky_dkx_matches_fd",
                      bool_array(report.hessian.mixed_dky_dkx_matches_fd))
                 .set("mixed_dkx_dky_matches_fd",
                      bool_array(report.hessian.mixed_dkx_dky_matches_fd))
                 .set("max_error_pure", report.hessian.max_error_pure))
        .dump();
}

std::string velocity_profile_json(const BiasParams& params) {
    const VelocityProfile v = peak_velocities_analytic(params);
    const HullTest hull = velocity_recurrence_criterion(v);
    Json numeric = Json::array();
    for (const Velocity& vel : peak_velocities_numeric(params)) numeric.push(velocity_pair(vel));
    return Json::object()
        .set("p", params.p)
        .set("r", params.r)
        .set("velocity_profile", Json::object()
                                     .set("R", velocity_pair(v.right))
                                     .set("L", velocity_pair(v.left))
                                     .set("U", velocity_pair(v.up))
                                     .set("D", velocity_pair(v.down)))
        .set("numeric_velocities", std::move(numeric))
        .set("hull_criterion", hull.contains_origin)
        .set("hull_degenerate", hull.degenerate)
        .dump();
}

int run_evolve(const RunConfig& config) {
    apply_threads(config);
    const CoinMatrix coin = build_coin(config.bias(), config.coin_mode);
    AmplitudeField field = new_localized(config.bias(), build_initial_state(config.initial()));
    evolve(field, coin, config.t_max, config.force_nonunitary);
    const ProbabilityField prob = to_probability(field);
    write_file(out_path(config, "distribution.csv"), probability_csv(prob, config.export_floor));
    announce(out_path(config, "distribution.csv"));

    std::string peaks = "x,y,p\n";
    char buf[96];
    for (const Peak& peak : peak_positions(prob, config.threshold_fraction)) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", peak.x, peak.y, peak.p);
        peaks += buf;
    }
    write_file(out_path(config, "peaks.csv"), peaks);
    announce(out_path(config, "peaks.csv"));

    if (config.plot_script) {
        write_file(out_path(config, "distribution.gp"),
                   "set datafile separator ','\n"
                   "set view map\n"
                   "set size ratio -1\n"
                   "splot 'distribution.csv' skip 1 using 1:2:3 with points pt 5 ps 0.4 "
                   "palette notitle\n");
        announce(out_path(config, "distribution.gp"));
    }
    return 0;
}

int run_spectrum(const RunConfig& config) {
    apply_threads(config);
    const int grid = config.grid_n > 0 ? config.grid_n : 64;
    const int t_oracle = std::min(config.t_max > 0 ? config.t_max : 32, 32);
    const SpectralAuditReport report = run_spectral_audit(config.bias(), grid, t_oracle);
    write_file(out_path(config, "spectral_audit.json"), spectral_audit_json(report));
    announce(out_path(config, "spectral_audit.json"));
    write_file(out_path(config, "coin.csv"), coin_csv(build_coin(config.bias(), config.coin_mode)));
    announce(out_path(config, "coin.csv"));
    return 0;
}

int run_saddles(const RunConfig& config) {
    apply_threads(config);
    const SaddleAuditReport report = run_saddle_audit(config.bias(), config.seeds);
    write_file(out_path(config, "saddle_audit.json"), saddle_audit_json(report));
    announce(out_path(config, "saddle_audit.json"));
    return 0;
}

int run_velocities(const RunConfig& config) {
    write_file(out_path(config, "velocity_profile.json"), velocity_profile_json(config.bias()));
    announce(out_path(config, "velocity_profile.json"));
    return 0;
}

int run_return(const RunConfig& config) {
    apply_threads(config);
    const ReturnSeries series = return_probability_series(
        config.bias(), config.initial(), config.t_max, config.engine, config.grid_n,
        config.coin_mode);
    write_file(out_path(config, "return_series.csv"), return_series_csv(series));
    announce(out_path(config, "return_series.csv"));
    const DecayFit fit = fit_decay_exponent(series, config.effective_fit_window());
    write_file(out_path(config, "decay_fit.json"), decay_fit_json(fit));
    announce(out_path(config, "decay_fit.json"));
    if (config.plot_script) {
        write_file(out_path(config, "return_series.gp"),
                   "set datafile separator ','\n"
                   "set logscale xy\n"
                   "plot 'return_series.csv' skip 1 using 1:2 with points pt 7 title 'p0(t)'\n");
        announce(out_path(config, "return_series.gp"));
    }
    return 0;
}

int run_polya(const RunConfig& config) {
    apply_threads(config);
    const ReturnSeries series = return_probability_series(
        config.bias(), config.initial(), config.t_max, config.engine, config.grid_n,
        config.coin_mode);
    std::optional<DecayFit> fit;
    try {
        fit = fit_decay_exponent(series, config.effective_fit_window());
    } catch (const std::invalid_argument&) {
        // too few positive points: report the partial products without a tail
    }
    const PolyaEstimate est = polya_partial_products(series, fit);
    write_file(out_path(config, "polya.csv"), polya_csv(est));
    announce(out_path(config, "polya.csv"));
    write_file(out_path(config, "polya.json"), polya_json(est, fit, series));
    announce(out_path(config, "polya.json"));
    if (config.plot_script) {
        write_file(out_path(config, "polya.gp"),
                   "set datafile separator ','\n"
                   "set yrange [0:1]\n"
                   "plot 'polya.csv' skip 1 using 1:3 with linespoints title '1 - product'\n");
        announce(out_path(config, "polya.gp"));
    }
    return 0;
}

int run_mean(const RunConfig& config) {
    apply_threads(config);
    const MeanTrajectory traj = mean_value_probe(config.bias(), config.initial(), config.t_max);
    write_file(out_path(config, "mean_trajectory.csv"), mean_csv(traj));
    announce(out_path(config, "mean_trajectory.csv"));
    if (config.plot_script) {
        write_file(out_path(config, "mean_trajectory.gp"),
                   "set datafile separator ','\n"
                   "plot 'mean_trajectory.csv' skip 1 using 1:2 with lines title '<x>', "
                   "'' skip 1 using 1:3 with lines title '<y>'\n");
        announce(out_path(config, "mean_trajectory.gp"));
    }
    return 0;
}

int run_scan(const RunConfig& config) {
    apply_threads(config);
    const std::vector<ScanRow> rows = conjecture_scan(
        config.scan_p, config.scan_r, config.scan_a, config.scan_phi, config.variant,
        config.t_max);
    write_file(out_path(config, "scan.csv"), scan_csv(rows));
    announce(out_path(config, "scan.csv"));
    write_file(out_path(config, "scan.jsonl"), scan_jsonl(rows));
    announce(out_path(config, "scan.jsonl"));
    return 0;
}

int run_verify(const RunConfig& config) {
    apply_threads(config);
    const BiasParams params = config.bias();
    const CoinMatrix coin = build_coin(params);

    struct Check {
        std::string name;
        double measured;
        double threshold;
        bool pass;
    };
    std::vector<Check> checks;
    auto add_check = [&checks](const std::string& name, double measured, double threshold) {
        checks.push_back({name, measured, threshold, measured < threshold});
    };

    // -- load-bearing invariants (gate the exit status) --
    double coin_defect = 0.0;
    for (int i = 1; i <= 19; ++i)
        coin_defect = std::max(coin_defect,
                               unitarity_certificate(build_coin({0.05 * i, params.r})));
    add_check("coin_unitarity_max_defect", coin_defect, 1e-12);

    {
        AmplitudeField field = new_localized(params, build_initial_state(config.initial()));
        evolve(field, coin, std::min(config.t_max, 200));
        add_check("conservation_error", std::abs(total_probability(field) - 1.0), 1e-11);
    }

    const int audit_grid = config.grid_n > 0 ? std::min(config.grid_n, 256) : 64;
    const SpectralAuditReport spectral =
        run_spectral_audit(params, audit_grid, std::min(std::max(config.t_max, 1), 32));
    add_check("fourier_oracle_max_error", spectral.fourier_oracle_max_error, 1e-10);
    add_check("det_identity_max_error", spectral.det_identity_max_error, 1e-12);

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> dk(-kPi, kPi);
    double eig_residual = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto sys =
            eigendecompose_numeric(momentum_operator(params, {dk(rng), dk(rng)}, coin));
        for (double rres : sys.residuals) eig_residual = std::max(eig_residual, rres);
    }
    add_check("numeric_eigen_max_residual", eig_residual, 1e-10);

    double phase_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = dk(rng);
        const PhasePair pair = phase_pair(u, params);
        phase_err = std::max(phase_err,
                             std::abs(pair.w1 + pair.w2 - ((params.r - 1) * u - kPi)));
    }
    add_check("phase_identity_max_error", phase_err, 1e-14);

    double grad_err = 0.0;
    const double h = 1e-6;
    for (int j = 1; j <= 4; ++j)
        for (int i = 0; i < 200; ++i) {
            const MomentumPoint k{dk(rng), dk(rng)};
            const auto [ax, ay] = grad_w_analytic(j, k, params);
            const double fx = (phase_surface(j, {k.kx + h, k.ky}, params) -
                               phase_surface(j, {k.kx - h, k.ky}, params)) /
                              (2 * h);
            const double fy = (phase_surface(j, {k.kx, k.ky + h}, params) -
                               phase_surface(j, {k.kx, k.ky - h}, params)) /
                              (2 * h);
            grad_err = std::max({grad_err, std::abs(ax - fx), std::abs(ay - fy)});
        }
    add_check("gradient_fd_max_error", grad_err, 1e-6);

    {
        const int t = std::min(std::max(config.t_max, 1), 32);
        int n = 1;
        while (n < (params.r + 1) * t + 1) n *= 2;
        const MomentumState ms =
            fourier_evolve(build_initial_state(config.initial()), params, coin, t, n);
        add_check("parseval_error", std::abs(momentum_norm(ms) - 1.0), 1e-10);
    }

    // -- formula audits (reported; never gate) --
    Json audits = Json::array();
    audits.push(Json::object()
                    .set("name", "eigenvalue_closed_form_vs_numeric")
                    .set("measured", spectral.eigenvalue_max_mismatch)
                    .set("agrees", spectral.eigenvalue_max_mismatch < 1e-10));
    audits.push(Json::object()
                    .set("name", "eigenvector_closed_form_residual")
                    .set("measured", spectral.eigenvector_max_residual)
                    .set("agrees", spectral.eigenvector_max_residual < 1e-8));
    {
        double prod_err = 0.0;
        for (int i = 0; i < audit_grid; ++i)
            for (int j = 0; j < audit_grid; ++j) {
                const MomentumPoint k{-kPi + 2 * kPi * i / audit_grid,
                                      -kPi + 2 * kPi * j / audit_grid};
                const auto lam = eigenvalues_analytic(k, params);
                const Complex det = momentum_operator(params, k, coin).determinant();
                prod_err = std::max(prod_err, std::abs(lam[0] * lam[1] * lam[2] * lam[3] - det));
            }
        audits.push(Json::object()
                        .set("name", "eigenvalue_product_vs_determinant")
                        .set("measured", prod_err)
                        .set("agrees", prod_err < 1e-10));
    }
    const SaddleAuditReport saddles = run_saddle_audit(params, config.seeds);
    {
        double worst_grad = 0.0;
        for (const SaddlePoint& pt : saddles.analytic.points)
            worst_grad = std::max(worst_grad, pt.grad_norm);
        audits.push(Json::object()
                        .set("name", "closed_form_saddle_max_grad_norm")
                        .set("measured", worst_grad)
                        .set("agrees", !saddles.analytic.complex_valued && worst_grad < 1e-8)
                        .set("complex_valued", saddles.analytic.complex_valued));
        audits.push(Json::object()
                        .set("name", "newton_extras_beyond_closed_form")
                        .set("measured", double(saddles.extras.size()))
                        .set("agrees", saddles.extras.empty()));
    }
    {
        const VelocityProfile prof = saddles.velocity_profile;
        double worst = 0.0;
        const std::vector<Velocity> numeric = peak_velocities_numeric(params);
        for (const Velocity& expect : {prof.right, prof.left, prof.up, prof.down}) {
            double best = 1e300;
            for (const Velocity& got : numeric)
                best = std::min(best, std::hypot(got.vx - expect.vx, got.vy - expect.vy));
            worst = std::max(worst, best);
        }
        audits.push(Json::object()
                        .set("name", "velocity_closed_form_vs_numeric")
                        .set("measured", worst)
                        .set("agrees", worst < 1e-10));
    }
    {
        bool all_blocks = true;
        for (int j = 0; j < 4; ++j)
            all_blocks = all_blocks && saddles.hessian.mixed_dky_dkx_matches_fd[j] &&
                         saddles.hessian.mixed_dkx_dky_matches_fd[j];
        audits.push(Json::object()
                        .set("name", "hessian_mixed_partials_vs_fd")
                        .set("dky_dkx", bool_array(saddles.hessian.mixed_dky_dkx_matches_fd))
                        .set("dkx_dky", bool_array(saddles.hessian.mixed_dkx_dky_matches_fd))
                        .set("agrees", all_blocks));
    }

    bool all_pass = true;
    Json check_arr = Json::array();
    for (const Check& c : checks) {
        all_pass = all_pass && c.pass;
        check_arr.push(Json::object()
                           .set("name", c.name)
                           .set("measured", c.measured)
                           .set("threshold", c.threshold)
                           .set("pass", c.pass));
        std::printf("[%s] %-32s measured %.3e (threshold %.0e)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.threshold);
    }
    std::printf("formula audits: eigenvalue mismatch %.3e, eigenvector residual %.3e "
                "(recorded, not gating)\n",
                spectral.eigenvalue_max_mismatch, spectral.eigenvector_max_residual);

    Json report = Json::object();
    report.set("p", params.p)
        .set("r", params.r)
        .set("grid_n", audit_grid)
        .set("load_bearing", std::move(check_arr))
        .set("formula_audits", std::move(audits))
        .set("spectral_audit", Json::object()
                                   .set("p", spectral.p)
                                   .set("r", spectral.r)
                                   .set("grid_n", spectral.grid_n)
                                   .set("eigenvalue_max_mismatch", spectral.eigenvalue_max_mismatch)
                                   .set("eigenvector_max_residual",
                                        spectral.eigenvector_max_residual)
                                   .set("det_identity_max_error", spectral.det_identity_max_error)
                                   .set("fourier_oracle_max_error",
                                        spectral.fourier_oracle_max_error))
        .set("all_load_bearing_pass", all_pass);
    write_file(out_path(config, "verify_report.json"), report.dump());
    announce(out_path(config, "verify_report.json"));
    return all_pass ? 0 : 1;
}

}  // namespace qwalk::cli
