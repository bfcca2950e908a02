#include "qwalk/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qwalk {

namespace {

constexpr int kBranchPlus[4] = {1, 1, 2, 2};
constexpr int kBranchMinus[4] = {1, 2, 1, 2};

void check_surface(int j) {
    if (j < 1 || j > 4) throw std::invalid_argument("surface index must be in 1..4");
}

// Sign of the arcsin term for a branch: +1 for branch 1, -1 for branch 2.
inline double branch_sign(int branch) { return branch == 1 ? 1.0 : -1.0; }

}  // namespace

double phase_surface(int j, const MomentumPoint& k, const BiasParams& params) {
    check_surface(j);
    const double up = 0.5 * (k.kx + k.ky), um = 0.5 * (k.kx - k.ky);
    return phase_w(up, params, kBranchPlus[j - 1]) + phase_w(um, params, kBranchMinus[j - 1]);
}

double phase_w_derivative(double u, const BiasParams& params, int branch) {
    const double half = 0.5 * (params.r + 1);
    const double x = half * u;
    const double s = std::sin(x), c = std::cos(x);
    const double term = std::sqrt(params.p) * c * half / std::sqrt(1.0 - params.p * s * s);
    return 0.5 * (params.r - 1) + branch_sign(branch) * term;
}

double phase_w_second_derivative(double u, const BiasParams& params, int branch) {
    // d/du of the square-root term factors as
    //   -sqrt(p) (1-p) ((r+1)/2)^2 sin(x) / (1 - p sin^2 x)^{3/2}
    const double half = 0.5 * (params.r + 1);
    const double x = half * u;
    const double s = std::sin(x);
    const double d = 1.0 - params.p * s * s;
    const double term = -std::sqrt(params.p) * (1.0 - params.p) * half * half * s /
                        (d * std::sqrt(d));
    return branch_sign(branch) * term;
}

std::pair<double, double> grad_w_analytic(int j, const MomentumPoint& k,
                                          const BiasParams& params) {
    check_surface(j);
    const double up = 0.5 * (k.kx + k.ky), um = 0.5 * (k.kx - k.ky);
    const double da = phase_w_derivative(up, params, kBranchPlus[j - 1]);
    const double db = phase_w_derivative(um, params, kBranchMinus[j - 1]);
    return {0.5 * (da + db), 0.5 * (da - db)};
}

HessianTerms hessian_terms(const MomentumPoint& k, const BiasParams& params) {
    const double quarter = 0.25 * (params.r + 1);
    auto block = [&](double u) {
        // d/dkx of sqrt(p) ((r+1)/4) cos(((r+1)/2)u) / sqrt(1 - p sin^2(...))
        const double x = 0.5 * (params.r + 1) * u;
        const double s = std::sin(x), c = std::cos(x);
        const double d = 1.0 - params.p * s * s;
        const double sp = std::sqrt(params.p);
        return sp * quarter * quarter *
               (-s / std::sqrt(d) + params.p * s * c * c / (d * std::sqrt(d)));
    };
    const double up = 0.5 * (k.kx + k.ky), um = 0.5 * (k.kx - k.ky);
    const double df = block(up);  // f depends on kx + ky: both partials equal
    const double dg = block(um);  // g depends on kx - ky: partials differ in sign
    return HessianTerms{df, df, dg, -dg};
}

SecondDerivatives assemble_second_derivatives(int j, const MomentumPoint& k,
                                              const BiasParams& params) {
    check_surface(j);
    const HessianTerms h = hessian_terms(k, params);
    const double sa = branch_sign(kBranchPlus[j - 1]);
    const double sb = branch_sign(kBranchMinus[j - 1]);
    const double F = h.df_dkx;   // (1/4) w_1''(u+)
    const double G = h.dg_dkx;   // (1/4) w_1''(u-)
    return SecondDerivatives{sa * F + sb * G, sa * F + sb * G, sa * F - sb * G};
}

namespace {

CriticalKind classify(double hessian_det) {
    if (std::abs(hessian_det) < 1e-9) return CriticalKind::Degenerate;
    return hessian_det < 0.0 ? CriticalKind::Saddle : CriticalKind::Extremum;
}

// Evaluate the best surface for a candidate stationary point: prefer a
// Saddle-classified surface among those with vanishing gradient, else the
// surface of smallest gradient norm.
SaddlePoint tag_point(const MomentumPoint& k, const BiasParams& params) {
    SaddlePoint best;
    best.k0 = k;
    double best_norm = std::numeric_limits<double>::infinity();
    bool best_is_saddle = false;
    for (int j = 1; j <= 4; ++j) {
        const auto [gx, gy] = grad_w_analytic(j, k, params);
        const double norm = std::hypot(gx, gy);
        const SecondDerivatives sd = assemble_second_derivatives(j, k, params);
        const double det = sd.wxx * sd.wyy - sd.wxy * sd.wxy;
        const bool stationary = norm < 1e-8;
        const bool is_saddle = stationary && classify(det) == CriticalKind::Saddle;
        const bool better =
            (is_saddle && !best_is_saddle) || (is_saddle == best_is_saddle && norm < best_norm);
        if (better) {
            best.surface = PhaseSurfaceId{j};
            best.grad_norm = norm;
            best.hessian_det = det;
            best.classification = classify(det);
            best_norm = norm;
            best_is_saddle = is_saddle;
        }
    }
    return best;
}

}  // namespace

SaddleSearchResult saddle_points_analytic(const BiasParams& params) {
    validate(params);
    const double p = params.p;
    const double r = params.r;
    SaddleSearchResult result;
    const double num = p * (r + 1) * (r + 1) - (r - 1) * (r - 1);
    const double den = p * (r + 1) * (r + 1) - p * (r - 1) * (r - 1);
    result.radicand = num / den;
    if (result.radicand < 0.0 || result.radicand > 1.0) {
        result.complex_valued = true;
        return result;
    }
    const double u0 = (2.0 / (r + 1)) * std::asin(std::sqrt(result.radicand));
    // independent signs for u+ and u-: (±u0, ±u0) -> k = (u+ + u-, u+ - u-)
    const double combos[4][2] = {{u0, u0}, {u0, -u0}, {-u0, u0}, {-u0, -u0}};
    for (const auto& c : combos) {
        const MomentumPoint k{wrap_angle(c[0] + c[1]), wrap_angle(c[0] - c[1])};
        bool duplicate = false;
        for (const SaddlePoint& seen : result.points)
            if (torus_distance(seen.k0.kx, seen.k0.ky, k.kx, k.ky) < 1e-12) duplicate = true;
        if (!duplicate) result.points.push_back(tag_point(k, params));
    }
    return result;
}

std::vector<SaddlePoint> saddle_points_numeric(int j, const BiasParams& params, int seeds) {
    check_surface(j);
    validate(params);
    if (seeds < 8) throw std::invalid_argument("seeds must be >= 8");

    auto grad = [&](const MomentumPoint& k) { return grad_w_analytic(j, k, params); };
    std::vector<MomentumPoint> converged;
    for (int a = 0; a < seeds; ++a) {
        for (int b = 0; b < seeds; ++b) {
            MomentumPoint k{-kPi + 2.0 * kPi * (a + 0.5) / seeds,
                            -kPi + 2.0 * kPi * (b + 0.5) / seeds};
            auto [gx, gy] = grad(k);
            double gnorm = std::hypot(gx, gy);
            bool ok = false;
            for (int iter = 0; iter < 100; ++iter) {
                if (gnorm < 1e-12) {
                    ok = true;
                    break;
                }
                const SecondDerivatives sd = assemble_second_derivatives(j, k, params);
                const double det = sd.wxx * sd.wyy - sd.wxy * sd.wxy;
                double dx, dy;
                if (std::abs(det) > 1e-14) {
                    dx = -(sd.wyy * gx - sd.wxy * gy) / det;
                    dy = -(-sd.wxy * gx + sd.wxx * gy) / det;
                } else {
                    // singular Hessian: fall back to steepest descent
                    dx = -gx;
                    dy = -gy;
                }
                double scale = 1.0;
                bool improved = false;
                for (int halvings = 0; halvings < 30; ++halvings) {
                    MomentumPoint trial{wrap_angle(k.kx + scale * dx),
                                        wrap_angle(k.ky + scale * dy)};
                    auto [tx, ty] = grad(trial);
                    const double tnorm = std::hypot(tx, ty);
                    if (tnorm < gnorm) {
                        k = trial;
                        gx = tx;
                        gy = ty;
                        gnorm = tnorm;
                        improved = true;
                        break;
                    }
                    scale *= 0.5;
                }
                if (!improved) break;  // stuck; drop this start
            }
            if (ok || gnorm < 1e-12) converged.push_back(k);
        }
    }

    // deterministic merge: sort, then deduplicate on the torus
    std::sort(converged.begin(), converged.end(), [](const MomentumPoint& a, const MomentumPoint& b) {
        return std::tie(a.kx, a.ky) < std::tie(b.kx, b.ky);
    });
    std::vector<SaddlePoint> points;
    for (const MomentumPoint& k : converged) {
        bool duplicate = false;
        for (const SaddlePoint& seen : points)
            if (torus_distance(seen.k0.kx, seen.k0.ky, k.kx, k.ky) < 1e-6) duplicate = true;
        if (duplicate) continue;
        SaddlePoint pt;
        pt.k0 = k;
        pt.surface = PhaseSurfaceId{j};
        const auto [gx, gy] = grad(k);
        pt.grad_norm = std::hypot(gx, gy);
        const SecondDerivatives sd = assemble_second_derivatives(j, k, params);
        pt.hessian_det = sd.wxx * sd.wyy - sd.wxy * sd.wxy;
        pt.classification = classify(pt.hessian_det);
        points.push_back(pt);
    }
    return points;
}

RecurrenceCondition recurrence_condition(const BiasParams& params) {
    validate(params);
    const double p = params.p;
    const double r = params.r;
    const double num = p * (r + 1) * (r + 1) - (r - 1) * (r - 1);
    const double den = p * (r + 1) * (r + 1) - p * (r - 1) * (r - 1);
    RecurrenceCondition cond;
    cond.radicand = num / den;
    cond.recurrent_by_closed_form = cond.radicand <= 1.0;
    return cond;
}

VelocityProfile peak_velocities_analytic(const BiasParams& params) {
    validate(params);
    const double s = 0.5 * (params.r - 1);
    const double h = std::sqrt(params.p) * 0.5 * (params.r + 1);
    VelocityProfile v;
    v.right = Velocity{s + h, 0.0};
    v.left = Velocity{s, h};
    v.down = Velocity{s, -h};
    v.up = Velocity{s - h, 0.0};
    return v;
}

std::vector<Velocity> peak_velocities_numeric(const BiasParams& params) {
    validate(params);
    // Roots of the second-derivative block along one u axis, found by sign
    // changes + bisection on a fine grid (block is the same in u+ and u-).
    auto block = [&](double u) {
        const double x = 0.5 * (params.r + 1) * u;
        const double sx = std::sin(x), cx = std::cos(x);
        const double d = 1.0 - params.p * sx * sx;
        return -sx / std::sqrt(d) + params.p * sx * cx * cx / (d * std::sqrt(d));
    };
    std::vector<double> roots;
    const int steps = 4096;
    double prev_u = -kPi, prev_v = block(prev_u);
    for (int i = 1; i <= steps; ++i) {
        const double u = -kPi + 2.0 * kPi * i / steps;
        const double v = block(u);
        if (prev_v == 0.0) roots.push_back(prev_u);
        else if (prev_v * v < 0.0) {
            double lo = prev_u, hi = u, flo = prev_v;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = block(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_u = u;
        prev_v = v;
    }

    std::vector<Velocity> velocities;
    for (int j = 1; j <= 4; ++j) {
        for (double uplus : roots) {
            for (double uminus : roots) {
                const double da = phase_w_derivative(uplus, params, kBranchPlus[j - 1]);
                const double db = phase_w_derivative(uminus, params, kBranchMinus[j - 1]);
                const Velocity v{0.5 * (da + db), 0.5 * (da - db)};
                bool duplicate = false;
                for (const Velocity& seen : velocities)
                    if (std::hypot(seen.vx - v.vx, seen.vy - v.vy) < 1e-9) duplicate = true;
                if (!duplicate) velocities.push_back(v);
            }
        }
    }
    std::sort(velocities.begin(), velocities.end(), [](const Velocity& a, const Velocity& b) {
        return std::tie(a.vx, a.vy) < std::tie(b.vx, b.vy);
    });
    return velocities;
}

HullTest velocity_recurrence_criterion(const VelocityProfile& profile) {
    const std::array<Velocity, 4> pts{profile.right, profile.left, profile.up, profile.down};

    // convex hull by monotone chain on the four points
    std::vector<Velocity> sorted(pts.begin(), pts.end());
    std::sort(sorted.begin(), sorted.end(), [](const Velocity& a, const Velocity& b) {
        return std::tie(a.vx, a.vy) < std::tie(b.vx, b.vy);
    });
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [](const Velocity& a, const Velocity& b) {
                                 return a.vx == b.vx && a.vy == b.vy;
                             }),
                 sorted.end());
    auto cross = [](const Velocity& o, const Velocity& a, const Velocity& b) {
        return (a.vx - o.vx) * (b.vy - o.vy) - (a.vy - o.vy) * (b.vx - o.vx);
    };
    std::vector<Velocity> hull;
    for (const Velocity& v : sorted) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), v) <= 0.0)
            hull.pop_back();
        hull.push_back(v);
    }
    const std::size_t lower = hull.size() + 1;
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
        while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
            hull.pop_back();
        hull.push_back(*it);
    }
    hull.pop_back();

    HullTest test;
    if (hull.size() < 3) {
        test.degenerate = true;
        test.contains_origin = false;
        return test;
    }
    test.contains_origin = true;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Velocity& a = hull[i];
        const Velocity& b = hull[(i + 1) % hull.size()];
        const double c = (b.vx - a.vx) * (0.0 - a.vy) - (b.vy - a.vy) * (0.0 - a.vx);
        if (c <= 1e-12) {
            test.contains_origin = false;
            break;
        }
    }
    return test;
}

HessianAudit run_hessian_audit(const BiasParams& params, int samples, unsigned seed) {
    validate(params);
    HessianAudit audit;
    audit.wxx_matches_fd.fill(true);
    audit.wyy_matches_fd.fill(true);
    audit.mixed_dky_dkx_matches_fd.fill(true);
    audit.mixed_dkx_dky_matches_fd.fill(true);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-kPi, kPi);
    const double h = 1e-5;
    const double tol = 1e-5;

    for (int s = 0; s < samples; ++s) {
        const MomentumPoint k{dist(rng), dist(rng)};
        const HessianTerms ht = hessian_terms(k, params);
        const double F = ht.df_dkx, G = ht.dg_dkx;
        for (int j = 1; j <= 4; ++j) {
            auto gxp = grad_w_analytic(j, {k.kx + h, k.ky}, params);
            auto gxm = grad_w_analytic(j, {k.kx - h, k.ky}, params);
            auto gyp = grad_w_analytic(j, {k.kx, k.ky + h}, params);
            auto gym = grad_w_analytic(j, {k.kx, k.ky - h}, params);
            const double fd_wxx = (gxp.first - gxm.first) / (2 * h);
            const double fd_wyy = (gyp.second - gym.second) / (2 * h);
            const double fd_wxy = (gyp.first - gym.first) / (2 * h);
            const SecondDerivatives sd = assemble_second_derivatives(j, k, params);
            if (std::abs(sd.wxx - fd_wxx) > tol) audit.wxx_matches_fd[j - 1] = false;
            if (std::abs(sd.wyy - fd_wyy) > tol) audit.wyy_matches_fd[j - 1] = false;
            audit.max_error_pure = std::max({audit.max_error_pure, std::abs(sd.wxx - fd_wxx),
                                             std::abs(sd.wyy - fd_wyy)});

            // published mixed-partial combinations, audited independently
            double printed_dky_dkx = 0.0, printed_dkx_dky = 0.0;
            switch (j) {
                case 1:
                    printed_dky_dkx = F + G;
                    printed_dkx_dky = F - G;
                    break;
                case 2:
                    printed_dky_dkx = F - G;
                    printed_dkx_dky = F + G;
                    break;
                case 3:
                    printed_dky_dkx = -G - F;
                    printed_dkx_dky = -G - F;
                    break;
                case 4:
                    printed_dky_dkx = G - F;
                    printed_dkx_dky = -F + G;
                    break;
            }
            if (std::abs(printed_dky_dkx - fd_wxy) > tol)
                audit.mixed_dky_dkx_matches_fd[j - 1] = false;
            if (std::abs(printed_dkx_dky - fd_wxy) > tol)
                audit.mixed_dkx_dky_matches_fd[j - 1] = false;
        }
    }
    return audit;
}

SaddleAuditReport run_saddle_audit(const BiasParams& params, int seeds) {
    SaddleAuditReport report;
    report.params = params;
    report.analytic = saddle_points_analytic(params);

    std::vector<SaddlePoint> numeric;
    for (int j = 1; j <= 4; ++j) {
        for (const SaddlePoint& pt : saddle_points_numeric(j, params, seeds)) {
            bool duplicate = false;
            for (const SaddlePoint& seen : numeric)
                if (torus_distance(seen.k0.kx, seen.k0.ky, pt.k0.kx, pt.k0.ky) < 1e-6)
                    duplicate = true;
            if (!duplicate) numeric.push_back(pt);
        }
    }
    std::sort(numeric.begin(), numeric.end(), [](const SaddlePoint& a, const SaddlePoint& b) {
        return std::tie(a.k0.kx, a.k0.ky) < std::tie(b.k0.kx, b.k0.ky);
    });
    report.numeric = numeric;
    for (const SaddlePoint& pt : numeric) {
        bool matched = false;
        for (const SaddlePoint& a : report.analytic.points)
            if (torus_distance(a.k0.kx, a.k0.ky, pt.k0.kx, pt.k0.ky) < 1e-6) matched = true;
        if (!matched) report.extras.push_back(pt);
    }
    report.velocity_profile = peak_velocities_analytic(params);
    report.hull = velocity_recurrence_criterion(report.velocity_profile);
    report.hessian = run_hessian_audit(params, 100);
    return report;
}

}  // namespace qwalk
