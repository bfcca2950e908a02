#pragma once

#include <array>
#include <utility>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

/// Surface j in 1..4 selects w_j(kx,ky) = w_a(u+) + w_b(u-) with u± =
/// (kx±ky)/2 and (a,b) = (1,1), (1,2), (2,1), (2,2) in the published order.
struct PhaseSurfaceId {
    int j = 1;
};

/// w_j evaluated at k.
double phase_surface(int j, const MomentumPoint& k, const BiasParams& params);

/// d w_branch / d u.
double phase_w_derivative(double u, const BiasParams& params, int branch);

/// d^2 w_branch / d u^2.
double phase_w_second_derivative(double u, const BiasParams& params, int branch);

/// Gradient (d/dkx, d/dky) of surface j via the chain rule on u±.
std::pair<double, double> grad_w_analytic(int j, const MomentumPoint& k,
                                          const BiasParams& params);

enum class CriticalKind { Saddle, Extremum, Degenerate };

struct SaddlePoint {
    MomentumPoint k0;
    PhaseSurfaceId surface;
    double grad_norm = 0.0;
    double hessian_det = 0.0;  // D = wxx*wyy - wxy^2 on the recorded surface
    CriticalKind classification = CriticalKind::Degenerate;
};

struct SaddleSearchResult {
    std::vector<SaddlePoint> points;
    bool complex_valued = false;  // closed form left the real domain
    double radicand = 0.0;
};

/// The closed-form candidates (±(4/(r+1)) arcsin(sqrt(radicand)), 0) with
/// radicand = (p(r+1)^2 - (r-1)^2)/(p(r+1)^2 - p(r-1)^2), plus the
/// independent-sign companions (0, ±·). Empty with the complex_valued flag
/// when the radicand falls outside [0, 1].
SaddleSearchResult saddle_points_analytic(const BiasParams& params);

/// Multi-start damped Newton on grad w_j from a seeds x seeds grid over the
/// momentum torus; converged points deduplicated modulo 2 pi and classified
/// by the second-derivative test.
std::vector<SaddlePoint> saddle_points_numeric(int j, const BiasParams& params, int seeds);

/// The four published second-derivative building blocks, with f and g pinned
/// as the u+ and u- square-root terms of the first derivatives:
///   f = sqrt(p) ((r+1)/4) cos(((r+1)/2) u+) / sqrt(1 - p sin^2(((r+1)/2) u+)).
struct HessianTerms {
    double df_dkx, df_dky, dg_dkx, dg_dky;
};
HessianTerms hessian_terms(const MomentumPoint& k, const BiasParams& params);

/// Assembled second derivatives of surface j from the blocks.
struct SecondDerivatives {
    double wxx, wyy, wxy;
};
SecondDerivatives assemble_second_derivatives(int j, const MomentumPoint& k,
                                              const BiasParams& params);

struct RecurrenceCondition {
    bool recurrent_by_closed_form = false;  // radicand <= 1
    double radicand = 0.0;
};
RecurrenceCondition recurrence_condition(const BiasParams& params);

struct Velocity {
    double vx = 0.0, vy = 0.0;
};

/// Peak velocities under their published labels:
///   R: ((r-1)/2 + sqrt(p)(r+1)/2, 0)    L: ((r-1)/2, sqrt(p)(r+1)/2)
///   D: ((r-1)/2, -sqrt(p)(r+1)/2)       U: ((r-1)/2 - sqrt(p)(r+1)/2, 0)
struct VelocityProfile {
    Velocity right, left, up, down;
};
VelocityProfile peak_velocities_analytic(const BiasParams& params);

/// Velocity pairs recovered numerically: gradient values at points where the
/// second-derivative blocks vanish along both u axes (roots found by
/// bracketed bisection, no closed form assumed). Deduplicated, sorted.
std::vector<Velocity> peak_velocities_numeric(const BiasParams& params);

struct HullTest {
    bool contains_origin = false;
    bool degenerate = false;
};

/// Recurrence criterion: the origin lies strictly inside the convex hull of
/// the four velocity points. Collinear profiles are degenerate and fail.
HullTest velocity_recurrence_criterion(const VelocityProfile& profile);

struct HessianAudit {
    // finite-difference agreement of the assembled pure second derivatives
    std::array<bool, 4> wxx_matches_fd;
    std::array<bool, 4> wyy_matches_fd;
    // the two published mixed-partial expressions, checked independently
    std::array<bool, 4> mixed_dky_dkx_matches_fd;
    std::array<bool, 4> mixed_dkx_dky_matches_fd;
    double max_error_pure = 0.0;
};
HessianAudit run_hessian_audit(const BiasParams& params, int samples, unsigned seed = 12345);

struct SaddleAuditReport {
    BiasParams params;
    SaddleSearchResult analytic;
    std::vector<SaddlePoint> numeric;  // union over surfaces, deduplicated
    std::vector<SaddlePoint> extras;   // numeric points with no analytic match
    VelocityProfile velocity_profile;
    HullTest hull;
    HessianAudit hessian;
};
SaddleAuditReport run_saddle_audit(const BiasParams& params, int seeds);

}  // namespace qwalk
