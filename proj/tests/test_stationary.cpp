#include <cmath>
#include <random>

#include "doctest.h"
#include "qwalk/stationary.hpp"

using namespace qwalk;

namespace {

// independent finite-difference oracle built on the phase_w composition
std::pair<double, double> grad_fd(int j, const MomentumPoint& k, const BiasParams& params,
                                  double h = 1e-6) {
    auto w = [&](double kx, double ky) { return phase_surface(j, {kx, ky}, params); };
    return {(w(k.kx + h, k.ky) - w(k.kx - h, k.ky)) / (2 * h),
            (w(k.kx, k.ky + h) - w(k.kx, k.ky - h)) / (2 * h)};
}

bool contains_torus(const std::vector<SaddlePoint>& pts, double kx, double ky,
                    double tol = 1e-8) {
    for (const SaddlePoint& pt : pts)
        if (torus_distance(pt.k0.kx, pt.k0.ky, kx, ky) < tol) return true;
    return false;
}

}  // namespace

TEST_SUITE_BEGIN("stationary");

TEST_CASE("gradient closed form at the origin and the flat point") {
    for (const BiasParams params : {BiasParams{0.5, 1}, BiasParams{0.3, 2}}) {
        const auto [gx, gy] = grad_w_analytic(1, {0.0, 0.0}, params);
        CHECK(gx == doctest::Approx(0.5 * (params.r - 1) +
                                    std::sqrt(params.p) * 0.5 * (params.r + 1))
                        .epsilon(1e-14));
        CHECK(gy == 0.0);
    }
    const auto [gx, gy] = grad_w_analytic(1, {kPi, 0.0}, {0.5, 1});
    CHECK(std::abs(gx) < 1e-12);
    CHECK(std::abs(gy) < 1e-12);
}

TEST_CASE("gradients match the finite-difference oracle") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(-kPi, kPi);
    for (double p : {0.3, 0.5, 0.8})
        for (int r : {1, 2})
            for (int j = 1; j <= 4; ++j)
                for (int i = 0; i < 50; ++i) {
                    const MomentumPoint k{dist(rng), dist(rng)};
                    const auto [ax, ay] = grad_w_analytic(j, k, {p, r});
                    const auto [fx, fy] = grad_fd(j, k, {p, r});
                    CHECK(std::abs(ax - fx) < 1e-6);
                    CHECK(std::abs(ay - fy) < 1e-6);
                }
}

TEST_CASE("closed-form saddle candidates at p=0.5, r=1") {
    const SaddleSearchResult result = saddle_points_analytic({0.5, 1});
    CHECK(!result.complex_valued);
    CHECK(result.radicand == doctest::Approx(1.0).epsilon(1e-14));
    // (±pi, 0) and (0, ±pi) collapse to two distinct torus points
    CHECK(contains_torus(result.points, kPi, 0.0));
    CHECK(contains_torus(result.points, -kPi, 0.0));
    CHECK(contains_torus(result.points, 0.0, kPi));
    CHECK(contains_torus(result.points, 0.0, -kPi));
    for (const SaddlePoint& pt : result.points) {
        CHECK(pt.grad_norm < 1e-8);
        // surfaces 2 and 3 see a genuine saddle here; the tag prefers them
        CHECK(pt.classification == CriticalKind::Saddle);
    }
}

TEST_CASE("closed-form candidates for r=2") {
    SUBCASE("moderate p: interior candidates, extremum/saddle split") {
        const SaddleSearchResult result = saddle_points_analytic({0.2, 2});
        CHECK(!result.complex_valued);
        CHECK(result.radicand == doctest::Approx(0.5).epsilon(1e-14));
        REQUIRE(result.points.size() == 4);
        const double u0 = (2.0 / 3.0) * std::asin(std::sqrt(0.5));
        CHECK(contains_torus(result.points, 2 * u0, 0.0));
        CHECK(contains_torus(result.points, -2 * u0, 0.0));
        CHECK(contains_torus(result.points, 0.0, 2 * u0));
        CHECK(contains_torus(result.points, 0.0, -2 * u0));
        for (const SaddlePoint& pt : result.points) {
            CHECK(pt.grad_norm < 1e-8);
            CHECK(pt.surface.j == 4);  // stationary only on the (2,2) surface
            if (std::abs(pt.k0.ky) < 1e-9)
                CHECK(pt.classification == CriticalKind::Extremum);
            else
                CHECK(pt.classification == CriticalKind::Saddle);
        }
    }
    SUBCASE("small p: the radicand leaves [0,1] and the closed form goes complex") {
        const SaddleSearchResult result = saddle_points_analytic({0.05, 2});
        CHECK(result.complex_valued);
        CHECK(result.points.empty());
        CHECK(result.radicand < 0.0);
    }
}

TEST_CASE("multi-start Newton recovers the stationary set") {
    SUBCASE("p=0.5, r=1, surface 1") {
        const auto points = saddle_points_numeric(1, {0.5, 1}, 12);
        CHECK(contains_torus(points, kPi, 0.0));
        CHECK(contains_torus(points, 0.0, kPi));
        for (const SaddlePoint& pt : points) CHECK(pt.grad_norm < 1e-10);
        // the stationary set is invariant under k -> -k
        for (const SaddlePoint& pt : points)
            CHECK(contains_torus(points, -pt.k0.kx, -pt.k0.ky, 1e-6));
    }
    SUBCASE("surfaces 1 and 4 share the stationary set at p=0.5, r=1") {
        const auto s1 = saddle_points_numeric(1, {0.5, 1}, 12);
        const auto s4 = saddle_points_numeric(4, {0.5, 1}, 12);
        REQUIRE(s1.size() == s4.size());
        for (const SaddlePoint& pt : s1)
            CHECK(contains_torus(s4, pt.k0.kx, pt.k0.ky, 1e-8));
    }
    SUBCASE("seed validation") {
        CHECK_THROWS_AS(saddle_points_numeric(1, {0.5, 1}, 4), std::invalid_argument);
        CHECK_THROWS_AS(saddle_points_numeric(0, {0.5, 1}, 12), std::invalid_argument);
    }
    SUBCASE("r=2 extras beyond the closed form are found and flagged") {
        const SaddleAuditReport report = run_saddle_audit({0.2, 2}, 12);
        CHECK(!report.numeric.empty());
        // surface-1 stationary points exist that the closed form misses
        CHECK(!report.extras.empty());
        for (const SaddlePoint& pt : report.analytic.points)
            CHECK(contains_torus(report.numeric, pt.k0.kx, pt.k0.ky, 1e-6));
    }
}

TEST_CASE("hessian blocks vanish at k=0 and match finite differences") {
    const HessianTerms zero = hessian_terms({0.0, 0.0}, {0.5, 1});
    CHECK(zero.df_dkx == 0.0);
    CHECK(zero.df_dky == 0.0);
    CHECK(zero.dg_dkx == 0.0);
    CHECK(zero.dg_dky == 0.0);

    const HessianAudit audit = run_hessian_audit({0.5, 2}, 100);
    for (int j = 0; j < 4; ++j) {
        CHECK(audit.wxx_matches_fd[j]);
        CHECK(audit.wyy_matches_fd[j]);
    }
    CHECK(audit.max_error_pure < 1e-5);
}

TEST_CASE("published mixed partials: the kx,ky order matches, the other does not") {
    // f and g depend on kx ± ky only, so the two printed mixed-partial
    // expressions cannot both be right; the audit records which one is.
    const HessianAudit audit = run_hessian_audit({0.5, 2}, 100);
    CHECK(audit.mixed_dkx_dky_matches_fd[0]);
    CHECK(audit.mixed_dkx_dky_matches_fd[1]);
    CHECK(audit.mixed_dkx_dky_matches_fd[2]);
    CHECK(audit.mixed_dkx_dky_matches_fd[3]);
    CHECK(!audit.mixed_dky_dkx_matches_fd[0]);
    CHECK(!audit.mixed_dky_dkx_matches_fd[1]);
    CHECK(audit.mixed_dky_dkx_matches_fd[2]);
    CHECK(audit.mixed_dky_dkx_matches_fd[3]);
}

TEST_CASE("recurrence condition radicand") {
    const RecurrenceCondition c1 = recurrence_condition({0.5, 1});
    CHECK(c1.recurrent_by_closed_form);
    CHECK(c1.radicand == doctest::Approx(1.0).epsilon(1e-14));

    const RecurrenceCondition c2 = recurrence_condition({0.2, 2});
    CHECK(c2.recurrent_by_closed_form);
    CHECK(c2.radicand == doctest::Approx(0.5).epsilon(1e-14));

    CHECK(recurrence_condition({0.9, 5}).recurrent_by_closed_form);

    for (int i = 1; i <= 19; ++i)
        for (int r : {1, 2, 3, 5})
            CHECK(recurrence_condition({0.05 * i, r}).recurrent_by_closed_form);
}

TEST_CASE("peak velocities: closed form, limits, numeric extraction") {
    const VelocityProfile v = peak_velocities_analytic({0.5, 1});
    const double h = std::sqrt(0.5);
    CHECK(v.right.vx == doctest::Approx(h).epsilon(1e-14));
    CHECK(v.right.vy == 0.0);
    CHECK(v.left.vx == 0.0);
    CHECK(v.left.vy == doctest::Approx(h).epsilon(1e-14));
    CHECK(v.down.vy == doctest::Approx(-h).epsilon(1e-14));
    CHECK(v.up.vx == doctest::Approx(-h).epsilon(1e-14));

    const VelocityProfile edge = peak_velocities_analytic({1.0 - 1e-9, 1});
    CHECK(edge.right.vx == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(edge.up.vx == doctest::Approx(-1.0).epsilon(1e-4));

    for (const BiasParams params : {BiasParams{0.5, 1}, BiasParams{0.3, 2}, BiasParams{0.8, 3}}) {
        const VelocityProfile prof = peak_velocities_analytic(params);
        const std::vector<Velocity> numeric = peak_velocities_numeric(params);
        REQUIRE(numeric.size() == 4);
        for (const Velocity& expect :
             {prof.right, prof.left, prof.up, prof.down}) {
            CHECK(std::abs(expect.vx) <= std::max(double(params.r), 1.0) + 1e-12);
            CHECK(std::abs(expect.vy) <= std::max(double(params.r), 1.0) + 1e-12);
            bool found = false;
            for (const Velocity& got : numeric)
                if (std::hypot(got.vx - expect.vx, got.vy - expect.vy) < 1e-10) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("velocity components are gradients at the flat stationary points (p=0.5, r=1)") {
    // second-derivative blocks vanish at u in {0, pi}; gradient values there
    // enumerate exactly the four velocity pairs
    const BiasParams params{0.5, 1};
    const double roots[2] = {0.0, kPi};
    std::vector<Velocity> from_grad;
    for (int j = 1; j <= 4; ++j)
        for (double uplus : roots)
            for (double uminus : roots) {
                const MomentumPoint k{uplus + uminus, uplus - uminus};
                const auto [gx, gy] = grad_w_analytic(j, k, params);
                from_grad.push_back({gx, gy});
            }
    const VelocityProfile prof = peak_velocities_analytic(params);
    for (const Velocity& expect : {prof.right, prof.left, prof.up, prof.down}) {
        bool found = false;
        for (const Velocity& got : from_grad)
            if (std::hypot(got.vx - expect.vx, got.vy - expect.vy) < 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("velocity hull criterion") {
    CHECK(velocity_recurrence_criterion(peak_velocities_analytic({0.5, 1})).contains_origin);
    CHECK(velocity_recurrence_criterion(peak_velocities_analytic({1.0 - 1e-9, 1})).contains_origin);

    VelocityProfile right_half;
    right_half.right = {2.0, 0.0};
    right_half.left = {1.0, 1.0};
    right_half.up = {0.5, -1.0};
    right_half.down = {1.5, 0.5};
    const HullTest off = velocity_recurrence_criterion(right_half);
    CHECK(!off.contains_origin);
    CHECK(!off.degenerate);

    VelocityProfile collinear;
    collinear.right = {1.0, 1.0};
    collinear.left = {2.0, 2.0};
    collinear.up = {-1.0, -1.0};
    collinear.down = {0.5, 0.5};
    const HullTest degenerate = velocity_recurrence_criterion(collinear);
    CHECK(degenerate.degenerate);
    CHECK(!degenerate.contains_origin);

    // r >= 2 with p below ((r-1)/(r+1))^2: all four points sit right of the
    // origin and the hull test goes false
    CHECK(!velocity_recurrence_criterion(peak_velocities_analytic({0.04, 3})).contains_origin);
    CHECK(velocity_recurrence_criterion(peak_velocities_analytic({0.5, 3})).contains_origin);
}

TEST_SUITE_END();
