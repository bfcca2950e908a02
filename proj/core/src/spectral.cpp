#include "qwalk/spectral.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qwalk {

namespace {

inline double grid_k(int m, int n) { return -kPi + 2.0 * kPi * m / n; }

int default_grid(const BiasParams& params, int t_max) {
    const long need = long(params.r + 1) * t_max + 1;
    int n = 1;
    while (n < need) n *= 2;
    return n;
}

}  // namespace

Mat4c momentum_operator(const BiasParams& params, const MomentumPoint& k,
                        const CoinMatrix& coin) {
    const double r = params.r;
    Eigen::Vector4cd phases;
    phases << std::polar(1.0, r * k.kx), std::polar(1.0, -k.kx), std::polar(1.0, r * k.ky),
        std::polar(1.0, -k.ky);
    return phases.asDiagonal() * coin.entries.cast<Complex>();
}

double phase_w(double u, const BiasParams& params, int branch) {
    if (branch != 1 && branch != 2) throw std::invalid_argument("branch must be 1 or 2");
    const double base = 0.5 * (params.r - 1) * u;
    const double theta = std::asin(std::sqrt(params.p) * std::sin(0.5 * (params.r + 1) * u));
    return branch == 1 ? base + theta : base - kPi - theta;
}

PhasePair phase_pair(double u, const BiasParams& params) {
    return PhasePair{u, phase_w(u, params, 1), phase_w(u, params, 2)};
}

std::array<Complex, 4> eigenvalues_analytic(const MomentumPoint& k, const BiasParams& params) {
    const double up = 0.5 * (k.kx + k.ky);
    const double um = 0.5 * (k.kx - k.ky);
    const double w1p = phase_w(up, params, 1), w2p = phase_w(up, params, 2);
    const double w1m = phase_w(um, params, 1), w2m = phase_w(um, params, 2);
    return {std::polar(1.0, w1p + w1m), std::polar(1.0, w1p + w2m),
            std::polar(1.0, w2p + w1m), std::polar(1.0, w2p + w2m)};
}

NormalizationFactors normalization_factors(const MomentumPoint& k, const BiasParams& params) {
    const double sp = std::sqrt(params.p);
    auto n1 = [&](double x) { return 2.0 - 2.0 * sp * std::cos(x - std::asin(sp * std::sin(x))); };
    auto n2 = [&](double x) { return 2.0 + 2.0 * sp * std::cos(x + std::asin(sp * std::sin(x))); };
    const double xp = (k.kx + k.ky) * (params.r + 1) / 4.0;
    const double xm = (k.kx - k.ky) * (params.r + 1) / 4.0;
    return NormalizationFactors{n1(xp), n1(xm), n2(xp), n2(xm)};
}

namespace {

// Branch pair (a at u+, b at u-) for surface j in the published order.
constexpr int kBranchPlus[4] = {1, 1, 2, 2};
constexpr int kBranchMinus[4] = {1, 2, 1, 2};

}  // namespace

Vec4c eigenvector_analytic_raw(const MomentumPoint& k, const BiasParams& params, int j) {
    if (j < 1 || j > 4) throw std::invalid_argument("surface index must be in 1..4");
    const double up = 0.5 * (k.kx + k.ky);
    const double um = 0.5 * (k.kx - k.ky);
    const int ba = kBranchPlus[j - 1], bb = kBranchMinus[j - 1];
    const Complex alpha = std::polar(1.0, phase_w(up, params, ba) - params.r * up);
    const Complex beta = std::polar(1.0, phase_w(um, params, bb) - params.r * um);
    const double p = params.p;
    const double sp = std::sqrt(p), s1p = std::sqrt(1.0 - p);
    Vec4c v;
    v << Complex(1.0 - p, 0.0),
        -std::sqrt(p * (1.0 - p)) + s1p * beta,
        -std::sqrt(p * (1.0 - p)) + s1p * alpha,
        p - sp * beta - sp * alpha + alpha * beta;
    return v;
}

AnalyticEigensystem eigenvectors_analytic(const MomentumPoint& k, const BiasParams& params,
                                          const CoinMatrix& coin) {
    AnalyticEigensystem sys;
    sys.values = eigenvalues_analytic(k, params);
    const Mat4c op = momentum_operator(params, k, coin);
    for (int j = 1; j <= 4; ++j) {
        Vec4c v = eigenvector_analytic_raw(k, params, j);
        v /= v.norm();
        sys.vectors[j - 1] = v;
        sys.residuals[j - 1] = (op * v - sys.values[j - 1] * v).norm();
    }
    sys.gram_max_offdiag = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            sys.gram_max_offdiag = std::max(
                sys.gram_max_offdiag, std::abs(sys.vectors[a].dot(sys.vectors[b])));
    return sys;
}

NumericEigensystem eigendecompose_numeric(const Mat4c& op) {
    const double unitary_defect =
        (op * op.adjoint() - Mat4c::Identity()).cwiseAbs().maxCoeff();
    if (unitary_defect > 1e-10)
        throw std::invalid_argument("operator is not unitary within 1e-10 (defect " +
                                    std::to_string(unitary_defect) + ")");
    // Schur form of a normal matrix: T is diagonal up to roundoff, and the
    // columns of Q stay orthonormal even for degenerate eigenvalues.
    Eigen::ComplexSchur<Mat4c> schur(op, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("Schur decomposition failed to converge");
    NumericEigensystem sys;
    sys.vectors = schur.matrixU();
    for (int j = 0; j < 4; ++j) {
        sys.values[j] = schur.matrixT()(j, j);
        sys.residuals[j] =
            (op * sys.vectors.col(j) - sys.values[j] * sys.vectors.col(j)).norm();
    }
    return sys;
}

double eigenvalue_multiset_distance(const std::array<Complex, 4>& a,
                                    const std::array<Complex, 4>& b) {
    std::array<int, 4> perm{0, 1, 2, 3};
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

MomentumState fourier_evolve(const CoinState4& initial, const BiasParams& params,
                             const CoinMatrix& coin, int t, int n) {
    validate(params);
    if (t < 0) throw std::invalid_argument("t must be >= 0");
    if (long(n) < long(params.r + 1) * t + 1)
        throw std::invalid_argument("grid size " + std::to_string(n) +
                                    " is below the aliasing bound (r+1)*t+1 = " +
                                    std::to_string(long(params.r + 1) * t + 1));
    MomentumState ms;
    ms.n = n;
    ms.t = t;
    ms.grid.resize(4 * std::size_t(n) * n);
    const Vec4c psi0 = initial.amps;

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const MomentumPoint k{grid_k(i, n), grid_k(j, n)};
            const NumericEigensystem eig =
                eigendecompose_numeric(momentum_operator(params, k, coin));
            Vec4c acc = Vec4c::Zero();
            for (int m = 0; m < 4; ++m) {
                const Complex cm = eig.vectors.col(m).dot(psi0);
                acc += std::pow(eig.values[m], double(t)) * cm * eig.vectors.col(m);
            }
            Complex* out = ms.grid.data() + 4 * (std::size_t(i) * n + j);
            for (int c = 0; c < 4; ++c) out[c] = acc(c);
        }
    }
    return ms;
}

AmplitudeField inverse_transform(const MomentumState& ms, const BiasParams& params) {
    validate(params);
    const int n = ms.n;
    const int t = ms.t;

    // (1/N^2) sum_m psi~(k_m) e^{-i k_m x} with k_m = -pi + 2 pi m / N equals
    // (-1)^(x+y) times a plain forward DFT evaluated at (x mod N, y mod N).
    std::vector<Complex> freq(ms.grid);
    std::vector<Complex> spatial(ms.grid.size());
    {
        const int dims[2] = {n, n};
        fftw_plan plan = fftw_plan_many_dft(
            2, dims, 4, reinterpret_cast<fftw_complex*>(freq.data()), nullptr, 4, 1,
            reinterpret_cast<fftw_complex*>(spatial.data()), nullptr, 4, 1, FFTW_FORWARD,
            FFTW_ESTIMATE);
        if (!plan) throw std::runtime_error("fftw plan creation failed");
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    AmplitudeField field;
    field.params = params;
    field.t = t;
    field.window = Window{-t, params.r * t, -t, params.r * t};
    field.amps.assign(4 * field.window.sites(), Complex(0.0, 0.0));
    const double scale = 1.0 / (double(n) * double(n));
    for (int x = field.window.x_min; x <= field.window.x_max; ++x) {
        const int xm = ((x % n) + n) % n;
        for (int y = field.window.y_min; y <= field.window.y_max; ++y) {
            const int ym = ((y % n) + n) % n;
            const double sign = ((x + y) % 2 == 0) ? 1.0 : -1.0;
            const Complex* src = spatial.data() + 4 * (std::size_t(xm) * n + ym);
            Complex* dst = field.amps.data() + 4 * field.window.site_index(x, y);
            for (int c = 0; c < 4; ++c) dst[c] = sign * scale * src[c];
        }
    }
    return field;
}

std::vector<Vec4c> amplitude_at_origin_series(const CoinState4& initial,
                                              const BiasParams& params, const CoinMatrix& coin,
                                              const std::vector<int>& t_list, int grid_n) {
    validate(params);
    int t_max = 0;
    for (int t : t_list) {
        if (t < 0) throw std::invalid_argument("t_list entries must be >= 0");
        t_max = std::max(t_max, t);
    }
    const int n = grid_n > 0 ? grid_n : default_grid(params, t_max);
    if (long(n) < long(params.r + 1) * t_max + 1)
        throw std::invalid_argument("grid size " + std::to_string(n) +
                                    " is below the aliasing bound for t_max");

    // Visit times in ascending order with incremental eigenvalue powers;
    // per-k contributions are folded with fixed-order pairwise accumulators
    // into per-kx-row partials, then pairwise across rows, so the result is
    // independent of any parallel schedule.
    const std::size_t nt = t_list.size();
    std::vector<std::size_t> order(nt);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return t_list[a] < t_list[b]; });
    std::vector<int> gaps(nt);
    std::vector<int> gap_values;
    std::vector<std::size_t> gap_index(nt);
    {
        int t_prev = 0;
        for (std::size_t qi = 0; qi < nt; ++qi) {
            gaps[qi] = t_list[order[qi]] - t_prev;
            t_prev = t_list[order[qi]];
            auto it = std::find(gap_values.begin(), gap_values.end(), gaps[qi]);
            if (it == gap_values.end()) {
                gap_index[qi] = gap_values.size();
                gap_values.push_back(gaps[qi]);
            } else {
                gap_index[qi] = std::size_t(it - gap_values.begin());
            }
        }
    }

    std::vector<Complex> row_partials(std::size_t(n) * nt * 4, Complex(0.0, 0.0));
    const Vec4c psi0 = initial.amps;

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < n; ++i) {
        std::vector<PairwiseAccumulator<Complex>> acc(nt * 4);
        std::vector<std::array<Complex, 4>> gap_pow(gap_values.size());
        for (int j = 0; j < n; ++j) {
            const MomentumPoint k{grid_k(i, n), grid_k(j, n)};
            const NumericEigensystem eig =
                eigendecompose_numeric(momentum_operator(params, k, coin));
            std::array<Vec4c, 4> contrib;
            std::array<Complex, 4> mu;
            for (int m = 0; m < 4; ++m) {
                contrib[m] = eig.vectors.col(m).dot(psi0) * eig.vectors.col(m);
                mu[m] = Complex(1.0, 0.0);
            }
            for (std::size_t g = 0; g < gap_values.size(); ++g)
                for (int m = 0; m < 4; ++m)
                    gap_pow[g][m] = std::pow(eig.values[m], double(gap_values[g]));
            for (std::size_t qi = 0; qi < nt; ++qi) {
                const std::array<Complex, 4>& gp = gap_pow[gap_index[qi]];
                Vec4c sum = Vec4c::Zero();
                for (int m = 0; m < 4; ++m) {
                    mu[m] *= gp[m];
                    sum += mu[m] * contrib[m];
                }
                for (int c = 0; c < 4; ++c) acc[order[qi] * 4 + std::size_t(c)].push(sum(c));
            }
        }
        for (std::size_t q = 0; q < nt; ++q)
            for (int c = 0; c < 4; ++c)
                row_partials[(q * std::size_t(n) + std::size_t(i)) * 4 + std::size_t(c)] =
                    acc[q * 4 + std::size_t(c)].total();
    }

    std::vector<Vec4c> result(nt);
    const double scale = 1.0 / (double(n) * double(n));
    for (std::size_t q = 0; q < nt; ++q) {
        for (int c = 0; c < 4; ++c) {
            std::vector<Complex> rows(n);
            for (int i = 0; i < n; ++i)
                rows[std::size_t(i)] = row_partials[(q * std::size_t(n) + std::size_t(i)) * 4 + std::size_t(c)];
            result[q](c) = scale * pairwise_sum(std::span<const Complex>(rows));
        }
    }
    return result;
}

double momentum_norm(const MomentumState& ms) {
    std::vector<double> per_point(std::size_t(ms.n) * ms.n);
    for (std::size_t i = 0; i < per_point.size(); ++i) {
        const Complex* s = ms.grid.data() + 4 * i;
        per_point[i] = std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) + std::norm(s[3]);
    }
    return pairwise_sum(std::span<const double>(per_point)) / (double(ms.n) * double(ms.n));
}

SpectralAuditReport run_spectral_audit(const BiasParams& params, int grid_n, int t_oracle) {
    validate(params);
    SpectralAuditReport report;
    report.p = params.p;
    report.r = params.r;
    report.grid_n = grid_n;

    const CoinMatrix coin = build_coin(params, CoinMode::Corrected);
    for (int i = 0; i < grid_n; ++i) {
        for (int j = 0; j < grid_n; ++j) {
            const MomentumPoint k{grid_k(i, grid_n), grid_k(j, grid_n)};
            const Mat4c op = momentum_operator(params, k, coin);
            const NumericEigensystem numeric = eigendecompose_numeric(op);
            const std::array<Complex, 4> analytic = eigenvalues_analytic(k, params);
            report.eigenvalue_max_mismatch =
                std::max(report.eigenvalue_max_mismatch,
                         eigenvalue_multiset_distance(analytic, numeric.values));
            const AnalyticEigensystem asys = eigenvectors_analytic(k, params, coin);
            for (double res : asys.residuals)
                report.eigenvector_max_residual = std::max(report.eigenvector_max_residual, res);
            const Complex det = op.determinant();
            const Complex det_expected = std::polar(1.0, (params.r - 1) * (k.kx + k.ky));
            report.det_identity_max_error =
                std::max(report.det_identity_max_error, std::abs(det - det_expected));
        }
    }

    // Direct-vs-Fourier propagation oracle at t_oracle (independent of any
    // closed-form expression above).
    const CoinState4 initial = build_initial_state(InitialCoinSpec{1.0, 0.0});
    const int n = default_grid(params, t_oracle);
    const MomentumState ms = fourier_evolve(initial, params, coin, t_oracle, n);
    const AmplitudeField via_fourier = inverse_transform(ms, params);
    AmplitudeField direct = new_localized(params, initial);
    evolve(direct, coin, t_oracle);
    double worst = 0.0;
    for (int x = via_fourier.window.x_min; x <= via_fourier.window.x_max; ++x)
        for (int y = via_fourier.window.y_min; y <= via_fourier.window.y_max; ++y) {
            const Complex* a = via_fourier.site(x, y);
            const Complex* b = direct.site(x, y);
            for (int c = 0; c < 4; ++c) {
                const Complex bv = b ? b[c] : Complex(0.0, 0.0);
                worst = std::max(worst, std::abs(a[c] - bv));
            }
        }
    report.fourier_oracle_max_error = worst;
    return report;
}

}  // namespace qwalk
