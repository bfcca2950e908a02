#pragma once

#include <array>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/evolution.hpp"

namespace qwalk {

struct MomentumPoint {
    double kx = 0.0, ky = 0.0;
};

/// One-step operator in the Fourier domain,
///   diag(e^{i r kx}, e^{-i kx}, e^{i r ky}, e^{-i ky}) * C.
/// The fourth diagonal entry follows the displacement operator (D moves y-1).
Mat4c momentum_operator(const BiasParams& params, const MomentumPoint& k,
                        const CoinMatrix& coin);

/// Dispersion phase branches of the one-dimensional factor walk:
///   branch 1:  ((r-1)/2) u + arcsin(sqrt(p) sin(((r+1)/2) u))
///   branch 2:  ((r-1)/2) u - pi - arcsin(sqrt(p) sin(((r+1)/2) u))
double phase_w(double u, const BiasParams& params, int branch);

struct PhasePair {
    double u, w1, w2;  // w1(u) + w2(u) == (r-1) u - pi
};
PhasePair phase_pair(double u, const BiasParams& params);

/// The four closed-form eigenvalue expressions
/// e^{i [w_a((kx+ky)/2) + w_b((kx-ky)/2)]} in their published order:
/// (a,b) = (1,1), (1,2), (2,1), (2,2), where branch b acts on (kx-ky)/2.
std::array<Complex, 4> eigenvalues_analytic(const MomentumPoint& k, const BiasParams& params);

struct NormalizationFactors {
    double n1_plus, n1_minus, n2_plus, n2_minus;
};
NormalizationFactors normalization_factors(const MomentumPoint& k, const BiasParams& params);

/// Literal (pre-normalization) closed-form eigenvector for surface j (1..4).
Vec4c eigenvector_analytic_raw(const MomentumPoint& k, const BiasParams& params, int j);

/// Closed-form eigenvectors, renormalized to unit norm, with residuals
/// ||U v - lambda v|| against momentum_operator and the matching analytic
/// eigenvalue. Large residuals are data (the audit's purpose), not errors.
struct AnalyticEigensystem {
    std::array<Complex, 4> values;
    std::array<Vec4c, 4> vectors;
    std::array<double, 4> residuals;
    double gram_max_offdiag;  // orthogonality of the analytic frame itself
};
AnalyticEigensystem eigenvectors_analytic(const MomentumPoint& k, const BiasParams& params,
                                          const CoinMatrix& coin);

/// Brute-force oracle: Schur-based eigendecomposition of a unitary 4x4.
/// Eigenvectors (columns) are orthonormal also for degenerate eigenvalues.
/// Throws if the input deviates from unitarity by more than 1e-10.
struct NumericEigensystem {
    std::array<Complex, 4> values;
    Mat4c vectors;
    std::array<double, 4> residuals;
};
NumericEigensystem eigendecompose_numeric(const Mat4c& op);

/// Minimum over pairings of the max eigenvalue distance (4x4 bipartite
/// matching by brute force over the 24 permutations).
double eigenvalue_multiset_distance(const std::array<Complex, 4>& a,
                                    const std::array<Complex, 4>& b);

/// Momentum-space state on the uniform grid k_m = -pi + 2 pi m / N.
struct MomentumState {
    int n = 0;
    int t = 0;
    std::vector<Complex> grid;  // [(i*n + j)*4 + c], i ~ kx, j ~ ky

    const Complex* at(int i, int j) const { return grid.data() + 4 * (std::size_t(i) * n + j); }
};

/// Spectral propagation psi~(k,t) = sum_j lambda_j^t <v_j|psi0> v_j per grid
/// point (numeric eigendecomposition; O(1) in t). The localized start has
/// psi~(k,0) == initial coin state at every k. Requires n >= (r+1) t + 1.
MomentumState fourier_evolve(const CoinState4& initial, const BiasParams& params,
                             const CoinMatrix& coin, int t, int n);

/// Exact inverse lattice transform psi(x,y) = (1/N^2) sum_k psi~(k) e^{-i k.(x,y)}
/// onto the support window [-t, r t]^2.
AmplitudeField inverse_transform(const MomentumState& ms, const BiasParams& params);

/// psi(0,0,t) for each requested t, via the momentum grid summed only at the
/// origin. Grid size 0 selects the smallest power of two >= (r+1) max(t) + 1.
std::vector<Vec4c> amplitude_at_origin_series(const CoinState4& initial,
                                              const BiasParams& params, const CoinMatrix& coin,
                                              const std::vector<int>& t_list, int grid_n = 0);

/// Parseval check value: (1/N^2) sum_k ||psi~||^2 (pairwise summation).
double momentum_norm(const MomentumState& ms);

struct SpectralAuditReport {
    double p = 0.0;
    int r = 1;
    int grid_n = 0;
    double eigenvalue_max_mismatch = 0.0;   // analytic vs numeric, multiset
    double eigenvector_max_residual = 0.0;  // analytic vectors against U
    double det_identity_max_error = 0.0;    // det U vs e^{i(r-1)(kx+ky)}
    double fourier_oracle_max_error = 0.0;  // direct vs spectral propagation
};

/// Full audit over a grid_n x grid_n momentum grid plus a direct-vs-Fourier
/// propagation check at time t_oracle.
SpectralAuditReport run_spectral_audit(const BiasParams& params, int grid_n, int t_oracle);

}  // namespace qwalk
