#pragma once

#include <Eigen/Dense>
#include <string>

#include "qwalk/numerics.hpp"

namespace qwalk {

using Mat4 = Eigen::Matrix4d;
using Mat4c = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;

/// The walk's two bias knobs: coin parameter p in (0,1) and the length r
/// of the rightward/upward jump (leftward/downward jumps have length 1).
struct BiasParams {
    double p = 0.5;
    int r = 1;
};

/// Throws std::invalid_argument unless 0 < p < 1 and r >= 1.
void validate(const BiasParams& params);

enum class CoinMode { Corrected, AsPrinted };

/// 4x4 coin operator, basis order (R, L, U, D). Corrected mode is the
/// unitary member of the family (entry (4,4) = +p); AsPrinted keeps the
/// literal -p and is retained for diagnostics only.
struct CoinMatrix {
    Mat4 entries = Mat4::Identity();
    CoinMode mode = CoinMode::Corrected;
};

/// Row-split of the coin: each projector is one row of C embedded at its
/// row position, zeros elsewhere, so right + left + up + down == C exactly.
struct CoinProjectors {
    Mat4 right, left, up, down;
};

enum class InitialVariant { AsPrinted, TensorProduct };

/// Parameterized family of initial coin states,
///   (a, sqrt(a-a^2) e^{i phi}, sqrt(a-a^2) e^{i phi}, (1-a) e^{i phi})
/// with the TensorProduct variant using e^{i 2 phi} on the fourth entry.
struct InitialCoinSpec {
    double a = 1.0;
    double phi = 0.0;
    InitialVariant variant = InitialVariant::AsPrinted;
};

/// Complex amplitude 4-vector over the chirality basis (R, L, U, D).
struct CoinState4 {
    Vec4c amps = Vec4c::Zero();
};

CoinMatrix build_coin(const BiasParams& params, CoinMode mode = CoinMode::Corrected);
CoinProjectors split_projectors(const CoinMatrix& coin);
CoinState4 build_initial_state(const InitialCoinSpec& spec);

/// Max-norm unitarity defect ||C C^dagger - I||_max.
double unitarity_certificate(const Mat4& entries);
inline double unitarity_certificate(const CoinMatrix& coin) {
    return unitarity_certificate(coin.entries);
}

/// 4x4 CSV block (row-major, 17 significant digits) for debugging.
std::string coin_csv(const CoinMatrix& coin);

}  // namespace qwalk
