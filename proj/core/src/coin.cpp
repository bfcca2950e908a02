#include "qwalk/coin.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qwalk {

void validate(const BiasParams& params) {
    if (!(params.p > 0.0 && params.p < 1.0))
        throw std::invalid_argument("p must be in (0,1), got " + std::to_string(params.p));
    if (params.r < 1)
        throw std::invalid_argument("r must be a positive integer, got " + std::to_string(params.r));
}

CoinMatrix build_coin(const BiasParams& params, CoinMode mode) {
    validate(params);
    const double p = params.p;
    // sqrt(p - p^2) as sqrt(p)*sqrt(1-p) to avoid cancellation near the ends
    const double q = std::sqrt(p) * std::sqrt(1.0 - p);
    const double d44 = (mode == CoinMode::Corrected) ? p : -p;
    CoinMatrix coin;
    coin.mode = mode;
    coin.entries << p,       q,       q,       1.0 - p,
                    q,      -p,       1.0 - p, -q,
                    q,       1.0 - p, -p,      -q,
                    1.0 - p, -q,      -q,      d44;
    return coin;
}

CoinProjectors split_projectors(const CoinMatrix& coin) {
    CoinProjectors proj;
    proj.right = Mat4::Zero();
    proj.left = Mat4::Zero();
    proj.up = Mat4::Zero();
    proj.down = Mat4::Zero();
    proj.right.row(0) = coin.entries.row(0);
    proj.left.row(1) = coin.entries.row(1);
    proj.up.row(2) = coin.entries.row(2);
    proj.down.row(3) = coin.entries.row(3);
    return proj;
}

CoinState4 build_initial_state(const InitialCoinSpec& spec) {
    if (!(spec.a >= 0.0 && spec.a <= 1.0))
        throw std::invalid_argument("a must be in [0,1], got " + std::to_string(spec.a));
    const double a = spec.a;
    const double mid = std::sqrt(a) * std::sqrt(1.0 - a);
    const Complex eiphi = std::polar(1.0, spec.phi);
    const Complex last_phase =
        (spec.variant == InitialVariant::TensorProduct) ? std::polar(1.0, 2.0 * spec.phi) : eiphi;
    CoinState4 state;
    state.amps << Complex(a, 0.0), mid * eiphi, mid * eiphi, (1.0 - a) * last_phase;
    return state;
}

double unitarity_certificate(const Mat4& entries) {
    const Mat4 defect = entries * entries.transpose() - Mat4::Identity();
    return defect.cwiseAbs().maxCoeff();
}

std::string coin_csv(const CoinMatrix& coin) {
    std::string out;
    char buf[64];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", coin.entries(i, j));
            out += buf;
            out += (j == 3) ? '\n' : ',';
        }
    }
    return out;
}

}  // namespace qwalk
