#pragma once

#include <utility>
#include <vector>

#include "qwalk/coin.hpp"

namespace qwalk {

/// Inclusive lattice rectangle [x_min..x_max] x [y_min..y_max].
struct Window {
    int x_min = 0, x_max = 0, y_min = 0, y_max = 0;

    int nx() const { return x_max - x_min + 1; }
    int ny() const { return y_max - y_min + 1; }
    std::size_t sites() const { return std::size_t(nx()) * std::size_t(ny()); }
    bool contains(int x, int y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    std::size_t site_index(int x, int y) const {
        return std::size_t(x - x_min) * std::size_t(ny()) + std::size_t(y - y_min);
    }
};

/// Ground-truth state psi(x,y,t): a dense complex 4-vector per site inside
/// a window that grows by r on the +x/+y sides and by 1 on the -x/-y sides
/// each step. Layout: amps[site_index*4 + chirality], chirality (R,L,U,D).
struct AmplitudeField {
    Window window;
    int t = 0;
    BiasParams params;
    std::vector<Complex> amps;

    const Complex* site(int x, int y) const {
        return window.contains(x, y) ? amps.data() + 4 * window.site_index(x, y) : nullptr;
    }
};

struct ProbabilityField {
    Window window;
    int t = 0;
    std::vector<double> values;  // one per site, same indexing as AmplitudeField

    double at(int x, int y) const {
        return window.contains(x, y) ? values[window.site_index(x, y)] : 0.0;
    }
};

struct Peak {
    int x, y;
    double p;
};

/// State localized at the origin with the given coin state (t = 0).
/// Rejects coin states whose norm deviates from 1 by more than 1e-9.
AmplitudeField new_localized(const BiasParams& params, const CoinState4& coin_state);

/// One application of U = S (I (x) C), in the gather formulation
///   psi(x,y,t) = C_R psi(x-r,y) + C_L psi(x+1,y) + C_U psi(x,y-r) + C_D psi(x,y+1).
/// AsPrinted coins are rejected unless force_nonunitary is set.
void step(AmplitudeField& field, const CoinMatrix& coin, bool force_nonunitary = false);

void evolve(AmplitudeField& field, const CoinMatrix& coin, int steps,
            bool force_nonunitary = false);

double probability_at(const AmplitudeField& field, int x, int y);

/// Total probability, fixed-order pairwise summation.
double total_probability(const AmplitudeField& field);

/// (sum x P(x,y), sum y P(x,y)); pairwise sums.
std::pair<double, double> mean_position(const AmplitudeField& field);

ProbabilityField to_probability(const AmplitudeField& field);

/// 8-neighborhood local maxima with P >= threshold_fraction * max P,
/// clustered over adjacent maxima; per cluster the max-P site is kept,
/// ties broken toward the lexicographically smallest (x, y). Result is
/// sorted by (x, y).
std::vector<Peak> peak_positions(const ProbabilityField& prob, double threshold_fraction);

/// CSV export "x,y,p" for sites with P > floor, 17 significant digits,
/// rows ordered by (x, y).
std::string probability_csv(const ProbabilityField& prob, double export_floor = 1e-15);

}  // namespace qwalk
