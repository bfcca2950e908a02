#include "qwalk/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qwalk {

namespace {

// Probabilities below this are flushed to zero to avoid subnormal slowdown.
constexpr double kProbFloor = 1e-300;

inline Complex flush(Complex z) {
    return std::norm(z) < kProbFloor ? Complex(0.0, 0.0) : z;
}

}  // namespace

AmplitudeField new_localized(const BiasParams& params, const CoinState4& coin_state) {
    validate(params);
    const double norm = coin_state.amps.norm();
    if (std::abs(norm - 1.0) > 1e-9)
        throw std::invalid_argument("initial coin state must be normalized, |norm-1| = " +
                                    std::to_string(std::abs(norm - 1.0)));
    AmplitudeField field;
    field.params = params;
    field.window = Window{0, 0, 0, 0};
    field.t = 0;
    field.amps.assign(4, Complex(0.0, 0.0));
    for (int c = 0; c < 4; ++c) field.amps[c] = coin_state.amps(c);
    return field;
}

void step(AmplitudeField& field, const CoinMatrix& coin, bool force_nonunitary) {
    if (coin.mode == CoinMode::AsPrinted && !force_nonunitary)
        throw std::invalid_argument(
            "AsPrinted coin is not unitary; pass force_nonunitary to evolve with it");

    const int r = field.params.r;
    const Window src = field.window;
    const Window dst{src.x_min - 1, src.x_max + r, src.y_min - 1, src.y_max + r};

    double row[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) row[i][j] = coin.entries(i, j);

    std::vector<Complex> out(4 * dst.sites(), Complex(0.0, 0.0));
    const Complex* in = field.amps.data();
    const int sny = src.ny();

    // Pure gather: each output site reads only time t-1 data, so the loop is
    // safe to run concurrently over x with deterministic output placement.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int x = dst.x_min; x <= dst.x_max; ++x) {
        Complex* o = out.data() + 4 * dst.site_index(x, dst.y_min);
        const bool has_r = (x - r) >= src.x_min && (x - r) <= src.x_max;
        const bool has_l = (x + 1) >= src.x_min && (x + 1) <= src.x_max;
        const bool has_c = x >= src.x_min && x <= src.x_max;
        const Complex* colR = has_r ? in + 4 * src.site_index(x - r, src.y_min) : nullptr;
        const Complex* colL = has_l ? in + 4 * src.site_index(x + 1, src.y_min) : nullptr;
        const Complex* colC = has_c ? in + 4 * src.site_index(x, src.y_min) : nullptr;
        for (int y = dst.y_min; y <= dst.y_max; ++y, o += 4) {
            const int iy = y - src.y_min;
            if (colR && y >= src.y_min && y <= src.y_max) {
                const Complex* s = colR + 4 * iy;
                o[0] = flush(row[0][0] * s[0] + row[0][1] * s[1] + row[0][2] * s[2] +
                             row[0][3] * s[3]);
            }
            if (colL && y >= src.y_min && y <= src.y_max) {
                const Complex* s = colL + 4 * iy;
                o[1] = flush(row[1][0] * s[0] + row[1][1] * s[1] + row[1][2] * s[2] +
                             row[1][3] * s[3]);
            }
            if (colC) {
                if (y - r >= src.y_min && y - r <= src.y_max) {
                    const Complex* s = colC + 4 * (iy - r);
                    o[2] = flush(row[2][0] * s[0] + row[2][1] * s[1] + row[2][2] * s[2] +
                                 row[2][3] * s[3]);
                }
                if (y + 1 >= src.y_min && y + 1 <= src.y_max) {
                    const Complex* s = colC + 4 * (iy + 1);
                    o[3] = flush(row[3][0] * s[0] + row[3][1] * s[1] + row[3][2] * s[2] +
                                 row[3][3] * s[3]);
                }
            }
        }
    }

    field.window = dst;
    field.amps = std::move(out);
    field.t += 1;
}

void evolve(AmplitudeField& field, const CoinMatrix& coin, int steps, bool force_nonunitary) {
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    for (int s = 0; s < steps; ++s) step(field, coin, force_nonunitary);
}

double probability_at(const AmplitudeField& field, int x, int y) {
    const Complex* s = field.site(x, y);
    if (!s) return 0.0;
    return std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) + std::norm(s[3]);
}

double total_probability(const AmplitudeField& field) {
    std::vector<double> per_site(field.window.sites());
    const Complex* a = field.amps.data();
    for (std::size_t i = 0; i < per_site.size(); ++i) {
        const Complex* s = a + 4 * i;
        per_site[i] = std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) + std::norm(s[3]);
    }
    return pairwise_sum(std::span<const double>(per_site));
}

std::pair<double, double> mean_position(const AmplitudeField& field) {
    const Window& w = field.window;
    std::vector<double> mx(w.sites()), my(w.sites());
    const Complex* a = field.amps.data();
    for (int x = w.x_min; x <= w.x_max; ++x) {
        for (int y = w.y_min; y <= w.y_max; ++y) {
            const std::size_t i = w.site_index(x, y);
            const Complex* s = a + 4 * i;
            const double p =
                std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) + std::norm(s[3]);
            mx[i] = x * p;
            my[i] = y * p;
        }
    }
    return {pairwise_sum(std::span<const double>(mx)),
            pairwise_sum(std::span<const double>(my))};
}

ProbabilityField to_probability(const AmplitudeField& field) {
    ProbabilityField prob;
    prob.window = field.window;
    prob.t = field.t;
    prob.values.resize(field.window.sites());
    const Complex* a = field.amps.data();
    for (std::size_t i = 0; i < prob.values.size(); ++i) {
        const Complex* s = a + 4 * i;
        prob.values[i] = std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) + std::norm(s[3]);
    }
    return prob;
}

std::vector<Peak> peak_positions(const ProbabilityField& prob, double threshold_fraction) {
    if (!(threshold_fraction > 0.0 && threshold_fraction <= 1.0))
        throw std::invalid_argument("threshold_fraction must be in (0,1]");
    const Window& w = prob.window;
    double pmax = 0.0;
    for (double v : prob.values) pmax = std::max(pmax, v);
    if (pmax <= 0.0) return {};
    const double cut = threshold_fraction * pmax;

    // Local maxima over the 8-neighborhood; out-of-window neighbors count as 0.
    std::vector<std::pair<int, int>> maxima;
    for (int x = w.x_min; x <= w.x_max; ++x) {
        for (int y = w.y_min; y <= w.y_max; ++y) {
            const double v = prob.at(x, y);
            if (v <= 0.0 || v < cut) continue;
            bool is_max = true;
            for (int dx = -1; dx <= 1 && is_max; ++dx)
                for (int dy = -1; dy <= 1; ++dy) {
                    if (dx == 0 && dy == 0) continue;
                    if (prob.at(x + dx, y + dy) > v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) maxima.emplace_back(x, y);
        }
    }
    if (maxima.empty()) return {};
    std::sort(maxima.begin(), maxima.end());

    // Cluster adjacent maxima (8-connectivity); keep the cluster max,
    // with lexicographic tie-break. Union-find over the sorted list.
    std::vector<int> parent(maxima.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = int(i);
    auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < maxima.size(); ++i)
        for (std::size_t j = i + 1; j < maxima.size(); ++j) {
            if (maxima[j].first > maxima[i].first + 1) break;
            if (std::abs(maxima[j].second - maxima[i].second) <= 1)
                parent[find(int(j))] = find(int(i));
        }

    std::vector<int> rep(maxima.size(), -1);
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        const int root = find(int(i));
        const auto [x, y] = maxima[i];
        if (rep[root] < 0) {
            rep[root] = int(i);
            continue;
        }
        const auto [bx, by] = maxima[rep[root]];
        const double v = prob.at(x, y), bv = prob.at(bx, by);
        // strictly larger wins; lexicographic order of the sorted list
        // already prefers the smallest (x, y) among ties
        if (v > bv) rep[root] = int(i);
    }

    std::vector<Peak> peaks;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        if (find(int(i)) != int(i)) continue;  // not a cluster root
        const auto [x, y] = maxima[std::size_t(rep[i])];
        peaks.push_back(Peak{x, y, prob.at(x, y)});
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak& a, const Peak& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    return peaks;
}

std::string probability_csv(const ProbabilityField& prob, double export_floor) {
    std::string out = "x,y,p\n";
    char buf[64];
    const Window& w = prob.window;
    for (int x = w.x_min; x <= w.x_max; ++x)
        for (int y = w.y_min; y <= w.y_max; ++y) {
            const double v = prob.at(x, y);
            if (v > export_floor) {
                std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", x, y, v);
                out += buf;
            }
        }
    return out;
}

}  // namespace qwalk
