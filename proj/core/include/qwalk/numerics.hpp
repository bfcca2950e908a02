#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qwalk {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Fixed-order pairwise (cascade) summation. Deterministic for a given
/// input order regardless of how the inputs were produced.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    if (xs.size() <= 8) {
        T acc{};
        for (const T& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

/// Streaming fixed-order pairwise summation (binary-counter cascade).
/// Produces the same tree as pairwise_sum for power-of-two counts and a
/// fixed fold order otherwise; O(log n) memory.
template <typename T>
class PairwiseAccumulator {
  public:
    void push(T x) {
        std::size_t c = ++count_;
        while ((c & 1u) == 0u) {
            x += stack_.back();
            stack_.pop_back();
            c >>= 1u;
        }
        stack_.push_back(x);
    }
    T total() const {
        T s{};
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) s += *it;
        return s;
    }

  private:
    std::vector<T> stack_;
    std::size_t count_ = 0;
};

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

/// Distance between two angles on the circle of circumference 2*pi.
inline double circle_distance(double a, double b) {
    return std::abs(wrap_angle(a - b));
}

/// Distance on the momentum torus [-pi, pi)^2.
inline double torus_distance(double ax, double ay, double bx, double by) {
    const double dx = circle_distance(ax, bx);
    const double dy = circle_distance(ay, by);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace qwalk
