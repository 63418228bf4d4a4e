#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "muzero/model.hpp"
#include "muzero/replay.hpp"

namespace muzero::oracle {

/// Central finite differences of f at theta, one coordinate at a time.
inline std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                             std::vector<double> theta, double h = 1e-6) {
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double keep = theta[i];
        theta[i] = keep + h;
        const double up = f(theta);
        theta[i] = keep - h;
        const double down = f(theta);
        theta[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

/// |a - b| / max(|a|, |b|, floor). The floor keeps components whose true
/// value is near zero from turning finite-difference rounding noise into a
/// huge ratio.
inline double relative_error(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_relative_error(std::span<const double> a, std::span<const double> b,
                                 double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, relative_error(a[i], b[i], floor));
    return worst;
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
    auto v = uniform_vector(rng, n, 0.05, 1.0);
    double s = 0.0;
    for (double x : v) s += x;
    for (auto& x : v) x /= s;
    return v;
}

/// Latent bounding written out directly: elementwise tanh, or shift by the
/// minimum and divide by the (floored) range.
template <class T>
std::vector<T> scale_latent(std::vector<T> v, LatentScaling mode) {
    if (mode == LatentScaling::Tanh)
        for (auto& x : v) x = std::tanh(x);
    if (mode == LatentScaling::MinMax && !v.empty()) {
        const T lo = *std::min_element(v.begin(), v.end());
        T range = *std::max_element(v.begin(), v.end()) - lo;
        if (range < T(1e-5)) range += T(1e-5);
        for (auto& x : v) x = (x - lo) / range;
    }
    return v;
}

/// Synthetic episode with random observations, actions and targets.
inline GameHistory random_game(std::mt19937_64& rng, std::size_t length, std::size_t obs_dim,
                               std::size_t actions) {
    GameHistory g;
    std::uniform_int_distribution<std::size_t> pick(0, actions - 1);
    for (std::size_t t = 0; t <= length; ++t) g.observations.push_back(uniform_vector(rng, obs_dim, -1.0, 1.0));
    for (std::size_t t = 0; t < length; ++t) {
        g.actions.push_back(pick(rng));
        g.rewards.push_back(uniform_vector(rng, 1, -1.0, 1.0)[0]);
        g.policies.push_back(random_distribution(rng, actions));
        g.search_values.push_back(uniform_vector(rng, 1, -1.0, 1.0)[0]);
    }
    return g;
}

}  // namespace muzero::oracle
