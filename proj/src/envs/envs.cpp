#include "muzero/envs.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "muzero/errors.hpp"

namespace muzero::envs {

CartPole::State CartPole::integrate(const State& s, Action action) {
    if (action > 1) throw std::invalid_argument("cartpole action must be 0 or 1");
    const auto [x, x_dot, theta, theta_dot] = s;
    constexpr double total_mass = kCartMass + kPoleMass;
    constexpr double pole_mass_length = kPoleMass * kHalfLength;

    const double force = action == 1 ? kForce : -kForce;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
    const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                             (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

    return {x + kDt * x_dot, x_dot + kDt * x_acc, theta + kDt * theta_dot,
            theta_dot + kDt * theta_acc};
}

bool CartPole::out_of_bounds(const State& s) {
    return std::abs(s[0]) > kPositionLimit || std::abs(s[2]) > kAngleLimit;
}

Observation CartPole::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    for (auto& v : state_) v = dist(rng);
    steps_ = 0;
    terminal_ = false;
    return observation();
}

StepResult CartPole::step(Action action) {
    if (terminal_) throw StateError("cartpole: step called on a finished episode");
    state_ = integrate(state_, action);
    ++steps_;
    terminal_ = out_of_bounds(state_) || steps_ >= max_steps_;
    return {observation(), 1.0, terminal_};
}

Observation LanderLite::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-kVelocityJitter, kVelocityJitter);
    state_ = State{};
    state_.velocity = dist(rng);
    steps_ = 0;
    terminal_ = false;
    return observation();
}

Observation LanderLite::observation() const {
    return {state_.altitude, state_.velocity, state_.fuel, 0.0};
}

StepResult LanderLite::step(Action action) {
    if (terminal_) throw StateError("landerlite: step called on a finished episode");
    if (action > 1) throw std::invalid_argument("landerlite action must be 0 or 1");

    double reward = 0.0;
    double accel = -kGravity;
    if (action == 1 && state_.fuel >= 1.0) {
        accel += kThrust;
        state_.fuel -= 1.0;
        reward += kFuelPenalty;
    }
    state_.velocity += accel * kDt;
    state_.altitude += state_.velocity * kDt;
    ++steps_;

    if (state_.altitude <= 0.0) {
        state_.altitude = 0.0;
        reward += std::abs(state_.velocity) <= kSafeSpeed ? kLandReward : kCrashReward;
        terminal_ = true;
    } else if (steps_ >= max_steps_) {
        terminal_ = true;
    }
    return {observation(), reward, terminal_};
}

std::unique_ptr<Environment> make_environment(const std::string& id, std::size_t max_steps) {
    if (id == "cartpole") return std::make_unique<CartPole>(max_steps ? max_steps : 500);
    if (id == "landerlite") return std::make_unique<LanderLite>(max_steps ? max_steps : 1000);
    throw ConfigError("unknown environment '" + id + "'");
}

}  // namespace muzero::envs
