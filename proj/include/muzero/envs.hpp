#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "muzero/model.hpp"

namespace muzero::envs {

struct EnvSpec {
    std::size_t observation_dim;
    std::size_t action_count;
    std::size_t max_episode_steps;

    friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminal = false;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual EnvSpec spec() const = 0;
    virtual Observation reset(std::uint64_t seed) = 0;
    /// Throws StateError once the episode is over.
    virtual StepResult step(Action action) = 0;
    virtual bool terminal() const = 0;
    virtual Observation observation() const = 0;
};

/// Classic cart-pole: force +-10 N, Euler step of 0.02 s, reward 1 per step,
/// episode ends past |x| > 2.4, |angle| > 12 degrees or at the step limit.
class CartPole final : public Environment {
public:
    using State = std::array<double, 4>;  // x, x_dot, theta, theta_dot

    static constexpr double kGravity = 9.8;
    static constexpr double kCartMass = 1.0;
    static constexpr double kPoleMass = 0.1;
    static constexpr double kHalfLength = 0.5;
    static constexpr double kForce = 10.0;
    static constexpr double kDt = 0.02;
    static constexpr double kPositionLimit = 2.4;
    static constexpr double kAngleLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;

    explicit CartPole(std::size_t max_steps = 500) : max_steps_(max_steps) {}

    /// One Euler step of the equations of motion, no bookkeeping.
    static State integrate(const State& s, Action action);
    static bool out_of_bounds(const State& s);

    EnvSpec spec() const override { return {4, 2, max_steps_}; }
    Observation reset(std::uint64_t seed) override;
    StepResult step(Action action) override;
    bool terminal() const override { return terminal_; }
    Observation observation() const override { return {state_.begin(), state_.end()}; }

    void set_state(const State& s) {
        state_ = s;
        terminal_ = false;
        steps_ = 0;
    }
    const State& state() const { return state_; }

private:
    std::size_t max_steps_;
    State state_{};
    std::size_t steps_ = 0;
    bool terminal_ = false;
};

/// One-dimensional lander with sparse terminal rewards: +100 for a soft
/// touchdown (|v| <= 1), -100 for a crash, -0.1 for every step spent thrusting.
/// Observation is (altitude, vertical velocity, fuel, 0).
class LanderLite final : public Environment {
public:
    static constexpr std::size_t kObservationDim = 4;
    static constexpr double kGravity = 1.0;
    static constexpr double kThrust = 2.0;
    static constexpr double kDt = 0.1;
    static constexpr double kStartAltitude = 10.0;
    static constexpr double kStartFuel = 40.0;
    static constexpr double kVelocityJitter = 0.1;
    static constexpr double kSafeSpeed = 1.0;
    static constexpr double kLandReward = 100.0;
    static constexpr double kCrashReward = -100.0;
    static constexpr double kFuelPenalty = -0.1;

    struct State {
        double altitude = kStartAltitude;
        double velocity = 0.0;
        double fuel = kStartFuel;
    };

    explicit LanderLite(std::size_t max_steps = 1000) : max_steps_(max_steps) {}

    EnvSpec spec() const override { return {kObservationDim, 2, max_steps_}; }
    Observation reset(std::uint64_t seed) override;
    StepResult step(Action action) override;
    bool terminal() const override { return terminal_; }
    Observation observation() const override;

    void set_state(const State& s) {
        state_ = s;
        terminal_ = false;
        steps_ = 0;
    }
    const State& state() const { return state_; }

private:
    std::size_t max_steps_;
    State state_{};
    std::size_t steps_ = 0;
    bool terminal_ = false;
};

/// "cartpole" or "landerlite"; throws ConfigError otherwise.
std::unique_ptr<Environment> make_environment(const std::string& id, std::size_t max_steps = 0);

}  // namespace muzero::envs
