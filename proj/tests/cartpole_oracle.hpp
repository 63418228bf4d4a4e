#pragma once

#include <array>
#include <cmath>

namespace muzero::oracle {

/// Cart-pole written from the coupled equations of motion
///   (M + m) xdd + m l cos(t) tdd = F + m l td^2 sin(t)
///   cos(t) xdd + (4/3) l tdd     = g sin(t)
/// solved as a 2x2 linear system by Cramer's rule, followed by one explicit
/// Euler step in which positions advance with the old velocities.
inline std::array<double, 4> cartpole_step(const std::array<double, 4>& s, int action) {
    const double g = 9.8, M = 1.0, m = 0.1, l = 0.5, dt = 0.02;
    const double F = action == 1 ? 10.0 : -10.0;
    const double c = std::cos(s[2]), sn = std::sin(s[2]);

    const double a11 = M + m, a12 = m * l * c;
    const double a21 = c, a22 = 4.0 / 3.0 * l;
    const double b1 = F + m * l * s[3] * s[3] * sn;
    const double b2 = g * sn;
    const double det = a11 * a22 - a12 * a21;
    const double xdd = (b1 * a22 - a12 * b2) / det;
    const double tdd = (a11 * b2 - a21 * b1) / det;

    return {s[0] + dt * s[1], s[1] + dt * xdd, s[2] + dt * s[3], s[3] + dt * tdd};
}

inline bool cartpole_done(const std::array<double, 4>& s) {
    return std::abs(s[0]) > 2.4 || std::abs(s[2]) > 12.0 * M_PI / 180.0;
}

}  // namespace muzero::oracle
