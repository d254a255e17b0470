#include "magnet/dynamics.hpp"

#include <cmath>

#include "magnet/errors.hpp"

namespace magnet {
namespace {

std::size_t step_count(double dt, double duration) {
    if (!(dt > 0.0)) throw InvalidConfig("time step must be positive");
    if (!(duration >= 0.0)) throw InvalidConfig("duration must be non-negative");
    return static_cast<std::size_t>(std::llround(duration / dt)) + 1;
}

}  // namespace

TargetState::TargetState(const Vec3& pos, const Vec3& vel, const Vec3& acc) {
    x << pos, vel, acc;
}

TargetState transition(const TargetState& s, const ProcessModel& model) {
    const double dt = model.dt;
    const Vec3 p = s.position();
    const Vec3 v = s.velocity();
    const Vec3 a = s.acceleration();
    return TargetState(p + v * dt + 0.5 * dt * dt * a, v + a * dt, a);
}

StateMatrix process_noise_cov(const ProcessModel& model) {
    const double dt = model.dt;
    const double dt2 = dt * dt;
    const double dt3 = dt2 * dt;
    const double dt4 = dt3 * dt;
    const double dt5 = dt4 * dt;
    Eigen::Matrix3d block;
    block << dt5 / 20.0, dt4 / 8.0, dt3 / 6.0,
             dt4 / 8.0,  dt3 / 3.0, dt2 / 2.0,
             dt3 / 6.0,  dt2 / 2.0, dt;
    const Vec3 axis_psd(model.jerk_psd, model.jerk_psd, model.vertical_psd());

    // Entry (3i + a, 3j + a) couples derivative orders i and j on axis a.
    StateMatrix out = StateMatrix::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.block<3, 3>(3 * i, 3 * j) = (block(i, j) * axis_psd).asDiagonal();
        }
    }
    return out;
}

Trajectory circular_trajectory(const Vec3& center, double radius, double speed, double dt,
                               double duration, double initial_bearing) {
    if (!(radius > 0.0)) throw InvalidGeometry("circle radius must be positive");
    if (!(speed > 0.0)) throw InvalidGeometry("circle speed must be positive");
    const std::size_t n = step_count(dt, duration);
    const double omega = speed / radius;
    const double centripetal = speed * speed / radius;

    Trajectory traj;
    traj.dt = dt;
    traj.states.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = initial_bearing + omega * (static_cast<double>(k) * dt);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        traj.states.emplace_back(center + Vec3(radius * c, radius * s, 0.0),
                                 Vec3(-speed * s, speed * c, 0.0),
                                 Vec3(-centripetal * c, -centripetal * s, 0.0));
    }
    return traj;
}

Trajectory line_trajectory(const Vec3& start, const Vec3& velocity, double dt, double duration) {
    const std::size_t n = step_count(dt, duration);
    Trajectory traj;
    traj.dt = dt;
    traj.states.reserve(n);
    // Accumulated so that transition() maps each state onto the next exactly.
    Vec3 pos = start;
    for (std::size_t k = 0; k < n; ++k) {
        traj.states.emplace_back(pos, velocity, Vec3::Zero());
        pos = pos + velocity * dt;
    }
    return traj;
}

}  // namespace magnet
