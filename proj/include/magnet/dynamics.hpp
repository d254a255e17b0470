#pragma once

// Target kinematics: the nearly-constant-acceleration (white jerk) motion
// model used by the filter, and the ground-truth trajectory generators.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "magnet/dipole.hpp"

namespace magnet {

inline constexpr int kStateDim = 9;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;

/// [position | velocity | acceleration], SI units.
struct TargetState {
    StateVector x = StateVector::Zero();

    TargetState() = default;
    explicit TargetState(const StateVector& v) : x(v) {}
    TargetState(const Vec3& pos, const Vec3& vel, const Vec3& acc);

    Vec3 position() const { return x.segment<3>(0); }
    Vec3 velocity() const { return x.segment<3>(3); }
    Vec3 acceleration() const { return x.segment<3>(6); }
};

struct ProcessModel {
    double dt = 1.0;         ///< s
    double jerk_psd = 0.01;  ///< (m/s^3)^2 * s, x and y axes
    /// z-axis jerk intensity; unset means "same as jerk_psd".
    std::optional<double> vertical_jerk_psd;

    double vertical_psd() const { return vertical_jerk_psd.value_or(jerk_psd); }
};

struct Trajectory {
    double dt = 1.0;
    std::vector<TargetState> states;

    std::size_t size() const { return states.size(); }
};

/// Deterministic part of the motion model (constant-acceleration step).
TargetState transition(const TargetState& s, const ProcessModel& model);

/// Discretized white-jerk covariance, one 3x3 block per axis, on the
/// [pos | vel | acc] ordering.
StateMatrix process_noise_cov(const ProcessModel& model);

/// Uniform circular motion in the plane z = center.z, counter-clockwise,
/// starting at center + radius*(cos b, sin b, 0). Throws InvalidGeometry.
Trajectory circular_trajectory(const Vec3& center, double radius, double speed, double dt,
                               double duration, double initial_bearing = 0.0);

Trajectory line_trajectory(const Vec3& start, const Vec3& velocity, double dt, double duration);

inline Vec3 extract_position(const TargetState& s) { return s.position(); }

}  // namespace magnet
