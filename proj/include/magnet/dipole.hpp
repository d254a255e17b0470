#pragma once

// Point-dipole magnetostatics. The displacement argument is always the
// sensor position minus the dipole position, in meters.

#include <Eigen/Dense>

namespace magnet {

using Vec3 = Eigen::Vector3d;

/// mu0 / (4 pi) in T*m/A, with mu0 = 4 pi * 1e-7 exactly.
inline constexpr double kMu0Over4Pi = 1e-7;

/// Dipole moment in A*m^2.
struct MagneticMoment {
    Vec3 value = Vec3::Zero();

    MagneticMoment() = default;
    explicit MagneticMoment(const Vec3& am2) : value(am2) {}
    MagneticMoment(double mx, double my, double mz) : value(mx, my, mz) {}

    bool operator==(const MagneticMoment& o) const { return value == o.value; }
};

namespace dipole {

/// B = mu0/(4 pi r^5) (3 d d^T - r^2 I) M, tesla.
/// Throws DegenerateGeometry when d = 0.
Vec3 field(const Vec3& d, const MagneticMoment& m);

/// dB/dd, tesla per meter. Symmetric.
Eigen::Matrix3d jacobian(const Vec3& d, const MagneticMoment& m);

double field_norm(const Vec3& d, const MagneticMoment& m);

/// Gradient of |B| with respect to d, B^T J / |B|.
/// Throws ZeroField when |B| = 0.
Eigen::RowVector3d norm_gradient(const Vec3& d, const MagneticMoment& m);

}  // namespace dipole
}  // namespace magnet
