#include "magnet/dipole.hpp"

#include <cmath>

#include "magnet/errors.hpp"

namespace magnet::dipole {
namespace {

double checked_r2(const Vec3& d) {
    const double r2 = d.squaredNorm();
    if (!(r2 > 0.0)) throw DegenerateGeometry("sensor coincides with dipole");
    return r2;
}

}  // namespace

Vec3 field(const Vec3& d, const MagneticMoment& m) {
    const double r2 = checked_r2(d);
    const double r = std::sqrt(r2);
    const double inv_r5 = 1.0 / (r2 * r2 * r);
    const double dm = d.dot(m.value);
    return (kMu0Over4Pi * inv_r5) * (3.0 * dm * d - r2 * m.value);
}

Eigen::Matrix3d jacobian(const Vec3& d, const MagneticMoment& m) {
    const double r2 = checked_r2(d);
    const double r = std::sqrt(r2);
    const double inv_r7 = 1.0 / (r2 * r2 * r2 * r);
    const Vec3& mv = m.value;
    const double dm = d.dot(mv);
    Eigen::Matrix3d j = (r2 * dm) * Eigen::Matrix3d::Identity();
    j.noalias() += r2 * (d * mv.transpose() + mv * d.transpose());
    j.noalias() -= (5.0 * dm) * (d * d.transpose());
    return (3.0 * kMu0Over4Pi * inv_r7) * j;
}

double field_norm(const Vec3& d, const MagneticMoment& m) { return field(d, m).norm(); }

Eigen::RowVector3d norm_gradient(const Vec3& d, const MagneticMoment& m) {
    const Vec3 b = field(d, m);
    const double n = b.norm();
    if (n == 0.0) throw ZeroField("field magnitude is zero; norm gradient undefined");
    return (b.transpose() * jacobian(d, m)) / n;
}

}  // namespace magnet::dipole
