#pragma once

// Fisher information and Cramer-Rao bounds on the target position for
// scalar and vector magnetometer networks.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "magnet/dipole.hpp"
#include "magnet/dynamics.hpp"
#include "magnet/sensing.hpp"

namespace magnet {

/// Position Fisher information, 1/m^2.
struct Fim {
    Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
    ModelKind kind = ModelKind::kScalar;
};

/// sqrt(trace(F^-1)) in meters, or empty when the FIM is rank deficient.
class CrlbValue {
public:
    static CrlbValue unobservable() { return CrlbValue(); }
    static CrlbValue meters(double v) { return CrlbValue(v); }

    bool observable() const { return value_.has_value(); }
    /// Meters; +inf when unobservable.
    double value_or_inf() const;
    double value() const { return value_.value(); }

    friend bool operator==(const CrlbValue&, const CrlbValue&) = default;

private:
    CrlbValue() = default;
    explicit CrlbValue(double v) : value_(v) {}
    std::optional<double> value_;
};

/// (1/sigma^2) g^T g with g the gradient of |B|; zero when |B| = 0.
Fim fim_scalar_single(const Vec3& d, const MagneticMoment& m, double sigma);

/// (1/sigma^2) J^T J.
Fim fim_vector_single(const Vec3& d, const MagneticMoment& m, double sigma);

/// Sum of per-sensor FIMs of the array's model kind, using its noise std.
Fim fim_total(const SensorArray& array, const Vec3& target_pos, const MagneticMoment& m);

/// No regularization is applied: rank < 3 (tolerance 1e-9) is UNOBSERVABLE.
CrlbValue crlb_sqrt_trace(const Fim& fim);

struct MapRegion {
    Extent x;
    Extent y;
    int nx = 2;  ///< nodes along x, >= 2
    int ny = 2;
    double target_z = 0.0;
};

struct CrlbMap {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<CrlbValue> values;  ///< row-major, y outer: values[iy * nx + ix]

    const CrlbValue& at(std::size_t ix, std::size_t iy) const { return values[iy * xs.size() + ix]; }
};

/// Bound at every node of a regular grid, node coordinates min + i*(max-min)/(n-1).
/// `threads` = 0 uses the hardware concurrency; results do not depend on it.
CrlbMap crlb_map(const SensorArray& array, const MapRegion& region, const MagneticMoment& m,
                 unsigned threads = 1);

std::vector<CrlbValue> crlb_along_trajectory(const SensorArray& array, const Trajectory& traj,
                                             const MagneticMoment& m);

}  // namespace magnet
