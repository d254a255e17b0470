#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "magnet/dipole.hpp"
#include "magnet/random.hpp"

namespace magnet {

enum class ModelKind { kScalar, kVector };

std::string_view to_string(ModelKind kind);
/// Parses "scalar" / "vector"; throws InvalidConfig otherwise.
ModelKind parse_model_kind(std::string_view text);

/// Fixed sensor positions plus the measurement model they share.
class SensorArray {
public:
    /// Throws InvalidGeometry on an empty or duplicated position list and
    /// InvalidConfig on a non-positive noise std.
    SensorArray(std::vector<Vec3> positions, ModelKind kind, double noise_std);

    const std::vector<Vec3>& positions() const { return positions_; }
    ModelKind kind() const { return kind_; }
    double noise_std() const { return noise_std_; }
    std::size_t size() const { return positions_.size(); }

    /// n for scalar arrays, 3n for vector arrays.
    std::size_t measurement_dim() const;

    SensorArray with_kind(ModelKind kind) const;
    SensorArray with_noise(double noise_std) const;

private:
    std::vector<Vec3> positions_;
    ModelKind kind_;
    double noise_std_;
};

struct MeasurementBatch {
    int time_index = 0;
    Eigen::VectorXd values;  ///< tesla
};

struct Extent {
    double min = 0.0;
    double max = 0.0;

    bool operator==(const Extent&) const = default;
};

/// Sensors at (x.min + i*spacing, y.min + j*spacing, depth), x index fastest.
SensorArray grid_array(Extent x, Extent y, double spacing, double depth, ModelKind kind,
                       double noise_std);

/// Noise-free stacked measurement (|B| per sensor, or B per sensor).
Eigen::VectorXd predict_measurement(const SensorArray& array, const Vec3& target_pos,
                                    const MagneticMoment& moment);

/// predict_measurement plus i.i.d. N(0, noise_std^2) per component.
MeasurementBatch synthesize_measurement(const SensorArray& array, const Vec3& target_pos,
                                        const MagneticMoment& moment, RandomStream& rng,
                                        int time_index = 0);

}  // namespace magnet
