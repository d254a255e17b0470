#include "magnet/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magnet/errors.hpp"

namespace magnet {

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::kScalar ? "scalar" : "vector";
}

ModelKind parse_model_kind(std::string_view text) {
    if (text == "scalar") return ModelKind::kScalar;
    if (text == "vector") return ModelKind::kVector;
    throw InvalidConfig("unknown model kind '" + std::string(text) + "'");
}

SensorArray::SensorArray(std::vector<Vec3> positions, ModelKind kind, double noise_std)
    : positions_(std::move(positions)), kind_(kind), noise_std_(noise_std) {
    if (positions_.empty()) throw InvalidGeometry("sensor array is empty");
    if (!(noise_std_ > 0.0) || !std::isfinite(noise_std_)) {
        throw InvalidConfig("noise std must be positive and finite");
    }
    for (const Vec3& p : positions_) {
        if (!p.allFinite()) throw InvalidGeometry("sensor position is not finite");
    }
    // Sorted copy keeps the duplicate check O(n log n) for large grids.
    std::vector<Vec3> sorted = positions_;
    const auto less = [](const Vec3& a, const Vec3& b) {
        return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
    };
    std::sort(sorted.begin(), sorted.end(), less);
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) throw InvalidGeometry("duplicate sensor position");
    }
}

std::size_t SensorArray::measurement_dim() const {
    return kind_ == ModelKind::kScalar ? positions_.size() : 3 * positions_.size();
}

SensorArray SensorArray::with_kind(ModelKind kind) const {
    return SensorArray(positions_, kind, noise_std_);
}

SensorArray SensorArray::with_noise(double noise_std) const {
    return SensorArray(positions_, kind_, noise_std);
}

SensorArray grid_array(Extent x, Extent y, double spacing, double depth, ModelKind kind,
                       double noise_std) {
    if (!(spacing > 0.0)) throw InvalidGeometry("grid spacing must be positive");
    if (!(x.max >= x.min) || !(y.max >= y.min)) throw InvalidGeometry("grid extents are empty");
    // Small slack so spans that are exact multiples survive rounding.
    const auto count = [spacing](Extent e) {
        return static_cast<long>(std::floor((e.max - e.min) / spacing + 1e-9)) + 1;
    };
    const long nx = count(x);
    const long ny = count(y);
    std::vector<Vec3> positions;
    positions.reserve(static_cast<std::size_t>(nx * ny));
    for (long j = 0; j < ny; ++j) {
        for (long i = 0; i < nx; ++i) {
            positions.emplace_back(x.min + static_cast<double>(i) * spacing,
                                   y.min + static_cast<double>(j) * spacing, depth);
        }
    }
    return SensorArray(std::move(positions), kind, noise_std);
}

Eigen::VectorXd predict_measurement(const SensorArray& array, const Vec3& target_pos,
                                    const MagneticMoment& moment) {
    const auto& pos = array.positions();
    Eigen::VectorXd out(static_cast<Eigen::Index>(array.measurement_dim()));
    if (array.kind() == ModelKind::kScalar) {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            out(static_cast<Eigen::Index>(i)) = dipole::field_norm(pos[i] - target_pos, moment);
        }
    } else {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            out.segment<3>(static_cast<Eigen::Index>(3 * i)) =
                dipole::field(pos[i] - target_pos, moment);
        }
    }
    return out;
}

MeasurementBatch synthesize_measurement(const SensorArray& array, const Vec3& target_pos,
                                        const MagneticMoment& moment, RandomStream& rng,
                                        int time_index) {
    MeasurementBatch batch{time_index, predict_measurement(array, target_pos, moment)};
    const double sigma = array.noise_std();
    for (Eigen::Index i = 0; i < batch.values.size(); ++i) {
        batch.values(i) += sigma * rng.normal();
    }
    return batch;
}

}  // namespace magnet
