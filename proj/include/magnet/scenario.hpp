#pragma once

// Full description of an experiment, as loaded from a scenario file.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magnet/dipole.hpp"
#include "magnet/dynamics.hpp"
#include "magnet/sensing.hpp"
#include "magnet/ukf.hpp"

namespace magnet {

struct ArraySpec {
    enum class Layout { kGrid, kExplicit };

    Layout layout = Layout::kGrid;
    Extent x;
    Extent y;
    double spacing = 0.0;
    double depth = 0.0;
    std::vector<Vec3> positions;  ///< explicit layout only
    ModelKind kind = ModelKind::kVector;

    bool operator==(const ArraySpec&) const = default;
};

struct TrajectorySpec {
    enum class Kind { kCircular, kLine };

    Kind kind = Kind::kCircular;
    Vec3 center = Vec3::Zero();  ///< circular
    double radius = 0.0;
    double speed = 0.0;
    double initial_bearing = 0.0;
    Vec3 start = Vec3::Zero();  ///< line
    Vec3 velocity = Vec3::Zero();
    double dt = 1.0;
    double duration = 0.0;

    bool operator==(const TrajectorySpec&) const = default;
};

struct FilterSpec {
    double kappa = 1.0;
    double jerk_psd = 0.01;
    /// Unset vertical values mean "same as the horizontal setting".
    std::optional<double> vertical_jerk_psd;
    /// Initial estimate = truth + N(0, std^2) on position and velocity; the
    /// acceleration starts exact. The same stds form the initial covariance.
    double init_position_std = 25.0;
    std::optional<double> init_vertical_std;
    double init_velocity_std = 1.0;
    std::optional<double> init_vertical_velocity_std;
    double init_acceleration_std = 0.1;

    double vertical_std() const {
        return init_vertical_std.value_or(init_position_std);
    }
    double vertical_velocity_std() const {
        return init_vertical_velocity_std.value_or(init_velocity_std);
    }

    bool operator==(const FilterSpec&) const = default;
};

struct MapSpec {
    Extent x;
    Extent y;
    int nx = 2;
    int ny = 2;
    double target_z = 0.0;
    std::vector<ModelKind> kinds;

    bool operator==(const MapSpec&) const = default;
};

struct ResilienceSpec {
    std::vector<int> failed_counts;
    std::vector<double> noise_levels;  ///< tesla
    std::vector<ModelKind> kinds;

    bool operator==(const ResilienceSpec&) const = default;
};

struct ExperimentSpec {
    int runs = 100;
    std::uint64_t master_seed = 0;
    double failure_threshold_m = 200.0;
    std::optional<MapSpec> map;
    std::optional<ResilienceSpec> resilience;

    bool operator==(const ExperimentSpec&) const = default;
};

struct ScenarioConfig {
    std::string name;
    ArraySpec array;
    double noise_std = 0.0;  ///< tesla
    MagneticMoment moment;
    std::optional<TrajectorySpec> trajectory;
    FilterSpec filter;
    ExperimentSpec experiment;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Throws InvalidConfig naming the offending field.
void validate(const ScenarioConfig& cfg);

SensorArray build_array(const ScenarioConfig& cfg);
/// Throws InvalidConfig when the scenario has no trajectory.
Trajectory build_trajectory(const ScenarioConfig& cfg);
ProcessModel build_process_model(const ScenarioConfig& cfg);
UkfConfig build_ukf_config(const ScenarioConfig& cfg);

/// JSON text <-> config. Parsing validates and throws InvalidConfig.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& cfg);

}  // namespace magnet
