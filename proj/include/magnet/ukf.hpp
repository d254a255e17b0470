#pragma once

// Centralized unscented Kalman filter over the stacked measurements of a
// whole sensor array. The dipole moment is known to the filter; the state is
// the 9-dimensional kinematic state.

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "magnet/dynamics.hpp"
#include "magnet/random.hpp"
#include "magnet/sensing.hpp"

namespace magnet {

inline constexpr int kSigmaCount = 2 * kStateDim + 1;
using SigmaWeights = Eigen::Matrix<double, kSigmaCount, 1>;
using SigmaPoints = Eigen::Matrix<double, kStateDim, kSigmaCount>;

/// How the gain equation K*P = T is solved in the measurement update.
enum class InnovationSolve {
    /// P = sigma^2 I + Z Z^T has rank-19 structure; solve through the 19x19
    /// capacitance system. Cost is linear in the measurement dimension.
    kLowRank,
    /// Factor the full n x n (or 3n x 3n) innovation covariance.
    kDense,
};

struct UkfConfig {
    double kappa = 1.0;
    InnovationSolve solve = InnovationSolve::kLowRank;
};

struct FilterEstimate {
    StateVector mean = StateVector::Zero();
    StateMatrix covariance = StateMatrix::Identity();
};

/// a0 = kappa/(N+kappa), ai = 1/(2(N+kappa)). Throws InvalidConfig if kappa <= 0.
SigmaWeights sigma_weights(const UkfConfig& cfg);

/// Column 0 is the mean, columns 1..N add sqrt(N+kappa)*L_j, N+1..2N subtract.
SigmaPoints sigma_points(const StateVector& mean, const StateMatrix& cov, const UkfConfig& cfg);

FilterEstimate predict(const FilterEstimate& est, const ProcessModel& pm, const UkfConfig& cfg);

/// Measurement update with the stacked batch. Throws DimensionMismatch if the
/// batch length disagrees with the array and NotPositiveDefinite if the
/// innovation or posterior covariance cannot be factored.
FilterEstimate update(const FilterEstimate& predicted, const MeasurementBatch& batch,
                      const SensorArray& array, const MagneticMoment& moment,
                      const UkfConfig& cfg);

struct TrackOptions {
    double failure_threshold_m = std::numeric_limits<double>::infinity();
    bool stop_on_failure = false;
    bool keep_estimates = true;
};

struct TrackResult {
    std::vector<FilterEstimate> estimates;  ///< empty unless keep_estimates
    std::vector<double> errors;             ///< position error per processed step, m
    bool diverged = false;                  ///< numerical failure
    bool failed = false;                    ///< diverged or error above threshold
    std::optional<std::size_t> failure_step;
};

/// Runs the filter along a ground-truth trajectory, synthesizing measurements
/// from `noise`. Step 0 is an update of `initial`; later steps predict then
/// update. Divergence is reported in the result, never thrown.
TrackResult track(const Trajectory& truth, const SensorArray& array,
                  const MagneticMoment& moment, const UkfConfig& cfg, const ProcessModel& pm,
                  const FilterEstimate& initial, RandomStream& noise,
                  const TrackOptions& options = {});

}  // namespace magnet
