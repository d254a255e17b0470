#include "magnet/ukf.hpp"

#include <cmath>
#include <string>

#include "magnet/errors.hpp"
#include "magnet/numerics.hpp"

namespace magnet {
namespace {

using CapacitanceMatrix = Eigen::Matrix<double, kSigmaCount, kSigmaCount>;

template <typename M>
void symmetrize(M& m) {
    m = (0.5 * (m + m.transpose())).eval();
}

// Predicted measurement for every sigma point, one column per point.
Eigen::MatrixXd measure_sigma_points(const SigmaPoints& points, const SensorArray& array,
                                     const MagneticMoment& moment) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(array.measurement_dim()), kSigmaCount);
    for (int j = 0; j < kSigmaCount; ++j) {
        out.col(j) = predict_measurement(array, points.col(j).head<3>(), moment);
    }
    return out;
}

}  // namespace

SigmaWeights sigma_weights(const UkfConfig& cfg) {
    if (!(cfg.kappa > 0.0) || !std::isfinite(cfg.kappa)) {
        throw InvalidConfig("kappa must be positive");
    }
    const double n_kappa = kStateDim + cfg.kappa;
    SigmaWeights w = SigmaWeights::Constant(1.0 / (2.0 * n_kappa));
    w(0) = cfg.kappa / n_kappa;
    return w;
}

SigmaPoints sigma_points(const StateVector& mean, const StateMatrix& cov, const UkfConfig& cfg) {
    if (!(cfg.kappa > 0.0)) throw InvalidConfig("kappa must be positive");
    const SpdFactor f = spd_factor(cov);
    const double scale = std::sqrt(kStateDim + cfg.kappa);
    SigmaPoints pts;
    pts.col(0) = mean;
    for (int j = 0; j < kStateDim; ++j) {
        const StateVector offset = scale * f.lower.col(j);
        pts.col(1 + j) = mean + offset;
        pts.col(1 + kStateDim + j) = mean - offset;
    }
    return pts;
}

FilterEstimate predict(const FilterEstimate& est, const ProcessModel& pm, const UkfConfig& cfg) {
    const SigmaWeights w = sigma_weights(cfg);
    const SigmaPoints pts = sigma_points(est.mean, est.covariance, cfg);

    SigmaPoints propagated;
    for (int j = 0; j < kSigmaCount; ++j) {
        propagated.col(j) = transition(TargetState(StateVector(pts.col(j))), pm).x;
    }

    FilterEstimate out;
    out.mean = propagated * w;
    const SigmaPoints dev = propagated.colwise() - out.mean;
    out.covariance = dev * w.asDiagonal() * dev.transpose() + process_noise_cov(pm);
    symmetrize(out.covariance);
    if (!out.mean.allFinite() || !out.covariance.allFinite()) {
        throw NotPositiveDefinite("predict: non-finite estimate");
    }
    return out;
}

FilterEstimate update(const FilterEstimate& predicted, const MeasurementBatch& batch,
                      const SensorArray& array, const MagneticMoment& moment,
                      const UkfConfig& cfg) {
    const auto m = static_cast<Eigen::Index>(array.measurement_dim());
    if (batch.values.size() != m) {
        throw DimensionMismatch("update: batch has " + std::to_string(batch.values.size()) +
                                " entries, array expects " + std::to_string(m));
    }
    const SigmaWeights w = sigma_weights(cfg);
    const SigmaPoints pts = sigma_points(predicted.mean, predicted.covariance, cfg);
    const Eigen::MatrixXd y_pts = measure_sigma_points(pts, array, moment);
    const Eigen::VectorXd y_mean = y_pts * w;
    const Eigen::VectorXd innovation = batch.values - y_mean;

    const SigmaWeights sqrt_w = w.cwiseSqrt();
    // Weighted deviations: X X^T is the predicted covariance, Z Z^T + sigma^2 I is P.
    const SigmaPoints x_dev = (pts.colwise() - predicted.mean) * sqrt_w.asDiagonal();
    Eigen::MatrixXd z_dev = (y_pts.colwise() - y_mean) * sqrt_w.asDiagonal();

    FilterEstimate out;
    if (cfg.solve == InnovationSolve::kLowRank) {
        // Whitened: P = sigma^2 (I + Zw Zw^T). With S = I + Zw^T Zw = L L^T,
        //   K nu    = X S^-1 Zw^T nu_w
        //   posterior = prior - X (I - S^-1) X^T = X S^-1 X^T, since X X^T is the prior.
        // The last form is a Gram matrix and stays PSD when sigma is tiny.
        const double inv_sigma = 1.0 / array.noise_std();
        z_dev *= inv_sigma;
        CapacitanceMatrix s = CapacitanceMatrix::Identity();
        s.noalias() += z_dev.transpose() * z_dev;
        const SpdFactor f = spd_factor(s);
        const auto lower = f.lower.triangularView<Eigen::Lower>();

        const Eigen::Matrix<double, kSigmaCount, 1> b = z_dev.transpose() * (innovation * inv_sigma);
        const Matrix gain_dir = lower.transpose().solve(lower.solve(b));
        const Matrix y = lower.solve(Matrix(x_dev.transpose()));

        out.mean = predicted.mean + x_dev * gain_dir;
        out.covariance = y.transpose() * y;
    } else {
        const double var = array.noise_std() * array.noise_std();
        Matrix p = z_dev * z_dev.transpose();
        p.diagonal().array() += var;
        const Matrix t = x_dev * z_dev.transpose();
        // K P = T  <=>  P K^T = T^T
        const Matrix gain = solve_spd(p, t.transpose()).transpose();
        out.mean = predicted.mean + gain * innovation;
        out.covariance = predicted.covariance - gain * p * gain.transpose();
    }
    symmetrize(out.covariance);
    if (!out.mean.allFinite() || !out.covariance.allFinite()) {
        throw NotPositiveDefinite("update: non-finite estimate");
    }
    // Posterior must stay factorizable; throws on divergence.
    (void)spd_factor(out.covariance);
    return out;
}

TrackResult track(const Trajectory& truth, const SensorArray& array,
                  const MagneticMoment& moment, const UkfConfig& cfg, const ProcessModel& pm,
                  const FilterEstimate& initial, RandomStream& noise,
                  const TrackOptions& options) {
    if (std::abs(truth.dt - pm.dt) > 1e-12 * std::max(1.0, truth.dt)) {
        throw InvalidConfig("trajectory dt and process model dt differ");
    }
    TrackResult result;
    result.errors.reserve(truth.size());
    if (options.keep_estimates) result.estimates.reserve(truth.size());

    FilterEstimate est = initial;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const TargetState& actual = truth.states[k];
        const MeasurementBatch batch = synthesize_measurement(
            array, actual.position(), moment, noise, static_cast<int>(k));
        try {
            if (k > 0) est = predict(est, pm, cfg);
            est = update(est, batch, array, moment, cfg);
        } catch (const Error&) {
            result.diverged = true;
        }
        double err = std::numeric_limits<double>::quiet_NaN();
        if (!result.diverged) {
            err = (extract_position(TargetState(est.mean)) - actual.position()).norm();
            if (!std::isfinite(err)) result.diverged = true;
        }
        result.errors.push_back(err);
        if (options.keep_estimates) result.estimates.push_back(est);

        if (!result.failed && (result.diverged || err > options.failure_threshold_m)) {
            result.failed = true;
            result.failure_step = k;
        }
        if (result.diverged || (result.failed && options.stop_on_failure)) break;
    }
    return result;
}

}  // namespace magnet
