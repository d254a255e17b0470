#include "magnet/crlb.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "magnet/errors.hpp"
#include "magnet/numerics.hpp"

namespace magnet {

double CrlbValue::value_or_inf() const {
    return value_ ? *value_ : std::numeric_limits<double>::infinity();
}

Fim fim_scalar_single(const Vec3& d, const MagneticMoment& m, double sigma) {
    Fim out;
    out.kind = ModelKind::kScalar;
    Eigen::RowVector3d g;
    try {
        g = dipole::norm_gradient(d, m);
    } catch (const ZeroField&) {
        return out;
    }
    g /= sigma;
    out.matrix = g.transpose() * g;
    return out;
}

Fim fim_vector_single(const Vec3& d, const MagneticMoment& m, double sigma) {
    Fim out;
    out.kind = ModelKind::kVector;
    const Eigen::Matrix3d j = dipole::jacobian(d, m) / sigma;
    out.matrix = j.transpose() * j;
    return out;
}

Fim fim_total(const SensorArray& array, const Vec3& target_pos, const MagneticMoment& m) {
    Fim out;
    out.kind = array.kind();
    const double sigma = array.noise_std();
    for (const Vec3& s : array.positions()) {
        const Vec3 d = s - target_pos;
        out.matrix += array.kind() == ModelKind::kScalar ? fim_scalar_single(d, m, sigma).matrix
                                                         : fim_vector_single(d, m, sigma).matrix;
    }
    return out;
}

CrlbValue crlb_sqrt_trace(const Fim& fim) {
    const Matrix f = fim.matrix;
    if (!f.allFinite() || numeric_rank(f) < 3) return CrlbValue::unobservable();
    try {
        return CrlbValue::meters(std::sqrt(invert_spd(f).trace()));
    } catch (const SingularMatrix&) {
        return CrlbValue::unobservable();
    }
}

CrlbMap crlb_map(const SensorArray& array, const MapRegion& region, const MagneticMoment& m,
                 unsigned threads) {
    if (region.nx < 2 || region.ny < 2) throw InvalidConfig("map resolution must be >= 2 per axis");
    if (!(region.x.max > region.x.min) || !(region.y.max > region.y.min)) {
        throw InvalidConfig("map region is empty");
    }
    CrlbMap map;
    const auto axis = [](Extent e, int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        const double step = (e.max - e.min) / static_cast<double>(n - 1);
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = e.min + i * step;
        v.back() = e.max;
        return v;
    };
    map.xs = axis(region.x, region.nx);
    map.ys = axis(region.y, region.ny);
    const std::size_t nx = map.xs.size();
    const std::size_t total = nx * map.ys.size();
    map.values.assign(total, CrlbValue::unobservable());

    const auto eval_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Vec3 target(map.xs[i % nx], map.ys[i / nx], region.target_z);
            try {
                map.values[i] = crlb_sqrt_trace(fim_total(array, target, m));
            } catch (const DegenerateGeometry&) {
                map.values[i] = CrlbValue::unobservable();
            }
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    if (workers <= 1) {
        eval_range(0, total);
        return map;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (total + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(total, begin + chunk);
            if (begin < end) pool.emplace_back(eval_range, begin, end);
        }
    }
    return map;
}

std::vector<CrlbValue> crlb_along_trajectory(const SensorArray& array, const Trajectory& traj,
                                             const MagneticMoment& m) {
    std::vector<CrlbValue> out;
    out.reserve(traj.size());
    for (const TargetState& s : traj.states) {
        try {
            out.push_back(crlb_sqrt_trace(fim_total(array, s.position(), m)));
        } catch (const DegenerateGeometry&) {
            out.push_back(CrlbValue::unobservable());
        }
    }
    return out;
}

}  // namespace magnet
