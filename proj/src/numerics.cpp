#include "magnet/numerics.hpp"

#include <cmath>
#include <string>

#include "magnet/errors.hpp"

namespace magnet {
namespace {

constexpr double kSymmetryTolerance = 1e-10;
constexpr double kReconstructionTolerance = 1e-9;
constexpr double kFirstJitter = 1e-12;
constexpr double kLastJitter = 1e-8;

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()));
    }
}

// Returns true and fills `lower` if A factors with an acceptable reconstruction.
bool try_factor(const Matrix& a, Matrix& lower) {
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) return false;
    lower = llt.matrixL();
    if (!lower.allFinite()) return false;
    const double scale = max_abs(a);
    const double err = max_abs(lower * lower.transpose() - a);
    return err <= kReconstructionTolerance * scale;
}

}  // namespace

SpdFactor spd_factor(const Matrix& a, JitterPolicy policy) {
    require_square(a, "spd_factor");
    if (!a.allFinite()) throw NotPositiveDefinite("spd_factor: non-finite entries");
    const double scale = max_abs(a);
    if (max_abs(a - a.transpose()) > kSymmetryTolerance * scale) {
        throw NotPositiveDefinite("spd_factor: matrix is not symmetric");
    }

    SpdFactor out;
    const Matrix sym = 0.5 * (a + a.transpose());
    if (try_factor(sym, out.lower)) return out;

    if (policy == JitterPolicy::kEscalate && a.rows() > 0) {
        const double mean_diag = sym.trace() / static_cast<double>(sym.rows());
        if (mean_diag > 0.0) {
            for (double rel = kFirstJitter; rel <= kLastJitter * (1.0 + 1e-9); rel *= 10.0) {
                const double eps = rel * mean_diag;
                Matrix loaded = sym;
                loaded.diagonal().array() += eps;
                if (try_factor(loaded, out.lower)) {
                    out.jitter = eps;
                    return out;
                }
            }
        }
    }
    throw NotPositiveDefinite("spd_factor: matrix is not positive definite");
}

Matrix solve_spd(const Matrix& a, const Matrix& b, JitterPolicy policy) {
    if (a.rows() != b.rows()) throw DimensionMismatch("solve_spd: row count mismatch");
    const SpdFactor f = spd_factor(a, policy);
    const auto lower = f.lower.triangularView<Eigen::Lower>();
    Matrix y = lower.solve(b);
    return lower.transpose().solve(y);
}

int numeric_rank(const Matrix& a, double tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& sv = svd.singularValues();
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    if (!(largest > 0.0)) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol * largest) ++rank;
    }
    return rank;
}

Matrix invert_spd(const Matrix& a) {
    require_square(a, "invert_spd");
    if (numeric_rank(a) < a.rows()) throw SingularMatrix("invert_spd: matrix is rank deficient");
    try {
        return solve_spd(a, Matrix::Identity(a.rows(), a.cols()), JitterPolicy::kNone);
    } catch (const NotPositiveDefinite& e) {
        throw SingularMatrix(std::string("invert_spd: ") + e.what());
    }
}

}  // namespace magnet
