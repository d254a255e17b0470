#pragma once

// Small dense linear-algebra helpers shared by the filter and the bound
// computations. Everything here is a pure function of its arguments.

#include <Eigen/Dense>

namespace magnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value cutoff used for every rank decision.
inline constexpr double kDefaultRankTolerance = 1e-9;

enum class JitterPolicy {
    kNone,      ///< factor as-is; fail on the first non-positive pivot
    kEscalate,  ///< retry with eps*I, eps = 1e-12..1e-8 * trace/dim (x10 steps)
};

struct SpdFactor {
    Matrix lower;          ///< L with L*L^T = A + jitter*I
    double jitter = 0.0;   ///< diagonal loading that was applied (0 if none)
};

/// Cholesky factor of a symmetric (semi-)definite matrix.
/// Throws NotPositiveDefinite if A is not symmetric to 1e-10 relative, has
/// non-finite entries, or cannot be factored within the jitter policy.
SpdFactor spd_factor(const Matrix& a, JitterPolicy policy = JitterPolicy::kEscalate);

/// Solves A*X = B for SPD A without forming the inverse.
Matrix solve_spd(const Matrix& a, const Matrix& b,
                 JitterPolicy policy = JitterPolicy::kEscalate);

/// Number of singular values above tol * (largest singular value).
int numeric_rank(const Matrix& a, double tol = kDefaultRankTolerance);

/// Inverse of an SPD matrix. No jitter is ever applied here.
/// Throws SingularMatrix if numeric_rank(A) < dim.
Matrix invert_spd(const Matrix& a);

inline double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace magnet
