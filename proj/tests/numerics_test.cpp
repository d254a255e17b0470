#include <gtest/gtest.h>

#include "magnet/errors.hpp"
#include "magnet/numerics.hpp"
#include "test_support.hpp"

namespace magnet {
namespace {

using testing::test_rng;

Matrix random_matrix(RandomStream& rng, int rows, int cols) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) g(i, j) = rng.normal();
    }
    return g;
}

Matrix random_spd(RandomStream& rng, int n) {
    const Matrix g = random_matrix(rng, n, n);
    return g * g.transpose() + 0.1 * Matrix::Identity(n, n);
}

Matrix random_rotation(RandomStream& rng, int n) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
    return qr.householderQ();
}

TEST(SpdFactor, IdentityFactorsToIdentity) {
    const SpdFactor f = spd_factor(Matrix::Identity(3, 3));
    EXPECT_TRUE(f.lower.isApprox(Matrix::Identity(3, 3)));
    EXPECT_EQ(f.jitter, 0.0);
}

TEST(SpdFactor, DiagonalGivesSquareRoots) {
    Matrix a = Eigen::Vector3d(4, 9, 16).asDiagonal();
    const SpdFactor f = spd_factor(a);
    Matrix want = Eigen::Vector3d(2, 3, 4).asDiagonal();
    EXPECT_LT(max_abs(f.lower - want), 1e-15);
}

TEST(SpdFactor, RandomSpdReconstructs) {
    RandomStream rng = test_rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_spd(rng, 9);
        const SpdFactor f = spd_factor(a);
        EXPECT_LE(max_abs(f.lower * f.lower.transpose() - a), 1e-9 * max_abs(a));
        EXPECT_TRUE(f.lower.isLowerTriangular());
    }
}

TEST(SpdFactor, SingularPsdNeedsJitter) {
    const Eigen::Vector3d v(1, 2, 3);
    const Matrix a = v * v.transpose();
    EXPECT_THROW(spd_factor(a, JitterPolicy::kNone), NotPositiveDefinite);
    const SpdFactor f = spd_factor(a, JitterPolicy::kEscalate);
    EXPECT_GT(f.jitter, 0.0);
    EXPECT_LE(f.jitter, 1e-8 * a.trace() / 3.0 * (1 + 1e-12));
    const Matrix loaded = a + f.jitter * Matrix::Identity(3, 3);
    EXPECT_LE(max_abs(f.lower * f.lower.transpose() - loaded), 1e-9 * max_abs(loaded));
}

TEST(SpdFactor, IndefiniteFails) {
    Matrix a = Eigen::Vector3d(1, -1, 1).asDiagonal();
    EXPECT_THROW(spd_factor(a), NotPositiveDefinite);
}

TEST(SpdFactor, AsymmetricFails) {
    Matrix a = Matrix::Identity(3, 3);
    a(0, 1) = 0.5;
    EXPECT_THROW(spd_factor(a), NotPositiveDefinite);
}

TEST(SpdFactor, NonFiniteFails) {
    Matrix a = Matrix::Identity(2, 2);
    a(1, 1) = std::nan("");
    EXPECT_THROW(spd_factor(a), NotPositiveDefinite);
}

TEST(SolveSpd, IdentitySystem) {
    RandomStream rng = test_rng(2);
    const Matrix b = random_matrix(rng, 4, 3);
    EXPECT_LT(max_abs(solve_spd(Matrix::Identity(4, 4), b) - b), 1e-15);
}

TEST(SolveSpd, DiagonalSystem) {
    Matrix a = 2.0 * Matrix::Identity(3, 3);
    Matrix b(3, 1);
    b << 2, 4, 6;
    const Matrix x = solve_spd(a, b);
    EXPECT_NEAR(x(0), 1, 1e-15);
    EXPECT_NEAR(x(1), 2, 1e-15);
    EXPECT_NEAR(x(2), 3, 1e-15);
}

TEST(SolveSpd, RecoversKnownSolution) {
    RandomStream rng = test_rng(3);
    for (int n : {3, 9, 30}) {
        const Matrix a = random_spd(rng, n);
        const Matrix x = random_matrix(rng, n, 2);
        const Matrix b = a * x;
        const Matrix got = solve_spd(a, b);
        EXPECT_LE(testing::rel_err(got, x), 1e-8);
        EXPECT_LE(max_abs(a * got - b), 1e-8 * max_abs(b));
    }
}

TEST(NumericRank, Basics) {
    EXPECT_EQ(numeric_rank(Matrix::Zero(3, 3)), 0);
    EXPECT_EQ(numeric_rank(Matrix::Identity(3, 3)), 3);
    const Eigen::Vector3d v(1, 2, 3);
    EXPECT_EQ(numeric_rank(v * v.transpose()), 1);
}

TEST(NumericRank, InvariantUnderPermutationAndRotation) {
    RandomStream rng = test_rng(4);
    for (int rank = 1; rank <= 5; ++rank) {
        const Matrix g = random_matrix(rng, 6, rank);
        const Matrix a = g * g.transpose();
        ASSERT_EQ(numeric_rank(a), rank);
        Eigen::PermutationMatrix<Eigen::Dynamic> p(6);
        p.setIdentity();
        std::shuffle(p.indices().data(), p.indices().data() + 6, rng.engine());
        EXPECT_EQ(numeric_rank(p * a * p.transpose()), rank);
        const Matrix q = random_rotation(rng, 6);
        EXPECT_EQ(numeric_rank(q * a * q.transpose()), rank);
        EXPECT_EQ(numeric_rank(q * a), rank);
    }
}

TEST(InvertSpd, DiagonalAndIdentity) {
    Matrix a = Eigen::Vector3d(2, 4, 8).asDiagonal();
    Matrix want = Eigen::Vector3d(0.5, 0.25, 0.125).asDiagonal();
    EXPECT_LT(max_abs(invert_spd(a) - want), 1e-15);
    EXPECT_LT(max_abs(invert_spd(Matrix::Identity(5, 5)) - Matrix::Identity(5, 5)), 1e-15);
}

TEST(InvertSpd, RandomProductIsIdentity) {
    RandomStream rng = test_rng(5);
    for (int n : {3, 9}) {
        const Matrix a = random_spd(rng, n);
        EXPECT_LE(max_abs(a * invert_spd(a) - Matrix::Identity(n, n)), 1e-8);
    }
}

TEST(InvertSpd, SingularThrows) {
    const Eigen::Vector3d v(1, 2, 3);
    EXPECT_THROW(invert_spd(v * v.transpose()), SingularMatrix);
    EXPECT_THROW(invert_spd(Matrix::Zero(3, 3)), SingularMatrix);
}

TEST(InvertSpd, MatchesSolveAgainstIdentity) {
    RandomStream rng = test_rng(6);
    for (int n : {3, 9}) {
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix a = random_spd(rng, n);
            const Matrix via_solve = solve_spd(a, Matrix::Identity(n, n));
            EXPECT_LE(max_abs(via_solve - invert_spd(a)), 1e-8 * std::max(1.0, max_abs(via_solve)));
        }
    }
}

}  // namespace
}  // namespace magnet
