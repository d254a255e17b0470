#include <gtest/gtest.h>

#include "magnet/dipole.hpp"
#include "magnet/errors.hpp"
#include "magnet/numerics.hpp"
#include "test_support.hpp"

namespace magnet {
namespace {

using testing::rel_err;
using testing::test_rng;

Eigen::Matrix3d fd_jacobian(const Vec3& d, const MagneticMoment& m) {
    const double h = 1e-5 * d.norm();
    Eigen::Matrix3d j;
    for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e(k) = h;
        j.col(k) = (dipole::field(d + e, m) - dipole::field(d - e, m)) / (2 * h);
    }
    return j;
}

Eigen::RowVector3d fd_norm_gradient(const Vec3& d, const MagneticMoment& m) {
    const double h = 1e-5 * d.norm();
    Eigen::RowVector3d g;
    for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e(k) = h;
        g(k) = (dipole::field_norm(d + e, m) - dipole::field_norm(d - e, m)) / (2 * h);
    }
    return g;
}

TEST(DipoleField, AxialCase) {
    const Vec3 b = dipole::field(Vec3(10, 0, 0), MagneticMoment(600, 0, 0));
    EXPECT_NEAR(b.x(), 1.2e-7, 1e-22);
    EXPECT_EQ(b.y(), 0.0);
    EXPECT_EQ(b.z(), 0.0);
}

TEST(DipoleField, EquatorialCase) {
    const Vec3 b = dipole::field(Vec3(0, 0, 10), MagneticMoment(600, 0, 0));
    EXPECT_NEAR(b.x(), -6.0e-8, 1e-22);
    EXPECT_EQ(b.y(), 0.0);
    EXPECT_EQ(b.z(), 0.0);
}

TEST(DipoleField, GenericCaseMatchesTranscription) {
    const Vec3 d(3, 4, 5);
    const MagneticMoment m(600, 600, 2);
    // Values produced independently of this code base.
    const Vec3 want(4.463258002849486e-08, 1.1607864919958361e-07, 3.566646604304945e-07);
    EXPECT_LT(rel_err(dipole::field(d, m), want), 1e-13);
    EXPECT_LT(rel_err(dipole::field(d, m), testing::dipole_oracle(d, m.value)), 1e-13);
    EXPECT_LT(rel_err(dipole::field_norm(d, m), 3.7772476752259705e-07), 1e-13);
}

TEST(DipoleField, MatchesOracleOnRandomConfigs) {
    RandomStream rng = test_rng(10);
    for (int i = 0; i < 100; ++i) {
        const Vec3 d = testing::random_offset(rng);
        const MagneticMoment m = testing::random_moment(rng);
        EXPECT_LT(rel_err(dipole::field(d, m), testing::dipole_oracle(d, m.value)), 1e-12);
    }
}

TEST(DipoleField, EvenInOffset) {
    RandomStream rng = test_rng(11);
    for (int i = 0; i < 50; ++i) {
        const Vec3 d = testing::random_offset(rng);
        const MagneticMoment m = testing::random_moment(rng);
        EXPECT_EQ(dipole::field(d, m), dipole::field(-d, m));
    }
}

TEST(DipoleField, ZeroOffsetThrows) {
    EXPECT_THROW(dipole::field(Vec3::Zero(), MagneticMoment(1, 0, 0)), DegenerateGeometry);
    EXPECT_THROW(dipole::jacobian(Vec3::Zero(), MagneticMoment(1, 0, 0)), DegenerateGeometry);
}

TEST(DipoleField, LinearInMoment) {
    RandomStream rng = test_rng(12);
    for (int i = 0; i < 50; ++i) {
        const Vec3 d = testing::random_offset(rng);
        const MagneticMoment m1 = testing::random_moment(rng);
        const MagneticMoment m2 = testing::random_moment(rng);
        const double a = rng.uniform(-3, 3);
        const double b = rng.uniform(-3, 3);
        const Vec3 combined = dipole::field(d, MagneticMoment(a * m1.value + b * m2.value));
        const Vec3 separate = a * dipole::field(d, m1) + b * dipole::field(d, m2);
        EXPECT_LT((combined - separate).norm(), 1e-12 * separate.norm() + 1e-25);
    }
}

TEST(DipoleField, ScaleLaws) {
    RandomStream rng = test_rng(13);
    for (int i = 0; i < 100; ++i) {
        const Vec3 d = testing::random_offset(rng);
        const MagneticMoment m = testing::random_moment(rng);
        const double c = rng.uniform(0.2, 5.0);
        EXPECT_LT(rel_err(dipole::field(c * d, m), dipole::field(d, m) / std::pow(c, 3)), 1e-9);
        EXPECT_LT(rel_err(dipole::field_norm(c * d, m), dipole::field_norm(d, m) / std::pow(c, 3)),
                  1e-9);
        EXPECT_LT(rel_err(dipole::jacobian(c * d, m), dipole::jacobian(d, m) / std::pow(c, 4)),
                  1e-9);
    }
}

TEST(DipoleJacobian, ZeroMomentGivesZero) {
    EXPECT_TRUE(dipole::jacobian(Vec3(3, 4, 5), MagneticMoment()).isZero(0.0));
}

TEST(DipoleJacobian, AxialClosedForm) {
    const Vec3 d(10, 0, 0);
    const MagneticMoment m(600, 0, 0);
    const double r = 10;
    Eigen::Matrix3d want = Eigen::Matrix3d::Identity();
    want(0, 0) -= 3.0;
    want *= 3e-7 * 600 / std::pow(r, 4);
    EXPECT_LT(rel_err(dipole::jacobian(d, m), want), 1e-12);
    EXPECT_LT(rel_err(dipole::jacobian(d, m), fd_jacobian(d, m)), 1e-6);
}

TEST(DipoleJacobian, MatchesFiniteDifferences) {
    RandomStream rng = test_rng(14);
    for (int i = 0; i < 100; ++i) {
        const Vec3 d = testing::random_offset(rng);
        const MagneticMoment m = testing::random_moment(rng);
        EXPECT_LE(rel_err(dipole::jacobian(d, m), fd_jacobian(d, m)), 1e-6) << "config " << i;
    }
}

TEST(DipoleJacobian, IsSymmetric) {
    RandomStream rng = test_rng(15);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Matrix3d j =
            dipole::jacobian(testing::random_offset(rng), testing::random_moment(rng));
        EXPECT_LE(max_abs(j - j.transpose()), 1e-9 * max_abs(j));
    }
}

TEST(DipoleJacobian, GenericFullRank) {
    RandomStream rng = test_rng(16);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(numeric_rank(dipole::jacobian(testing::random_offset(rng),
                                                testing::random_moment(rng))),
                  3);
    }
}

TEST(DipoleJacobian, SingularWhenOffsetPerpendicularToMoment) {
    const MagneticMoment m(600, 0, 0);
    for (const Vec3& d : {Vec3(0, 30, -25), Vec3(0, -7, -25), Vec3(0, 0, -25)}) {
        EXPECT_EQ(numeric_rank(dipole::jacobian(d, m)), 2);
    }
    EXPECT_EQ(numeric_rank(dipole::jacobian(Vec3(30, 0, -25), m)), 3);
}

TEST(NormGradient, AxialCase) {
    const Vec3 d(10, 0, 0);
    const MagneticMoment m(600, 0, 0);
    const Eigen::RowVector3d g = dipole::norm_gradient(d, m);
    EXPECT_LT(rel_err(g(0), -3.0 * dipole::field_norm(d, m) / 10.0), 1e-12);
    EXPECT_NEAR(g(1), 0.0, 1e-25);
    EXPECT_NEAR(g(2), 0.0, 1e-25);
    EXPECT_LT(rel_err(g, fd_norm_gradient(d, m)), 1e-6);
}

TEST(NormGradient, EquatorialMirrorSymmetry) {
    const Eigen::RowVector3d g = dipole::norm_gradient(Vec3(0, 0, 10), MagneticMoment(600, 0, 0));
    EXPECT_EQ(g(1), 0.0);
}

TEST(NormGradient, MatchesFiniteDifferences) {
    RandomStream rng = test_rng(17);
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 d = testing::random_offset(rng);
        const MagneticMoment m = testing::random_moment(rng);
        if (dipole::field_norm(d, m) < 1e-15) continue;
        ++checked;
        EXPECT_LE(rel_err(dipole::norm_gradient(d, m), fd_norm_gradient(d, m)), 1e-6);
    }
    EXPECT_GT(checked, 90);
}

TEST(NormGradient, ZeroFieldThrows) {
    EXPECT_THROW(dipole::norm_gradient(Vec3(1, 2, 3), MagneticMoment()), ZeroField);
}

TEST(FieldNorm, MatchesExamples) {
    EXPECT_NEAR(dipole::field_norm(Vec3(10, 0, 0), MagneticMoment(600, 0, 0)), 1.2e-7, 1e-22);
    EXPECT_NEAR(dipole::field_norm(Vec3(0, 0, 10), MagneticMoment(600, 0, 0)), 6.0e-8, 1e-22);
}

}  // namespace
}  // namespace magnet
