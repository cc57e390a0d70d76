#include <gtest/gtest.h>

#include <random>

#include "freewalk/errors.hpp"
#include "freewalk/tl_category.hpp"

using namespace freewalk;

namespace {

Eigen::MatrixXcd random_op(std::mt19937_64& gen, Eigen::Index n)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = cplx(g(gen), g(gen));
    return a;
}

// A morphism mixing every factor type, 3 -> 5 strands.
TLMorphism sample_morphism(std::mt19937_64& gen, QParam q)
{
    auto local = std::make_shared<const Eigen::MatrixXcd>(random_op(gen, 4));
    TLMorphism f = TLMorphism::from_factor(3, LocalFactor{1, 2, local});
    f = cup(3, 1, q).after(f);
    f = TLMorphism::from_factor(5, ProjectFactor{2, run_basis(3, q)}).after(f);
    f += cplx(0.3, -0.7) * cup(3, 0, q).after(tl_generator(3, 1, q));
    return f;
}

} // namespace

TEST(TLMorphism, CupsAreUnitAndZigZag)
{
    for (double qv : {0.3, 0.5, 0.9}) {
        const QParam q(qv);
        const auto c = build_cups(q);
        double n = 0.0;
        for (double v : c.t)
            n += v * v;
        EXPECT_NEAR(n, 1.0, 1e-14);
        const Eigen::MatrixXd zz = cap(3, 0, q).after(cup(1, 1, q)).dense<double>();
        const Eigen::MatrixXd zz2 = cap(3, 1, q).after(cup(1, 0, q)).dense<double>();
        const double inv = 1.0 / (qv + 1.0 / qv);
        EXPECT_LE((zz - inv * Eigen::Matrix2d::Identity()).norm(), 1e-12);
        EXPECT_LE((zz2 - inv * Eigen::Matrix2d::Identity()).norm(), 1e-12);
    }
    EXPECT_NEAR(cap(3, 0, QParam(0.5)).after(cup(1, 1, QParam(0.5))).dense<double>()(0, 0), 0.4, 1e-12);
}

TEST(TLMorphism, CompressionIsPsiAlpha)
{
    std::mt19937_64 gen(11);
    const QParam q(0.5);
    for (int i = 0; i < 20; ++i) {
        const Eigen::MatrixXcd a = random_op(gen, 2);
        auto op = std::make_shared<const Eigen::MatrixXcd>(a);
        const TLMorphism m = cap(2, 0, q).after(TLMorphism::from_factor(2, LocalFactor{0, 1, op})).after(cup(0, 0, q));
        const cplx lhs = m.dense<cplx>()(0, 0);
        const cplx rhs = (0.5 * a(0, 0) + 2.0 * a(1, 1)) / 2.5;
        EXPECT_LE(std::abs(lhs - rhs), 1e-12);
    }
}

TEST(TLMorphism, MatrixFreeMatchesDense)
{
    std::mt19937_64 gen(12);
    const QParam q(0.6);
    const TLMorphism f = sample_morphism(gen, q);
    const Eigen::MatrixXcd d = f.dense<cplx>();
    ASSERT_EQ(d.rows(), 32);
    ASSERT_EQ(d.cols(), 8);
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXcd v = random_op(gen, 8).col(0);
        EXPECT_LE((f.apply<cplx>(v) - d * v).norm(), 1e-12 * (1 + d.norm() * v.norm()));
    }
    // adjoint, padding and tensor products against their dense counterparts
    EXPECT_LE((f.adjoint().dense<cplx>() - d.adjoint()).norm(), 1e-12 * d.norm());
    const Eigen::MatrixXcd e = tl_generator(2, 0, q).dense<cplx>();
    const Eigen::MatrixXcd p = f.padded(1, 0).dense<cplx>();
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(64, 16);
    expect.topLeftCorner(32, 8) = d;
    expect.bottomRightCorner(32, 8) = d;
    EXPECT_LE((p - expect).norm(), 1e-12 * d.norm());
    const Eigen::MatrixXcd t = tensor(tl_generator(2, 0, q), f).dense<cplx>();
    Eigen::MatrixXcd kron(4 * 32, 4 * 8);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            kron.block(32 * i, 8 * j, 32, 8) = e(i, j) * d;
    EXPECT_LE((t - kron).norm(), 1e-12 * kron.norm());
}

TEST(TLMorphism, RealApplicationGuards)
{
    std::mt19937_64 gen(13);
    const TLMorphism f = sample_morphism(gen, QParam(0.5));
    EXPECT_FALSE(f.is_real());
    EXPECT_THROW(f.apply<double>(Eigen::VectorXd::Ones(8)), std::domain_error);
    EXPECT_TRUE(tl_generator(4, 2, QParam(0.5)).is_real());
    EXPECT_THROW(f.apply<cplx>(Eigen::VectorXcd::Ones(4)), std::invalid_argument);
    EXPECT_THROW(TLMorphism::identity(11).dense<double>(), resource_error);
    EXPECT_THROW(TLMorphism::identity(2).after(TLMorphism::identity(3)), std::invalid_argument);
}

TEST(TLMorphism, TemperleyLiebRelations)
{
    const QParam q(0.45);
    const double delta = 0.45 + 1 / 0.45;
    const Eigen::MatrixXd e0 = tl_generator(4, 0, q).dense<double>();
    const Eigen::MatrixXd e1 = tl_generator(4, 1, q).dense<double>();
    const Eigen::MatrixXd e2 = tl_generator(4, 2, q).dense<double>();
    EXPECT_LE((e0 * e0 - delta * e0).norm(), 1e-10);
    EXPECT_LE((e0 * e1 * e0 - e0).norm(), 1e-10);
    EXPECT_LE((e1 * e0 * e1 - e1).norm(), 1e-10);
    EXPECT_LE((e0 * e2 - e2 * e0).norm(), 1e-10);
}
