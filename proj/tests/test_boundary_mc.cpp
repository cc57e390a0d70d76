#include <gtest/gtest.h>

#include <cmath>

#include "freewalk/boundary_mc.hpp"
#include "freewalk/errors.hpp"

using namespace freewalk;

namespace {

McSettings settings(std::size_t n, std::uint64_t seed = 17)
{
    McSettings mc;
    mc.samples = n;
    mc.seed = seed;
    return mc;
}

} // namespace

TEST(BoundaryMc, DeterministicChain)
{
    const QParam q(0.5);
    const auto mu = ProbMeasure::dirac(Word("a"));
    EXPECT_EQ(sample_boundary_prefix(Word{}, 5, mu, q, StoppingPolicy{}, 3), std::optional<Word>(Word("aaaaa")));
    const auto e = estimate_hitting(Word{}, Word("a"), mu, q, settings(100));
    EXPECT_DOUBLE_EQ(e.value, 1.0);
    EXPECT_DOUBLE_EQ(e.stderr_, 0.0);
}

TEST(BoundaryMc, EmptyCylinderHasFullMass)
{
    const auto e = estimate_hitting(Word("ab"), Word{}, ProbMeasure::symmetric(), QParam(0.5), settings(100));
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.stderr_, 0.0);
    const auto r = harmonicity_check(Word("a"), Word{}, ProbMeasure::symmetric(), QParam(0.5), settings(100));
    EXPECT_EQ(r.residual, 0.0);
}

TEST(BoundaryMc, UnresolvedIsReported)
{
    StoppingPolicy tight;
    tight.max_steps = 3;
    EXPECT_EQ(sample_boundary_prefix(Word{}, 4, ProbMeasure::symmetric(), QParam(0.5), tight, 1), std::nullopt);
    McSettings mc = settings(50);
    mc.policy = tight;
    EXPECT_THROW(estimate_hitting(Word{}, Word("a"), ProbMeasure::symmetric(), QParam(0.5), mc), estimation_error);
}

TEST(BoundaryMc, SymmetryPartitionAndUnresolvedFraction)
{
    const QParam q(0.5);
    const auto s = sample_boundary(Word{}, 3, ProbMeasure::symmetric(), q, settings(20000));
    EXPECT_LT(double(s.unresolved()) / double(s.total()), 0.01);
    const auto a = s.estimate(Word("a"));
    const auto b = s.estimate(Word("b"));
    EXPECT_DOUBLE_EQ(a.value + b.value, 1.0);
    EXPECT_NEAR(a.value, 0.5, 3 * a.stderr_);
    // refinement: U_z splits into U_za and U_zb exactly on one sample set
    for (const auto& z : words_up_to(2)) {
        if (z.empty())
            continue;
        EXPECT_NEAR(s.estimate(z).value, s.estimate(z + Word("a")).value + s.estimate(z + Word("b")).value, 1e-12);
    }
}

TEST(BoundaryMc, WorkerCountDoesNotChangeResults)
{
    const QParam q(0.5);
    auto mc = settings(3000);
    const auto one = sample_boundary(Word("ab"), 4, ProbMeasure::symmetric(), q, mc);
    mc.workers = 3;
    const auto three = sample_boundary(Word("ab"), 4, ProbMeasure::symmetric(), q, mc);
    EXPECT_EQ(one.prefixes(), three.prefixes());
}

TEST(BoundaryMc, PoissonIntegral)
{
    const QParam q(0.5);
    const auto mu = ProbMeasure::symmetric();
    const auto one = poisson_integral_classical({{1.0, Word("a")}, {1.0, Word("b")}}, Word("ab"), mu, q, settings(2000));
    EXPECT_DOUBLE_EQ(one.value, 1.0);
    EXPECT_DOUBLE_EQ(one.stderr_, 0.0);
    const auto half = poisson_integral_classical({{1.0, Word("a")}}, Word{}, mu, q, settings(20000));
    EXPECT_NEAR(half.value, 0.5, 3 * half.stderr_);
}

TEST(BoundaryMc, Harmonicity)
{
    const QParam q(0.5);
    const auto r = harmonicity_check(Word("a"), Word("ab"), ProbMeasure::symmetric(), q, settings(20000));
    EXPECT_LE(std::abs(r.residual), 3 * r.combined_stderr);
}

TEST(BoundaryMc, Decomposition)
{
    // ν_ε = Σ_x μ^{*2}(x) ν_x on cylinders of depth <= 2
    const QParam q(0.5);
    const auto mu = ProbMeasure::symmetric();
    const auto mu2 = convolution_power(mu, 2, q);
    const auto mc = settings(20000);
    const auto root = sample_boundary(Word{}, 2, mu, q, mc);
    std::map<Word, BoundarySamples> from;
    for (const auto& [x, p] : mu2.weights())
        from.emplace(x, sample_boundary(x, 2, mu, q, mc));
    for (const auto& z : words_up_to(2)) {
        if (z.empty())
            continue;
        double v = 0.0, var = 0.0;
        for (const auto& [x, p] : mu2.weights()) {
            const auto e = from.at(x).estimate(z);
            v += p * e.value;
            var += p * p * e.stderr_ * e.stderr_;
        }
        const auto e = root.estimate(z);
        EXPECT_LE(std::abs(v - e.value), 3 * std::sqrt(var + e.stderr_ * e.stderr_)) << z.display();
    }
}

TEST(BoundaryMc, BoundaryRatio)
{
    const QParam q(0.5);
    bool alt = true;
    // tail "ab|b..." has a run boundary after two letters
    EXPECT_NEAR(boundary_ratio(Word("ab"), Word("aaa"), "aaaabba", q, &alt),
                martin_ratio_limit(Word("ab"), Word("aaa"), GenericTail{Word("ab")}, q), 1e-15);
    EXPECT_FALSE(alt);
    boundary_ratio(Word("ab"), Word("aaa"), "aaababab", q, &alt);
    EXPECT_TRUE(alt);
}

TEST(BoundaryMc, BoundaryIdentityTrivialStart)
{
    // x = ε: both sides estimate ν_ε(U_z) with f_0 = indicator
    const QParam q(0.5);
    const auto r = convolutie_check(Word{}, Word("ab"), ProbMeasure::symmetric(), q, settings(5000));
    EXPECT_DOUBLE_EQ(r.lhs, r.rhs);
    EXPECT_THROW(convolutie_check(Word("ab"), Word("a"), ProbMeasure::symmetric(), q, settings(10)),
                 std::domain_error);
}

TEST(BoundaryMc, BoundaryIdentity)
{
    const QParam q(0.5);
    for (auto [x, z] : {std::pair{"a", "ab"}, std::pair{"b", "aa"}}) {
        const auto r = convolutie_check(Word(x), Word(z), ProbMeasure::symmetric(), q, settings(20000));
        EXPECT_LE(std::abs(r.lhs - r.rhs), 3 * r.combined_stderr) << x << " " << z << " " << r.lhs << " " << r.rhs;
    }
}

TEST(BoundaryMc, AtomScan)
{
    const auto r = atom_scan(Letter::alpha, {2, 4, 6, 8}, ProbMeasure::symmetric(), QParam(0.5), settings(20000));
    EXPECT_TRUE(r.non_increasing);
    EXPECT_TRUE(r.empty_cylinders.empty());
    EXPECT_LT(r.masses.back().value, 0.5 * r.masses.front().value);
}
