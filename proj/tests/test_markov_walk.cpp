#include <gtest/gtest.h>

#include <cmath>

#include "freewalk/errors.hpp"
#include "freewalk/markov_walk.hpp"
#include "freewalk/rng.hpp"

using namespace freewalk;

namespace {

// Row by scanning every candidate target and testing z ⊂ x̄ ⊗ y directly.
std::map<Word, double> brute_row(const Word& x, const ProbMeasure& mu, QParam q)
{
    std::map<Word, double> out;
    for (const auto& y : words_up_to(x.size() + mu.max_length()))
        for (const auto& [z, mz] : mu.weights())
            for (const auto& t : fuse(involution(x), y))
                if (t.summand == z)
                    out[y] += mz * dim_q(y, q).linear / (dim_q(x, q).linear * dim_q(z, q).linear);
    return out;
}

void expect_maps_near(const std::map<Word, double>& a, const std::map<Word, double>& b, double tol)
{
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        EXPECT_NEAR(v, it == b.end() ? 0.0 : it->second, tol) << k.display();
    }
    for (const auto& [k, v] : b)
        if (!a.count(k))
            EXPECT_NEAR(v, 0.0, tol) << k.display();
}

ProbMeasure mixed()
{
    return ProbMeasure({{Word("a"), 0.3}, {Word("ab"), 0.2}, {Word("bb"), 0.25}, {Word{}, 0.25}});
}

} // namespace

TEST(ProbMeasure, Validation)
{
    EXPECT_THROW(ProbMeasure({{Word("a"), 0.6}, {Word("b"), 0.5}}), std::invalid_argument);
    EXPECT_THROW(ProbMeasure({{Word("a"), -0.5}, {Word("b"), 1.5}}), std::invalid_argument);
    EXPECT_THROW(ProbMeasure(std::map<Word, double>{}), std::invalid_argument);
    const auto m = ProbMeasure::normalized({{Word("a"), 2.0}, {Word("b"), 2.0}});
    EXPECT_DOUBLE_EQ(m(Word("a")), 0.5);
}

TEST(TransitionRow, Examples)
{
    const QParam q(0.5);
    const auto mu = mixed();
    expect_maps_near(transition_row(Word{}, mu, q).entries, mu.weights(), 1e-15);
    const auto r = transition_row(Word("a"), ProbMeasure::dirac(Word("a")), q);
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_NEAR(r.entries.at(Word("aa")), 1.0, 1e-15);
    EXPECT_NEAR(transition_row(Word("a"), ProbMeasure::symmetric(), q).entries.at(Word{}), 0.08, 1e-15);
}

TEST(TransitionRow, MatchesClosedForm)
{
    for (double qv : {0.3, 0.7}) {
        const QParam q(qv);
        for (const auto& mu : {ProbMeasure::symmetric(), mixed()})
            for (const auto& x : words_up_to(4)) {
                const auto row = transition_row(x, mu, q);
                expect_maps_near(row.entries, brute_row(x, mu, q), 1e-13);
                double s = 0.0;
                for (const auto& [y, p] : row.entries) {
                    EXPECT_GT(p, 0.0);
                    s += p;
                }
                EXPECT_NEAR(s, 1.0, 1e-12);
            }
    }
}

TEST(TransitionRow, StepperAgreesOnLongWords)
{
    const QParam q(0.5);
    const auto mu = mixed();
    const WalkStepper stepper(mu, q);
    CounterRng rng(1, 2);
    for (int i = 0; i < 200; ++i) {
        std::string s(1 + rng() % 30, 'a');
        for (char& c : s)
            c = rng() % 2 ? 'a' : 'b';
        const Word x(s);
        expect_maps_near(stepper.row(x).entries, transition_row(x, mu, q).entries, 1e-12);
    }
}

TEST(Convolve, Examples)
{
    const QParam q(0.5);
    const auto mu = mixed();
    const auto same = convolve(mu, ProbMeasure::dirac(Word{}), q);
    expect_maps_near(same.weights(), mu.weights(), 1e-15);
    expect_maps_near(convolve(ProbMeasure::dirac(Word("a")), ProbMeasure::dirac(Word("a")), q).weights(),
                     {{Word("aa"), 1.0}}, 1e-15);
    expect_maps_near(convolve(ProbMeasure::dirac(Word("a")), ProbMeasure::dirac(Word("b")), q).weights(),
                     {{Word("ab"), 0.84}, {Word{}, 0.16}}, 1e-15);
}

TEST(Convolve, Associative)
{
    const QParam q(0.5);
    const ProbMeasure a = mixed(), b = ProbMeasure::symmetric();
    const ProbMeasure c({{Word("ba"), 0.5}, {Word("b"), 0.5}});
    expect_maps_near(convolve(convolve(a, b, q), c, q).weights(), convolve(a, convolve(b, c, q), q).weights(), 1e-12);
}

TEST(Convolve, RowsCompose)
{
    const QParam q(0.5);
    const ProbMeasure mu = mixed(), eta({{Word("ba"), 0.5}, {Word("b"), 0.25}, {Word("aa"), 0.25}});
    const auto both = convolve(mu, eta, q);
    for (const auto& x : words_up_to(3)) {
        std::map<Word, double> composed;
        for (const auto& [w, p] : transition_row(x, mu, q).entries)
            for (const auto& [y, r] : transition_row(w, eta, q).entries)
                composed[y] += p * r;
        expect_maps_near(transition_row(x, both, q).entries, composed, 1e-12);
    }
}

TEST(NStep, AgreesWithConvolutionPowers)
{
    const QParam q(0.5);
    const auto mu = ProbMeasure::symmetric();
    const auto k = n_step({Word{}}, 8, mu, q);
    for (std::size_t n = 0; n <= 8; ++n)
        expect_maps_near(k.distribution(n, Word{}), convolution_power(mu, n, q).weights(), 1e-12);
    EXPECT_NEAR(k.prob(2, Word{}, Word{}), 0.5 * 0.08 + 0.5 * 0.08, 1e-15);
    EXPECT_DOUBLE_EQ(k.prob(0, Word{}, Word{}), 1.0);
    EXPECT_THROW(n_step({Word{}}, 100, mu, q, 64), resource_error);
}

TEST(NStep, TransienceBound)
{
    const auto mu = ProbMeasure::symmetric();
    for (double qv : {0.3, 0.5, 0.7}) {
        const QParam q(qv);
        const double r = rho(mu, q);
        EXPECT_NEAR(r, 2.0 / (qv + 1.0 / qv), 1e-15);
        const auto k = n_step({Word{}}, 12, mu, q);
        for (std::size_t n = 1; n <= 12; ++n)
            EXPECT_LE(k.prob(n, Word{}, Word{}), std::pow(r, double(n)));
    }
}

TEST(Rho, Examples)
{
    EXPECT_NEAR(rho(ProbMeasure::dirac(Word("a")), QParam(0.5)), 0.8, 1e-15);
    EXPECT_THROW(rho(ProbMeasure::dirac(Word{}), QParam(0.5)), std::domain_error);
}

TEST(Generating, SymmetricMeasure)
{
    const auto rep = is_generating(ProbMeasure::symmetric(), QParam(0.5), 3, 12);
    EXPECT_TRUE(rep.generating);
    EXPECT_FALSE(is_generating(ProbMeasure::dirac(Word("a")), QParam(0.5), 2, 12).generating);
}

TEST(SamplePath, Deterministic)
{
    const QParam q(0.5);
    EXPECT_EQ(sample_path(Word("ab"), 0, ProbMeasure::symmetric(), q, 9), std::vector<Word>{Word("ab")});
    EXPECT_EQ(sample_path(Word{}, 3, ProbMeasure::dirac(Word("a")), q, 9),
              (std::vector<Word>{Word{}, Word("a"), Word("aa"), Word("aaa")}));
    EXPECT_EQ(sample_path(Word{}, 50, mixed(), q, 4), sample_path(Word{}, 50, mixed(), q, 4));
}

TEST(SamplePath, OneStepFrequencies)
{
    const QParam q(0.5);
    const auto mu = mixed();
    const Word x("ab");
    const auto row = transition_row(x, mu, q);
    std::map<Word, double> counts;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        counts[sample_path(x, 1, mu, q, 1000 + i)[1]] += 1.0;
    for (const auto& [y, p] : row.entries) {
        const double sigma = std::sqrt(p * (1 - p) / n);
        EXPECT_NEAR(counts[y] / n, p, 3 * sigma + 1e-12) << y.display();
    }
}
