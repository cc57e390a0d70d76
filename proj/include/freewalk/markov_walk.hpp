#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freewalk/qdim.hpp"
#include "freewalk/word.hpp"

namespace freewalk {

/// Finitely supported probability measure on words.
class ProbMeasure {
public:
    /// Weights must be positive and sum to 1 within 1e-12.
    explicit ProbMeasure(std::map<Word, double> weights);
    /// Rescales positive weights to total mass 1.
    static ProbMeasure normalized(std::map<Word, double> weights);
    static ProbMeasure dirac(const Word& w);
    /// (δ_a + δ_b)/2
    static ProbMeasure symmetric();

    const std::map<Word, double>& weights() const noexcept { return weights_; }
    double operator()(const Word& w) const;
    std::size_t max_length() const;

private:
    ProbMeasure() = default;
    std::map<Word, double> weights_;
};

struct TransitionRow {
    Word source;
    std::map<Word, double> entries;
};

TransitionRow transition_row(const Word& x, const ProbMeasure& mu, QParam q);

ProbMeasure convolve(const ProbMeasure& mu, const ProbMeasure& eta, QParam q);
/// μ^{*n}; n = 0 gives δ_ε.
ProbMeasure convolution_power(const ProbMeasure& mu, std::size_t n, QParam q);

/// Exact k-step distributions from a set of start words, k <= horizon.
class TruncatedKernel {
public:
    std::size_t horizon() const noexcept { return horizon_; }
    const std::vector<Word>& states() const noexcept { return states_; }
    const std::vector<Word>& starts() const noexcept { return starts_; }
    /// One-step row of a state at distance < horizon from the start set.
    const TransitionRow& row(const Word& x) const;
    const std::map<Word, double>& distribution(std::size_t k, const Word& start) const;
    double prob(std::size_t k, const Word& start, const Word& y) const;

private:
    friend TruncatedKernel n_step(const std::vector<Word>&, std::size_t, const ProbMeasure&, QParam,
                                  std::size_t);
    std::size_t horizon_ = 0;
    std::vector<Word> starts_;
    std::vector<Word> states_;
    std::map<Word, TransitionRow> rows_;
    std::map<Word, std::vector<std::map<Word, double>>> dist_;
};

/// Throws resource_error when max|x| + n·max|supp μ| exceeds length_budget.
TruncatedKernel n_step(const std::vector<Word>& xs, std::size_t n, const ProbMeasure& mu, QParam q,
                       std::size_t length_budget = 64);

double rho(const ProbMeasure& mu, QParam q);

struct GeneratingReport {
    bool generating;     ///< every pair reachable within the horizon
    std::size_t horizon;
    std::size_t max_length;
    std::optional<std::pair<Word, Word>> first_failure;
};

/// Bounded-horizon reachability among all words of length <= max_length.
GeneratingReport is_generating(const ProbMeasure& mu, QParam q, std::size_t max_length = 3,
                               std::size_t horizon = 20);

/// Samples transitions in place on a plain letter string. Dimension ratios are
/// evaluated locally around the modified suffix, so a step costs O(run length)
/// rather than O(|w|).
class WalkStepper {
public:
    WalkStepper(const ProbMeasure& mu, QParam q);

    /// Replaces w by a successor drawn with the uniform variate u in [0,1).
    /// Returns the length of the prefix of w left untouched.
    std::size_t step(std::string& w, double u) const;
    /// The row computed with the same local arithmetic used by step().
    TransitionRow row(const Word& x) const;

private:
    struct Candidate {
        std::size_t support_index;
        std::size_t cancel;
        double weight;
    };
    void candidates(const std::string& w, std::vector<Candidate>& out) const;
    double log_qint(std::size_t n) const;
    double log_dim_concat(std::string_view a, std::string_view b) const;

    std::vector<std::string> support_;
    std::vector<double> log_mu_minus_dim_;
    std::vector<double> log_qint_table_;
    double log_q_;
};

std::vector<Word> sample_path(const Word& x, std::size_t steps, const ProbMeasure& mu, QParam q,
                              std::uint64_t seed);

} // namespace freewalk
