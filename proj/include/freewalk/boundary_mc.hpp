#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freewalk/markov_walk.hpp"
#include "freewalk/rng.hpp"

namespace freewalk {

/// A sample counts as resolved once the first (resolve_len + margin) letters
/// of the walk have not been touched for stable_steps consecutive steps.
struct StoppingPolicy {
    std::size_t stable_steps = 50;
    std::size_t max_steps = 10000;
    std::size_t margin = 2;
};

struct McSettings {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    StoppingPolicy policy{};
};

/// Stream id of sample `index` started at x; independent of how samples are
/// distributed over workers.
std::uint64_t sample_stream(const Word& x, std::uint64_t index);

std::optional<Word> sample_boundary_prefix(const Word& x, std::size_t resolve_len,
                                           const WalkStepper& stepper, const StoppingPolicy& policy,
                                           CounterRng& rng);
std::optional<Word> sample_boundary_prefix(const Word& x, std::size_t resolve_len, const ProbMeasure& mu,
                                           QParam q, const StoppingPolicy& policy, std::uint64_t seed);

struct HittingEstimate {
    Word start;
    Word cylinder;
    double value;
    double stderr_;
    std::size_t samples; ///< resolved samples used
    std::size_t unresolved;
    StoppingPolicy policy;
};

/// Resolved boundary prefixes from one start word, in sample order.
class BoundarySamples {
public:
    BoundarySamples(Word start, std::size_t resolve_len, std::vector<std::optional<std::string>> prefixes,
                    StoppingPolicy policy);

    const Word& start() const noexcept { return start_; }
    std::size_t resolve_len() const noexcept { return resolve_len_; }
    std::size_t total() const noexcept { return prefixes_.size(); }
    std::size_t resolved() const noexcept { return resolved_; }
    std::size_t unresolved() const noexcept { return total() - resolved_; }
    const std::vector<std::optional<std::string>>& prefixes() const noexcept { return prefixes_; }

    /// Throws estimation_error when nothing resolved or the cylinder is longer
    /// than the resolved prefixes.
    HittingEstimate estimate(const Word& cylinder) const;

private:
    Word start_;
    std::size_t resolve_len_;
    std::vector<std::optional<std::string>> prefixes_;
    std::size_t resolved_ = 0;
    StoppingPolicy policy_;
};

BoundarySamples sample_boundary(const Word& x, std::size_t resolve_len, const ProbMeasure& mu, QParam q,
                                const McSettings& mc);

HittingEstimate estimate_hitting(const Word& x, const Word& cylinder, const ProbMeasure& mu, QParam q,
                                 const McSettings& mc);

struct CylinderTerm {
    double coefficient;
    Word cylinder;
};

struct McValue {
    double value;
    double stderr_;
    std::size_t samples;
    std::size_t unresolved;
};

/// Σ c_i ν_x(U_{z_i}) from one sample set, so correlations between the
/// cylinders are accounted for in the error.
McValue poisson_integral_classical(const std::vector<CylinderTerm>& f, const Word& x, const ProbMeasure& mu,
                                   QParam q, const McSettings& mc);

struct HarmonicityReport {
    Word start;
    Word cylinder;
    double lhs; ///< Σ_y p(x,y) ν_y(U_z)
    double lhs_stderr;
    double rhs; ///< ν_x(U_z)
    double rhs_stderr;
    double combined_stderr;
    double residual;
    std::size_t unresolved;
    std::size_t samples;
};

HarmonicityReport harmonicity_check(const Word& x, const Word& cylinder, const ProbMeasure& mu, QParam q,
                                    const McSettings& mc);

struct ConvolutieReport {
    Word start;
    Word cylinder;
    double lhs;
    double lhs_stderr;
    double rhs;
    double rhs_stderr;
    double combined_stderr;
    std::size_t unresolved;
    std::size_t samples;
    std::size_t alternating_tails; ///< samples whose ratio used the alternating limit
};

/// tail_extra: letters resolved past the longest indicator prefix to fix the
/// ratio's stabilizing head.
ConvolutieReport convolutie_check(const Word& x, const Word& cylinder, const ProbMeasure& mu, QParam q,
                                  const McSettings& mc, std::size_t tail_extra = 8);

/// The ratio factor of f_k at a boundary point with known prefix y: the limit
/// of dim_q(z t)/dim_q(w t) along the tail t following w in y.
double boundary_ratio(const Word& z, const Word& w, const std::string& y, QParam q, bool* alternating = nullptr);

struct AtomScanReport {
    Letter letter;
    std::vector<HittingEstimate> masses; ///< alternating prefixes, one per depth
    bool non_increasing;
    std::size_t support_depth;
    std::vector<Word> empty_cylinders; ///< depth <= support_depth cylinders with no hits
    std::size_t unresolved;
    std::size_t samples;
};

AtomScanReport atom_scan(Letter letter, const std::vector<std::size_t>& depths, const ProbMeasure& mu, QParam q,
                         const McSettings& mc, std::size_t support_depth = 4);

} // namespace freewalk
