#pragma once

#include <cstdint>
#include <optional>

#include "freewalk/tl_category.hpp"

namespace freewalk {

struct NormOptions {
    double tolerance = 1e-6;
    std::size_t max_iterations = 10000;
    /// Dense eigensolver when power iteration stalls and the source has at
    /// most this many strands.
    std::size_t dense_fallback_strands = 10;
    std::uint64_t seed = 0x6e6f726d;
};

struct NormResult {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool dense = false;
};

/// ‖T‖ by power iteration on T*T, applied matrix-free.
NormResult operator_norm(const TLMorphism& t, const NormOptions& opts = {});

struct PhaseDistance {
    double value;
    double phase;              ///< minimizing argument of e^{iθ}
    double bracket_lo, bracket_hi;
    /// sqrt(2 - 2|c|) from A*B = c on the source; valid for isometries A, B
    /// between irreducibles
    double closed_form;
};

/// inf_θ ‖A - e^{iθ} B‖: 64-point grid, then golden-section refinement
/// inside the bracket around the best grid point. `source_projection`
/// restricts the probe vector for the closed form.
PhaseDistance phase_distance(const TLMorphism& a, const TLMorphism& b, const TLMorphism& source_projection,
                             const NormOptions& opts = {});

struct EstimateOptions {
    std::size_t strand_budget = default_strand_budget;
    /// Multiplies every fusion isometry by a seeded random phase.
    std::optional<std::uint64_t> gauge_seed;
    NormOptions norm;
};

struct EstimateReport {
    Word x, y, z, r;
    double q;
    double lhs1, lhs2, lhs_variant;
    double q_pow; ///< q^{|y|}
    NormResult norm1, norm2;
    PhaseDistance variant;
};

/// T1, T2 (the operators inside the two norms) and the pair A, B whose
/// phase distance is the variant, all on ambient strands.
struct EstimateOperators {
    TLMorphism t1, t2, a, b;
};

/// Throws resource_error beyond the strand budget.
EstimateOperators estimate_operators(const Word& x, const Word& y, const Word& z, const Word& r, QParam q,
                                     const EstimateOptions& opts = {});

/// The two approximate intertwining norms and the phase-distance variant
/// for one (x, y, z, r).
EstimateReport approx_estimates(const Word& x, const Word& y, const Word& z, const Word& r, QParam q,
                                const EstimateOptions& opts = {});

/// Total ambient strands the estimates for (x, y, z, r) need.
inline std::size_t estimate_strands(const Word& x, const Word& y, const Word& z, const Word& r)
{
    return x.size() + y.size() + z.size() + 2 * r.size();
}

} // namespace freewalk
