#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "freewalk/boundary_mc.hpp"
#include "freewalk/markov_walk.hpp"
#include "freewalk/tl_category.hpp"

namespace freewalk {

/// An element of ⊕_x L(H_x) known on finitely many blocks. Words outside
/// `blocks` are filled by `beyond` when set and are unknown otherwise.
struct BlockElement {
    std::map<Word, Eigen::MatrixXcd> blocks;
    /// Weight of dropped channels behind each block; absent means exact.
    std::map<Word, double> leakage;
    std::function<Eigen::MatrixXcd(const Word&)> beyond;

    std::optional<Eigen::MatrixXcd> block(const Word& w) const;
    double leak(const Word& w) const;
    double max_leak() const;

    static BlockElement identity(std::size_t radius);
    /// f(w)·1 on every block up to the radius.
    static BlockElement central(const std::function<double(const Word&)>& f, std::size_t radius);
    static BlockElement indicator(const Word& w, std::size_t radius);
};

BlockElement adjoint(const BlockElement& a);
/// Blockwise product on the common known support.
BlockElement operator*(const BlockElement& a, const BlockElement& b);

struct TruncationPolicy {
    std::size_t radius = 6;
    /// Compute only these blocks; every block up to the radius otherwise.
    std::optional<std::set<Word>> targets;
    std::size_t workers = 1;
};

/// V(x⊗y,z) b V(x⊗y,z)* on H_x⊗H_y.
Eigen::MatrixXcd comult_cutdown(const Word& x, const Word& y, const Word& z, const Eigen::MatrixXcd& b, QParam q);

/// (P_μ a)p_x = Σ_y μ(y) Σ_z (id⊗ψ_y)(V (a p_z) V*). Channels through an
/// unknown block are dropped and their transition weight recorded.
BlockElement markov_apply(const BlockElement& a, const ProbMeasure& mu, QParam q, const TruncationPolicy& trunc = {});

/// ψ_{∞,x0}(A): ψ_{y,x0}(A) on the cone above x0, zero elsewhere; blocks up
/// to the radius are stored and longer ones computed on demand.
BlockElement boundary_element(const Word& x0, const Eigen::MatrixXcd& a, std::size_t radius, QParam q);

struct DirichletRow {
    std::size_t length;
    double value; ///< max over cone words x of this length of sup_y ‖…‖
    Word worst_x, worst_y;
    double two_form_gap; ///< largest deviation between the two expansions
    std::size_t words;
};

/// sup_{y∈Y} ‖(id⊗ψ_y)Δ̂(a)p_x − a p_x‖ for a = boundary_element(x0, A),
/// maximized over cone words x of each requested length.
std::vector<DirichletRow> dirichlet_profile(const Word& x0, const Eigen::MatrixXcd& a, const std::vector<Word>& ys,
                                            const std::vector<std::size_t>& lengths, QParam q,
                                            std::size_t strand_budget = default_strand_budget,
                                            bool two_form = true);

struct PoissonReport {
    BlockElement value;  ///< P_μ^n(a) on the targets
    /// increments[k][w] = ‖P^{k+1}(a)p_w − P^k(a)p_w‖ for each target w
    std::vector<std::map<Word, double>> increments;
    double final_increment;
    double max_leak;
    bool leak_ok;
    std::string diagnostic;
};

/// P_μ^n(a) on the targets of `trunc` (every block up to its radius when
/// unset), evaluating each iterate only where later iterates need it.
PoissonReport poisson_truncated(const BlockElement& a, std::size_t n, const ProbMeasure& mu, QParam q,
                                const TruncationPolicy& trunc = {}, double leak_threshold = 1e-12);

/// Bytes held by the largest iterate poisson_truncated would build for these
/// targets and n (the input element itself not counted).
double poisson_block_bytes(const std::set<Word>& targets, std::size_t n, const ProbMeasure& mu);

struct OmegaReport {
    Word x0;
    cplx lhs; ///< ε-block of P_μ^n(a)
    cplx psi; ///< ψ_{x0}(A)
    double nu, nu_stderr;
    std::size_t unresolved;
    cplx rhs;
    double final_increment;
    std::size_t iterations;
    double tolerance;   ///< 3σ|ψ| + 1e-3
    bool converged;     ///< final increment below 1e-4
    bool pass;
    std::string diagnostic;
};

/// Iterates from n = min_iterations upward until the ε-block increment drops
/// below 1e-4. Stops unconverged when the next n would need more than
/// memory_budget bytes of blocks.
OmegaReport omega_infinity_check(const Word& x0, const Eigen::MatrixXcd& a, const ProbMeasure& mu, QParam q,
                                 const McSettings& mc, std::size_t min_iterations = 10, double tolerance_scale = 1.0,
                                 double memory_budget = 2.5e9);

} // namespace freewalk
