#pragma once

#include <memory>

#include "freewalk/qdim.hpp"
#include "freewalk/tl_morphism.hpp"
#include "freewalk/word.hpp"

namespace freewalk {

/// Normalized cup vectors with (t*⊗1)(1⊗s) = (q+1/q)^{-1}. In this model
/// s = t = (q^{1/2} e1⊗e2 + q^{-1/2} e2⊗e1) / sqrt(q + 1/q).
struct CupPair {
    PairVector t;
    PairVector s;
};

CupPair build_cups(QParam q);

inline constexpr std::size_t default_strand_budget = 14;

/// Orthonormal basis (2^m x (m+1)) of the range of the Jones–Wenzl
/// projection on m strands. Column k has k copies of e2 and Q-weight
/// q^{m-2k}. Cached per (m, q).
std::shared_ptr<const Eigen::MatrixXd> run_basis(std::size_t m, QParam q);
Eigen::VectorXd run_weights(std::size_t m, QParam q);

TLMorphism jones_wenzl(std::size_t n, QParam q, std::size_t strand_budget = default_strand_budget);
/// Dense f_n from f_{k+1} = f_k⊗1 - ([k]/[k+1]) (f_k⊗1) E_k (f_k⊗1).
Eigen::MatrixXd jones_wenzl_dense(std::size_t n, QParam q);
/// E_i = (q+1/q) t t* on strands (i, i+1) of n.
TLMorphism tl_generator(std::size_t n, std::size_t i, QParam q);
TLMorphism cup(std::size_t n, std::size_t position, QParam q);
TLMorphism cap(std::size_t n, std::size_t position, QParam q);

/// H_w inside (C^2)^{⊗|w|}: the tensor product of Jones–Wenzl ranges over
/// the runs of w.
class WordSpace {
public:
    WordSpace(Word w, QParam q);

    const Word& word() const noexcept { return word_; }
    std::size_t strands() const noexcept { return word_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const TLMorphism& projection() const noexcept { return projection_; }
    /// Diagonal of Q_w in the run-product basis.
    const Eigen::VectorXd& q_weights() const noexcept { return weights_; }
    /// Ambient coordinates of the run-product basis, 2^|w| x dim.
    Eigen::MatrixXd basis() const;
    double trace_q() const { return weights_.sum(); }
    double trace_q_inverse() const { return weights_.cwiseInverse().sum(); }

private:
    Word word_;
    QParam q_;
    std::size_t dim_;
    TLMorphism projection_;
    Eigen::VectorXd weights_;
};

/// V(x⊗y, z) realized on ambient strands |z| -> |x|+|y|.
struct FusionIsometry {
    Word x, y, z, cancelled;
    TLMorphism map;
    double w_norm_sq; ///< W*W = w_norm_sq on H_z before normalization
};

enum class Phase { construction, canonical };

/// Throws std::domain_error when z is not a summand of x ⊗ y.
FusionIsometry fusion_isometry(const Word& x, const Word& y, const Word& z, QParam q,
                               Phase phase = Phase::canonical);

/// p^{x⊗y}_z = V V* on |x|+|y| strands.
TLMorphism fusion_projection(const Word& x, const Word& y, const Word& z, QParam q);

/// V(x⊗y,z) in word bases, factored as 1_{xL} ⊗ V(xM⊗yM, zM) ⊗ 1_{yR}:
/// only the runs touched by the cancellation enter the dense local part.
struct Channel {
    Word x, y, z, cancelled;
    std::size_t dim_left, dim_right;
    std::size_t dim_xm, dim_ym, dim_zm;
    Eigen::MatrixXcd local; ///< (dim_xm·dim_ym) x dim_zm isometry
    Eigen::VectorXd weights_ym;
    Eigen::VectorXd weights_right;
    double dim_q_y;

    std::size_t dim_x() const { return dim_left * dim_xm; }
    std::size_t dim_y() const { return dim_ym * dim_right; }
    std::size_t dim_z() const { return dim_left * dim_zm * dim_right; }
};

std::shared_ptr<const Channel> channel(const Word& x, const Word& y, const Word& z, QParam q);

/// (id⊗ψ_y)(V b V*) for b on H_z; result on H_x.
Eigen::MatrixXcd channel_slice(const Channel& ch, const Eigen::MatrixXcd& b);
/// V*(a⊗1_y)V for a on H_x; result on H_z.
Eigen::MatrixXcd channel_compress(const Channel& ch, const Eigen::MatrixXcd& a);
/// V b V* on H_x⊗H_y.
Eigen::MatrixXcd channel_conjugate(const Channel& ch, const Eigen::MatrixXcd& b);
/// The full isometry in word bases.
Eigen::MatrixXcd channel_matrix(const Channel& ch);

/// ψ_{xy,x}(A) = V(x⊗y,xy)*(A⊗1)V(x⊗y,xy).
Eigen::MatrixXcd cp_psi_map(const Word& x, const Word& y, const Eigen::MatrixXcd& a, QParam q);
/// ψ_x(A) = Tr(Q_x A)/Tr(Q_x).
cplx state_psi(const Word& x, const Eigen::MatrixXcd& a, QParam q);
/// Q_x-weighted partial trace over the y factor of an operator on H_x⊗H_y,
/// normalized by dim_q(y).
Eigen::MatrixXcd partial_state_right(const Word& x, const Word& y, const Eigen::MatrixXcd& b, QParam q);

} // namespace freewalk
