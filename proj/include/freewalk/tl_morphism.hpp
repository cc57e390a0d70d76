#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace freewalk {

using cplx = std::complex<double>;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Coefficients of a vector in V ⊗ V, index 2i + j for e_i ⊗ e_j.
using PairVector = std::array<double, 4>;

// Elementary factors of a pipeline. Strand 0 is the most significant bit of
// the ambient index.

/// n -> n+2 strands: inserts `t` on strands (position, position+1).
struct CupFactor {
    std::size_t position;
    PairVector t;
};
/// n+2 -> n strands: contracts strands (position, position+1) against t*.
struct CapFactor {
    std::size_t position;
    PairVector t;
};
/// B B^T on strands [offset, offset + log2(rows of B)); B has orthonormal columns.
struct ProjectFactor {
    std::size_t offset;
    std::shared_ptr<const Eigen::MatrixXd> basis;
};
/// A dense operator on strands [offset, offset + width).
struct LocalFactor {
    std::size_t offset;
    std::size_t width;
    std::shared_ptr<const Eigen::MatrixXcd> op;
};

using Factor = std::variant<CupFactor, CapFactor, ProjectFactor, LocalFactor>;

/// Linear map between tensor powers of C^2, held as a sum of scaled
/// factor pipelines and applied without forming a matrix.
class TLMorphism {
public:
    static TLMorphism identity(std::size_t strands);
    static TLMorphism zero(std::size_t source, std::size_t target);
    static TLMorphism from_factor(std::size_t source, Factor f);

    std::size_t source() const noexcept { return source_; }
    std::size_t target() const noexcept { return target_; }
    std::size_t term_count() const noexcept { return terms_.size(); }

    /// this ∘ before
    TLMorphism after(const TLMorphism& before) const;
    TLMorphism adjoint() const;
    /// id_left ⊗ this ⊗ id_right
    TLMorphism padded(std::size_t left, std::size_t right) const;

    TLMorphism& operator+=(const TLMorphism& rhs);
    TLMorphism& operator*=(cplx c);
    friend TLMorphism operator+(TLMorphism a, const TLMorphism& b) { return a += b; }
    friend TLMorphism operator-(TLMorphism a, const TLMorphism& b)
    {
        TLMorphism nb = b;
        nb *= -1.0;
        return a += nb;
    }
    friend TLMorphism operator*(cplx c, TLMorphism a) { return a *= c; }

    /// Applying with a real scalar requires real coefficients and factors.
    template <class Scalar>
    Vec<Scalar> apply(const Vec<Scalar>& v) const;
    /// Column-wise application.
    template <class Scalar>
    Mat<Scalar> apply_columns(const Mat<Scalar>& m) const;
    /// Throws resource_error when 2^target · 2^source exceeds 2^20.
    template <class Scalar>
    Mat<Scalar> dense() const;

    bool is_real() const;

private:
    struct Term {
        cplx coefficient;
        std::vector<Factor> factors;
    };
    TLMorphism(std::size_t source, std::size_t target) : source_(source), target_(target) {}

    std::size_t source_;
    std::size_t target_;
    std::vector<Term> terms_;
};

/// id_left ⊗ f ⊗ id_right for a morphism given on its own strands.
inline TLMorphism tensor_identity(std::size_t left, const TLMorphism& f, std::size_t right)
{
    return f.padded(left, right);
}

/// f ⊗ g.
TLMorphism tensor(const TLMorphism& f, const TLMorphism& g);

} // namespace freewalk
