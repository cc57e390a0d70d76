#include "freewalk/tl_morphism.hpp"

#include <stdexcept>
#include <string>

#include "freewalk/errors.hpp"

namespace freewalk {

namespace {

std::size_t pow2(std::size_t n) { return std::size_t{1} << n; }

std::size_t strands_after(const Factor& f, std::size_t n)
{
    if (std::holds_alternative<CupFactor>(f))
        return n + 2;
    if (std::holds_alternative<CapFactor>(f)) {
        if (n < 2)
            throw std::invalid_argument("cap needs at least two strands");
        return n - 2;
    }
    return n;
}

Factor shifted(const Factor& f, std::size_t by)
{
    return std::visit(
        [by](auto g) -> Factor {
            if constexpr (std::is_same_v<decltype(g), CupFactor> || std::is_same_v<decltype(g), CapFactor>)
                g.position += by;
            else
                g.offset += by;
            return g;
        },
        f);
}

Factor adjoint_factor(const Factor& f)
{
    if (const auto* c = std::get_if<CupFactor>(&f))
        return CapFactor{c->position, c->t};
    if (const auto* c = std::get_if<CapFactor>(&f))
        return CupFactor{c->position, c->t};
    if (const auto* l = std::get_if<LocalFactor>(&f))
        return LocalFactor{l->offset, l->width, std::make_shared<const Eigen::MatrixXcd>(l->op->adjoint())};
    return f;
}

template <class Scalar>
Scalar real_or_throw(cplx c)
{
    if constexpr (std::is_same_v<Scalar, double>) {
        if (c.imag() != 0.0)
            throw std::domain_error("complex coefficient applied to a real vector");
        return c.real();
    } else {
        return c;
    }
}

// Right-multiplies each (R x M) slice Y_l of v by op^T, where the slice
// holds strands [offset, offset+m) as its column index.
template <class Scalar, class Op>
void apply_on_strands(Vec<Scalar>& v, std::size_t n, std::size_t offset, std::size_t m, const Op& op)
{
    const std::size_t M = pow2(m);
    const std::size_t R = pow2(n - offset - m);
    const std::size_t L = pow2(offset);
    Mat<Scalar> tmp;
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::Map<Mat<Scalar>> y(v.data() + l * M * R, static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(M));
        op(y, tmp);
    }
}

template <class Scalar>
Vec<Scalar> apply_factor(const Factor& f, const Vec<Scalar>& v, std::size_t n)
{
    if (const auto* c = std::get_if<CupFactor>(&f)) {
        if (c->position > n)
            throw std::invalid_argument("cup position out of range");
        const std::size_t L = pow2(c->position), R = pow2(n - c->position);
        Vec<Scalar> out(static_cast<Eigen::Index>(4 * L * R));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t ij = 0; ij < 4; ++ij)
                out.segment(static_cast<Eigen::Index>((l * 4 + ij) * R), static_cast<Eigen::Index>(R))
                    = c->t[ij] * v.segment(static_cast<Eigen::Index>(l * R), static_cast<Eigen::Index>(R));
        return out;
    }
    if (const auto* c = std::get_if<CapFactor>(&f)) {
        if (c->position + 2 > n)
            throw std::invalid_argument("cap position out of range");
        const std::size_t L = pow2(c->position), R = pow2(n - 2 - c->position);
        Vec<Scalar> out = Vec<Scalar>::Zero(static_cast<Eigen::Index>(L * R));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t ij = 0; ij < 4; ++ij)
                if (c->t[ij] != 0.0)
                    out.segment(static_cast<Eigen::Index>(l * R), static_cast<Eigen::Index>(R))
                        += c->t[ij]
                           * v.segment(static_cast<Eigen::Index>((l * 4 + ij) * R), static_cast<Eigen::Index>(R));
        return out;
    }
    Vec<Scalar> out = v;
    if (const auto* p = std::get_if<ProjectFactor>(&f)) {
        const Eigen::MatrixXd& b = *p->basis;
        std::size_t m = 0;
        while (pow2(m) < static_cast<std::size_t>(b.rows()))
            ++m;
        if (p->offset + m > n)
            throw std::invalid_argument("projection strands out of range");
        const Mat<Scalar> bs = b.cast<Scalar>();
        apply_on_strands<Scalar>(out, n, p->offset, m, [&](auto& y, Mat<Scalar>& tmp) {
            tmp.noalias() = y * bs;
            y.noalias() = tmp * bs.transpose();
        });
        return out;
    }
    const auto& lf = std::get<LocalFactor>(f);
    if (lf.offset + lf.width > n)
        throw std::invalid_argument("local operator strands out of range");
    Mat<Scalar> op;
    if constexpr (std::is_same_v<Scalar, double>) {
        if (!lf.op->imag().isZero(0.0))
            throw std::domain_error("complex local operator applied to a real vector");
        op = lf.op->real();
    } else {
        op = *lf.op;
    }
    apply_on_strands<Scalar>(out, n, lf.offset, lf.width, [&](auto& y, Mat<Scalar>& tmp) {
        tmp.noalias() = y * op.transpose();
        y = tmp;
    });
    return out;
}

} // namespace

TLMorphism TLMorphism::identity(std::size_t strands)
{
    TLMorphism m(strands, strands);
    m.terms_.push_back({1.0, {}});
    return m;
}

TLMorphism TLMorphism::zero(std::size_t source, std::size_t target)
{
    return TLMorphism(source, target);
}

TLMorphism TLMorphism::from_factor(std::size_t source, Factor f)
{
    TLMorphism m(source, strands_after(f, source));
    m.terms_.push_back({1.0, {std::move(f)}});
    return m;
}

TLMorphism TLMorphism::after(const TLMorphism& before) const
{
    if (before.target_ != source_)
        throw std::invalid_argument("composition strand mismatch: " + std::to_string(before.target_) + " vs "
                                    + std::to_string(source_));
    TLMorphism out(before.source_, target_);
    for (const auto& a : terms_)
        for (const auto& b : before.terms_) {
            Term t{a.coefficient * b.coefficient, b.factors};
            t.factors.insert(t.factors.end(), a.factors.begin(), a.factors.end());
            out.terms_.push_back(std::move(t));
        }
    return out;
}

TLMorphism TLMorphism::adjoint() const
{
    TLMorphism out(target_, source_);
    for (const auto& a : terms_) {
        Term t{std::conj(a.coefficient), {}};
        for (auto it = a.factors.rbegin(); it != a.factors.rend(); ++it)
            t.factors.push_back(adjoint_factor(*it));
        out.terms_.push_back(std::move(t));
    }
    return out;
}

TLMorphism TLMorphism::padded(std::size_t left, std::size_t right) const
{
    TLMorphism out(source_ + left + right, target_ + left + right);
    for (const auto& a : terms_) {
        Term t{a.coefficient, {}};
        for (const auto& f : a.factors)
            t.factors.push_back(shifted(f, left));
        out.terms_.push_back(std::move(t));
    }
    return out;
}

TLMorphism& TLMorphism::operator+=(const TLMorphism& rhs)
{
    if (rhs.source_ != source_ || rhs.target_ != target_)
        throw std::invalid_argument("sum of morphisms with different shapes");
    terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
    return *this;
}

TLMorphism& TLMorphism::operator*=(cplx c)
{
    for (auto& t : terms_)
        t.coefficient *= c;
    return *this;
}

bool TLMorphism::is_real() const
{
    for (const auto& t : terms_) {
        if (t.coefficient.imag() != 0.0)
            return false;
        for (const auto& f : t.factors)
            if (const auto* l = std::get_if<LocalFactor>(&f); l && !l->op->imag().isZero(0.0))
                return false;
    }
    return true;
}

template <class Scalar>
Vec<Scalar> TLMorphism::apply(const Vec<Scalar>& v) const
{
    if (static_cast<std::size_t>(v.size()) != pow2(source_))
        throw std::invalid_argument("vector length does not match 2^" + std::to_string(source_));
    Vec<Scalar> out = Vec<Scalar>::Zero(static_cast<Eigen::Index>(pow2(target_)));
    for (const auto& t : terms_) {
        Vec<Scalar> w = v;
        std::size_t n = source_;
        for (const auto& f : t.factors) {
            w = apply_factor<Scalar>(f, w, n);
            n = strands_after(f, n);
        }
        out += real_or_throw<Scalar>(t.coefficient) * w;
    }
    return out;
}

template <class Scalar>
Mat<Scalar> TLMorphism::apply_columns(const Mat<Scalar>& m) const
{
    Mat<Scalar> out(static_cast<Eigen::Index>(pow2(target_)), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        out.col(j) = apply<Scalar>(m.col(j));
    return out;
}

template <class Scalar>
Mat<Scalar> TLMorphism::dense() const
{
    if (source_ + target_ > 20)
        throw resource_error("dense form of a " + std::to_string(source_) + " -> " + std::to_string(target_)
                             + " strand morphism exceeds 2^20 entries");
    return apply_columns<Scalar>(Mat<Scalar>::Identity(static_cast<Eigen::Index>(pow2(source_)),
                                                       static_cast<Eigen::Index>(pow2(source_))));
}

template Vec<double> TLMorphism::apply<double>(const Vec<double>&) const;
template Vec<cplx> TLMorphism::apply<cplx>(const Vec<cplx>&) const;
template Mat<double> TLMorphism::apply_columns<double>(const Mat<double>&) const;
template Mat<cplx> TLMorphism::apply_columns<cplx>(const Mat<cplx>&) const;
template Mat<double> TLMorphism::dense<double>() const;
template Mat<cplx> TLMorphism::dense<cplx>() const;

TLMorphism tensor(const TLMorphism& f, const TLMorphism& g)
{
    return f.padded(0, g.target()).after(g.padded(f.source(), 0));
}

} // namespace freewalk
