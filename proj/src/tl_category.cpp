#include "freewalk/tl_category.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include <unsupported/Eigen/KroneckerProduct>

#include "freewalk/errors.hpp"
#include "freewalk/rng.hpp"

namespace freewalk {

namespace {

std::size_t pow2(std::size_t n) { return std::size_t{1} << n; }

double qint(std::size_t n, QParam q) { return q_int(n, q).linear; }

// E = δ t t* on the last two strands of an m-strand vector.
Eigen::VectorXd apply_last_generator(const Eigen::VectorXd& v, const PairVector& t, double delta)
{
    Eigen::VectorXd out(v.size());
    const Eigen::Index blocks = v.size() / 4;
    for (Eigen::Index l = 0; l < blocks; ++l) {
        double c = 0.0;
        for (int ij = 0; ij < 4; ++ij)
            c += t[ij] * v(4 * l + ij);
        for (int ij = 0; ij < 4; ++ij)
            out(4 * l + ij) = delta * t[ij] * c;
    }
    return out;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v)
{
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(arg)) * (1.0 + 1e-12))
            arg = i;
    if (v(arg) < 0)
        v = -v;
}

Eigen::MatrixXd build_run_basis(std::size_t m, QParam q)
{
    if (m == 0)
        return Eigen::MatrixXd::Ones(1, 1);
    if (m == 1)
        return Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd& prev = *run_basis(m - 1, q);
    const auto cups = build_cups(q);
    const double delta = q.value() + 1.0 / q.value();
    const double coef = qint(m - 1, q) / qint(m, q);
    Eigen::MatrixXd out(pow2(m), m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        // columns of prev ⊗ I_2 with k copies of e2 in total
        std::vector<Eigen::VectorXd> cols;
        if (k <= m - 1)
            cols.push_back(Eigen::kroneckerProduct(prev.col(static_cast<Eigen::Index>(k)), Eigen::Vector2d(1, 0)));
        if (k >= 1)
            cols.push_back(
                Eigen::kroneckerProduct(prev.col(static_cast<Eigen::Index>(k - 1)), Eigen::Vector2d(0, 1)));
        const auto d = static_cast<Eigen::Index>(cols.size());
        Eigen::MatrixXd c(pow2(m), d);
        for (Eigen::Index i = 0; i < d; ++i)
            c.col(i) = cols[static_cast<std::size_t>(i)];
        Eigen::MatrixXd ec(pow2(m), d);
        for (Eigen::Index i = 0; i < d; ++i)
            ec.col(i) = apply_last_generator(c.col(i), cups.t, delta);
        const Eigen::MatrixXd sub = Eigen::MatrixXd::Identity(d, d) - coef * (c.transpose() * ec);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < d; ++i)
            if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0))
                best = i;
        if (std::abs(es.eigenvalues()(best) - 1.0) > 1e-8)
            throw numerical_error("Wenzl recursion lost the unit eigenvalue at m = " + std::to_string(m));
        Eigen::VectorXd col = c * es.eigenvectors().col(best);
        col.normalize();
        fix_sign(col);
        out.col(static_cast<Eigen::Index>(k)) = col;
    }
    return out;
}

template <class Key, class Value>
class Cache {
public:
    template <class Make>
    std::shared_ptr<const Value> get(const Key& key, Make make)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = map_.find(key); it != map_.end())
                return it->second;
        }
        auto value = std::make_shared<const Value>(make());
        std::lock_guard lock(mutex_);
        return map_.emplace(key, std::move(value)).first->second;
    }

private:
    std::mutex mutex_;
    std::map<Key, std::shared_ptr<const Value>> map_;
};

const FusionTerm& find_term(const std::vector<FusionTerm>& terms, const Word& x, const Word& y, const Word& z)
{
    for (const auto& t : terms)
        if (t.summand == z)
            return t;
    throw std::domain_error("\"" + z.display() + "\" is not a summand of " + x.display() + " ⊗ " + y.display());
}

} // namespace

CupPair build_cups(QParam q)
{
    const double s = std::sqrt(q.value() + 1.0 / q.value());
    const PairVector t{0.0, std::sqrt(q.value()) / s, 1.0 / (std::sqrt(q.value()) * s), 0.0};
    return {t, t};
}

std::shared_ptr<const Eigen::MatrixXd> run_basis(std::size_t m, QParam q)
{
    static Cache<std::pair<std::size_t, double>, Eigen::MatrixXd> cache;
    return cache.get({m, q.value()}, [&] { return build_run_basis(m, q); });
}

Eigen::VectorXd run_weights(std::size_t m, QParam q)
{
    Eigen::VectorXd w(m + 1);
    for (std::size_t k = 0; k <= m; ++k)
        w(static_cast<Eigen::Index>(k)) = std::pow(q.value(), static_cast<double>(m) - 2.0 * static_cast<double>(k));
    return w;
}

TLMorphism jones_wenzl(std::size_t n, QParam q, std::size_t strand_budget)
{
    if (n == 0)
        throw std::invalid_argument("Jones–Wenzl projection needs n >= 1");
    if (n > strand_budget)
        throw resource_error("Jones–Wenzl projection on " + std::to_string(n) + " strands exceeds budget "
                             + std::to_string(strand_budget));
    if (n == 1)
        return TLMorphism::identity(1);
    return TLMorphism::from_factor(n, ProjectFactor{0, run_basis(n, q)});
}

Eigen::MatrixXd jones_wenzl_dense(std::size_t n, QParam q)
{
    if (n == 0 || n > 10)
        throw resource_error("dense Jones–Wenzl projection supported for 1 <= n <= 10");
    Eigen::MatrixXd f = Eigen::MatrixXd::Identity(2, 2);
    for (std::size_t k = 1; k < n; ++k) {
        const Eigen::MatrixXd g = Eigen::kroneckerProduct(f, Eigen::Matrix2d::Identity());
        const Eigen::MatrixXd e = tl_generator(k + 1, k - 1, q).dense<double>();
        f = g - (qint(k, q) / qint(k + 1, q)) * (g * e * g);
    }
    return f;
}

TLMorphism cup(std::size_t n, std::size_t position, QParam q)
{
    return TLMorphism::from_factor(n, CupFactor{position, build_cups(q).t});
}

TLMorphism cap(std::size_t n, std::size_t position, QParam q)
{
    return TLMorphism::from_factor(n, CapFactor{position, build_cups(q).t});
}

TLMorphism tl_generator(std::size_t n, std::size_t i, QParam q)
{
    if (i + 2 > n)
        throw std::invalid_argument("generator index out of range");
    return (q.value() + 1.0 / q.value()) * cup(n - 2, i, q).after(cap(n, i, q));
}

WordSpace::WordSpace(Word w, QParam q)
    : word_(std::move(w)), q_(q), dim_(dim_min(word_)), projection_(TLMorphism::identity(word_.size()))
{
    weights_ = Eigen::VectorXd::Ones(1);
    std::size_t offset = 0;
    for (std::size_t len : run_lengths(word_)) {
        if (len >= 2)
            projection_ = TLMorphism::from_factor(word_.size(), ProjectFactor{offset, run_basis(len, q)})
                              .after(projection_);
        weights_ = Eigen::kroneckerProduct(weights_, run_weights(len, q)).eval();
        offset += len;
    }
}

Eigen::MatrixXd WordSpace::basis() const
{
    Eigen::MatrixXd b = Eigen::MatrixXd::Ones(1, 1);
    for (std::size_t len : run_lengths(word_))
        b = Eigen::kroneckerProduct(b, *run_basis(len, q_)).eval();
    return b;
}

FusionIsometry fusion_isometry(const Word& x, const Word& y, const Word& z, QParam q, Phase phase)
{
    const auto terms = fuse(x, y);
    const Word r = find_term(terms, x, y, z).cancelled;
    const std::size_t x0 = x.size() - r.size();
    const WordSpace sz(z, q);
    const auto cups = build_cups(q);
    TLMorphism w = sz.projection();
    for (std::size_t i = 0; i < r.size(); ++i)
        w = TLMorphism::from_factor(z.size() + 2 * i, CupFactor{x0 + i, cups.t}).after(w);
    w = tensor(WordSpace(x, q).projection(), WordSpace(y, q).projection()).after(w);

    // W*W must be scalar on H_z; test it on a generic vector of H_z
    CounterRng rng(0x5eed, fnv1a(x.str() + "|" + y.str() + "|" + z.str()));
    Eigen::VectorXd u(static_cast<Eigen::Index>(pow2(z.size())));
    for (auto& c : u)
        c = rng.uniform() - 0.5;
    u = sz.projection().apply<double>(u);
    const double uu = u.squaredNorm();
    const Eigen::VectorXd wu = w.apply<double>(u);
    const double c = wu.squaredNorm() / uu;
    if (!(c > 1e-16))
        throw numerical_error("fusion isometry W vanishes for " + x.display() + " ⊗ " + y.display() + " -> "
                              + z.display());
    const Eigen::VectorXd wwu = w.adjoint().apply<double>(wu);
    if ((wwu - c * u).norm() > 1e-10 * c * std::sqrt(uu))
        throw numerical_error("W*W is not scalar for " + x.display() + " ⊗ " + y.display() + " -> "
                              + z.display());

    double scale = 1.0 / std::sqrt(c);
    if (phase == Phase::canonical) {
        const Eigen::MatrixXd m = w.apply_columns<double>(sz.basis());
        double best = 0.0, value = 1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (std::abs(m(i, j)) > best * (1.0 + 1e-12)) {
                    best = std::abs(m(i, j));
                    value = m(i, j);
                }
        if (value < 0)
            scale = -scale;
    }
    w *= scale;
    return {x, y, z, r, std::move(w), c};
}

TLMorphism fusion_projection(const Word& x, const Word& y, const Word& z, QParam q)
{
    const auto v = fusion_isometry(x, y, z, q, Phase::construction);
    return v.map.after(v.map.adjoint());
}

namespace {

Eigen::MatrixXcd local_isometry(const Word& xm, const Word& ym, const Word& zm, QParam q)
{
    static Cache<std::tuple<std::string, std::string, std::string, double>, Eigen::MatrixXcd> cache;
    return *cache.get({xm.str(), ym.str(), zm.str(), q.value()}, [&]() -> Eigen::MatrixXcd {
        const auto v = fusion_isometry(xm, ym, zm, q, Phase::construction);
        const Eigen::MatrixXd cols = v.map.apply_columns<double>(WordSpace(zm, q).basis());
        const Eigen::MatrixXd bx = WordSpace(xm, q).basis();
        const Eigen::MatrixXd by = WordSpace(ym, q).basis();
        const auto ny = static_cast<Eigen::Index>(pow2(ym.size()));
        const auto nx = static_cast<Eigen::Index>(pow2(xm.size()));
        Eigen::MatrixXcd local(bx.cols() * by.cols(), cols.cols());
        for (Eigen::Index c = 0; c < cols.cols(); ++c) {
            Eigen::Map<const Eigen::MatrixXd> wm(cols.col(c).data(), ny, nx);
            const Eigen::MatrixXd coef = bx.transpose() * wm.transpose() * by;
            for (Eigen::Index a = 0; a < coef.rows(); ++a)
                for (Eigen::Index b = 0; b < coef.cols(); ++b)
                    local(a * coef.cols() + b, c) = coef(a, b);
        }
        return local;
    });
}

} // namespace

std::shared_ptr<const Channel> channel(const Word& x, const Word& y, const Word& z, QParam q)
{
    static Cache<std::tuple<std::string, std::string, std::string, double>, Channel> cache;
    return cache.get({x.str(), y.str(), z.str(), q.value()}, [&] {
        const auto terms = fuse(x, y);
        const Word r = find_term(terms, x, y, z).cancelled;
        const std::size_t k = r.size();
        const std::size_t x0 = x.size() - k;
        std::size_t left = 0;
        for (std::size_t j = 1; j + 1 <= x0; ++j)
            if (x[j - 1] == x[j])
                left = j;
        std::size_t right = y.size();
        for (std::size_t j = y.size(); j-- > k + 1;)
            if (y[j - 1] == y[j])
                right = j;
        const Word xl = x.sub(0, left), xm = x.sub(left), ym = y.sub(0, right), yr = y.sub(right);
        const Word zm = x.sub(left, x0 - left) + y.sub(k, right - k);

        Channel ch;
        ch.x = x;
        ch.y = y;
        ch.z = z;
        ch.cancelled = r;
        ch.dim_left = dim_min(xl);
        ch.dim_right = dim_min(yr);
        ch.dim_xm = dim_min(xm);
        ch.dim_ym = dim_min(ym);
        ch.dim_zm = dim_min(zm);
        ch.local = local_isometry(xm, ym, zm, q);
        ch.weights_ym = WordSpace(ym, q).q_weights();
        ch.weights_right = WordSpace(yr, q).q_weights();
        ch.dim_q_y = dim_q(y, q).linear;
        return ch;
    });
}

namespace {

using Eigen::Index;
using Eigen::seqN;

Index idx(std::size_t n) { return static_cast<Index>(n); }

// Σ_s w_s b[(i·d + s), (j·d + s)]: weighted trace over the fastest index.
Eigen::MatrixXcd trace_fast_index(const Eigen::MatrixXcd& b, const Eigen::VectorXd& w)
{
    const Index d = w.size();
    const Index n = b.rows() / d;
    if (d == 1)
        return w(0) * b;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (Index s = 0; s < d; ++s)
        out += w(s) * b(seqN(s, n, d), seqN(s, n, d));
    return out;
}

// a ⊗ I_d
Eigen::MatrixXcd kron_identity(const Eigen::MatrixXcd& a, Index d)
{
    if (d == 1)
        return a;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.rows() * d, a.cols() * d);
    for (Index s = 0; s < d; ++s)
        out(seqN(s, a.rows(), d), seqN(s, a.cols(), d)) = a;
    return out;
}

} // namespace

Eigen::MatrixXcd channel_slice(const Channel& ch, const Eigen::MatrixXcd& b)
{
    if (b.rows() != idx(ch.dim_z()) || b.cols() != idx(ch.dim_z()))
        throw std::invalid_argument("block does not act on H_" + ch.z.display());
    const Eigen::MatrixXcd br = trace_fast_index(b, ch.weights_right);
    const Index dl = idx(ch.dim_left), dz = idx(ch.dim_zm), dxy = ch.local.rows();
    Eigen::MatrixXcd t1(dl * dz, dl * dxy);
    for (Index j = 0; j < dl; ++j)
        t1.middleCols(j * dxy, dxy).noalias() = br.middleCols(j * dz, dz) * ch.local.transpose();
    Eigen::MatrixXcd t2(dl * dxy, dl * dxy);
    for (Index i = 0; i < dl; ++i)
        t2.middleRows(i * dxy, dxy).noalias() = ch.local * t1.middleRows(i * dz, dz);
    return trace_fast_index(t2, ch.weights_ym) / ch.dim_q_y;
}

Eigen::MatrixXcd channel_compress(const Channel& ch, const Eigen::MatrixXcd& a)
{
    if (a.rows() != idx(ch.dim_x()) || a.cols() != idx(ch.dim_x()))
        throw std::invalid_argument("operator does not act on H_" + ch.x.display());
    const Eigen::MatrixXcd ay = kron_identity(a, idx(ch.dim_ym));
    const Index dl = idx(ch.dim_left), dz = idx(ch.dim_zm), dxy = ch.local.rows();
    Eigen::MatrixXcd s1(dl * dxy, dl * dz);
    for (Index j = 0; j < dl; ++j)
        s1.middleCols(j * dz, dz).noalias() = ay.middleCols(j * dxy, dxy) * ch.local;
    Eigen::MatrixXcd c(dl * dz, dl * dz);
    for (Index i = 0; i < dl; ++i)
        c.middleRows(i * dz, dz).noalias() = ch.local.adjoint() * s1.middleRows(i * dxy, dxy);
    return kron_identity(c, idx(ch.dim_right));
}

Eigen::MatrixXcd channel_matrix(const Channel& ch)
{
    const Eigen::MatrixXcd mid
        = Eigen::kroneckerProduct(ch.local, Eigen::MatrixXcd::Identity(idx(ch.dim_right), idx(ch.dim_right)));
    return Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(idx(ch.dim_left), idx(ch.dim_left)), mid);
}

Eigen::MatrixXcd channel_conjugate(const Channel& ch, const Eigen::MatrixXcd& b)
{
    const Eigen::MatrixXcd v = channel_matrix(ch);
    return v * b * v.adjoint();
}

Eigen::MatrixXcd cp_psi_map(const Word& x, const Word& y, const Eigen::MatrixXcd& a, QParam q)
{
    return channel_compress(*channel(x, y, x + y, q), a);
}

cplx state_psi(const Word& x, const Eigen::MatrixXcd& a, QParam q)
{
    const WordSpace s(x, q);
    if (a.rows() != idx(s.dim()) || a.cols() != idx(s.dim()))
        throw std::invalid_argument("operator does not act on H_" + x.display());
    return (a.diagonal().array() * s.q_weights().array()).sum() / s.trace_q();
}

Eigen::MatrixXcd partial_state_right(const Word& x, const Word& y, const Eigen::MatrixXcd& b, QParam q)
{
    const WordSpace sy(y, q);
    if (b.rows() != idx(dim_min(x) * sy.dim()))
        throw std::invalid_argument("operator does not act on H_" + x.display() + " ⊗ H_" + y.display());
    return trace_fast_index(b, sy.q_weights()) / sy.trace_q();
}

} // namespace freewalk
