#include "freewalk/tl_estimates.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "freewalk/errors.hpp"
#include "freewalk/rng.hpp"

namespace freewalk {

namespace {

Eigen::VectorXcd random_vector(std::size_t strands, std::uint64_t seed, std::uint64_t stream)
{
    CounterRng rng(seed, stream);
    Eigen::VectorXcd v(Eigen::Index(1) << strands);
    for (auto& c : v)
        c = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    return v;
}

double dense_norm(const TLMorphism& t)
{
    const Eigen::MatrixXcd m = t.apply_columns<cplx>(
        Eigen::MatrixXcd::Identity(Eigen::Index(1) << t.source(), Eigen::Index(1) << t.source()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace

NormResult operator_norm(const TLMorphism& t, const NormOptions& opts)
{
    const TLMorphism ta = t.adjoint();
    Eigen::VectorXcd v = random_vector(t.source(), opts.seed, t.source());
    v.normalize();
    NormResult out;
    double prev = -1.0;
    for (out.iterations = 1; out.iterations <= opts.max_iterations; ++out.iterations) {
        const Eigen::VectorXcd tv = t.apply<cplx>(v);
        const double lambda = tv.squaredNorm();
        // below this T vanishes to working precision
        if (lambda < 1e-28) {
            out.value = std::sqrt(lambda);
            out.converged = true;
            return out;
        }
        const double value = std::sqrt(lambda);
        if (prev >= 0.0 && std::abs(value - prev) <= opts.tolerance * value) {
            out.value = value;
            out.converged = true;
            return out;
        }
        prev = value;
        v = ta.apply<cplx>(tv);
        v.normalize();
    }
    out.iterations = opts.max_iterations;
    out.value = prev;
    if (t.source() <= opts.dense_fallback_strands) {
        out.value = dense_norm(t);
        out.dense = true;
    }
    return out;
}

PhaseDistance phase_distance(const TLMorphism& a, const TLMorphism& b, const TLMorphism& source_projection,
                             const NormOptions& opts)
{
    const auto dist = [&](double theta) {
        return operator_norm(a - std::polar(1.0, theta) * b, opts).value;
    };
    constexpr int grid = 64;
    const double step = 2 * std::numbers::pi / grid;
    int best = 0;
    double best_value = dist(0.0);
    for (int k = 1; k < grid; ++k)
        if (const double d = dist(k * step); d < best_value) {
            best = k;
            best_value = d;
        }
    double lo = (best - 1) * step, hi = (best + 1) * step;
    const double ratio = (std::sqrt(5.0) - 1) / 2;
    double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
    double fc = dist(c), fd = dist(d);
    while (hi - lo > 1e-9) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = dist(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = dist(d);
        }
    }
    PhaseDistance out{};
    out.phase = fc < fd ? c : d;
    out.value = std::min({fc, fd, best_value});
    out.bracket_lo = lo;
    out.bracket_hi = hi;

    Eigen::VectorXcd u = source_projection.apply<cplx>(random_vector(a.source(), opts.seed, 0x70686173));
    u.normalize();
    const Eigen::VectorXcd au = a.apply<cplx>(u), bu = b.apply<cplx>(u);
    const cplx overlap = bu.dot(au);
    // ‖Au - λBu‖ at the optimal λ; avoids the cancellation in 2 - 2|c|
    const cplx lambda = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1.0);
    out.closed_form = (au - lambda * bu).norm();
    return out;
}

namespace {

class Isometries {
public:
    Isometries(QParam q, std::optional<std::uint64_t> gauge) : q_(q), gauge_(gauge) {}

    TLMorphism v(const Word& x, const Word& y, const Word& z) const
    {
        TLMorphism m = fusion_isometry(x, y, z, q_).map;
        if (gauge_) {
            CounterRng rng(*gauge_, fnv1a(x.str() + "|" + y.str() + "|" + z.str()));
            m *= std::polar(1.0, 2 * std::numbers::pi * rng.uniform());
        }
        return m;
    }

    TLMorphism p(const Word& x, const Word& y, const Word& z) const
    {
        const TLMorphism m = v(x, y, z);
        return m.after(m.adjoint());
    }

private:
    QParam q_;
    std::optional<std::uint64_t> gauge_;
};

} // namespace

EstimateOperators estimate_operators(const Word& x, const Word& y, const Word& z, const Word& r, QParam q,
                                     const EstimateOptions& opts)
{
    const std::size_t strands = estimate_strands(x, y, z, r);
    if (strands > opts.strand_budget)
        throw resource_error("estimates for (" + x.display() + ", " + y.display() + ", " + z.display() + ", "
                             + r.display() + ") need " + std::to_string(strands) + " strands, budget "
                             + std::to_string(opts.strand_budget));
    const Isometries iso(q, opts.gauge_seed);
    const Word rb = involution(r);
    const std::size_t nx = x.size(), nz = z.size(), nr = r.size();

    const TLMorphism v1 = iso.v(x + r, rb + y, x + y).padded(0, nz);
    const TLMorphism t1 = v1.after(iso.p(x + y, z, x + y + z))
                          - iso.p(rb + y, z, rb + y + z).padded(nx + nr, 0).after(v1);

    const TLMorphism v2 = iso.v(y + r, rb + z, y + z).padded(nx, 0);
    const TLMorphism t2 = v2.after(iso.p(x, y + z, x + y + z))
                          - iso.p(x, y + r, x + y + r).padded(0, nr + nz).after(v2);

    const TLMorphism a = v2.after(iso.v(x, y + z, x + y + z));
    const TLMorphism b = iso.v(x, y + r, x + y + r).padded(0, nr + nz).after(iso.v(x + y + r, rb + z, x + y + z));
    return {t1, t2, a, b};
}

EstimateReport approx_estimates(const Word& x, const Word& y, const Word& z, const Word& r, QParam q,
                                const EstimateOptions& opts)
{
    const auto ops = estimate_operators(x, y, z, r, q, opts);
    EstimateReport out{x, y, z, r, q.value(), 0, 0, 0, std::pow(q.value(), double(y.size())), {}, {}, {}};
    out.norm1 = operator_norm(ops.t1, opts.norm);
    out.norm2 = operator_norm(ops.t2, opts.norm);
    out.variant = phase_distance(ops.a, ops.b, WordSpace(x + y + z, q).projection(), opts.norm);
    out.lhs1 = out.norm1.value;
    out.lhs2 = out.norm2.value;
    out.lhs_variant = out.variant.value;
    return out;
}

} // namespace freewalk
