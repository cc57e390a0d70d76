#include "freewalk/qdim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace freewalk {

QParam::QParam(double q) : q_(q)
{
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("q must lie in the open interval (0,1), got " + std::to_string(q));
}

DimValue DimValue::from_log(double lg)
{
    return {std::exp(lg), lg};
}

DimValue q_int(std::size_t n, QParam qp)
{
    if (n == 0)
        throw std::domain_error("q-integer [n] needs n >= 1");
    const double q = qp.value();
    // q^{n-1} + q^{n-3} + ... + q^{1-n}, summed from the small end
    double linear = 0.0;
    const int top = static_cast<int>(n) - 1;
    for (int e = top; e >= -top; e -= 2)
        linear += std::pow(q, e);
    // closed form keeps the log finite when the sum overflows
    const double lq = std::log(q);
    const double lg = (1.0 - static_cast<double>(n)) * lq + std::log1p(-std::pow(q, 2.0 * n))
                      - std::log1p(-q * q);
    return {linear, lg};
}

DimValue q_int(std::size_t n, ClassicalLimit)
{
    if (n == 0)
        throw std::domain_error("q-integer [n] needs n >= 1");
    const double v = static_cast<double>(n);
    return {v, std::log(v)};
}

namespace {

template <class Q>
DimValue dim_impl(const Word& w, Q q)
{
    DimValue d{1.0, 0.0};
    for (std::size_t len : run_lengths(w)) {
        const DimValue f = q_int(len + 1, q);
        d.linear *= f.linear;
        d.log += f.log;
    }
    return d;
}

} // namespace

DimValue dim_q(const Word& w, QParam q) { return dim_impl(w, q); }
DimValue dim_q(const Word& w, ClassicalLimit m) { return dim_impl(w, m); }

std::size_t dim_min(const Word& w)
{
    std::size_t d = 1;
    for (std::size_t len : run_lengths(w))
        d *= len + 1;
    return d;
}

namespace {

// Split w = w0 ⊗ w1 with w1 the last run of w when that run merges with a
// tail starting at `start` (i.e. w ends in the conjugate letter), else w1 = ε.
std::pair<Word, std::size_t> split_merging_suffix(const Word& w, Letter start)
{
    if (w.empty() || w.back() != conjugate(start))
        return {w, 0};
    const std::size_t last = run_lengths(w).back();
    return {w.sub(0, w.size() - last), last};
}

} // namespace

double log_martin_ratio_limit(const Word& x, const Word& y, const TailSpec& tail, QParam q)
{
    if (const auto* g = std::get_if<GenericTail>(&tail))
        return dim_q(x + g->head, q).log - dim_q(y + g->head, q).log;
    const Letter start = std::get<AlternatingTail>(tail).start;
    const auto [x0, x1] = split_merging_suffix(x, start);
    const auto [y0, y1] = split_merging_suffix(y, start);
    return dim_q(x0, q).log - dim_q(y0, q).log
           + (static_cast<double>(y1) - static_cast<double>(x1)) * std::log(q.value());
}

double martin_ratio_limit(const Word& x, const Word& y, const TailSpec& tail, QParam q)
{
    return std::exp(log_martin_ratio_limit(x, y, tail, q));
}

} // namespace freewalk
