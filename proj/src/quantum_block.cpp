#include "freewalk/quantum_block.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "freewalk/errors.hpp"
#include "freewalk/parallel.hpp"

namespace freewalk {

namespace {

Eigen::MatrixXcd identity_block(const Word& w)
{
    const auto d = Eigen::Index(dim_min(w));
    return Eigen::MatrixXcd::Identity(d, d);
}

double spectral_norm(const Eigen::MatrixXcd& m)
{
    if (m.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

// dim_q(z)/(dim_q(x)dim_q(y)), the weight of one channel
double channel_weight(const Word& x, const Word& y, const Word& z, QParam q)
{
    return std::exp(log_dim_q(z, q) - log_dim_q(x, q) - log_dim_q(y, q));
}

} // namespace

std::optional<Eigen::MatrixXcd> BlockElement::block(const Word& w) const
{
    if (auto it = blocks.find(w); it != blocks.end())
        return it->second;
    if (beyond)
        return beyond(w);
    return std::nullopt;
}

double BlockElement::leak(const Word& w) const
{
    const auto it = leakage.find(w);
    return it == leakage.end() ? 0.0 : it->second;
}

double BlockElement::max_leak() const
{
    double m = 0.0;
    for (const auto& [w, l] : leakage)
        m = std::max(m, l);
    return m;
}

BlockElement BlockElement::identity(std::size_t radius)
{
    return central([](const Word&) { return 1.0; }, radius);
}

BlockElement BlockElement::central(const std::function<double(const Word&)>& f, std::size_t radius)
{
    BlockElement a;
    for (const auto& w : words_up_to(radius))
        a.blocks.emplace(w, f(w) * identity_block(w));
    return a;
}

BlockElement BlockElement::indicator(const Word& target, std::size_t radius)
{
    return central([&](const Word& w) { return w == target ? 1.0 : 0.0; }, radius);
}

BlockElement adjoint(const BlockElement& a)
{
    BlockElement out;
    for (const auto& [w, b] : a.blocks)
        out.blocks.emplace(w, b.adjoint());
    out.leakage = a.leakage;
    if (a.beyond)
        out.beyond = [f = a.beyond](const Word& w) -> Eigen::MatrixXcd { return f(w).adjoint(); };
    return out;
}

BlockElement operator*(const BlockElement& a, const BlockElement& b)
{
    BlockElement out;
    for (const auto& [w, x] : a.blocks)
        if (const auto y = b.block(w)) {
            out.blocks.emplace(w, x * *y);
            if (const double l = a.leak(w) + b.leak(w); l > 0)
                out.leakage.emplace(w, l);
        }
    return out;
}

Eigen::MatrixXcd comult_cutdown(const Word& x, const Word& y, const Word& z, const Eigen::MatrixXcd& b, QParam q)
{
    return channel_conjugate(*channel(x, y, z, q), b);
}

BlockElement markov_apply(const BlockElement& a, const ProbMeasure& mu, QParam q, const TruncationPolicy& trunc)
{
    std::vector<Word> targets;
    if (trunc.targets)
        targets.assign(trunc.targets->begin(), trunc.targets->end());
    else
        targets = words_up_to(trunc.radius);
    std::vector<Eigen::MatrixXcd> blocks(targets.size());
    std::vector<double> leaks(targets.size(), 0.0);
    parallel_for(targets.size(), trunc.workers, [&](std::size_t i) {
        const Word& x = targets[i];
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(Eigen::Index(dim_min(x)), Eigen::Index(dim_min(x)));
        double leak = 0.0;
        for (const auto& [y, m] : mu.weights())
            for (const auto& term : fuse(x, y)) {
                const double c = m * channel_weight(x, y, term.summand, q);
                const auto b = a.block(term.summand);
                if (!b) {
                    leak += c;
                    continue;
                }
                acc += m * channel_slice(*channel(x, y, term.summand, q), *b);
                leak += c * a.leak(term.summand);
            }
        blocks[i] = std::move(acc);
        leaks[i] = leak;
    });
    BlockElement out;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        out.blocks.emplace(targets[i], std::move(blocks[i]));
        if (leaks[i] > 0)
            out.leakage.emplace(targets[i], leaks[i]);
    }
    return out;
}

BlockElement boundary_element(const Word& x0, const Eigen::MatrixXcd& a, std::size_t radius, QParam q)
{
    if (x0.size() > radius)
        throw std::invalid_argument("base word " + x0.display() + " lies beyond radius " + std::to_string(radius));
    if (a.rows() != Eigen::Index(dim_min(x0)) || a.cols() != a.rows())
        throw std::invalid_argument("operator does not act on H_" + x0.display());
    auto stored = std::make_shared<std::map<Word, Eigen::MatrixXcd>>();
    for (const auto& w : words_up_to(radius)) {
        if (!is_prefix(x0, w))
            stored->emplace(w, Eigen::MatrixXcd::Zero(Eigen::Index(dim_min(w)), Eigen::Index(dim_min(w))));
        else if (w == x0)
            stored->emplace(w, a);
        else {
            const Word parent = w.sub(0, w.size() - 1);
            stored->emplace(w, cp_psi_map(parent, w.sub(w.size() - 1), stored->at(parent), q));
        }
    }
    BlockElement out;
    out.blocks = *stored;
    out.beyond = [stored = std::shared_ptr<const std::map<Word, Eigen::MatrixXcd>>(stored), x0, radius,
                  q](const Word& w) -> Eigen::MatrixXcd {
        if (!is_prefix(x0, w))
            return Eigen::MatrixXcd::Zero(Eigen::Index(dim_min(w)), Eigen::Index(dim_min(w)));
        const Word base = w.sub(0, radius);
        return cp_psi_map(base, w.sub(radius), stored->at(base), q);
    };
    return out;
}

std::vector<DirichletRow> dirichlet_profile(const Word& x0, const Eigen::MatrixXcd& a, const std::vector<Word>& ys,
                                            const std::vector<std::size_t>& lengths, QParam q,
                                            std::size_t strand_budget, bool two_form)
{
    std::size_t longest = x0.size(), ymax = 0;
    for (std::size_t l : lengths)
        longest = std::max(longest, l);
    for (const auto& y : ys)
        ymax = std::max(ymax, y.size());
    if (longest + ymax > strand_budget)
        throw resource_error("Dirichlet profile up to |x| = " + std::to_string(longest) + " with |y| = "
                             + std::to_string(ymax) + " exceeds the strand budget "
                             + std::to_string(strand_budget));
    const BlockElement el = boundary_element(x0, a, longest + ymax, q);

    std::vector<DirichletRow> rows;
    for (std::size_t len : lengths) {
        DirichletRow row{len, 0.0, {}, {}, 0.0, 0};
        bool seen = false;
        if (len < x0.size()) {
            rows.push_back(row);
            continue;
        }
        for (const auto& tail : words_of_length(len - x0.size())) {
            const Word x = x0 + tail;
            const Eigen::MatrixXcd ax = *el.block(x);
            ++row.words;
            for (const auto& y : ys) {
                Eigen::MatrixXcd slice = Eigen::MatrixXcd::Zero(ax.rows(), ax.cols());
                Eigen::MatrixXcd dual = slice;
                for (const auto& term : fuse(x, y)) {
                    const Word& z = term.summand;
                    const Eigen::MatrixXcd az = *el.block(z);
                    slice += channel_slice(*channel(x, y, z, q), az);
                    if (two_form)
                        dual += channel_weight(x, y, z, q) * channel_compress(*channel(z, involution(y), x, q), az);
                }
                const double v = spectral_norm(slice - ax);
                if (!seen || v > row.value) {
                    seen = true;
                    row.value = v;
                    row.worst_x = x;
                    row.worst_y = y;
                }
                if (two_form)
                    row.two_form_gap = std::max(row.two_form_gap, spectral_norm(slice - dual));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

// needed[k]: where P^k(a) must be known so that P^n(a) is exact on the targets
std::vector<std::set<Word>> needed_sets(const std::set<Word>& targets, std::size_t n, const ProbMeasure& mu)
{
    std::vector<std::set<Word>> needed(n + 1);
    needed[n] = targets;
    for (std::size_t k = n; k-- > 0;) {
        needed[k] = targets;
        for (const auto& x : needed[k + 1])
            for (const auto& [y, m] : mu.weights())
                for (const auto& term : fuse(x, y))
                    needed[k].insert(term.summand);
    }
    return needed;
}

} // namespace

double poisson_block_bytes(const std::set<Word>& targets, std::size_t n, const ProbMeasure& mu)
{
    // level 0 is the input, which may be produced lazily
    const auto needed = needed_sets(targets, n, mu);
    double worst = 0;
    for (std::size_t k = 1; k < needed.size(); ++k) {
        double bytes = 0;
        for (const auto& w : needed[k])
            bytes += std::pow(double(dim_min(w)), 2) * double(sizeof(cplx));
        worst = std::max(worst, bytes);
    }
    return worst;
}

PoissonReport poisson_truncated(const BlockElement& a, std::size_t n, const ProbMeasure& mu, QParam q,
                                const TruncationPolicy& trunc, double leak_threshold)
{
    std::set<Word> targets;
    if (trunc.targets)
        targets = *trunc.targets;
    else
        for (const auto& w : words_up_to(trunc.radius))
            targets.insert(w);

    const auto needed = needed_sets(targets, n, mu);

    PoissonReport out;
    BlockElement current = a;
    for (std::size_t k = 0; k < n; ++k) {
        TruncationPolicy step = trunc;
        step.targets = needed[k + 1];
        BlockElement next = markov_apply(current, mu, q, step);
        std::map<Word, double> inc;
        for (const auto& w : targets) {
            const auto prev = current.block(w);
            inc[w] = prev ? spectral_norm(next.blocks.at(w) - *prev) : INFINITY;
        }
        out.increments.push_back(std::move(inc));
        current = std::move(next);
    }
    for (auto it = current.blocks.begin(); it != current.blocks.end();)
        it = targets.count(it->first) ? std::next(it) : current.blocks.erase(it);
    out.final_increment = 0.0;
    if (!out.increments.empty())
        for (const auto& [w, v] : out.increments.back())
            out.final_increment = std::max(out.final_increment, v);
    out.max_leak = 0.0;
    Word worst;
    for (const auto& w : targets)
        if (current.leak(w) > out.max_leak) {
            out.max_leak = current.leak(w);
            worst = w;
        }
    out.leak_ok = out.max_leak <= leak_threshold;
    if (!out.leak_ok) {
        std::size_t reach = 0;
        for (const auto& w : needed.front())
            reach = std::max(reach, w.size());
        out.diagnostic = "leakage " + std::to_string(out.max_leak) + " at block " + worst.display()
                         + "; blocks up to length " + std::to_string(reach) + " must be known";
    }
    out.value = std::move(current);
    return out;
}

OmegaReport omega_infinity_check(const Word& x0, const Eigen::MatrixXcd& a, const ProbMeasure& mu, QParam q,
                                 const McSettings& mc, std::size_t min_iterations, double tolerance_scale,
                                 double memory_budget)
{
    const BlockElement el = boundary_element(x0, a, std::max<std::size_t>(x0.size(), 6), q);
    TruncationPolicy trunc;
    trunc.targets = std::set<Word>{Word{}};
    trunc.workers = mc.workers;

    OmegaReport out{};
    std::size_t n = std::max<std::size_t>(min_iterations, 1);
    PoissonReport poisson;
    for (;;) {
        if (poisson_block_bytes(*trunc.targets, n, mu) > memory_budget) {
            out.diagnostic = "stopped before n = " + std::to_string(n) + ": blocks would exceed "
                             + std::to_string(memory_budget / 1e9) + " GB";
            if (poisson.increments.empty())
                throw resource_error(out.diagnostic);
            --n;
            break;
        }
        poisson = poisson_truncated(el, n, mu, q, trunc);
        if (poisson.final_increment < 1e-4 || !poisson.leak_ok)
            break;
        ++n;
    }
    // 𝒰_ε is the whole boundary
    const auto hit = x0.empty() ? HittingEstimate{Word{}, x0, 1.0, 0.0, 0, 0, mc.policy}
                                : estimate_hitting(Word{}, x0, mu, q, mc);

    out.x0 = x0;
    out.lhs = poisson.value.blocks.at(Word{})(0, 0);
    out.psi = state_psi(x0, a, q);
    out.nu = hit.value;
    out.nu_stderr = hit.stderr_;
    out.unresolved = hit.unresolved;
    out.rhs = out.psi * out.nu;
    out.final_increment = poisson.final_increment;
    out.iterations = n;
    out.tolerance = tolerance_scale * (3.0 * hit.stderr_ * std::abs(out.psi) + 1e-3);
    out.converged = poisson.final_increment < 1e-4 && poisson.leak_ok;
    if (!poisson.leak_ok)
        out.diagnostic = poisson.diagnostic;
    out.pass = out.converged && std::abs(out.lhs - out.rhs) <= out.tolerance;
    return out;
}

} // namespace freewalk
