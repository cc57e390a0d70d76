#include "freewalk/boundary_mc.hpp"

#include <cmath>
#include <set>

#include "freewalk/errors.hpp"
#include "freewalk/parallel.hpp"

namespace freewalk {

std::uint64_t sample_stream(const Word& x, std::uint64_t index)
{
    return splitmix64(fnv1a(x.display())) + index;
}

std::optional<Word> sample_boundary_prefix(const Word& x, std::size_t resolve_len,
                                           const WalkStepper& stepper, const StoppingPolicy& policy,
                                           CounterRng& rng)
{
    if (resolve_len == 0)
        throw std::invalid_argument("resolve length must be at least 1");
    const std::size_t watch = resolve_len + policy.margin;
    std::string w = x.str();
    std::size_t stable = 0;
    for (std::size_t s = 0; s < policy.max_steps; ++s) {
        const std::size_t kept = stepper.step(w, rng.uniform());
        if (kept >= watch)
            ++stable;
        else
            stable = 0;
        if (stable >= policy.stable_steps)
            return Word(w.substr(0, resolve_len));
    }
    return std::nullopt;
}

std::optional<Word> sample_boundary_prefix(const Word& x, std::size_t resolve_len, const ProbMeasure& mu,
                                           QParam q, const StoppingPolicy& policy, std::uint64_t seed)
{
    const WalkStepper stepper(mu, q);
    CounterRng rng(seed, sample_stream(x, 0));
    return sample_boundary_prefix(x, resolve_len, stepper, policy, rng);
}

BoundarySamples::BoundarySamples(Word start, std::size_t resolve_len,
                                 std::vector<std::optional<std::string>> prefixes, StoppingPolicy policy)
    : start_(std::move(start)), resolve_len_(resolve_len), prefixes_(std::move(prefixes)), policy_(policy)
{
    for (const auto& p : prefixes_)
        resolved_ += p.has_value();
}

HittingEstimate BoundarySamples::estimate(const Word& cylinder) const
{
    if (cylinder.empty())
        throw std::invalid_argument("cylinder prefix must be nonempty");
    if (cylinder.size() > resolve_len_)
        throw estimation_error("cylinder \"" + cylinder.display() + "\" longer than resolved prefixes ("
                               + std::to_string(resolve_len_) + ")");
    if (resolved_ == 0)
        throw estimation_error("no resolved samples from \"" + start_.display() + "\"");
    std::size_t hits = 0;
    for (const auto& p : prefixes_)
        if (p && p->compare(0, cylinder.size(), cylinder.str()) == 0)
            ++hits;
    const double n = static_cast<double>(resolved_);
    const double v = static_cast<double>(hits) / n;
    return {start_, cylinder, v, std::sqrt(v * (1.0 - v) / n), resolved_, unresolved(), policy_};
}

BoundarySamples sample_boundary(const Word& x, std::size_t resolve_len, const ProbMeasure& mu, QParam q,
                                const McSettings& mc)
{
    if (mc.samples == 0)
        throw std::invalid_argument("sample count must be at least 1");
    const WalkStepper stepper(mu, q);
    std::vector<std::optional<std::string>> prefixes(mc.samples);
    parallel_for(mc.samples, mc.workers, [&](std::size_t i) {
        CounterRng rng(mc.seed, sample_stream(x, i));
        if (auto p = sample_boundary_prefix(x, resolve_len, stepper, mc.policy, rng))
            prefixes[i] = p->str();
    });
    return BoundarySamples(x, resolve_len, std::move(prefixes), mc.policy);
}

HittingEstimate estimate_hitting(const Word& x, const Word& cylinder, const ProbMeasure& mu, QParam q,
                                 const McSettings& mc)
{
    // every end lies in the cylinder of the empty word
    if (cylinder.empty())
        return {x, cylinder, 1.0, 0.0, 0, 0, mc.policy};
    return sample_boundary(x, cylinder.size(), mu, q, mc).estimate(cylinder);
}

namespace {

// Mean and standard error of per-sample values over resolved samples.
McValue summarize(const BoundarySamples& s, const std::vector<double>& values)
{
    if (s.resolved() == 0)
        throw estimation_error("no resolved samples from \"" + s.start().display() + "\"");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (s.prefixes()[i])
            sum += values[i];
    const double n = static_cast<double>(s.resolved());
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (s.prefixes()[i])
            ss += (values[i] - mean) * (values[i] - mean);
    const double var = s.resolved() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n), s.resolved(), s.unresolved()};
}

} // namespace

McValue poisson_integral_classical(const std::vector<CylinderTerm>& f, const Word& x, const ProbMeasure& mu,
                                   QParam q, const McSettings& mc)
{
    std::size_t len = 1;
    for (const auto& t : f)
        len = std::max(len, t.cylinder.size());
    const auto samples = sample_boundary(x, len, mu, q, mc);
    std::vector<double> values(samples.total(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& p = samples.prefixes()[i];
        if (!p)
            continue;
        for (const auto& t : f)
            if (p->compare(0, t.cylinder.size(), t.cylinder.str()) == 0)
                values[i] += t.coefficient;
    }
    return summarize(samples, values);
}

HarmonicityReport harmonicity_check(const Word& x, const Word& cylinder, const ProbMeasure& mu, QParam q,
                                    const McSettings& mc)
{
    HarmonicityReport r{x, cylinder, 0, 0, 0, 0, 0, 0, 0, 0};
    double lhs_var = 0.0;
    for (const auto& [y, p] : transition_row(x, mu, q).entries) {
        const auto e = estimate_hitting(y, cylinder, mu, q, mc);
        r.lhs += p * e.value;
        lhs_var += p * p * e.stderr_ * e.stderr_;
        r.unresolved += e.unresolved;
        r.samples += e.samples + e.unresolved;
    }
    const auto e = estimate_hitting(x, cylinder, mu, q, mc);
    r.rhs = e.value;
    r.rhs_stderr = e.stderr_;
    r.unresolved += e.unresolved;
    r.samples += e.samples + e.unresolved;
    r.lhs_stderr = std::sqrt(lhs_var);
    r.combined_stderr = std::hypot(r.lhs_stderr, r.rhs_stderr);
    r.residual = r.lhs - r.rhs;
    return r;
}

double boundary_ratio(const Word& z, const Word& w, const std::string& y, QParam q, bool* alternating)
{
    const std::string t = y.substr(w.size());
    if (t.empty())
        throw std::invalid_argument("boundary ratio needs at least one tail letter past the prefix");
    std::size_t b = 1;
    while (b < t.size() && t[b] != t[b - 1])
        ++b;
    if (alternating)
        *alternating = b == t.size();
    if (b < t.size())
        return martin_ratio_limit(z, w, GenericTail{Word(t.substr(0, b))}, q);
    // no run boundary seen yet: continue the tail as alternating
    return martin_ratio_limit(z, w, AlternatingTail{static_cast<Letter>(t[0])}, q);
}

ConvolutieReport convolutie_check(const Word& x, const Word& cylinder, const ProbMeasure& mu, QParam q,
                                  const McSettings& mc, std::size_t tail_extra)
{
    if (cylinder.size() <= x.size())
        throw std::domain_error("convolutie check needs |z| > |x|");
    if (tail_extra == 0)
        throw std::invalid_argument("tail_extra must be at least 1");
    const auto lhs = estimate_hitting(x, cylinder, mu, q, mc);

    const std::size_t kmax = common_prefix(x, cylinder);
    std::vector<Word> prefixes;
    std::size_t longest = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        prefixes.push_back(involution(x.sub(k)) + cylinder.sub(k));
        longest = std::max(longest, prefixes.back().size());
    }
    const auto samples = sample_boundary(Word{}, longest + tail_extra, mu, q, mc);
    const double inv_dim_x = std::exp(-log_dim_q(x, q));
    std::vector<double> values(samples.total(), 0.0);
    std::size_t alternating_tails = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& p = samples.prefixes()[i];
        if (!p)
            continue;
        for (const auto& w : prefixes) {
            if (p->compare(0, w.size(), w.str()) != 0)
                continue;
            bool alt = false;
            values[i] += inv_dim_x * boundary_ratio(cylinder, w, *p, q, &alt);
            alternating_tails += alt;
        }
    }
    const auto rhs = summarize(samples, values);
    ConvolutieReport r;
    r.start = x;
    r.cylinder = cylinder;
    r.lhs = lhs.value;
    r.lhs_stderr = lhs.stderr_;
    r.rhs = rhs.value;
    r.rhs_stderr = rhs.stderr_;
    r.combined_stderr = std::hypot(r.lhs_stderr, r.rhs_stderr);
    r.unresolved = lhs.unresolved + rhs.unresolved;
    r.samples = lhs.samples + lhs.unresolved + rhs.samples + rhs.unresolved;
    r.alternating_tails = alternating_tails;
    return r;
}

AtomScanReport atom_scan(Letter letter, const std::vector<std::size_t>& depths, const ProbMeasure& mu, QParam q,
                         const McSettings& mc, std::size_t support_depth)
{
    std::size_t len = support_depth;
    for (auto d : depths)
        len = std::max(len, d);
    const auto samples = sample_boundary(Word{}, std::max<std::size_t>(len, 1), mu, q, mc);
    AtomScanReport r{letter, {}, true, support_depth, {}, samples.unresolved(), samples.total()};
    for (auto d : depths) {
        r.masses.push_back(samples.estimate(Word::alternating(letter, d)));
        if (r.masses.size() > 1 && r.masses.back().value > r.masses[r.masses.size() - 2].value)
            r.non_increasing = false;
    }
    std::set<std::string> seen;
    for (const auto& p : samples.prefixes())
        if (p)
            for (std::size_t k = 1; k <= support_depth; ++k)
                seen.insert(p->substr(0, k));
    for (std::size_t k = 1; k <= support_depth; ++k)
        for (const auto& w : words_of_length(k))
            if (!seen.count(w.str()))
                r.empty_cylinders.push_back(w);
    return r;
}

} // namespace freewalk
