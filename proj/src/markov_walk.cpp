#include "freewalk/markov_walk.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "freewalk/errors.hpp"
#include "freewalk/rng.hpp"

namespace freewalk {

namespace {

double total_mass(const std::map<Word, double>& w)
{
    double s = 0.0;
    for (const auto& [k, v] : w)
        s += v;
    return s;
}

void check_positive(const std::map<Word, double>& weights)
{
    if (weights.empty())
        throw std::invalid_argument("probability measure needs nonempty support");
    for (const auto& [w, v] : weights)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("probability weight for \"" + w.display() + "\" must be positive");
}

} // namespace

ProbMeasure::ProbMeasure(std::map<Word, double> weights) : weights_(std::move(weights))
{
    check_positive(weights_);
    const double s = total_mass(weights_);
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("probability weights sum to " + std::to_string(s) + ", not 1");
}

ProbMeasure ProbMeasure::normalized(std::map<Word, double> weights)
{
    check_positive(weights);
    const double s = total_mass(weights);
    for (auto& [w, v] : weights)
        v /= s;
    ProbMeasure m;
    m.weights_ = std::move(weights);
    return m;
}

ProbMeasure ProbMeasure::dirac(const Word& w)
{
    return ProbMeasure({{w, 1.0}});
}

ProbMeasure ProbMeasure::symmetric()
{
    return ProbMeasure({{Word("a"), 0.5}, {Word("b"), 0.5}});
}

double ProbMeasure::operator()(const Word& w) const
{
    auto it = weights_.find(w);
    return it == weights_.end() ? 0.0 : it->second;
}

std::size_t ProbMeasure::max_length() const
{
    std::size_t m = 0;
    for (const auto& [w, v] : weights_)
        m = std::max(m, w.size());
    return m;
}

TransitionRow transition_row(const Word& x, const ProbMeasure& mu, QParam q)
{
    TransitionRow row{x, {}};
    const double lx = log_dim_q(x, q);
    for (const auto& [z, mz] : mu.weights()) {
        const double base = std::log(mz) - lx - log_dim_q(z, q);
        for (const auto& term : fuse(x, z))
            row.entries[term.summand] += std::exp(base + log_dim_q(term.summand, q));
    }
    return row;
}

ProbMeasure convolve(const ProbMeasure& mu, const ProbMeasure& eta, QParam q)
{
    std::map<Word, double> out;
    for (const auto& [x, mx] : mu.weights()) {
        const double lx = log_dim_q(x, q);
        for (const auto& [y, ey] : eta.weights()) {
            const double base = std::log(mx) + std::log(ey) - lx - log_dim_q(y, q);
            for (const auto& term : fuse(x, y))
                out[term.summand] += std::exp(base + log_dim_q(term.summand, q));
        }
    }
    return ProbMeasure(std::move(out));
}

ProbMeasure convolution_power(const ProbMeasure& mu, std::size_t n, QParam q)
{
    ProbMeasure acc = ProbMeasure::dirac(Word{});
    for (std::size_t i = 0; i < n; ++i)
        acc = convolve(acc, mu, q);
    return acc;
}

const TransitionRow& TruncatedKernel::row(const Word& x) const
{
    auto it = rows_.find(x);
    if (it == rows_.end())
        throw std::out_of_range("no row for \"" + x.display() + "\" in truncated kernel");
    return it->second;
}

const std::map<Word, double>& TruncatedKernel::distribution(std::size_t k, const Word& start) const
{
    if (k > horizon_)
        throw std::out_of_range("step count " + std::to_string(k) + " beyond kernel horizon "
                                + std::to_string(horizon_));
    auto it = dist_.find(start);
    if (it == dist_.end())
        throw std::out_of_range("\"" + start.display() + "\" is not a start word of this kernel");
    return it->second[k];
}

double TruncatedKernel::prob(std::size_t k, const Word& start, const Word& y) const
{
    const auto& d = distribution(k, start);
    auto it = d.find(y);
    return it == d.end() ? 0.0 : it->second;
}

TruncatedKernel n_step(const std::vector<Word>& xs, std::size_t n, const ProbMeasure& mu, QParam q,
                       std::size_t length_budget)
{
    std::size_t longest = 0;
    for (const auto& x : xs)
        longest = std::max(longest, x.size());
    const std::size_t reach = longest + n * mu.max_length();
    if (reach > length_budget)
        throw resource_error("n_step would reach words of length " + std::to_string(reach)
                             + ", budget is " + std::to_string(length_budget));

    TruncatedKernel k;
    k.horizon_ = n;
    k.starts_ = xs;
    std::set<Word> states;
    for (const auto& x : xs) {
        std::vector<std::map<Word, double>> dist(n + 1);
        dist[0][x] = 1.0;
        states.insert(x);
        for (std::size_t step = 0; step < n; ++step) {
            for (const auto& [w, pw] : dist[step]) {
                auto it = k.rows_.find(w);
                if (it == k.rows_.end())
                    it = k.rows_.emplace(w, transition_row(w, mu, q)).first;
                for (const auto& [y, p] : it->second.entries) {
                    dist[step + 1][y] += pw * p;
                    states.insert(y);
                }
            }
        }
        k.dist_[x] = std::move(dist);
    }
    k.states_.assign(states.begin(), states.end());
    return k;
}

double rho(const ProbMeasure& mu, QParam q)
{
    if (mu(Word{}) >= 1.0)
        throw std::domain_error("rho needs mu(e) < 1");
    double s = 0.0;
    for (const auto& [y, my] : mu.weights())
        s += my * std::exp(dim_q(y, classical_limit).log - log_dim_q(y, q));
    return s;
}

GeneratingReport is_generating(const ProbMeasure& mu, QParam q, std::size_t max_length,
                               std::size_t horizon)
{
    const auto targets = words_up_to(max_length);
    const std::size_t step_len = mu.max_length();
    GeneratingReport report{true, horizon, max_length, std::nullopt};
    for (const auto& x : targets) {
        std::set<Word> hit;
        std::set<Word> frontier{x};
        for (std::size_t s = 1; s <= horizon && hit.size() < targets.size(); ++s) {
            // words longer than this cannot return to length <= max_length in time
            const std::size_t cap = max_length + (horizon - s) * step_len;
            std::set<Word> next;
            for (const auto& w : frontier)
                for (const auto& [y, p] : transition_row(w, mu, q).entries)
                    if (p > 0.0 && y.size() <= cap)
                        next.insert(y);
            for (const auto& y : next)
                if (y.size() <= max_length)
                    hit.insert(y);
            frontier = std::move(next);
        }
        for (const auto& y : targets) {
            if (!hit.count(y)) {
                report.generating = false;
                report.first_failure = {x, y};
                return report;
            }
        }
    }
    return report;
}

WalkStepper::WalkStepper(const ProbMeasure& mu, QParam q) : log_q_(std::log(q.value()))
{
    log_qint_table_.resize(4097);
    log_qint_table_[0] = 0.0;
    const double qq = q.value();
    for (std::size_t n = 1; n < log_qint_table_.size(); ++n)
        log_qint_table_[n] = (1.0 - static_cast<double>(n)) * log_q_ + std::log1p(-std::pow(qq, 2.0 * n))
                             - std::log1p(-qq * qq);
    for (const auto& [z, mz] : mu.weights()) {
        support_.push_back(z.str());
        log_mu_minus_dim_.push_back(std::log(mz) - log_dim_q(z, q));
    }
}

double WalkStepper::log_qint(std::size_t n) const
{
    if (n < log_qint_table_.size())
        return log_qint_table_[n];
    const double q = std::exp(log_q_);
    return (1.0 - static_cast<double>(n)) * log_q_ + std::log1p(-std::pow(q, 2.0 * n))
           - std::log1p(-q * q);
}

double WalkStepper::log_dim_concat(std::string_view a, std::string_view b) const
{
    const std::size_t n = a.size() + b.size();
    if (n == 0)
        return 0.0;
    auto at = [&](std::size_t i) { return i < a.size() ? a[i] : b[i - a.size()]; };
    double s = 0.0;
    std::size_t len = 1;
    char prev = at(0);
    for (std::size_t i = 1; i < n; ++i) {
        const char c = at(i);
        if (c == prev) {
            s += log_qint(len + 1);
            len = 1;
        } else {
            ++len;
        }
        prev = c;
    }
    return s + log_qint(len + 1);
}

void WalkStepper::candidates(const std::string& w, std::vector<Candidate>& out) const
{
    out.clear();
    const std::size_t n = w.size();
    const std::string_view wv(w);
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const std::string_view z(support_[i]);
        for (std::size_t k = 0; k <= std::min(n, z.size()); ++k) {
            if (k > 0 && w[n - k] == z[k - 1])
                break; // needs w[n-k] = conj(z[k-1])
            const std::size_t p = n - k;
            std::size_t j = p;
            if (p > 0) {
                j = p - 1;
                while (j > 0 && w[j - 1] != w[j])
                    --j;
            }
            const double delta = log_dim_concat(wv.substr(j, p - j), z.substr(k))
                                 - log_dim_concat(wv.substr(j), {});
            out.push_back({i, k, std::exp(log_mu_minus_dim_[i] + delta)});
        }
    }
}

std::size_t WalkStepper::step(std::string& w, double u) const
{
    thread_local std::vector<Candidate> cand;
    candidates(w, cand);
    double total = 0.0;
    for (const auto& c : cand)
        total += c.weight;
    const double target = u * total;
    double acc = 0.0;
    const Candidate* pick = &cand.back();
    for (const auto& c : cand) {
        acc += c.weight;
        if (target < acc) {
            pick = &c;
            break;
        }
    }
    const std::size_t kept = w.size() - pick->cancel;
    w.resize(kept);
    w.append(support_[pick->support_index], pick->cancel, std::string::npos);
    return kept;
}

TransitionRow WalkStepper::row(const Word& x) const
{
    std::vector<Candidate> cand;
    candidates(x.str(), cand);
    TransitionRow r{x, {}};
    for (const auto& c : cand) {
        std::string y = x.str().substr(0, x.size() - c.cancel);
        y.append(support_[c.support_index], c.cancel, std::string::npos);
        r.entries[Word(std::move(y))] += c.weight;
    }
    return r;
}

std::vector<Word> sample_path(const Word& x, std::size_t steps, const ProbMeasure& mu, QParam q,
                              std::uint64_t seed)
{
    const WalkStepper stepper(mu, q);
    CounterRng rng(seed, 0);
    std::vector<Word> path{x};
    std::string w = x.str();
    for (std::size_t i = 0; i < steps; ++i) {
        stepper.step(w, rng.uniform());
        path.emplace_back(w);
    }
    return path;
}

} // namespace freewalk
