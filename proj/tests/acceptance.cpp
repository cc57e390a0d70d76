// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "emit.hpp"
#include "freewalk/markov_walk.hpp"
#include "freewalk/tl_estimates.hpp"

using namespace freewalk;
using namespace freewalk::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

bool all_passed = true;

void criterion(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome r{false, ""};
    try {
        r = body();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = limit_seconds <= 0 || secs < limit_seconds;
    const bool pass = r.pass && in_time;
    all_passed = all_passed && pass;
    std::ostringstream t;
    t << std::fixed << std::setprecision(1) << secs << "s";
    if (limit_seconds > 0)
        t << " of " << limit_seconds << "s";
    std::cout << "criterion " << std::setw(2) << id << ": " << (pass ? "PASS" : "FAIL") << "  " << name << "  ["
              << r.detail << (in_time ? "" : "; over time") << "; " << t.str() << "]" << std::endl;
}

std::string sci(double v)
{
    std::ostringstream s;
    s << std::scientific << std::setprecision(2) << v;
    return s.str();
}

const fs::path work = fs::temp_directory_path() / "freewalk_acceptance";

RunConfig base_config(std::size_t workers)
{
    RunConfig cfg;
    cfg.q = 0.5;
    cfg.mu = {{"a", 0.5}, {"b", 0.5}};
    cfg.seed = 20240611;
    cfg.workers = workers;
    cfg.budgets.samples = 100000;
    validate(cfg);
    return cfg;
}

/// Runs a command through the CLI layer and writes its files under work/<tag>.
Envelope run_cli(const std::string& command, RunConfig cfg, const std::string& tag)
{
    const Envelope env = dispatch(command, cfg);
    emit(env, "csv", work / tag);
    return env;
}

const Cell& cell(const Table& t, std::size_t row, const std::string& column)
{
    const auto it = std::find(t.columns.begin(), t.columns.end(), column);
    return t.rows.at(row).at(std::size_t(it - t.columns.begin()));
}
double num(const Table& t, std::size_t row, const std::string& column)
{
    const Cell& c = cell(t, row, column);
    if (const auto* d = std::get_if<double>(&c))
        return *d;
    return double(std::get<std::int64_t>(c));
}

Word random_word(std::mt19937_64& gen, std::size_t lo, std::size_t hi)
{
    std::uniform_int_distribution<std::size_t> len(lo, hi);
    std::bernoulli_distribution coin;
    std::string s(len(gen), 'a');
    for (char& c : s)
        c = coin(gen) ? 'b' : 'a';
    return Word(s);
}

ProbMeasure random_measure(std::mt19937_64& gen, std::size_t support)
{
    std::map<Word, double> w;
    std::uniform_real_distribution<double> u(0.1, 1.0);
    while (w.size() < support)
        w[random_word(gen, 0, 3)] = u(gen);
    return ProbMeasure::normalized(w);
}

// The five statistical runs reused by the determinism criterion.
const std::vector<std::pair<std::string, std::map<std::string, std::string>>>& harmonic_runs()
{
    static const auto runs = [] {
        std::vector<std::pair<std::string, std::map<std::string, std::string>>> r;
        for (const auto& x : words_up_to(2))
            for (const auto& z : words_up_to(2))
                r.push_back({"harmonic-check", {{"x", x.display()}, {"z", z.display()}}});
        return r;
    }();
    return runs;
}

const std::vector<std::pair<std::string, std::map<std::string, std::string>>> convolutie_runs{
    {"convolutie-check", {{"x", "a"}, {"z", "ab"}}},
    {"convolutie-check", {{"x", "b"}, {"z", "ba"}}},
};

const std::vector<std::pair<std::string, std::map<std::string, std::string>>> omega_runs{
    {"omega-check", {{"x0", "a"}, {"a", "identity"}}},
    {"omega-check", {{"x0", "a"}, {"a", "random"}}},
};

std::string tag_of(const std::string& command, const std::map<std::string, std::string>& params)
{
    std::string t = command;
    for (const auto& [k, v] : params)
        t += "_" + k + "-" + v;
    return t;
}

std::vector<Envelope> run_all(const std::vector<std::pair<std::string, std::map<std::string, std::string>>>& runs,
                              std::size_t workers, const std::string& dir)
{
    std::vector<Envelope> out;
    for (const auto& [command, params] : runs) {
        RunConfig cfg = base_config(workers);
        cfg.params = params;
        out.push_back(run_cli(command, cfg, dir + "/" + tag_of(command, params)));
    }
    return out;
}

} // namespace

int main()
{
    fs::remove_all(work);

    criterion(1, "fusion/dimension consistency", 10, [] {
        double worst = 0;
        for (double qv : {0.3, 0.5, 0.7}) {
            const QParam q(qv);
            for (const auto& x : words_up_to(6))
                for (const auto& y : words_up_to(6)) {
                    double s = 0;
                    for (const auto& t : fuse(x, y))
                        s += dim_q(t.summand, q).linear;
                    const double p = dim_q(x, q).linear * dim_q(y, q).linear;
                    worst = std::max(worst, std::abs(s - p) / p);
                }
        }
        return Outcome{worst <= 1e-10, "max rel err " + sci(worst)};
    });

    criterion(2, "kernel stochasticity and transience", 30, [] {
        std::mt19937_64 gen(2);
        double row_err = 0, ratio = 0;
        std::vector<ProbMeasure> measures{ProbMeasure::symmetric()};
        for (int i = 0; i < 4; ++i)
            measures.push_back(random_measure(gen, 1 + std::size_t(i)));
        for (double qv : {0.3, 0.5, 0.7}) {
            const QParam q(qv);
            for (const auto& mu : measures)
                for (const auto& x : words_up_to(8)) {
                    double s = 0;
                    for (const auto& [y, p] : transition_row(x, mu, q).entries)
                        s += p;
                    row_err = std::max(row_err, std::abs(s - 1));
                }
            const double r = 2.0 / (qv + 1.0 / qv);
            const auto k = n_step({Word{}}, 12, ProbMeasure::symmetric(), q);
            for (std::size_t n = 1; n <= 12; ++n)
                ratio = std::max(ratio, k.prob(n, Word{}, Word{}) / std::pow(r, double(n)));
        }
        return Outcome{row_err <= 1e-12 && ratio <= 1.0,
                       "max row err " + sci(row_err) + ", max p_n(e,e)/rho^n " + sci(ratio)};
    });

    criterion(3, "convolution law", 5, [] {
        std::mt19937_64 gen(3);
        double worst = 0;
        for (double qv : {0.3, 0.5, 0.7}) {
            const QParam q(qv);
            for (int trial = 0; trial < 8; ++trial) {
                const auto mu = random_measure(gen, 1 + std::size_t(trial % 4));
                const auto eta = random_measure(gen, 4 - std::size_t(trial % 4));
                const auto both = convolve(mu, eta, q);
                for (const auto& x : words_up_to(4)) {
                    std::map<Word, double> composed;
                    for (const auto& [w, p] : transition_row(x, mu, q).entries)
                        for (const auto& [y, r] : transition_row(w, eta, q).entries)
                            composed[y] += p * r;
                    const auto direct = transition_row(x, both, q).entries;
                    for (const auto& [y, p] : composed) {
                        const auto it = direct.find(y);
                        worst = std::max(worst, std::abs(p - (it == direct.end() ? 0.0 : it->second)));
                    }
                    for (const auto& [y, p] : direct)
                        if (!composed.count(y))
                            worst = std::max(worst, p);
                }
            }
        }
        return Outcome{worst <= 1e-12, "max deviation " + sci(worst)};
    });

    criterion(4, "classical harmonicity, N = 1e5", 120, [] {
        const auto envs = run_all(harmonic_runs(), 1, "w1");
        double worst = 0, unresolved = 0;
        bool pass = true;
        for (const auto& e : envs) {
            const Table& t = e.tables[0];
            pass = pass && !e.check_failed;
            const double tol = num(t, 0, "tolerance");
            worst = std::max(worst, tol > 0 ? std::abs(num(t, 0, "residual")) / tol : 0.0);
            if (num(t, 0, "samples") > 0)
                unresolved = std::max(unresolved, num(t, 0, "unresolved") / num(t, 0, "samples"));
        }
        return Outcome{pass, std::to_string(envs.size()) + " (x, z) pairs, max |residual|/3sigma " + sci(worst)
                                 + ", max unresolved fraction " + sci(unresolved)};
    });

    criterion(5, "boundary identity, N = 1e5", 180, [] {
        const auto envs = run_all(convolutie_runs, 1, "w1");
        std::string detail;
        bool pass = true;
        for (const auto& e : envs) {
            const Table& t = e.tables[0];
            pass = pass && !e.check_failed;
            detail += (detail.empty() ? "" : "; ") + std::get<std::string>(cell(t, 0, "start")) + "/"
                      + std::get<std::string>(cell(t, 0, "cylinder")) + " |lhs-rhs| "
                      + sci(std::abs(num(t, 0, "lhs") - num(t, 0, "rhs"))) + " tol " + sci(num(t, 0, "tolerance"));
        }
        return Outcome{pass, detail};
    });

    criterion(6, "Martin-ratio limits", 1, [] {
        std::mt19937_64 gen(6);
        std::bernoulli_distribution coin;
        double worst = 0;
        int alternating[2] = {0, 0};
        for (int i = 0; i < 50; ++i) {
            const QParam q(i % 2 ? 0.3 : 0.6);
            const Word x = random_word(gen, 0, 6), y = random_word(gen, 0, 6);
            Word tail;
            TailSpec spec;
            if (i % 5 == 0) {
                const Word head = random_word(gen, 1, 4) + Word("bb");
                tail = head + random_word(gen, 60, 60);
                spec = GenericTail{head.sub(0, head.size() - 1)};
            } else {
                const Letter start = coin(gen) ? Letter::alpha : Letter::beta;
                ++alternating[start == Letter::alpha ? 0 : 1];
                tail = Word::alternating(start, 60);
                spec = AlternatingTail{start};
            }
            const Word head = tail.sub(0, 60);
            const double finite = dim_q(x + head, q).log - dim_q(y + head, q).log;
            worst = std::max(worst, std::abs(std::exp(finite - log_martin_ratio_limit(x, y, spec, q)) - 1));
        }
        return Outcome{worst <= 1e-9 && alternating[0] > 0 && alternating[1] > 0,
                       "50 cases (" + std::to_string(alternating[0]) + " alpha-tail, "
                           + std::to_string(alternating[1]) + " beta-tail), max rel err " + sci(worst)};
    });

    criterion(7, "Temperley-Lieb layer", 120, [] {
        RunConfig cfg = base_config(1);
        cfg.params["n"] = "7";
        const auto env = run_cli("tl-verify", cfg, "w1/tl-verify");
        std::string detail;
        const Table& t = env.tables[0];
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            detail += (i ? ", " : "") + std::get<std::string>(t.rows[i][0]) + " " + sci(num(t, i, "value"));
        return Outcome{!env.check_failed, detail};
    });

    criterion(8, "estimates: zeros, geometric decay, gauge invariance", 900, [] {
        const std::vector<Word> small{Word{}, Word("a"), Word("b")};
        const auto strands = [](const Word& x, const Word& y, const Word& z, const Word& r) {
            return x.size() + y.size() + z.size() + 2 * r.size();
        };
        EstimateOptions gauge;
        gauge.gauge_seed = 77;
        const auto lhs_max = [](const EstimateReport& e) { return std::max({e.lhs1, e.lhs2, e.lhs_variant}); };
        double zero_worst = 0, decay_worst = 0, gauge_worst = 0;
        std::size_t zero_count = 0, decay_steps = 0, gauge_count = 0;
        bool decay_ok = true;
        const auto check_gauge = [&](const Word& x, const Word& y, const Word& z, const Word& r, QParam q,
                                     const EstimateReport& e) {
            const auto g = approx_estimates(x, y, z, r, q, gauge);
            gauge_worst = std::max({gauge_worst, std::abs(e.lhs1 - g.lhs1), std::abs(e.lhs2 - g.lhs2),
                                    std::abs(e.lhs_variant - g.lhs_variant)});
            ++gauge_count;
        };
        for (double qv : {0.3, 0.5}) {
            const QParam q(qv);
            std::size_t k = 0;
            for (const auto& x : small)
                for (const auto& z : small)
                    for (const auto& r : small) {
                        for (const auto& y : words_up_to(5)) {
                            if (y.size() < 2 || is_alternating(y))
                                continue;
                            const auto e = approx_estimates(x, y, z, r, q);
                            zero_worst = std::max(zero_worst, lhs_max(e));
                            ++zero_count;
                            if (++k % 16 == 0)
                                check_gauge(x, y, z, r, q, e);
                        }
                        for (Letter start : {Letter::alpha, Letter::beta}) {
                            std::vector<EstimateReport> chain;
                            for (std::size_t n = 1; strands(x, Word::alternating(start, n), z, r) <= 12; ++n) {
                                const Word y = Word::alternating(start, n);
                                chain.push_back(approx_estimates(x, y, z, r, q));
                                const auto& e = chain.back();
                                if (n <= 5)
                                    check_gauge(x, y, z, r, q, e);
                                if (n < 3)
                                    continue;
                                // compare against |y| - 2 along the same chain
                                const auto& p2 = chain[n - 3];
                                for (auto [now, before] :
                                     {std::pair{e.lhs1, p2.lhs1}, {e.lhs2, p2.lhs2}, {e.lhs_variant, p2.lhs_variant}}) {
                                    if (before <= 1e-10) {
                                        if (now > 1e-10)
                                            decay_ok = false;
                                        continue;
                                    }
                                    decay_worst = std::max(decay_worst, now / (qv * qv * before));
                                    decay_ok = decay_ok && now <= 1.5 * qv * qv * before;
                                    ++decay_steps;
                                }
                            }
                        }
                    }
        }
        // A sample of longer decomposable words, up to the strand limit.
        std::mt19937_64 gen(8);
        for (int i = 0; i < 24; ++i) {
            const QParam q(i % 2 ? 0.3 : 0.5);
            const Word x = small[std::size_t(i) % 3], z = small[std::size_t(i / 3) % 3], r = small[std::size_t(i / 9) % 3];
            Word y;
            do
                y = random_word(gen, 6, 12 - x.size() - z.size() - 2 * r.size());
            while (is_alternating(y));
            zero_worst = std::max(zero_worst, lhs_max(approx_estimates(x, y, z, r, q)));
            ++zero_count;
        }
        return Outcome{zero_worst <= 1e-10 && decay_ok && gauge_worst <= 1e-9,
                       std::to_string(zero_count) + " decomposable tuples max " + sci(zero_worst) + "; "
                           + std::to_string(decay_steps) + " decay steps, max ratio/q^2 " + sci(decay_worst)
                           + (decay_ok ? "" : " (zero followed by nonzero)") + "; " + std::to_string(gauge_count)
                           + " gauge pairs max diff " + sci(gauge_worst)};
    });

    criterion(9, "quantum/classical agreement", 300, [] {
        RunConfig cfg = base_config(1);
        cfg.params["n"] = "4";
        const auto env = run_cli("qmarkov", cfg, "w1/qmarkov");
        const Table& s = env.tables[1];
        return Outcome{!env.check_failed, std::to_string(env.tables[0].rows.size()) + " blocks, max deviation "
                                              + sci(num(s, 0, "max_deviation"))};
    });

    criterion(10, "quantum Dirichlet trend", 600, [] {
        RunConfig cfg = base_config(1);
        cfg.params = {{"x0", "a"}, {"n", "5"}, {"lengths", "2,3,4,5,6"}, {"ys", "a,b,aa,ab,ba,bb,aaa,aab,aba,abb,baa,bab,bba,bbb"}};
        const auto env = run_cli("dirichlet", cfg, "w1/dirichlet");
        const Table& p = env.tables[0];
        double ratio = 0, gap = 0;
        for (std::size_t i = 0; i < p.rows.size(); i += 5) {
            ratio = std::max(ratio, num(p, i + 4, "value") / num(p, i, "value"));
            for (std::size_t k = i; k < i + 5; ++k)
                gap = std::max(gap, num(p, k, "two_form_gap"));
        }
        return Outcome{!env.check_failed,
                       "5 operators, max value(6)/value(2) " + sci(ratio) + ", max two-form gap " + sci(gap)};
    });

    criterion(11, "harmonic-state limit", 300, [] {
        const auto envs = run_all(omega_runs, 1, "w1");
        std::string detail;
        bool pass = true;
        for (const auto& e : envs) {
            const Table& t = e.tables[0];
            pass = pass && !e.check_failed;
            detail += (detail.empty() ? "" : "; ") + std::string("A=") + std::get<std::string>(cell(t, 0, "operator"))
                      + " |lhs-rhs| " + sci(std::hypot(num(t, 0, "lhs_re") - num(t, 0, "rhs_re"),
                                                         num(t, 0, "lhs_im") - num(t, 0, "rhs_im")))
                      + " tol " + sci(num(t, 0, "tolerance")) + " increment " + sci(num(t, 0, "final_increment"));
        }
        return Outcome{pass, detail};
    });

    criterion(12, "determinism across worker counts", 0, [] {
        std::size_t files = 0, differing = 0;
        for (const auto* runs : {&harmonic_runs(), &convolutie_runs, &omega_runs}) {
            run_all(*runs, 2, "w2");
            for (const auto& [command, params] : *runs) {
                const std::string tag = tag_of(command, params);
                for (const auto& entry : fs::directory_iterator(work / "w1" / tag)) {
                    if (entry.path().filename().string().find("envelope") != std::string::npos)
                        continue;
                    const auto other = work / "w2" / tag / entry.path().filename();
                    std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
                    std::stringstream sa, sb;
                    sa << a.rdbuf();
                    sb << b.rdbuf();
                    ++files;
                    differing += sa.str() != sb.str() || !fs::exists(other);
                }
            }
        }
        return Outcome{files > 0 && differing == 0,
                       std::to_string(files) + " data files, workers 1 vs 2, " + std::to_string(differing)
                           + " differ"};
    });

    std::cout << (all_passed ? "all criteria passed" : "some criteria failed") << std::endl;
    return all_passed ? 0 : 1;
}
