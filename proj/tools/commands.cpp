#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include <unsupported/Eigen/KroneckerProduct>

#include "freewalk/boundary_mc.hpp"
#include "freewalk/errors.hpp"
#include "freewalk/parallel.hpp"
#include "freewalk/quantum_block.hpp"
#include "freewalk/rng.hpp"
#include "freewalk/tl_estimates.hpp"

namespace freewalk::cli {

namespace {

Word word_param(const RunConfig& cfg, const std::string& key, const std::string& fallback = {})
{
    const auto v = cfg.param(key);
    if (!v && fallback.empty())
        throw config_error("missing parameter --" + key);
    const std::string text = v ? *v : fallback;
    try {
        return Word::parse(text);
    } catch (const std::invalid_argument&) {
        throw config_error("--" + key + ": '" + text + "' is not a word over {a, b} (use e for the empty word)");
    }
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string::npos ? s.size() : comma;
        if (end > start)
            out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::vector<Word> word_list(const RunConfig& cfg, const std::string& key, const std::string& fallback)
{
    std::vector<Word> out;
    for (const auto& s : split(cfg.param(key, fallback))) {
        try {
            out.push_back(Word::parse(s));
        } catch (const std::invalid_argument&) {
            throw config_error("--" + key + ": '" + s + "' is not a word over {a, b}");
        }
    }
    return out;
}

std::size_t count_param(const RunConfig& cfg, const std::string& key, std::size_t fallback)
{
    const auto v = cfg.param(key);
    if (!v)
        return fallback;
    try {
        std::size_t pos = 0;
        const long long n = std::stoll(*v, &pos);
        if (pos != v->size() || n < 0)
            throw std::invalid_argument(*v);
        return std::size_t(n);
    } catch (const std::exception&) {
        throw config_error("--" + key + ": expected a non-negative integer, got '" + *v + "'");
    }
}

std::vector<std::size_t> count_list(const RunConfig& cfg, const std::string& key, const std::string& fallback)
{
    std::vector<std::size_t> out;
    for (const auto& s : split(cfg.param(key, fallback))) {
        RunConfig tmp;
        tmp.params[key] = s;
        out.push_back(count_param(tmp, key, 0));
    }
    if (out.empty())
        throw config_error("--" + key + " is empty");
    return out;
}

McSettings mc_settings(const RunConfig& cfg)
{
    McSettings mc;
    mc.samples = cfg.budgets.samples;
    mc.seed = cfg.seed;
    mc.workers = cfg.workers;
    mc.policy.max_steps = cfg.budgets.max_steps;
    mc.policy.stable_steps = cfg.budgets.stable_steps;
    return mc;
}

// Self-adjoint test operator on H_w with unit norm, or the identity.
Eigen::MatrixXcd test_operator(const RunConfig& cfg, const Word& w, std::uint64_t index)
{
    const auto d = Eigen::Index(dim_min(w));
    const std::string kind = cfg.param("a", "random");
    if (kind == "identity")
        return Eigen::MatrixXcd::Identity(d, d);
    if (kind != "random")
        throw config_error("--a must be 'identity' or 'random'");
    CounterRng rng(cfg.seed, fnv1a("operator:" + w.str()) + index);
    Eigen::MatrixXcd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            a(i, j) = cplx(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
    const Eigen::MatrixXcd h = a + a.adjoint();
    return h / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().cwiseAbs().maxCoeff();
}

std::string show(const Word& w) { return w.display(); }
std::int64_t i64(std::size_t n) { return std::int64_t(n); }

void cmd_fuse(const RunConfig& cfg, Envelope& env)
{
    const Word x = word_param(cfg, "x"), y = word_param(cfg, "y");
    Table t{"terms", {"x", "y", "summand", "cancelled"}, {}};
    for (const auto& term : fuse(x, y))
        t.add({show(x), show(y), show(term.summand), show(term.cancelled)});
    env.tables.push_back(std::move(t));
}

void cmd_qdim(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    std::vector<Word> words;
    if (cfg.param("x"))
        words = word_list(cfg, "x", "");
    else
        words = words_up_to(count_param(cfg, "n", 3));
    Table t{"dims", {"word", "dim_min", "dim_q", "log_dim_q"}, {}};
    for (const auto& w : words) {
        const auto d = dim_q(w, q);
        t.add({show(w), i64(dim_min(w)), d.linear, d.log});
    }
    env.tables.push_back(std::move(t));
}

void cmd_kernel(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const auto xs = word_list(cfg, "x", "e");
    const std::size_t n = count_param(cfg, "n", 1);
    const auto kernel = n_step(xs, n, cfg.measure(), q);
    Table t{"kernel", {"start", "step", "word", "probability"}, {}};
    for (const auto& x : xs)
        for (std::size_t k = 1; k <= n; ++k)
            for (const auto& [w, p] : kernel.distribution(k, x))
                t.add({show(x), i64(k), show(w), p});
    env.tables.push_back(std::move(t));
}

void cmd_convolve(const RunConfig& cfg, Envelope& env)
{
    const std::size_t n = count_param(cfg, "n", 2);
    const auto power = convolution_power(cfg.measure(), n, QParam(cfg.q));
    Table t{"convolution", {"n", "word", "weight"}, {}};
    for (const auto& [w, m] : power.weights())
        t.add({i64(n), show(w), m});
    env.tables.push_back(std::move(t));
}

void cmd_rho(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const auto mu = cfg.measure();
    const auto gen = is_generating(mu, q, 3, cfg.budgets.horizon);
    Table t{"rho", {"q", "rho", "generating", "horizon", "max_length"}, {}};
    t.add({cfg.q, rho(mu, q), gen.generating, i64(gen.horizon), i64(gen.max_length)});
    env.tables.push_back(std::move(t));
}

void cmd_walk(const RunConfig& cfg, Envelope& env)
{
    const Word x = word_param(cfg, "x", "e");
    const auto path = sample_path(x, count_param(cfg, "steps", 20), cfg.measure(), QParam(cfg.q), cfg.seed);
    Table t{"path", {"step", "word"}, {}};
    for (std::size_t i = 0; i < path.size(); ++i)
        t.add({i64(i), show(path[i])});
    env.tables.push_back(std::move(t));
}

void cmd_hit(const RunConfig& cfg, Envelope& env)
{
    const Word x = word_param(cfg, "x", "e"), z = word_param(cfg, "z");
    const auto h = estimate_hitting(x, z, cfg.measure(), QParam(cfg.q), mc_settings(cfg));
    Table t{"hitting", {"start", "cylinder", "estimate", "stderr", "samples", "unresolved"}, {}};
    t.add({show(h.start), show(h.cylinder), h.value, h.stderr_, i64(h.samples), i64(h.unresolved)});
    env.tables.push_back(std::move(t));
}

void cmd_harmonic(const RunConfig& cfg, Envelope& env)
{
    const Word x = word_param(cfg, "x", "e"), z = word_param(cfg, "z");
    const auto r = harmonicity_check(x, z, cfg.measure(), QParam(cfg.q), mc_settings(cfg));
    const double tol = 3.0 * r.combined_stderr * cfg.tolerance_scale;
    const double unresolved = double(r.unresolved) / double(std::max<std::size_t>(r.samples + r.unresolved, 1));
    const bool pass = r.residual <= tol && unresolved < 0.01;
    Table t{"harmonicity",
            {"start", "cylinder", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "combined_stderr", "residual",
             "tolerance", "unresolved", "samples", "pass"},
            {}};
    t.add({show(x), show(z), r.lhs, r.lhs_stderr, r.rhs, r.rhs_stderr, r.combined_stderr, r.residual, tol,
           i64(r.unresolved), i64(r.samples), pass});
    env.tables.push_back(std::move(t));
    env.check_failed = !pass;
}

void cmd_convolutie(const RunConfig& cfg, Envelope& env)
{
    const Word x = word_param(cfg, "x"), z = word_param(cfg, "z");
    const auto r = convolutie_check(x, z, cfg.measure(), QParam(cfg.q), mc_settings(cfg),
                                    count_param(cfg, "tail_extra", 8));
    const double tol = 3.0 * r.combined_stderr * cfg.tolerance_scale;
    const bool pass = std::abs(r.lhs - r.rhs) <= tol;
    Table t{"convolutie",
            {"start", "cylinder", "lhs", "lhs_stderr", "rhs", "rhs_stderr", "combined_stderr", "tolerance",
             "alternating_tails", "unresolved", "samples", "pass"},
            {}};
    t.add({show(x), show(z), r.lhs, r.lhs_stderr, r.rhs, r.rhs_stderr, r.combined_stderr, tol,
           i64(r.alternating_tails), i64(r.unresolved), i64(r.samples), pass});
    env.tables.push_back(std::move(t));
    env.check_failed = !pass;
}

void cmd_atom_scan(const RunConfig& cfg, Envelope& env)
{
    const Word letter = word_param(cfg, "letter", "a");
    if (letter.size() != 1)
        throw config_error("--letter must be a or b");
    const auto r = atom_scan(letter[0], count_list(cfg, "depths", "1,2,3,4,5,6"), cfg.measure(), QParam(cfg.q),
                             mc_settings(cfg), count_param(cfg, "support_depth", 4));
    Table m{"masses", {"letter", "depth", "cylinder", "mass", "stderr"}, {}};
    for (const auto& h : r.masses)
        m.add({show(letter), i64(h.cylinder.size()), show(h.cylinder), h.value, h.stderr_});
    std::string empty;
    for (const auto& w : r.empty_cylinders)
        empty += (empty.empty() ? "" : " ") + show(w);
    const bool pass = r.non_increasing && r.empty_cylinders.empty();
    Table s{"summary", {"non_increasing", "empty_cylinders", "unresolved", "samples", "pass"}, {}};
    s.add({r.non_increasing, empty, i64(r.unresolved), i64(r.samples), pass});
    env.tables.push_back(std::move(m));
    env.tables.push_back(std::move(s));
    env.check_failed = !pass;
}

void cmd_tl_verify(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const double scale = cfg.tolerance_scale;
    const std::size_t jw_max = std::min<std::size_t>(count_param(cfg, "n", 7), cfg.budgets.strands);
    Table t{"checks", {"check", "value", "tolerance", "pass"}, {}};
    const auto add = [&](const std::string& name, double value, double tol) {
        const bool pass = value <= tol * scale;
        t.add({name, value, tol * scale, pass});
        env.check_failed = env.check_failed || !pass;
    };

    double idem = 0, kill = 0;
    for (std::size_t n = 2; n <= jw_max; ++n) {
        const Eigen::MatrixXd f = jones_wenzl(n, q, cfg.budgets.strands).dense<double>();
        idem = std::max(idem, (f * f - f).cwiseAbs().maxCoeff());
        for (std::size_t i = 0; i + 1 < n; ++i)
            kill = std::max(kill, (tl_generator(n, i, q).dense<double>() * f).cwiseAbs().maxCoeff());
    }
    add("jones_wenzl_idempotent", idem, 1e-10);
    add("jones_wenzl_annihilation", kill, 1e-10);

    const double inv = 1.0 / (cfg.q + 1.0 / cfg.q);
    const Eigen::MatrixXd z1 = cap(3, 0, q).after(cup(1, 1, q)).dense<double>();
    const Eigen::MatrixXd z2 = cap(3, 1, q).after(cup(1, 0, q)).dense<double>();
    add("zig_zag", std::max((z1 - inv * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(),
                            (z2 - inv * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff()),
        1e-12);

    double trace = 0;
    for (const auto& w : words_up_to(std::min<std::size_t>(10, cfg.budgets.strands))) {
        const WordSpace s(w, q);
        trace = std::max(trace, std::abs(s.trace_q() - dim_q(w, q).linear) / dim_q(w, q).linear);
    }
    add("trace_q_equals_dim_q", trace, 1e-9);

    double complete = 0, isometry = 0;
    for (const auto& x : words_up_to(8))
        for (const auto& y : words_up_to(8 - x.size())) {
            const auto n = Eigen::Index(dim_min(x) * dim_min(y));
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
            for (const auto& term : fuse(x, y)) {
                const auto ch = channel(x, y, term.summand, q);
                const Eigen::MatrixXcd v = channel_matrix(*ch);
                isometry = std::max(
                    isometry,
                    (v.adjoint() * v - Eigen::MatrixXcd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff());
                sum += v * v.adjoint();
            }
            complete = std::max(complete, (sum - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
        }
    add("fusion_isometry", isometry, 1e-10);
    add("channel_completeness", complete, 1e-9);
    env.tables.push_back(std::move(t));
}

void cmd_estimates(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const Word x = word_param(cfg, "x", "e"), z = word_param(cfg, "z", "e"), r = word_param(cfg, "r", "e");
    std::vector<Word> ys;
    if (cfg.param("y"))
        ys = word_list(cfg, "y", "");
    else {
        const Word start = word_param(cfg, "y_start", "a");
        if (start.size() != 1)
            throw config_error("--y-start must be a or b");
        for (std::size_t n : count_list(cfg, "y_lengths", "1,3,5"))
            ys.push_back(Word::alternating(start[0], n));
    }
    EstimateOptions opts;
    opts.strand_budget = cfg.budgets.strands;
    std::vector<EstimateReport> reports(ys.size());
    parallel_for(ys.size(), cfg.workers, [&](std::size_t i) { reports[i] = approx_estimates(x, ys[i], z, r, q, opts); });
    Table t{"estimates", {"x", "y", "z", "r", "q", "lhs1", "lhs2", "lhs_variant", "q_pow_y"}, {}};
    for (const auto& e : reports)
        t.add({show(e.x), show(e.y), show(e.z), show(e.r), e.q, e.lhs1, e.lhs2, e.lhs_variant, e.q_pow});
    env.tables.push_back(std::move(t));
}

void cmd_qmarkov(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const auto mu = cfg.measure();
    const std::size_t radius = cfg.budgets.radius;
    const std::size_t reach = mu.max_length();
    if (reach > radius)
        throw config_error("radius " + std::to_string(radius) + " is shorter than the support of mu");
    const std::size_t inner = count_param(cfg, "n", radius - reach);
    if (inner + reach > radius)
        throw config_error("--n " + std::to_string(inner) + " needs radius " + std::to_string(inner + reach));
    TruncationPolicy trunc{inner, {}, cfg.workers};
    Table t{"agreement", {"x", "w", "quantum", "classical", "scalar_defect", "leak"}, {}};
    double worst = 0;
    for (const auto& w : words_up_to(radius)) {
        const auto out = markov_apply(BlockElement::indicator(w, radius), mu, q, trunc);
        for (const auto& [x, b] : out.blocks) {
            const auto row = transition_row(x, mu, q);
            const auto it = row.entries.find(w);
            const double p = it == row.entries.end() ? 0.0 : it->second;
            const double d = double(b.rows());
            const cplx mean = b.trace() / d;
            const double defect = (b - mean * Eigen::MatrixXcd::Identity(b.rows(), b.cols())).norm();
            worst = std::max({worst, std::abs(mean - p), defect, out.leak(x)});
            if (p != 0.0 || std::abs(mean) > 1e-14)
                t.add({show(x), show(w), mean.real(), p, defect, out.leak(x)});
        }
    }
    const double tol = 1e-8 * cfg.tolerance_scale;
    Table s{"summary", {"max_deviation", "tolerance", "pass"}, {}};
    s.add({worst, tol, worst <= tol});
    env.check_failed = worst > tol;
    env.tables.push_back(std::move(t));
    env.tables.push_back(std::move(s));
}

void cmd_dirichlet(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const Word x0 = word_param(cfg, "x0", "a");
    const auto ys = word_list(cfg, "ys", "a,b");
    const auto lengths = count_list(cfg, "lengths", "2,3,4,5,6");
    const std::size_t operators = std::max<std::size_t>(count_param(cfg, "n", 1), 1);
    const double tol = 1e-8 * cfg.tolerance_scale;
    Table t{"profile", {"operator", "length", "value", "worst_x", "worst_y", "two_form_gap", "words"}, {}};
    Table s{"summary", {"operator", "endpoint_decrease", "monotone_step2", "max_two_form_gap", "pass"}, {}};
    for (std::size_t i = 0; i < operators; ++i) {
        const auto rows = dirichlet_profile(x0, test_operator(cfg, x0, i), ys, lengths, q, cfg.budgets.strands);
        double gap = 0;
        bool monotone = true;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& r = rows[k];
            t.add({i64(i), i64(r.length), r.value, show(r.worst_x), show(r.worst_y), r.two_form_gap, i64(r.words)});
            gap = std::max(gap, r.two_form_gap);
            for (std::size_t j = 0; j < k; ++j)
                if (rows[j].length + 2 == r.length && r.value > rows[j].value)
                    monotone = false;
        }
        const bool decrease = rows.size() < 2 || rows.back().value < rows.front().value;
        const bool pass = decrease && gap <= tol;
        s.add({i64(i), decrease, monotone, gap, pass});
        env.check_failed = env.check_failed || !pass;
    }
    env.tables.push_back(std::move(t));
    env.tables.push_back(std::move(s));
}

void cmd_omega(const RunConfig& cfg, Envelope& env)
{
    const QParam q(cfg.q);
    const Word x0 = word_param(cfg, "x0", "a");
    const Eigen::MatrixXcd a = test_operator(cfg, x0, 0);
    const auto r = omega_infinity_check(x0, a, cfg.measure(), q, mc_settings(cfg), count_param(cfg, "iterations", 10),
                                        cfg.tolerance_scale);
    Table t{"omega",
            {"x0", "operator", "lhs_re", "lhs_im", "psi_re", "psi_im", "nu", "nu_stderr", "rhs_re", "rhs_im",
             "final_increment", "iterations", "tolerance", "converged", "pass"},
            {}};
    t.add({show(x0), cfg.param("a", "random"), r.lhs.real(), r.lhs.imag(), r.psi.real(), r.psi.imag(), r.nu,
           r.nu_stderr, r.rhs.real(), r.rhs.imag(), r.final_increment, i64(r.iterations), r.tolerance, r.converged,
           r.pass});
    env.tables.push_back(std::move(t));
    if (!r.diagnostic.empty())
        env.messages.push_back(r.diagnostic);
    env.check_failed = !r.pass;
}

const std::map<std::string, std::function<void(const RunConfig&, Envelope&)>>& registry()
{
    static const std::map<std::string, std::function<void(const RunConfig&, Envelope&)>> r{
        {"fuse", cmd_fuse},
        {"qdim", cmd_qdim},
        {"kernel", cmd_kernel},
        {"convolve", cmd_convolve},
        {"rho", cmd_rho},
        {"walk", cmd_walk},
        {"hit", cmd_hit},
        {"harmonic-check", cmd_harmonic},
        {"convolutie-check", cmd_convolutie},
        {"atom-scan", cmd_atom_scan},
        {"tl-verify", cmd_tl_verify},
        {"estimates", cmd_estimates},
        {"qmarkov", cmd_qmarkov},
        {"dirichlet", cmd_dirichlet},
        {"omega-check", cmd_omega},
    };
    return r;
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : registry())
            n.push_back(k);
        return n;
    }();
    return names;
}

Envelope dispatch(const std::string& command, const RunConfig& cfg)
{
    const auto it = registry().find(command);
    if (it == registry().end())
        throw config_error("unknown command '" + command + "'");
    Envelope env;
    env.command = command;
    env.digest = digest(cfg, command);
    env.messages = cfg.warnings;
    const auto start = std::chrono::steady_clock::now();
    try {
        it->second(cfg, env);
    } catch (const resource_error& e) {
        throw config_error(std::string("budget: ") + e.what());
    } catch (const std::domain_error& e) {
        throw config_error(e.what());
    }
    env.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return env;
}

} // namespace freewalk::cli
