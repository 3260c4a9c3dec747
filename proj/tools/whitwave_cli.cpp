// whitwave: command-line driver.
//
// Exit codes: 0 success, 1 a scientific check failed, 2 usage or I/O error.

#include "whitwave/errors.hpp"
#include "whitwave/io.hpp"
#include "whitwave/kdv.hpp"
#include "whitwave/model_io.hpp"
#include "whitwave/solver.hpp"
#include "whitwave/stability.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace whitwave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScience = 1;
constexpr int kExitUsage = 2;

struct ModelArgs {
    std::string file;
    std::string preset = "whitham";
    std::optional<double> k_star;
    std::optional<double> k_max;
};

struct GridArgs {
    double eps = 0.1;
    std::string mode = "solitary";
    double half_period = 40.0;
    int modes = 1024;
    double tol = 1e-11;
    int max_iter = 25;
    double damping = 1.0;
    std::string linear_solver = "dense";
};

struct StabilityArgs {
    bool full_spectrum = false;
    double mu = 2.0;
    std::uint64_t seed = 20240611;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    auto* file = cmd->add_option("--model", m.file, "Model configuration file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", m.preset, "Bundled model: whitham, kdv or convex")
        ->check(CLI::IsMember({"whitham", "kdv", "convex"}))
        ->capture_default_str()
        ->excludes(file);
    cmd->add_option("--k-star", m.k_star, "Override symbol.k_star (half-width of the m'' < 0 window)");
    cmd->add_option("--k-max", m.k_max, "Override symbol.k_max (sampling horizon for the tail bound)");
}

void add_grid_options(CLI::App* cmd, GridArgs& g, bool with_eps) {
    if (with_eps) cmd->add_option("--eps", g.eps, "Long-wave parameter eps in (0, 1)")->capture_default_str();
    cmd->add_option("--mode", g.mode, "solitary (truncated line) or periodic")
        ->check(CLI::IsMember({"solitary", "periodic"}))
        ->capture_default_str();
    cmd->add_option("--half-period", g.half_period, "Half-period P of the rescaled cell [-P, P)")
        ->capture_default_str();
    cmd->add_option("--modes", g.modes, "Number of grid points N (even, >= 16)")->capture_default_str();
    cmd->add_option("--tol", g.tol, "Newton tolerance on the sup-norm residual")->capture_default_str();
    cmd->add_option("--max-iter", g.max_iter, "Newton iteration cap")->capture_default_str();
    cmd->add_option("--damping", g.damping, "Initial Newton step length in (0, 1]")->capture_default_str();
    cmd->add_option("--linear-solver", g.linear_solver, "dense or krylov")
        ->check(CLI::IsMember({"dense", "krylov"}))
        ->capture_default_str();
}

void add_stability_options(CLI::App* cmd, StabilityArgs& s) {
    cmd->add_flag("--full-spectrum", s.full_spectrum, "Also compute the spectrum of d/dx Lc_eps (slow; advisory)");
    cmd->add_option("--mu", s.mu, "Shift for the resolvent comparison")->capture_default_str();
    cmd->add_option("--seed", s.seed, "Seed for the random test fields of the resolvent comparison")
        ->capture_default_str();
}

LoadedModel load_model(const ModelArgs& m) {
    json config;
    fs::path base;
    if (!m.file.empty()) {
        try {
            config = json::parse(io::read_file(m.file));
        } catch (const json::exception& e) {
            throw InputError("model file " + m.file + ": " + e.what());
        }
        base = fs::absolute(m.file).parent_path();
    } else {
        config = preset_model_config(m.preset);
    }
    try {
        if (m.k_star) config["symbol"]["k_star"] = *m.k_star;
        if (m.k_max) config["symbol"]["k_max"] = *m.k_max;
        return model_from_json(config, base);
    } catch (const json::exception& e) {
        throw InputError("model configuration: " + std::string(e.what()));
    }
}

SolveConfig solve_config(const GridArgs& g) {
    SolveConfig c;
    c.eps = g.eps;
    c.mode = parse_wave_mode(g.mode);
    c.half_period = g.half_period;
    c.n_points = g.modes;
    c.newton_tol = g.tol;
    c.max_iter = g.max_iter;
    c.damping = g.damping;
    c.linear_solver = g.linear_solver == "krylov" ? LinearSolver::Krylov : LinearSolver::Dense;
    c.validate();
    return c;
}

json grid_json(const SolveConfig& c) {
    return {{"eps", c.eps},
            {"mode", to_string(c.mode)},
            {"half_period", c.half_period},
            {"n_points", c.n_points},
            {"newton_tol", c.newton_tol},
            {"max_iter", c.max_iter},
            {"damping", c.damping},
            {"linear_solver", c.linear_solver == LinearSolver::Krylov ? "krylov" : "dense"}};
}

int thread_count() {
    const char* env = std::getenv("WHITWAVE_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 256) throw InputError("WHITWAVE_THREADS must be an integer in [1, 256]");
    return static_cast<int>(n);
}

// Runs jobs[i] for every i with at most `threads` in flight; results keep
// their input order, so output does not depend on the thread count.
template <class T>
std::vector<T> run_ordered(const std::vector<std::function<T()>>& jobs, int threads) {
    std::vector<T> out;
    out.reserve(jobs.size());
    for (std::size_t start = 0; start < jobs.size(); start += static_cast<std::size_t>(threads)) {
        const std::size_t stop = std::min(jobs.size(), start + static_cast<std::size_t>(threads));
        if (stop - start == 1) {
            out.push_back(jobs[start]());
            continue;
        }
        std::vector<std::future<T>> batch;
        for (std::size_t i = start; i < stop; ++i) batch.push_back(std::async(std::launch::async, jobs[i]));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

std::string fmt(double v, int digits = 10) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string eps_tag(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "eps%g", eps);
    return buf;
}

fs::path with_suffix(const std::string& prefix, const std::string& suffix) { return fs::path(prefix + suffix); }

void write_solution(const WaveSolution& s, const json& model_config, const std::string& prefix,
                    io::Manifest& manifest, const json& extra = json::object()) {
    const fs::path profile = with_suffix(prefix, "_profile.csv");
    const fs::path meta_path = with_suffix(prefix, "_meta.json");
    io::write_profile_csv(profile, s);
    json meta = io::solution_meta(s, model_config);
    meta["profile"] = profile.filename().string();
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    io::write_atomic(meta_path, meta.dump(2) + "\n");
    manifest.add_output(profile);
    manifest.add_output(meta_path);
}

void write_stability(const StabilityReport& r, const std::string& prefix, io::Manifest& manifest) {
    const fs::path json_path = with_suffix(prefix, "_stability.json");
    const fs::path spec_path = with_suffix(prefix, "_spectrum.csv");
    io::write_atomic(json_path, io::to_json(r).dump(2) + "\n");
    io::write_spectrum_csv(spec_path, r.eigenvalues);
    manifest.add_output(json_path);
    manifest.add_output(spec_path);
    if (r.full_spectrum) {
        const fs::path full = with_suffix(prefix, "_full_spectrum.csv");
        io::write_complex_spectrum_csv(full, r.full_spectrum->eigenvalues);
        manifest.add_output(full);
    }
}

void print_report(const StabilityReport& r) {
    std::cout << "  eigenvalues of eps^-2 Lc:";
    for (std::size_t i = 0; i < std::min<std::size_t>(4, r.eigenvalues.size()); ++i)
        std::cout << " " << fmt(r.eigenvalues[i]);
    std::cout << "\n  morse index " << r.morse_index << ", kernel dim " << r.kernel_dim << " (alignment "
              << fmt(r.kernel_alignment, 12) << ")\n"
              << "  eps^2 VK = " << fmt(r.vk_scaled) << "  (asymptote " << fmt(r.vk_asymptote * r.eps * r.eps)
              << ")\n";
    if (r.resolvent_gap) std::cout << "  resolvent gap " << fmt(*r.resolvent_gap) << "\n";
    if (r.full_spectrum)
        std::cout << "  full spectrum: max Re = " << fmt(r.full_spectrum->max_real) << ", quadruple defect "
                  << fmt(r.full_spectrum->quadruple_defect) << "\n";
    std::cout << "  verdict: " << to_string(r.verdict) << " (k_unstable <= " << r.k_unstable_bound << ")\n";
    if (!r.diagnostics.empty()) std::cout << "  " << r.diagnostics << "\n";
}

StabilityOptions stability_options(const StabilityArgs& a) {
    if (!(a.mu > 0.0)) throw InputError("--mu must be positive");
    StabilityOptions o;
    o.mu = a.mu;
    o.seed = a.seed;
    o.full_spectrum = a.full_spectrum;
    return o;
}

std::vector<double> parse_ladder(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0' || !std::isfinite(v)) throw InputError("bad eps ladder entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw InputError("eps ladder is empty");
    for (double e : out)
        if (!(e > 0.0 && e < 1.0)) throw InputError("eps ladder entries must lie in (0, 1)");
    return out;
}

// --- commands ---------------------------------------------------------------

int cmd_verify(const ModelArgs& margs, int samples, const std::string& prefix) {
    io::Stopwatch clock;
    const LoadedModel lm = load_model(margs);
    const VerificationReport r = verify_model(lm.model, samples);
    io::Manifest manifest("verify");
    manifest.set_config({{"samples", samples}});
    manifest.set_model(lm.config);
    manifest.add_timing("verify", clock.seconds());
    manifest.add_verdict("hypotheses", r.passed());

    const fs::path report = with_suffix(prefix, "_verify.json");
    json j = io::to_json(r);
    j["model"] = lm.config;
    io::write_atomic(report, j.dump(2) + "\n");
    manifest.add_output(report);
    manifest.write(with_suffix(prefix, "_manifest.json"));

    std::cout << "model " << lm.model.name() << "\n";
    for (const auto& c : r.checks)
        std::cout << "  " << (c.passed ? "pass" : "FAIL") << "  " << c.name << "  (" << fmt(c.witness) << ")\n";
    std::cout << "  m0 = " << fmt(r.m0) << ", m''(0) = " << fmt(r.mpp0) << ", n''(0) = " << fmt(r.npp0)
              << ", gamma = " << (std::isfinite(r.gamma) ? fmt(r.gamma) : "undefined") << "\n"
              << "  tail: " << r.tail_path << ", regularity: " << r.regularity << "\n";
    return r.passed() ? kExitOk : kExitScience;
}

int cmd_solve(const ModelArgs& margs, const GridArgs& gargs, const std::string& prefix) {
    io::Stopwatch total;
    const LoadedModel lm = load_model(margs);
    const SolveConfig cfg = solve_config(gargs);
    io::Manifest manifest("solve");
    manifest.set_config(grid_json(cfg));
    manifest.set_model(lm.config);

    io::Stopwatch clock;
    const LimitProfile guess = limit_profile_for(lm.model, cfg.mode, cfg.grid());
    manifest.add_timing("limit_profile", clock.seconds());
    clock = io::Stopwatch();
    const WaveSolution s = newton_solve(lm.model, cfg, guess.field);
    manifest.add_timing("newton", clock.seconds());

    write_solution(s, lm.config, prefix, manifest);
    manifest.add_verdict("converged", true);
    manifest.add_timing("total", total.seconds());
    manifest.write(with_suffix(prefix, "_manifest.json"));

    std::cout << "converged in " << s.iterations << " iterations: eps = " << fmt(s.eps) << ", nu = " << fmt(s.nu, 16)
              << ", residual " << fmt(s.residual_sup, 3) << ", max W = " << fmt(s.W.max_abs()) << "\n";
    if (s.mode == WaveMode::Solitary) {
        const double d = decay_check(s);
        std::cout << "decay check " << fmt(d, 3) << (d <= 1e-9 ? "" : "  (WARNING: cell too short for a solitary wave)")
                  << "\n";
    }
    return kExitOk;
}

int cmd_continue(const ModelArgs& margs, const GridArgs& gargs, const std::string& ladder_text,
                 const std::string& prefix) {
    io::Stopwatch total;
    const LoadedModel lm = load_model(margs);
    const std::vector<double> ladder = parse_ladder(ladder_text);
    GridArgs g = gargs;
    g.eps = ladder.front();
    const SolveConfig cfg = solve_config(g);
    io::Manifest manifest("continue");
    json config = grid_json(cfg);
    config.erase("eps");
    config["eps_ladder"] = ladder;
    manifest.set_config(config);
    manifest.set_model(lm.config);

    const ContinuationRun run = continue_in_eps(lm.model, ladder, cfg);
    manifest.add_timing("continuation", total.seconds());

    json rungs = json::array();
    for (std::size_t i = 0; i < run.solutions.size(); ++i) {
        const WaveSolution& s = run.solutions[i];
        const std::string rp = prefix + "_" + eps_tag(s.eps);
        write_solution(s, lm.config, rp, manifest, {{"deviation_h1", run.deviations[i]}});
        rungs.push_back({{"eps", s.eps},
                         {"nu", s.nu},
                         {"deviation_h1", run.deviations[i]},
                         {"residual", s.residual_sup},
                         {"iterations", s.iterations},
                         {"meta", fs::path(rp + "_meta.json").filename().string()}});
        std::cout << "eps " << fmt(s.eps) << ": nu " << fmt(s.nu, 16) << ", iterations " << s.iterations
                  << ", ||W - limit||_H1 = " << fmt(run.deviations[i]) << "\n";
    }
    json meta = {{"mode", to_string(cfg.mode)},
                 {"half_period", cfg.half_period},
                 {"n_points", cfg.n_points},
                 {"eps_ladder", ladder},
                 {"rungs", rungs},
                 {"complete", run.complete},
                 {"model", lm.config}};
    if (run.slope) meta["slope"] = *run.slope;
    if (!run.complete) meta["failure"] = run.failure;
    const fs::path meta_path = with_suffix(prefix, "_meta.json");
    io::write_atomic(meta_path, meta.dump(2) + "\n");
    manifest.add_output(meta_path);
    manifest.add_verdict("complete", run.complete);
    if (run.slope) manifest.add_verdict("slope", *run.slope);
    manifest.add_timing("total", total.seconds());
    manifest.write(with_suffix(prefix, "_manifest.json"));

    if (run.slope) std::cout << "fitted slope of log d vs log eps: " << fmt(*run.slope, 6) << "\n";
    if (!run.complete) {
        std::cerr << "continuation stopped: " << run.failure << "\n";
        return kExitScience;
    }
    return kExitOk;
}

int cmd_stability(const std::string& solution_path, const StabilityArgs& sargs, std::string prefix) {
    io::Stopwatch total;
    const io::StoredSolution stored = io::load_solution(solution_path);
    if (prefix.empty()) {
        prefix = solution_path;
        const std::string tail = "_meta.json";
        if (prefix.size() > tail.size() && prefix.compare(prefix.size() - tail.size(), tail.size(), tail) == 0)
            prefix.erase(prefix.size() - tail.size());
    }
    const StabilityOptions opts = stability_options(sargs);
    io::Manifest manifest("stability");
    manifest.set_config({{"solution", solution_path},
                         {"mu", opts.mu},
                         {"seed", opts.seed},
                         {"full_spectrum", opts.full_spectrum}});
    manifest.set_model(stored.model.config);

    const StabilityReport r = analyze_stability(stored.model.model, stored.solution, opts);
    manifest.add_timing("analysis", total.seconds());
    write_stability(r, prefix, manifest);
    manifest.add_verdict("verdict", to_string(r.verdict));
    manifest.write(with_suffix(prefix, "_stability_manifest.json"));

    std::cout << "stability of " << stored.solution.model_name << " " << to_string(stored.solution.mode)
              << " wave at eps = " << fmt(stored.solution.eps) << "\n";
    print_report(r);
    return r.verdict == Verdict::IndexViolation ? kExitScience : kExitOk;
}

int cmd_limit(const ModelArgs& margs, std::optional<double> gamma_arg, const GridArgs& gargs, int count,
              const std::string& prefix) {
    io::Stopwatch total;
    double gamma = 0.0;
    json model_config = nullptr;
    if (gamma_arg) {
        gamma = *gamma_arg;
        if (!(gamma > 0.0)) throw InputError("--gamma must be positive");
    } else {
        const LoadedModel lm = load_model(margs);
        gamma = gamma_of(lm.model);
        model_config = lm.config;
    }
    const WaveMode mode = parse_wave_mode(gargs.mode);
    const PeriodicGrid grid(gargs.half_period, gargs.modes);
    if (count < 1 || count > grid.size()) throw InputError("--count must lie in [1, N]");

    io::Manifest manifest("limit");
    manifest.set_config({{"gamma", gamma},
                         {"mode", to_string(mode)},
                         {"half_period", grid.half_period()},
                         {"n_points", grid.size()},
                         {"count", count}});
    if (!model_config.is_null()) manifest.set_model(model_config);

    const LimitProfile profile = mode == WaveMode::Solitary ? sigma(gamma, grid) : solve_cnoidal(gamma, grid);
    const LimitSpectrum spec = limit_spectrum(limit_operator(profile), count, false);
    const double vk = limit_vk_numeric(profile);
    const double smin = k_operator_min_singular(profile);
    manifest.add_timing("total", total.seconds());

    json j = {{"gamma", gamma},
              {"kind", to_string(profile.kind)},
              {"half_period", grid.half_period()},
              {"n_points", grid.size()},
              {"residual", profile.residual},
              {"eigenvalues", spec.eigenvalues},
              {"vk_numeric", vk},
              {"k_min_singular", smin}};
    if (mode == WaveMode::Solitary) {
        j["vk_closed_form"] = limit_vk_closed_form(gamma);
        j["vk_closed_form_grid"] = l2_inner(linv_sigma_closed_form(gamma, grid), profile.field);
    } else {
        j["newton_iterations"] = profile.iterations;
    }
    const fs::path jp = with_suffix(prefix, "_limit.json");
    const fs::path pp = with_suffix(prefix, "_limit_profile.csv");
    const fs::path sp = with_suffix(prefix, "_limit_spectrum.csv");
    io::write_atomic(jp, j.dump(2) + "\n");
    io::write_field_csv(pp, profile.field);
    io::write_spectrum_csv(sp, spec.eigenvalues);
    for (const auto& p : {jp, pp, sp}) manifest.add_output(p);
    manifest.write(with_suffix(prefix, "_manifest.json"));

    std::cout << to_string(profile.kind) << " limit profile, gamma = " << fmt(gamma) << ", P = " << fmt(grid.half_period())
              << ", N = " << grid.size() << ", residual " << fmt(profile.residual, 3) << "\n";
    std::cout << "<Lc^-1 phi, phi> = " << fmt(vk, 12);
    if (mode == WaveMode::Solitary) std::cout << "  (closed form " << fmt(limit_vk_closed_form(gamma), 12) << ")";
    std::cout << "\nlowest eigenvalues of Lc:";
    for (double e : spec.eigenvalues) std::cout << " " << fmt(e, 8);
    std::cout << "\nsmallest singular value of K on even fields: " << fmt(smin, 8) << "\n";
    return kExitOk;
}

// --- reproduce --------------------------------------------------------------

struct Criterion {
    std::string name;
    bool passed;
    std::string detail;
};

int cmd_reproduce(const GridArgs& gargs, const std::string& modes_arg, const std::string& ladder_text,
                  const StabilityArgs& sargs, const std::string& prefix) {
    io::Stopwatch total;
    const int threads = thread_count();
    const json model_config = preset_model_config("whitham");
    const LoadedModel lm = model_from_json(model_config);
    const std::vector<double> ladder = parse_ladder(ladder_text);
    const StabilityOptions opts = stability_options(sargs);

    std::vector<WaveMode> modes;
    if (modes_arg == "both" || modes_arg == "solitary") modes.push_back(WaveMode::Solitary);
    if (modes_arg == "both" || modes_arg == "periodic") modes.push_back(WaveMode::Periodic);

    io::Manifest manifest("reproduce");
    json config = grid_json(solve_config(gargs));
    config.erase("eps");
    config["mode"] = modes_arg;
    config["eps_ladder"] = ladder;
    config["mu"] = opts.mu;
    config["seed"] = opts.seed;
    config["full_spectrum"] = opts.full_spectrum;
    manifest.set_config(config);
    manifest.set_model(model_config);

    std::vector<Criterion> criteria;
    auto record = [&](std::string name, bool ok, std::string detail) {
        criteria.push_back({std::move(name), ok, std::move(detail)});
    };

    io::Stopwatch clock;
    const VerificationReport vr = verify_model(lm.model);
    manifest.add_timing("verify", clock.seconds());
    record("hypotheses", vr.passed() && std::fabs(vr.gamma - 6.0) <= 1e-6, "gamma = " + fmt(vr.gamma, 12));

    std::string table = "mode,eps,nu,h1_deviation,lambda0,lambda1,lambda2,eps2_vk,verdict\n";
    std::cout << "mode       eps      nu_eps              ||W-phi||_H1   lambda0        lambda1        lambda2        "
                 "eps^2*VK       verdict\n";

    for (WaveMode mode : modes) {
        GridArgs g = gargs;
        g.mode = to_string(mode);
        g.eps = ladder.front();
        const SolveConfig cfg = solve_config(g);
        clock = io::Stopwatch();
        const ContinuationRun run = continue_in_eps(lm.model, ladder, cfg);
        manifest.add_timing(to_string(mode) + "_continuation", clock.seconds());
        const std::string tag = to_string(mode);
        record(tag + " continuation complete", run.complete, run.complete ? "" : run.failure);
        if (run.slope)
            record(tag + " eps^2 rate", std::fabs(*run.slope - 2.0) <= 0.2, "slope = " + fmt(*run.slope, 6));

        std::vector<std::function<StabilityReport()>> jobs;
        for (const WaveSolution& s : run.solutions)
            jobs.push_back([&lm, &s, &opts] { return analyze_stability(lm.model, s, opts); });
        clock = io::Stopwatch();
        const std::vector<StabilityReport> reports = run_ordered(jobs, threads);
        manifest.add_timing(tag + "_stability", clock.seconds());

        std::optional<double> gap10, gap05;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const WaveSolution& s = run.solutions[i];
            const StabilityReport& r = reports[i];
            const std::string rp = prefix + "_" + tag + "_" + eps_tag(s.eps);
            write_solution(s, model_config, rp, manifest, {{"deviation_h1", run.deviations[i]}});
            write_stability(r, rp, manifest);

            const double l0 = r.eigenvalues.at(0), l1 = r.eigenvalues.at(1), l2 = r.eigenvalues.at(2);
            table += tag + "," + io::format_double(s.eps) + "," + io::format_double(s.nu) + "," +
                     io::format_double(run.deviations[i]) + "," + io::format_double(l0) + "," + io::format_double(l1) +
                     "," + io::format_double(l2) + "," + io::format_double(r.vk_scaled) + "," + to_string(r.verdict) + "\n";
            char line[256];
            std::snprintf(line, sizeof line, "%-10s %-8g %-19.16g %-14.6e %-14.8f %-14.3e %-14.8f %-14.8f %s\n",
                          tag.c_str(), s.eps, s.nu, run.deviations[i], l0, l1, l2, r.vk_scaled,
                          to_string(r.verdict).c_str());
            std::cout << line;

            const std::string at = tag + " eps=" + fmt(s.eps);
            record(at + " verdict", r.verdict == Verdict::SpectrallyStable && r.k_unstable_bound == 0,
                   to_string(r.verdict));
            record(at + " VK sign", r.vk_value < 0.0, "eps^2 VK = " + fmt(r.vk_scaled));
            record(at + " speed", std::fabs(s.nu - (1.0 + s.eps * s.eps / 6.0)) <= 1e-12 && s.nu > 1.0 && s.nu < 1.141,
                   "nu = " + fmt(s.nu, 16));
            if (mode == WaveMode::Solitary && s.eps == 0.05) {
                record(at + " eigenvalue asymptotics",
                       std::fabs(l0 + 5.0 / 24.0) <= 0.01 && std::fabs(l1) <= 1e-6 && std::fabs(l2 - 0.125) <= 0.01 &&
                           r.kernel_alignment > 0.999,
                       "lambda = " + fmt(l0) + ", " + fmt(l1, 3) + ", " + fmt(l2));
                record(at + " VK asymptote", std::fabs(r.vk_scaled + 0.75) <= 0.05 * 0.75,
                       "eps^2 VK = " + fmt(r.vk_scaled));
            }
            if (r.full_spectrum)
                record(at + " full spectrum", r.full_spectrum->max_real <= 1e-7,
                       "max Re = " + fmt(r.full_spectrum->max_real, 3));
            if (r.resolvent_gap) {
                if (s.eps == 0.1) gap10 = r.resolvent_gap;
                if (s.eps == 0.05) gap05 = r.resolvent_gap;
            }
        }
        if (gap10 && gap05) {
            const double ratio = *gap10 / *gap05;
            record(tag + " resolvent eps^2 rate", std::fabs(ratio - 4.0) <= 1.2, "ratio = " + fmt(ratio, 6));
        }
        if (run.slope) std::cout << tag << " slope of log||W-phi||_H1 vs log eps: " << fmt(*run.slope, 6) << "\n";
    }

    const fs::path summary = with_suffix(prefix, "_summary.csv");
    io::write_atomic(summary, table);
    manifest.add_output(summary);

    json crit = json::array();
    const Criterion* first_failure = nullptr;
    for (const auto& c : criteria) {
        crit.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        if (!c.passed && !first_failure) first_failure = &c;
    }
    manifest.add_verdict("criteria", crit);
    manifest.add_verdict("all_passed", first_failure == nullptr);
    manifest.add_timing("total", total.seconds());
    manifest.write(with_suffix(prefix, "_manifest.json"));

    std::cout << criteria.size() << " checks, " << (first_failure ? "FAILED" : "all passed") << " ("
              << fmt(total.seconds(), 3) << " s)\n";
    if (first_failure) {
        std::cerr << "first failing check: " << first_failure->name << " (" << first_failure->detail << ")\n";
        return kExitScience;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"whitwave: small-amplitude traveling waves of Whitham-type equations and their spectral stability.\n"
                 "Environment: WHITWAVE_THREADS sets the number of concurrent stability reports in 'reproduce' "
                 "(default 1)."};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kToolVersion);

    ModelArgs margs;
    GridArgs gargs;
    StabilityArgs sargs;
    std::string prefix;
    int samples = 400;
    std::string ladder = "0.025,0.05,0.1,0.2";
    std::string solution;
    std::optional<double> gamma;
    int count = 10;
    std::string repro_mode = "both";

    auto* verify = app.add_subcommand("verify", "Check the structural hypotheses on a model");
    add_model_options(verify, margs);
    verify->add_option("--samples", samples, "Sample count per check (>= 100)")->capture_default_str();
    verify->add_option("--out", prefix, "Output prefix")->default_str("verify");

    auto* solve = app.add_subcommand("solve", "Newton solve for one rescaled wave");
    add_model_options(solve, margs);
    add_grid_options(solve, gargs, true);
    solve->add_option("--out", prefix, "Output prefix")->default_str("solve");

    auto* cont = app.add_subcommand("continue", "Continuation along an increasing eps ladder");
    add_model_options(cont, margs);
    add_grid_options(cont, gargs, false);
    cont->add_option("--eps-ladder", ladder, "Comma-separated, strictly increasing eps values")->capture_default_str();
    cont->add_option("--out", prefix, "Output prefix")->default_str("continue");

    auto* stab = app.add_subcommand("stability", "Spectral stability of a stored solution");
    stab->add_option("--solution", solution, "A <prefix>_meta.json written by solve or continue")
        ->required()
        ->check(CLI::ExistingFile);
    add_stability_options(stab, sargs);
    stab->add_option("--out", prefix, "Output prefix (default: the solution's prefix)");

    auto* limit = app.add_subcommand("limit", "Facts about the eps = 0 limit problem");
    add_model_options(limit, margs);
    limit->add_option("--gamma", gamma, "Use this gamma instead of deriving it from the model");
    limit->add_option("--mode", gargs.mode, "solitary (sigma) or periodic (cnoidal)")
        ->check(CLI::IsMember({"solitary", "periodic"}))
        ->capture_default_str();
    limit->add_option("--half-period", gargs.half_period, "Half-period P")->capture_default_str();
    limit->add_option("--modes", gargs.modes, "Number of grid points N")->default_str("2048");
    limit->add_option("--count", count, "Number of eigenvalues to report")->capture_default_str();
    limit->add_option("--out", prefix, "Output prefix")->default_str("limit");

    auto* repro = app.add_subcommand("reproduce", "End-to-end run on the bundled Whitham model");
    repro->add_option("--mode", repro_mode, "solitary, periodic or both")
        ->check(CLI::IsMember({"solitary", "periodic", "both"}))
        ->capture_default_str();
    repro->add_option("--half-period", gargs.half_period, "Half-period P")->capture_default_str();
    repro->add_option("--modes", gargs.modes, "Number of grid points N")->capture_default_str();
    repro->add_option("--eps-ladder", ladder, "Comma-separated, strictly increasing eps values")->capture_default_str();
    add_stability_options(repro, sargs);
    repro->add_option("--out", prefix, "Output prefix")->default_str("reproduce");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (verify->parsed()) {
            if (samples < 100) throw InputError("--samples must be at least 100");
            return cmd_verify(margs, samples, prefix.empty() ? "verify" : prefix);
        }
        if (solve->parsed()) return cmd_solve(margs, gargs, prefix.empty() ? "solve" : prefix);
        if (cont->parsed()) return cmd_continue(margs, gargs, ladder, prefix.empty() ? "continue" : prefix);
        if (stab->parsed()) return cmd_stability(solution, sargs, prefix);
        if (limit->parsed()) {
            if (limit->count("--modes") == 0) gargs.modes = 2048;
            return cmd_limit(margs, gamma, gargs, count, prefix.empty() ? "limit" : prefix);
        }
        if (repro->parsed()) return cmd_reproduce(gargs, repro_mode, ladder, sargs, prefix.empty() ? "reproduce" : prefix);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitScience;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
