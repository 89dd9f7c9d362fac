#include "apnum/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "apnum/almostperiod.hpp"
#include "apnum/errors.hpp"
#include "apnum/grid.hpp"
#include "apnum/heatdelay.hpp"
#include "apnum/parallel.hpp"
#include "apnum/random.hpp"
#include "apnum/seminorm.hpp"
#include "apnum/semigroup.hpp"
#include "apnum/signals.hpp"
#include "apnum/solver.hpp"
#include "apnum/util.hpp"

namespace apnum::cli {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config file handling

bool IniDoc::has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string IniDoc::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    auto s = sections.find(section);
    if (s == sections.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

void IniDoc::set(const std::string& section, const std::string& key, const std::string& value) {
    sections[section][key] = value;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t line_offset = offset;
        offset += line.size() + 1;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw parse_error("config line " + std::to_string(lineno) +
                                      ": unterminated section header",
                                  line_offset);
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(lineno) + ": expected key = value",
                              line_offset);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw parse_error("config line " + std::to_string(lineno) + ": empty key",
                              line_offset);
        doc.sections[section][key] = value;
    }
    return doc;
}

namespace {

double parse_number(const std::string& raw, const std::string& where) {
    const char* begin = raw.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + raw.size() || raw.empty())
        throw std::invalid_argument("config: " + where + ": expected a number, got '" + raw + "'");
    return v;
}

/// Typed access to the document; every read (default or not) is recorded so
/// the output JSON can embed the fully resolved configuration.
class ConfigReader {
public:
    explicit ConfigReader(const IniDoc& doc) : doc_(doc) {}

    double number(const std::string& sec, const std::string& key, double fallback) {
        double v = doc_.has(sec, key) ? parse_number(doc_.get(sec, key, ""), sec + "." + key)
                                      : fallback;
        record(sec, key, v);
        return v;
    }

    std::size_t count(const std::string& sec, const std::string& key, std::size_t fallback) {
        double v = number(sec, key, static_cast<double>(fallback));
        if (v < 0.0 || v != std::floor(v))
            throw std::invalid_argument("config: " + sec + "." + key + ": expected a count");
        return static_cast<std::size_t>(v);
    }

    std::string text(const std::string& sec, const std::string& key,
                     const std::string& fallback) {
        std::string v = doc_.get(sec, key, fallback);
        record(sec, key, v);
        return v;
    }

    std::vector<double> list(const std::string& sec, const std::string& key) {
        std::string raw = doc_.get(sec, key, "");
        std::vector<double> out;
        std::string token;
        std::istringstream in(raw);
        while (std::getline(in, token, ',')) {
            std::istringstream parts(token);
            std::string piece;
            while (parts >> piece) out.push_back(parse_number(piece, sec + "." + key));
        }
        record(sec, key, out);
        return out;
    }

    const ordered_json& resolved() const { return resolved_; }

private:
    template <typename T>
    void record(const std::string& sec, const std::string& key, const T& value) {
        resolved_[sec.empty() ? "global" : sec][key] = value;
    }

    const IniDoc& doc_;
    ordered_json resolved_;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << content;
}

void write_summary(const fs::path& dir, ordered_json summary) {
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

std::string scan_csv(const std::vector<std::pair<double, double>>& rows, const char* h1,
                     const char* h2) {
    std::string out = std::string(h1) + "," + h2 + "\n";
    for (const auto& [a, b] : rows) out += format_double(a) + "," + format_double(b) + "\n";
    return out;
}

std::string solution_csv(const SampledPath& p) {
    std::string out = "t";
    for (std::size_t k = 0; k < p.dim(); ++k) out += ",x" + std::to_string(k);
    out += "\n";
    for (std::size_t i = 0; i < p.grid().n_points(); ++i) {
        out += format_double(p.grid().point(i));
        auto row = p.at_index(i);
        for (double x : row) out += "," + format_double(x);
        out += "\n";
    }
    return out;
}

std::string residuals_csv(const std::vector<double>& residuals,
                          const std::vector<double>& ratios) {
    std::string out = "iteration,residual,ratio\n";
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        out += std::to_string(i + 1) + "," + format_double(residuals[i]) + ",";
        if (i >= 1 && i - 1 < ratios.size()) out += format_double(ratios[i - 1]);
        out += "\n";
    }
    return out;
}

SeminormConfig read_seminorm_config(ConfigReader& cfg) {
    SeminormConfig sc;
    sc.flat = cfg.number("seminorm", "flat", sc.flat);
    sc.T0 = cfg.number("seminorm", "T0", sc.T0);
    sc.n_sweeps = cfg.count("seminorm", "n_sweeps", sc.n_sweeps);
    sc.growth = cfg.number("seminorm", "growth", sc.growth);
    sc.quad_step = cfg.number("seminorm", "quad_step", sc.quad_step);
    sc.tail_window = cfg.count("seminorm", "tail_window", sc.tail_window);
    sc.rel_tol = cfg.number("seminorm", "rel_tol", sc.rel_tol);
    sc.validate();
    return sc;
}

FnSpec read_function(ConfigReader& cfg) {
    std::string spec = cfg.text("function", "spec", "");
    if (spec.empty()) throw std::invalid_argument("config: [function] spec is required");
    return parse_fnspec(spec);
}

SolveConfig read_solve_config(ConfigReader& cfg, double default_H) {
    double t_min = cfg.number("solve", "t_min", 0.0);
    double t_max = cfg.number("solve", "t_max", 100.0);
    double step = cfg.number("solve", "step", 0.01);
    SolveConfig sc{TimeGrid(t_min, t_max, step)};
    sc.history_horizon = cfg.number("solve", "H", default_H);
    sc.quad_step = cfg.number("solve", "quad_step", 0.0);
    sc.tol = cfg.number("solve", "tol", 1e-8);
    sc.max_iter = cfg.count("solve", "max_iter", 64);
    return sc;
}

DelaySystem read_system(ConfigReader& cfg) {
    DelaySystem sys;
    std::vector<double> eigenvalues = cfg.list("system", "eigenvalues");
    if (eigenvalues.empty())
        throw std::invalid_argument("config: [system] eigenvalues is required");
    sys.semigroup = diagonal_semigroup(std::move(eigenvalues));
    std::string f_spec = cfg.text("system", "F", "");
    if (f_spec.empty()) throw std::invalid_argument("config: [system] F is required");
    sys.F = std::make_shared<ExprNonlinearity>(parse_fnspec(f_spec));
    std::string tau_spec = cfg.text("system", "tau", "1");
    sys.tau = parse_fnspec(tau_spec);
    sys.tau_bar = cfg.number("system", "tau_bar", 1.0);
    sys.L1 = cfg.number("system", "L1", 0.0);
    sys.L2 = cfg.number("system", "L2", 0.0);
    return sys;
}

ordered_json base_summary(const std::string& command, const ConfigReader& cfg,
                          std::uint64_t seed) {
    ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = cfg.resolved();
    return j;
}

// ---------------------------------------------------------------------------
// Command handlers

int cmd_kappa(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    double N = cfg.number("kappa", "N", 1.0);
    double lambda = cfg.number("kappa", "lambda", 1.0);
    double L1 = cfg.number("kappa", "L1", 0.0);
    double L2 = cfg.number("kappa", "L2", 0.0);
    double kappa = kappa_check(N, lambda, L1, L2);  // throws at kappa >= 1

    ordered_json j = base_summary("kappa", cfg, seed);
    j["results"]["kappa"] = kappa;
    write_summary(dir, j);
    char line[64];
    std::snprintf(line, sizeof(line), "%.6f", kappa);
    std::cout << line << "\n";
    return 0;
}

int cmd_seminorm(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    FnSpec f = read_function(cfg);
    SeminormConfig sc = read_seminorm_config(cfg);
    FnSpecFunction fun(f);
    SeminormEstimate est = besicovitch_seminorm(fun, sc);

    write_file(dir / "seminorm.csv", est.to_csv());
    ordered_json j = base_summary("seminorm", cfg, seed);
    j["results"]["limsup_estimate"] = est.limsup_estimate;
    j["results"]["spread"] = est.spread;
    j["results"]["converged"] = est.converged;
    write_summary(dir, j);
    std::cout << "seminorm limsup=" << format_double(est.limsup_estimate)
              << " spread=" << format_double(est.spread)
              << " converged=" << (est.converged ? "true" : "false") << "\n";
    return 0;
}

int cmd_translations(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    FnSpec f = read_function(cfg);
    SeminormConfig sc = read_seminorm_config(cfg);
    double epsilon = cfg.number("translations", "epsilon", 0.1);
    double lo = cfg.number("translations", "scan_lo", 1.0);
    double hi = cfg.number("translations", "scan_hi", 20.0);
    double step = cfg.number("translations", "scan_step", 0.01);
    FnSpecFunction fun(f);
    TranslationReport tr = find_translation_numbers(fun, epsilon, {lo, hi}, step, sc);

    write_file(dir / "scan.csv", scan_csv(tr.scan, "tau", "distance"));
    ordered_json j = base_summary("translations", cfg, seed);
    j["results"]["accepted"] = ordered_json::array();
    for (const auto& [tau, d] : tr.accepted)
        j["results"]["accepted"].push_back({{"tau", tau}, {"distance", d}});
    j["results"]["inclusion_length"] = tr.inclusion_length;
    write_summary(dir, j);
    std::cout << "translations accepted=" << tr.accepted.size()
              << " inclusion_length=" << format_double(tr.inclusion_length) << "\n";
    return 0;
}

int cmd_bochner(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    FnSpec f = read_function(cfg);
    SeminormConfig sc = read_seminorm_config(cfg);
    double epsilon = cfg.number("bochner", "epsilon", 0.2);
    std::vector<double> shifts = cfg.list("bochner", "shifts");
    if (shifts.empty()) {
        std::size_t n = cfg.count("bochner", "shift_count", 50);
        double lo = cfg.number("bochner", "shift_lo", 0.0);
        double hi = cfg.number("bochner", "shift_hi", 100.0);
        Rng rng(seed);
        for (std::size_t i = 0; i < n; ++i) shifts.push_back(rng.uniform(lo, hi));
    }
    FnSpecFunction fun(f);
    NetReport net = bochner_compactness_test(fun, shifts, epsilon, sc);

    ordered_json j = base_summary("bochner", cfg, seed);
    j["results"]["n_shifts"] = net.shifts.size();
    j["results"]["centers"] = net.centers;
    j["results"]["assignment"] = net.assignment;
    j["results"]["max_within_cluster_distance"] = net.max_within_cluster_distance;
    write_summary(dir, j);
    std::cout << "bochner net_size=" << net.centers.size()
              << " max_within=" << format_double(net.max_within_cluster_distance) << "\n";
    return 0;
}

int cmd_solve(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    DelaySystem sys = read_system(cfg);
    SolveConfig sc = read_solve_config(cfg, 0.0);
    try {
        SolveReport report = picard_solve(sys, sc);
        write_file(dir / "solution.csv", solution_csv(report.solution));
        write_file(dir / "residuals.csv",
                   residuals_csv(report.residuals, report.empirical_ratios));
        ordered_json j = base_summary("solve", cfg, seed);
        j["results"]["kappa"] = report.kappa;
        j["results"]["iterations"] = report.iterations;
        j["results"]["converged"] = report.converged;
        j["results"]["final_residual"] = report.residuals.back();
        j["results"]["H_effective"] = report.H_effective;
        j["results"]["quad_step_effective"] = report.quad_step_effective;
        j["results"]["apriori_iteration_bound"] = report.apriori_iteration_bound;
        j["results"]["sup_norm"] = sup_norm(report.solution);
        write_summary(dir, j);
        std::cout << "solve converged=true iterations=" << report.iterations
                  << " residual=" << format_double(report.residuals.back()) << "\n";
        return 0;
    } catch (const non_convergence& e) {
        write_file(dir / "residuals.csv", residuals_csv(e.residuals(), {}));
        ordered_json j = base_summary("solve", cfg, seed);
        j["results"]["converged"] = false;
        j["results"]["error"] = e.what();
        write_summary(dir, j);
        std::cerr << e.what() << "\n";
        return 3;
    }
}

int cmd_contraction(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    DelaySystem sys = read_system(cfg);
    SolveConfig sc = read_solve_config(cfg, 20.0);
    std::size_t n_pairs = cfg.count("contraction", "pairs", 20);
    TrigPolyParams params;
    params.terms = cfg.count("contraction", "terms", 3);
    params.amp_lo = cfg.number("contraction", "amp_lo", 0.3);
    params.amp_hi = cfg.number("contraction", "amp_hi", 1.0);

    // Input paths must reach below the window by H + tau_bar; pad generously,
    // samples are cheap.
    double depth = sc.history_horizon + sys.tau_bar + 4.0 * sc.grid.step() + 1.0;
    TimeGrid ext(sc.grid.t_min() - depth, sc.grid.t_max(), sc.grid.step());

    Rng rng(seed);
    std::vector<std::pair<SampledPath, SampledPath>> pairs;
    pairs.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        FnSpec a = random_path_spec(rng, sys.dim(), params);
        FnSpec b = random_path_spec(rng, sys.dim(), params);
        pairs.emplace_back(sample_fnspec(a, ext), sample_fnspec(b, ext));
    }
    ContractionStats stats = empirical_contraction(sys, pairs, sc);

    ordered_json j = base_summary("contraction", cfg, seed);
    j["results"]["ratios"] = stats.ratios;
    j["results"]["max"] = stats.max;
    j["results"]["mean"] = stats.mean;
    j["results"]["skipped"] = stats.skipped;
    j["results"]["kappa"] = kappa_check(stability_certificate(sys.semigroup).N,
                                        stability_certificate(sys.semigroup).lambda, sys.L1,
                                        sys.L2);
    write_summary(dir, j);
    std::cout << "contraction max_ratio=" << format_double(stats.max)
              << " mean=" << format_double(stats.mean) << " skipped=" << stats.skipped << "\n";
    return 0;
}

int cmd_example(ConfigReader& cfg, const fs::path& dir, std::uint64_t seed) {
    HeatDelayConfig hd;
    hd.K = cfg.count("example", "K", 8);
    hd.x_quad_points = cfg.count("example", "x_quad_points", 0);
    double t_min = cfg.number("solve", "t_min", 0.0);
    double t_max = cfg.number("solve", "t_max", 100.0);
    double step = cfg.number("solve", "step", 0.01);
    hd.grid = TimeGrid(t_min, t_max, step);
    hd.solve = SolveConfig{hd.grid};
    hd.solve.history_horizon = cfg.number("solve", "H", 40.0);
    hd.solve.quad_step = cfg.number("solve", "quad_step", 0.0);
    hd.solve.tol = cfg.number("solve", "tol", 1e-8);
    hd.solve.max_iter = cfg.count("solve", "max_iter", 64);
    hd.validate();

    double eps_rel = cfg.number("example", "epsilon_rel", 0.05);
    double scan_lo = cfg.number("example", "scan_lo", 0.0);
    double scan_hi = cfg.number("example", "scan_hi", 0.0);  // 0 = half the sampled span

    DelaySystem sys = build_example(hd);
    StabilityCertificate cert = stability_certificate(sys.semigroup);
    double kappa = kappa_check(cert.N, cert.lambda, sys.L1, sys.L2);

    try {
        SolveReport report = picard_solve(sys, hd.solve);
        write_file(dir / "solution.csv", solution_csv(report.solution));
        write_file(dir / "residuals.csv",
                   residuals_csv(report.residuals, report.empirical_ratios));

        // Mode-truncation consistency: re-solve at half the resolution and
        // report how much the sup norm moves.
        double truncation_delta = 0.0;
        std::size_t half_K = hd.K / 2;
        if (half_K >= 1) {
            HeatDelayConfig coarse = hd;
            coarse.K = half_K;
            coarse.x_quad_points = 0;
            DelaySystem sys_half = build_example(coarse);
            SolveReport rep_half = picard_solve(sys_half, coarse.solve);
            truncation_delta =
                std::fabs(sup_norm(report.solution) - sup_norm(rep_half.solution));
        }

        // Solution seminorm over the computed window; the acceptance epsilon
        // is relative to it, floored at the solver's resolution (100 tol) so
        // a vanishing solution still yields a well-posed test.
        PathFunction sol_fn(report.solution);
        SeminormConfig sol_cfg;
        sol_cfg.n_sweeps = 4;
        sol_cfg.tail_window = 2;
        sol_cfg.quad_step = hd.grid.step();
        double m2 = besicovitch_seminorm_on(sol_fn, hd.grid.t_min(), hd.grid.last_point(),
                                            sol_cfg)
                        .limsup_estimate;
        double epsilon = std::max(eps_rel * m2, 100.0 * hd.solve.tol);

        double span = report.extended_solution.grid().last_point() -
                      report.extended_solution.grid().t_min();
        if (scan_hi <= scan_lo) scan_hi = scan_lo + 0.5 * span;
        TranslationReport tr =
            verify_solution_almost_periodicity(report, epsilon, {scan_lo, scan_hi});
        write_file(dir / "scan.csv", scan_csv(tr.scan, "tau", "distance"));

        ordered_json j = base_summary("example", cfg, seed);
        j["results"]["N"] = cert.N;
        j["results"]["lambda"] = cert.lambda;
        j["results"]["L1"] = sys.L1;
        j["results"]["L2"] = sys.L2;
        j["results"]["kappa"] = kappa;
        j["results"]["iterations"] = report.iterations;
        j["results"]["converged"] = report.converged;
        j["results"]["final_residual"] = report.residuals.back();
        j["results"]["sup_norm"] = sup_norm(report.solution);
        j["results"]["truncation_delta_vs_half_K"] = truncation_delta;
        j["results"]["solution_seminorm"] = m2;
        j["results"]["epsilon"] = epsilon;
        j["results"]["accepted_count"] = tr.accepted.size();
        if (!tr.accepted.empty()) {
            j["results"]["first_accepted_tau"] = tr.accepted.front().first;
        }
        j["results"]["inclusion_length"] = tr.inclusion_length;
        write_summary(dir, j);
        std::cout << "example kappa=" << format_double(kappa)
                  << " iterations=" << report.iterations
                  << " accepted=" << tr.accepted.size() << "\n";
        return 0;
    } catch (const non_convergence& e) {
        write_file(dir / "residuals.csv", residuals_csv(e.residuals(), {}));
        ordered_json j = base_summary("example", cfg, seed);
        j["results"]["converged"] = false;
        j["results"]["error"] = e.what();
        write_summary(dir, j);
        std::cerr << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int run(const RunConfig& config) {
    try {
        set_max_threads(config.threads);
        ConfigReader cfg(config.doc);
        std::string command = config.doc.get("", "command", "");
        if (command.empty()) throw std::invalid_argument("config: top-level 'command' is required");

        fs::path dir(config.output_dir);
        fs::create_directories(dir);

        if (command == "kappa") return cmd_kappa(cfg, dir, config.seed);
        if (command == "seminorm") return cmd_seminorm(cfg, dir, config.seed);
        if (command == "translations") return cmd_translations(cfg, dir, config.seed);
        if (command == "bochner") return cmd_bochner(cfg, dir, config.seed);
        if (command == "solve") return cmd_solve(cfg, dir, config.seed);
        if (command == "contraction") return cmd_contraction(cfg, dir, config.seed);
        if (command == "example") return cmd_example(cfg, dir, config.seed);
        throw std::invalid_argument("config: unknown command '" + command + "'");
    } catch (const hypothesis_violation& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const non_convergence& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

}  // namespace apnum::cli

// CLI11 pulls in heavy templates; keep it isolated at the bottom.
#include <CLI11.hpp>

namespace apnum::cli {

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"almost-periodic signal analysis and delay-equation solving"};
    std::string config_path;
    std::string output;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key-value config file")->required();
    auto* output_opt = app.add_option("--output", output, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed for randomized commands");
    auto* threads_opt = app.add_option("--threads", threads, "worker thread cap");
    app.add_option("--set", overrides, "override a config key: [section.]key=value");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "cannot open config file " << config_path << "\n";
            return 1;
        }
        std::stringstream buffer;
        buffer << in.rdbuf();

        RunConfig rc;
        rc.doc = parse_ini(buffer.str());
        for (const std::string& item : overrides) {
            std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                std::cerr << "--set expects [section.]key=value, got '" << item << "'\n";
                return 1;
            }
            std::string target = item.substr(0, eq);
            std::string value = item.substr(eq + 1);
            std::size_t dot = target.find('.');
            if (dot == std::string::npos)
                rc.doc.set("", trim(target), trim(value));
            else
                rc.doc.set(trim(target.substr(0, dot)), trim(target.substr(dot + 1)), trim(value));
        }

        rc.output_dir = output_opt->count() > 0 ? output : rc.doc.get("", "output", "out");
        rc.seed = seed_opt->count() > 0
                      ? seed
                      : static_cast<std::uint64_t>(parse_number(rc.doc.get("", "seed", "0"), "seed"));
        rc.threads = threads_opt->count() > 0
                         ? threads
                         : static_cast<unsigned>(parse_number(rc.doc.get("", "threads", "0"),
                                                              "threads"));
        return run(rc);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

}  // namespace apnum::cli
