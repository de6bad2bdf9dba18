#include "blm/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "blm/asymptotics.hpp"

namespace blm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::string tail_csv_text(const TailCurve& c, const std::string& hash) {
    std::ostringstream os;
    os << "# config_hash=" << hash << "\n";
    os << "x,lower,lower_stderr,upper,upper_stderr\n";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
        os << fmt17(c.x[i]) << ',' << fmt17(c.value[i]) << ',' << fmt17(c.stderr_[i]) << ','
           << fmt17(c.upper[i]) << ',' << fmt17(c.upper_stderr[i]) << "\n";
    }
    return os.str();
}

double wall_seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json prediction_json(const TheoryPrediction& p) {
    json j;
    j["regime"] = to_string(p.regime);
    j["decay"] = to_string(p.decay);
    j[p.decay == DecayFamily::Power ? "exponent" : "rate"] = p.exponent;
    j["constant"] = p.constant ? json(*p.constant) : json(nullptr);
    return j;
}

json compare_json(const CompareReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"component", c.component},
                          {"predicted", c.predicted},
                          {"fitted", c.fitted},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"skipped", c.skipped}});
    }
    return {{"checks", checks}, {"pass", rep.pass}};
}

Kernel build_kernel(const ExperimentConfig& cfg, const LevyModel& model) {
    const bool brownian = model.kind() == LevyModel::Kind::BrownianWithDrift;
    std::string type = cfg.kernel.type;
    if (type == "auto") type = brownian ? "analytic" : "empirical";
    if (type == "analytic") return Kernel::analytic(model);
    // Kernel pairs draw from a stream far above the per-run block.
    RngStream rng(cfg.seed, (1ull << 63) + 1);
    const double step = brownian ? 1.0 : model.default_step();
    return Kernel::from_model(model, cfg.kernel.pairs, rng, step);
}

struct RouteFit {
    json fitted;
    CompareReport report;
};

RouteFit fit_route(const TheoryPrediction& pred, const TailCurve& curve,
                   const ExperimentConfig& cfg, bool solver_route) {
    FitWindow w{0.0, 0.0};
    if (pred.decay == DecayFamily::Exponential && solver_route) {
        // Rate readout from the solver uses the value window [1e-6, 1e-2].
        w = window_by_value(curve, 1e-2, 1e-6);
    } else {
        w = auto_window(curve);
    }
    if (cfg.fit.x_lo) w.x_lo = *cfg.fit.x_lo;
    if (cfg.fit.x_hi) w.x_hi = *cfg.fit.x_hi;
    const CompareTolerances tol{cfg.fit.exponent_tol, cfg.fit.constant_rel_tol};
    RouteFit out;
    if (pred.decay == DecayFamily::Power) {
        const PowerFit f = fit_power_tail(curve, w.x_lo, w.x_hi);
        out.fitted = {{"exponent", f.exponent},       {"exponent_stderr", f.exponent_stderr},
                      {"constant", f.constant},       {"constant_stderr", f.constant_stderr},
                      {"points", f.points},           {"window", {f.x_lo, f.x_hi}}};
        out.report = compare(pred, f, tol);
    } else {
        const ExponentialFit f = fit_exponential_tail(curve, w.x_lo, w.x_hi);
        out.fitted = {{"rate", f.rate},
                      {"rate_stderr", f.rate_stderr},
                      {"points", f.points},
                      {"window", {f.x_lo, f.x_hi}}};
        out.report = compare(pred, f, tol);
    }
    return out;
}

}  // namespace

unsigned effective_threads(const ExperimentConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("BLM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // run_many resolves 0 to the hardware count
}

void cmd_simulate(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::string hash = config_hash(cfg);
    const LevyModel model = cfg.make_model();
    const OffspringLaw law = cfg.make_offspring();
    const SimulationSummary sim =
        run_many(model, law, cfg.runs, cfg.seed, cfg.limits, cfg.make_x_grid(), cfg.make_t_grid(),
                 effective_threads(cfg), /*keep_outcomes=*/true);

    std::ostringstream os;
    os << "# config_hash=" << hash << "\n";
    os << "run_index,max,extinction_time,particles,censored\n";
    for (std::size_t r = 0; r < sim.outcomes.size(); ++r) {
        const auto& o = sim.outcomes[r];
        os << r << ',' << fmt17(o.max) << ',' << fmt17(o.extinction_time) << ',' << o.particles
           << ',' << (o.censored ? 1 : 0) << "\n";
    }
    const fs::path dir(cfg.out_dir);
    write_file(dir / "outcomes.csv", os.str());
    write_file(dir / "tail.csv", tail_csv_text(sim.tail, hash));
    write_file(dir / "extinction.csv", tail_csv_text(sim.extinction, hash));

    json meta;
    meta["config_hash"] = hash;
    meta["seed"] = cfg.seed;
    meta["runs"] = cfg.runs;
    meta["censored_runs"] = sim.censored;
    meta["censored_fraction"] = sim.censored_fraction;
    meta["wall_seconds"] = wall_seconds_since(t0);
    meta["config"] = json::parse(config_to_json_text(cfg));
    write_json(dir / "simulate_meta.json", meta);
}

SolverSolution cmd_solve(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::string hash = config_hash(cfg);
    const LevyModel model = cfg.make_model();
    const OffspringLaw law = cfg.make_offspring();
    const Kernel kernel = build_kernel(cfg, model);
    const Grid grid = make_grid(cfg.grid.x_max, cfg.grid.h);
    SolverSolution sol = solve(kernel, law, grid, cfg.grid.tol, cfg.grid.max_iter);
    const std::vector<double> rem = remainder_curve(sol, kernel, law);

    std::ostringstream os;
    os << "# config_hash=" << hash << "\n";
    os << "x,u,remainder,sup_survival\n";
    for (std::size_t i = 0; i < sol.u.size(); ++i) {
        const double x = grid.x(i);
        os << fmt17(x) << ',' << fmt17(sol.u[i]) << ',' << fmt17(rem[i]) << ','
           << fmt17(kernel.survival(x)) << "\n";
    }
    const fs::path dir(cfg.out_dir);
    write_file(dir / "solution.csv", os.str());

    json meta;
    meta["config_hash"] = hash;
    meta["grid"] = {{"x_max", grid.x_max}, {"h", grid.h}, {"nodes", grid.n}};
    meta["tol"] = cfg.grid.tol;
    meta["iterations"] = sol.iterations;
    meta["residual"] = sol.residual;
    meta["kernel"] = kernel.describe();
    meta["wall_seconds"] = wall_seconds_since(t0);
    write_json(dir / "solve_meta.json", meta);
    return sol;
}

void cmd_predict(const ExperimentConfig& cfg) {
    cfg.validate();
    const TheoryPrediction pred = predict(cfg.make_model(), cfg.make_offspring());
    json j = prediction_json(pred);
    j["config_hash"] = config_hash(cfg);
    write_json(fs::path(cfg.out_dir) / "prediction.json", j);
}

TailCurve read_tail_csv(const std::string& path, const std::string& expect_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing input '" + path + "' (run simulate/solve first)");
    std::string line;
    if (!std::getline(in, line) || line.rfind("# config_hash=", 0) != 0) {
        throw std::runtime_error("'" + path + "': missing config hash line");
    }
    const std::string hash = line.substr(14);
    if (!expect_hash.empty() && hash != expect_hash) {
        throw std::runtime_error("'" + path + "': config hash " + hash +
                                 " does not match the requested config " + expect_hash);
    }
    std::getline(in, line);  // header
    const bool solution = line.rfind("x,u", 0) == 0;
    TailCurve c;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double cols[5] = {0, 0, 0, 0, 0};
        const int got = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &cols[0], &cols[1],
                                    &cols[2], &cols[3], &cols[4]);
        if (got < 2) throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
        c.x.push_back(cols[0]);
        c.value.push_back(cols[1]);
        if (solution) {
            c.stderr_.push_back(0.0);
        } else {
            c.stderr_.push_back(got > 2 ? cols[2] : 0.0);
            if (got > 4) {
                c.upper.push_back(cols[3]);
                c.upper_stderr.push_back(cols[4]);
            }
        }
    }
    if (c.x.empty()) throw std::runtime_error("'" + path + "': no data rows");
    return c;
}

void cmd_fit(const ExperimentConfig& cfg, const std::string& input_csv) {
    cfg.validate();
    const std::string hash = config_hash(cfg);
    const std::string input =
        input_csv.empty() ? (fs::path(cfg.out_dir) / "tail.csv").string() : input_csv;
    const TailCurve curve = read_tail_csv(input, hash);
    const TheoryPrediction pred = predict(cfg.make_model(), cfg.make_offspring());
    const bool solver_route = input.find("solution") != std::string::npos;
    const RouteFit rf = fit_route(pred, curve, cfg, solver_route);
    json j;
    j["config_hash"] = hash;
    j["input"] = input;
    j["predicted"] = prediction_json(pred);
    j["fitted"] = rf.fitted;
    j["compare"] = compare_json(rf.report);
    write_json(fs::path(cfg.out_dir) / "fit.json", j);
}

bool cmd_verify(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::string hash = config_hash(cfg);
    const fs::path dir(cfg.out_dir);
    const TheoryPrediction pred = predict(cfg.make_model(), cfg.make_offspring());

    if (!fs::exists(dir / "tail.csv")) cmd_simulate(cfg);
    const TailCurve mc = read_tail_csv((dir / "tail.csv").string(), hash);
    if (!fs::exists(dir / "solution.csv")) cmd_solve(cfg);
    const TailCurve sol = read_tail_csv((dir / "solution.csv").string(), hash);

    const RouteFit mc_fit = fit_route(pred, mc, cfg, false);
    const RouteFit sol_fit = fit_route(pred, sol, cfg, true);

    json j;
    j["config_hash"] = hash;
    j["predicted"] = prediction_json(pred);
    j["routes"] = {{"monte_carlo", {{"fitted", mc_fit.fitted}, {"compare", compare_json(mc_fit.report)}}},
                   {"solver", {{"fitted", sol_fit.fitted}, {"compare", compare_json(sol_fit.report)}}}};
    const bool pass = mc_fit.report.pass && sol_fit.report.pass;
    j["pass"] = pass;
    write_json(dir / "verify.json", j);
    return pass;
}

void cmd_report(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path dir(cfg.out_dir);
    json j;
    j["config_hash"] = config_hash(cfg);
    for (const char* name :
         {"simulate_meta.json", "solve_meta.json", "prediction.json", "fit.json", "verify.json"}) {
        const fs::path p = dir / name;
        if (fs::exists(p)) {
            std::ifstream in(p);
            json part;
            in >> part;
            std::string key(name);
            j[key.substr(0, key.size() - 5)] = part;
        }
    }
    write_json(dir / "report.json", j);
    std::cout << "report written to " << (dir / "report.json").string() << "\n";
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"critical branching Levy process maximum: simulate, solve, predict, fit, verify"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string fit_input;
    std::uint64_t seed_override = 0;
    unsigned threads_override = 0;
    bool seed_given = false, threads_given = false, out_given = false;

    app.add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
    auto* thr_opt = app.add_option("--threads", threads_override, "worker count");
    auto* out_opt = app.add_option("--out", out_override, "output directory");

    auto* c_sim = app.add_subcommand("simulate", "run the branching simulation");
    auto* c_solve = app.add_subcommand("solve", "solve the fixed-point equation");
    auto* c_pred = app.add_subcommand("predict", "emit the closed-form prediction");
    auto* c_fit = app.add_subcommand("fit", "fit a tail curve");
    c_fit->add_option("--input", fit_input, "CSV to fit (default: <out>/tail.csv)");
    auto* c_verify = app.add_subcommand("verify", "compare all three routes; exit 1 on failure");
    auto* c_report = app.add_subcommand("report", "bundle artifacts into report.json");

    std::vector<const char*> argv;
    argv.push_back("blm");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    seed_given = seed_opt->count() > 0;
    threads_given = thr_opt->count() > 0;
    out_given = out_opt->count() > 0;

    try {
        ExperimentConfig cfg = load_config(config_path);
        if (seed_given) cfg.seed = seed_override;
        if (threads_given) cfg.threads = threads_override;
        if (out_given) cfg.out_dir = out_override;

        if (c_sim->parsed()) {
            cmd_simulate(cfg);
        } else if (c_solve->parsed()) {
            cmd_solve(cfg);
        } else if (c_pred->parsed()) {
            cmd_predict(cfg);
        } else if (c_fit->parsed()) {
            cmd_fit(cfg, fit_input);
        } else if (c_verify->parsed()) {
            const bool ok = cmd_verify(cfg);
            std::cout << (ok ? "verify: PASS" : "verify: FAIL") << "\n";
            return ok ? 0 : 1;
        } else if (c_report->parsed()) {
            cmd_report(cfg);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace blm::cli
