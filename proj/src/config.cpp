#include "blm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace blm {

using nlohmann::json;

LevyModel ExperimentConfig::make_model() const {
    if (model.variant == "bm") return LevyModel::brownian(model.mu, model.eta);
    if (model.variant == "stable") {
        return LevyModel::symmetric_stable(model.alpha, model.scale, model.step);
    }
    throw std::invalid_argument("config: unknown model variant '" + model.variant + "'");
}

OffspringLaw ExperimentConfig::make_offspring() const {
    if (offspring.family != "canonical") {
        throw std::invalid_argument("config: unknown offspring family '" + offspring.family + "'");
    }
    return OffspringLaw::make_canonical(offspring.beta, offspring.c);
}

namespace {

std::vector<double> make_range(const RangeSpec& r, const char* name) {
    if (r.points < 2) throw std::invalid_argument(std::string(name) + ": need at least 2 points");
    if (!(r.max > r.min)) throw std::invalid_argument(std::string(name) + ": max must exceed min");
    std::vector<double> out;
    if (r.include_zero && r.min > 0.0) out.push_back(0.0);
    if (r.spacing == "log") {
        if (!(r.min > 0.0)) throw std::invalid_argument(std::string(name) + ": log spacing needs min > 0");
        const double ratio = std::log(r.max / r.min) / static_cast<double>(r.points - 1);
        for (std::size_t k = 0; k < r.points; ++k) {
            out.push_back(r.min * std::exp(ratio * static_cast<double>(k)));
        }
    } else if (r.spacing == "linear") {
        const double step = (r.max - r.min) / static_cast<double>(r.points - 1);
        for (std::size_t k = 0; k < r.points; ++k) {
            out.push_back(r.min + step * static_cast<double>(k));
        }
    } else {
        throw std::invalid_argument(std::string(name) + ": spacing must be 'log' or 'linear'");
    }
    return out;
}

}  // namespace

std::vector<double> ExperimentConfig::make_x_grid() const { return make_range(x_grid, "x_grid"); }
std::vector<double> ExperimentConfig::make_t_grid() const { return make_range(t_grid, "t_grid"); }

void ExperimentConfig::validate() const {
    if (runs == 0) throw std::invalid_argument("config: runs must be positive");
    if (limits.particle_cap == 0) throw std::invalid_argument("config: particle_cap must be positive");
    if (!(grid.tol > 0.0)) throw std::invalid_argument("config: grid.tol must be positive");
    make_model();
    make_offspring();
    make_x_grid();
    make_t_grid();
    if (kernel.type != "auto" && kernel.type != "analytic" && kernel.type != "empirical") {
        throw std::invalid_argument("config: kernel.type must be auto|analytic|empirical");
    }
    if (kernel.pairs == 0) throw std::invalid_argument("config: kernel.pairs must be positive");
}

namespace {

json range_to_json(const RangeSpec& r) {
    return json{{"min", r.min},
                {"max", r.max},
                {"points", r.points},
                {"spacing", r.spacing},
                {"include_zero", r.include_zero}};
}

RangeSpec range_from_json(const json& j, const RangeSpec& defaults) {
    RangeSpec r = defaults;
    r.min = j.value("min", r.min);
    r.max = j.value("max", r.max);
    r.points = j.value("points", r.points);
    r.spacing = j.value("spacing", r.spacing);
    r.include_zero = j.value("include_zero", r.include_zero);
    return r;
}

}  // namespace

std::string config_to_json_text(const ExperimentConfig& c) {
    json j;
    if (c.model.variant == "bm") {
        j["model"] = {{"variant", "bm"}, {"mu", c.model.mu}, {"eta", c.model.eta}};
    } else {
        j["model"] = {{"variant", c.model.variant},
                      {"alpha", c.model.alpha},
                      {"scale", c.model.scale},
                      {"step", c.model.step}};
    }
    j["offspring"] = {{"family", c.offspring.family}, {"beta", c.offspring.beta}, {"c", c.offspring.c}};
    j["runs"] = c.runs;
    j["seed"] = c.seed;
    j["limits"] = {{"particle_cap", c.limits.particle_cap}};
    j["grid"] = {{"x_max", c.grid.x_max}, {"h", c.grid.h}, {"tol", c.grid.tol}, {"max_iter", c.grid.max_iter}};
    j["x_grid"] = range_to_json(c.x_grid);
    j["t_grid"] = range_to_json(c.t_grid);
    j["kernel"] = {{"type", c.kernel.type}, {"pairs", c.kernel.pairs}};
    json fit = {{"exponent_tol", c.fit.exponent_tol}, {"constant_rel_tol", c.fit.constant_rel_tol}};
    if (c.fit.x_lo) fit["x_lo"] = *c.fit.x_lo;
    if (c.fit.x_hi) fit["x_hi"] = *c.fit.x_hi;
    j["fit"] = fit;
    j["out_dir"] = c.out_dir;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("model")) {
        const auto& m = j["model"];
        c.model.variant = m.value("variant", c.model.variant);
        c.model.mu = m.value("mu", c.model.mu);
        c.model.eta = m.value("eta", c.model.eta);
        c.model.alpha = m.value("alpha", c.model.alpha);
        c.model.scale = m.value("scale", c.model.scale);
        c.model.step = m.value("step", c.model.step);
    }
    if (j.contains("offspring")) {
        const auto& o = j["offspring"];
        c.offspring.family = o.value("family", c.offspring.family);
        c.offspring.beta = o.value("beta", c.offspring.beta);
        c.offspring.c = o.value("c", c.offspring.c);
    }
    c.runs = j.value("runs", c.runs);
    c.seed = j.value("seed", c.seed);
    if (j.contains("limits")) c.limits.particle_cap = j["limits"].value("particle_cap", c.limits.particle_cap);
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        c.grid.x_max = g.value("x_max", c.grid.x_max);
        c.grid.h = g.value("h", c.grid.h);
        c.grid.tol = g.value("tol", c.grid.tol);
        c.grid.max_iter = g.value("max_iter", c.grid.max_iter);
    }
    if (j.contains("x_grid")) c.x_grid = range_from_json(j["x_grid"], c.x_grid);
    if (j.contains("t_grid")) c.t_grid = range_from_json(j["t_grid"], c.t_grid);
    if (j.contains("kernel")) {
        c.kernel.type = j["kernel"].value("type", c.kernel.type);
        c.kernel.pairs = j["kernel"].value("pairs", c.kernel.pairs);
    }
    if (j.contains("fit")) {
        const auto& f = j["fit"];
        if (f.contains("x_lo")) c.fit.x_lo = f["x_lo"].get<double>();
        if (f.contains("x_hi")) c.fit.x_hi = f["x_hi"].get<double>();
        c.fit.exponent_tol = f.value("exponent_tol", c.fit.exponent_tol);
        c.fit.constant_rel_tol = f.value("constant_rel_tol", c.fit.constant_rel_tol);
    }
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
    // Round-trip through the serializer so equivalent configs hash equally,
    // then FNV-1a over the compact sorted-key dump. Execution details that
    // cannot change the numbers (thread count, output location) stay out of
    // the hash.
    json j = json::parse(config_to_json_text(cfg));
    j.erase("threads");
    j.erase("out_dir");
    const std::string canon = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace blm
