#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blm/branching.hpp"
#include "blm/levy.hpp"
#include "blm/offspring.hpp"

namespace blm {

struct ModelSpec {
    std::string variant = "bm";  // "bm" | "stable"
    double mu = 1.0, eta = 1.0;
    double alpha = 1.0, scale = 1.0, step = 1e-3;
};

struct OffspringSpec {
    std::string family = "canonical";
    double beta = 1.5;
    double c = 0.5;
};

struct GridSpec {
    double x_max = 200.0;
    double h = 0.05;
    double tol = 1e-8;
    std::uint64_t max_iter = 10000;
};

struct RangeSpec {
    double min = 1.0;
    double max = 1000.0;
    std::size_t points = 60;
    std::string spacing = "log";  // "log" | "linear"
    bool include_zero = true;
};

struct KernelSpec {
    std::string type = "auto";  // "auto" | "analytic" | "empirical"
    std::size_t pairs = 100000;
};

struct FitSpec {
    std::optional<double> x_lo;  // window overrides; auto-window when absent
    std::optional<double> x_hi;
    double exponent_tol = 0.15;
    double constant_rel_tol = 0.25;
};

// Complete description of an experiment; every artifact is a deterministic
// function of the config (plus code version). Canonically hashable.
struct ExperimentConfig {
    ModelSpec model;
    OffspringSpec offspring;
    std::uint64_t runs = 100000;
    std::uint64_t seed = 1;
    SimLimits limits;
    GridSpec grid;
    RangeSpec x_grid;
    RangeSpec t_grid{1.0, 5000.0, 40, "log", true};
    KernelSpec kernel;
    FitSpec fit;
    std::string out_dir = "out";
    unsigned threads = 0;  // 0 = hardware default / environment variable

    LevyModel make_model() const;
    OffspringLaw make_offspring() const;
    std::vector<double> make_x_grid() const;
    std::vector<double> make_t_grid() const;
    void validate() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json_text(const ExperimentConfig& cfg);

// FNV-1a over the canonical (sorted-key, compact) serialization.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace blm
