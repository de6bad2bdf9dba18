#pragma once

#include <string>
#include <vector>

#include "blm/branching.hpp"
#include "blm/config.hpp"
#include "blm/fixedpoint.hpp"

namespace blm::cli {

// Entry point behind the `blm` binary; also callable in-process by tests.
int run(const std::vector<std::string>& args);

// Individual commands. Each writes its artifacts under cfg.out_dir and
// embeds the config hash in every file.
void cmd_simulate(const ExperimentConfig& cfg);
SolverSolution cmd_solve(const ExperimentConfig& cfg);
void cmd_predict(const ExperimentConfig& cfg);
void cmd_fit(const ExperimentConfig& cfg, const std::string& input_csv = "");
bool cmd_verify(const ExperimentConfig& cfg);  // true = all comparisons pass
void cmd_report(const ExperimentConfig& cfg);

// Tail CSV restore (lower/upper brackets with stderrs). Checks the embedded
// config hash when `expect_hash` is nonempty.
TailCurve read_tail_csv(const std::string& path, const std::string& expect_hash = "");

// Effective worker count: explicit config value, else the BLM_THREADS
// environment variable, else the hardware count.
unsigned effective_threads(const ExperimentConfig& cfg);

}  // namespace blm::cli
