#pragma once

#include <cstdint>
#include <vector>

#include "blm/levy.hpp"
#include "blm/offspring.hpp"
#include "blm/rng.hpp"

namespace blm {

struct SimLimits {
    std::uint64_t particle_cap = 1'000'000;  // no time cap
};

// One branching realization. For censored runs `max` and `extinction_time`
// are the largest values observed before the cap, i.e. lower bounds.
struct RunOutcome {
    double max;              // sup over processed particles of birth_pos + own S_e
    double extinction_time;  // largest death time seen
    std::uint64_t particles;
    bool censored;
};

// Empirical survival estimates with censoring brackets: `value` is the lower
// estimate (censored runs exceed only up to their observed maximum), `upper`
// counts censored runs as always exceeding, so the pair brackets the truth.
struct TailCurve {
    std::vector<double> x;
    std::vector<double> value;
    std::vector<double> stderr_;
    std::vector<double> upper;
    std::vector<double> upper_stderr;
};

// Depth-first simulation of one tree to extinction or the particle cap.
// Child groups share a stack frame, so memory stays at the tree height.
RunOutcome simulate_max(const LevyModel& model, const OffspringLaw& law, RngStream& rng,
                        const SimLimits& limits);

TailCurve estimate_tail(const std::vector<RunOutcome>& outcomes, const std::vector<double>& x_grid);

// As estimate_tail with extinction times; censored runs contribute only to
// the upper bound (their extinction time is unknown).
TailCurve extinction_tail(const std::vector<RunOutcome>& outcomes,
                          const std::vector<double>& t_grid);

struct SimulationSummary {
    std::uint64_t runs = 0;
    std::uint64_t censored = 0;
    double censored_fraction = 0.0;
    TailCurve tail;
    TailCurve extinction;
    std::vector<RunOutcome> outcomes;  // populated only when requested
};

// Runs are embarrassingly parallel; run r uses the stream (seed, r), so the
// outcome multiset depends only on (seed, config), not on scheduling.
SimulationSummary run_many(const LevyModel& model, const OffspringLaw& law, std::uint64_t runs,
                           std::uint64_t seed, const SimLimits& limits,
                           const std::vector<double>& x_grid, const std::vector<double>& t_grid,
                           unsigned threads, bool keep_outcomes);

}  // namespace blm
