#include "blm/branching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace blm {

namespace {

struct Frame {
    double birth_time;
    double birth_pos;
    std::uint64_t remaining;
};

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("tail grid must be nonempty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw std::invalid_argument("tail grid must be nonnegative");
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("tail grid must be strictly increasing");
        }
    }
}

// Exceedance counts on a grid: hist[k] = number of samples whose exceedance
// index is k; suffix sums give the per-node counts.
struct ExceedHist {
    std::vector<std::uint64_t> counts;

    explicit ExceedHist(std::size_t grid_size) : counts(grid_size + 1, 0) {}

    void merge(const ExceedHist& other) {
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    }

    std::vector<std::uint64_t> suffix_totals() const {
        std::vector<std::uint64_t> out(counts.size() - 1, 0);
        std::uint64_t acc = 0;
        for (std::size_t i = counts.size(); i-- > 1;) {
            acc += counts[i];
            out[i - 1] = acc;
        }
        return out;
    }
};

struct Accumulator {
    ExceedHist max_lower, max_upper, ext_lower, ext_upper;
    std::uint64_t censored = 0;
    std::vector<RunOutcome> outcomes;

    Accumulator(std::size_t nx, std::size_t nt)
        : max_lower(nx), max_upper(nx), ext_lower(nt), ext_upper(nt) {}

    void fold(const RunOutcome& o, const std::vector<double>& xg, const std::vector<double>& tg) {
        // max >= x_i holds for the first k nodes, k = #(x_i <= max)
        const auto kx = static_cast<std::size_t>(
            std::upper_bound(xg.begin(), xg.end(), o.max) - xg.begin());
        max_lower.counts[kx] += 1;
        max_upper.counts[o.censored ? xg.size() : kx] += 1;
        const auto kt = static_cast<std::size_t>(
            std::lower_bound(tg.begin(), tg.end(), o.extinction_time) - tg.begin());
        if (!o.censored) ext_lower.counts[kt] += 1;
        ext_upper.counts[o.censored ? tg.size() : kt] += 1;
        if (o.censored) ++censored;
    }

    void merge(Accumulator&& other) {
        max_lower.merge(other.max_lower);
        max_upper.merge(other.max_upper);
        ext_lower.merge(other.ext_lower);
        ext_upper.merge(other.ext_upper);
        censored += other.censored;
        outcomes.insert(outcomes.end(), other.outcomes.begin(), other.outcomes.end());
    }
};

TailCurve curve_from(const std::vector<double>& grid, const ExceedHist& lower,
                     const ExceedHist& upper, std::uint64_t runs) {
    const double n = static_cast<double>(runs);
    TailCurve c;
    c.x = grid;
    const auto lo = lower.suffix_totals();
    const auto up = upper.suffix_totals();
    c.value.resize(grid.size());
    c.stderr_.resize(grid.size());
    c.upper.resize(grid.size());
    c.upper_stderr.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = static_cast<double>(lo[i]) / n;
        const double q = static_cast<double>(up[i]) / n;
        c.value[i] = p;
        c.stderr_[i] = std::sqrt(p * (1.0 - p) / n);
        c.upper[i] = q;
        c.upper_stderr[i] = std::sqrt(q * (1.0 - q) / n);
    }
    return c;
}

}  // namespace

RunOutcome simulate_max(const LevyModel& model, const OffspringLaw& law, RngStream& rng,
                        const SimLimits& limits) {
    const double step = model.default_step();
    double best = 0.0;
    double last_death = 0.0;
    std::uint64_t particles = 0;
    bool censored = false;
    std::vector<Frame> stack;
    stack.reserve(64);
    stack.push_back({0.0, 0.0, 1});
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.remaining == 0) {
            stack.pop_back();
            continue;
        }
        --top.remaining;
        const double birth_time = top.birth_time;
        const double birth_pos = top.birth_pos;
        if (particles == limits.particle_cap) {
            censored = true;
            break;
        }
        ++particles;
        const LifetimePair life = model.sample_lifetime_pair(rng, step);
        const double death = birth_time + life.lifetime;
        if (death > last_death) last_death = death;
        const double candidate = birth_pos + life.s;
        if (candidate > best) best = candidate;
        const std::uint64_t children = law.sample(rng);
        if (children > 0) stack.push_back({death, birth_pos + life.l, children});
    }
    return RunOutcome{best, last_death, particles, censored};
}

TailCurve estimate_tail(const std::vector<RunOutcome>& outcomes,
                        const std::vector<double>& x_grid) {
    if (outcomes.empty()) throw std::invalid_argument("estimate_tail: no outcomes");
    check_grid(x_grid);
    Accumulator acc(x_grid.size(), 1);
    const std::vector<double> dummy_t = {0.0};
    for (const auto& o : outcomes) acc.fold(o, x_grid, dummy_t);
    return curve_from(x_grid, acc.max_lower, acc.max_upper, outcomes.size());
}

TailCurve extinction_tail(const std::vector<RunOutcome>& outcomes,
                          const std::vector<double>& t_grid) {
    if (outcomes.empty()) throw std::invalid_argument("extinction_tail: no outcomes");
    check_grid(t_grid);
    Accumulator acc(1, t_grid.size());
    const std::vector<double> dummy_x = {0.0};
    for (const auto& o : outcomes) acc.fold(o, dummy_x, t_grid);
    return curve_from(t_grid, acc.ext_lower, acc.ext_upper, outcomes.size());
}

SimulationSummary run_many(const LevyModel& model, const OffspringLaw& law, std::uint64_t runs,
                           std::uint64_t seed, const SimLimits& limits,
                           const std::vector<double>& x_grid, const std::vector<double>& t_grid,
                           unsigned threads, bool keep_outcomes) {
    if (runs == 0) throw std::invalid_argument("run_many: runs must be positive");
    check_grid(x_grid);
    check_grid(t_grid);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, runs));

    std::vector<Accumulator> parts;
    parts.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) parts.emplace_back(x_grid.size(), t_grid.size());

    auto worker = [&](unsigned t) {
        Accumulator& acc = parts[t];
        const std::uint64_t lo = runs * t / threads;
        const std::uint64_t hi = runs * (t + 1) / threads;
        if (keep_outcomes) acc.outcomes.reserve(hi - lo);
        for (std::uint64_t r = lo; r < hi; ++r) {
            RngStream rng(seed, r);
            const RunOutcome o = simulate_max(model, law, rng, limits);
            acc.fold(o, x_grid, t_grid);
            if (keep_outcomes) acc.outcomes.push_back(o);
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    // Merge in thread order; run blocks are contiguous, so outcomes land in
    // run-index order.
    Accumulator total(x_grid.size(), t_grid.size());
    if (keep_outcomes) total.outcomes.reserve(runs);
    for (auto& p : parts) total.merge(std::move(p));

    SimulationSummary s;
    s.runs = runs;
    s.censored = total.censored;
    s.censored_fraction = static_cast<double>(total.censored) / static_cast<double>(runs);
    s.tail = curve_from(x_grid, total.max_lower, total.max_upper, runs);
    s.extinction = curve_from(t_grid, total.ext_lower, total.ext_upper, runs);
    s.outcomes = std::move(total.outcomes);
    return s;
}

}  // namespace blm
