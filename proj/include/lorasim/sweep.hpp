#pragma once

#include "lorasim/config.hpp"
#include "lorasim/report.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

namespace lorasim {

/// Cartesian grid of scenario parameters. Every cell runs once per seed.
struct SweepGrid
{
    std::vector<std::size_t> device_counts;
    std::vector<double> p_values;
    std::vector<std::vector<int>> sf_sets;
    std::vector<int> n_areas_values;
    std::vector<std::uint64_t> seeds;

    std::size_t cell_count() const
    {
        return device_counts.size() * p_values.size() * sf_sets.size() * n_areas_values.size();
    }
};

/// Grid document in the config syntax:
///
///     device_counts = {20,40,60,80}
///     p_values      = {0.25,0.5,0.75,1.0}
///     sf_sets       = {{8},{8,9,10}}
///     n_areas_values = {1,2,3}
///     seeds         = {1,2,3}     # or: seed_count = 10  (seeds 1..10)
///
/// Keys left out fall back to the base config's single value.
SweepGrid parse_grid(std::string_view text, const RunConfig& base);

/// One config per (cell, seed), in canonical grid order. Scenario labels
/// carry a zero-padded cell index so that sorted output follows grid order.
std::vector<RunConfig> expand_grid(const RunConfig& base, const SweepGrid& grid);

/// Runs every (cell, seed) on up to `jobs` threads and appends per-cell
/// mean and standard deviation rows of the reception ratios.
std::vector<ResultRow> run_sweep(const RunConfig& base, const SweepGrid& grid, unsigned jobs = 1);

/// Mean and sample standard deviation rows for each scenario among `rows`.
std::vector<ResultRow> summarize(std::span<const ResultRow> rows);

struct AlohaPoint
{
    double offered_load = 0.0;
    double throughput = 0.0;  // received packets per packet-time
    double theoretical = 0.0; // G * exp(-2G)
};

/// Baseline for the ALOHA throughput experiment: SF8, Poisson traffic,
/// 100 devices in one area around the gateway.
RunConfig aloha_validation_config();

/// Measures pure-ALOHA throughput at each offered load. `base` must select
/// ALOHA with Poisson traffic and a single SF; its sim_time_s is replaced
/// by `packet_times` packet durations.
std::vector<AlohaPoint> aloha_validation(const RunConfig& base,
                                         std::span<const double> g_values,
                                         double packet_times = 250000.0,
                                         unsigned jobs = 1);

void write_aloha_csv(std::span<const AlohaPoint> points, std::ostream& out);

/// Runs fn(i) for i in [0, count) on up to `jobs` worker threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

} // namespace lorasim
