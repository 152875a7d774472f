#pragma once

#include "lorasim/config.hpp"
#include "lorasim/gateway.hpp"
#include "lorasim/topology.hpp"

#include <cstdint>
#include <vector>

namespace lorasim {

/// Per-run tallies.
struct Counters
{
    std::uint64_t generated = 0;
    std::uint64_t sent = 0;
    std::uint64_t suppressed = 0;
    std::uint64_t pending_at_end = 0;
    std::uint64_t received = 0;
    std::uint64_t collided = 0;
    std::uint64_t under_sensitivity = 0;
    std::uint64_t no_path = 0;

    // bookkeeping for the conservation checks
    std::uint64_t books = 0;
    std::uint64_t frees = 0;
    std::uint64_t path_binds = 0;
    std::uint64_t path_releases = 0;
    std::size_t max_bound_paths = 0;
    std::size_t gateway_paths = kDefaultGatewayPaths;

    /// Throws std::logic_error if any conservation identity is violated.
    void check() const;
};

struct Topology
{
    std::vector<DeviceSpec> devices;
    VicinityMatrix vicinity;
    std::vector<int> area;               // area index per device
    std::vector<double> gateway_prx_dbm; // received power at the gateway per device
};

/// Placement, attributes, shadowing and the vicinity matrix for a config.
Topology build_topology(const RunConfig& cfg);

struct RunResult
{
    Counters counters;
    std::vector<TxRecord> log; // ordered by air start, then packet id
    Topology topology;
};

/// Runs one scenario over the half-open window [0, sim_time_s). Packets on
/// air when the window closes are allowed to finish; packets still backing
/// off are reported as pending_at_end.
RunResult run_scenario(const RunConfig& cfg);

/// Sensing interval used for a device of the given SF under cfg.
SimTime sensing_interval(const RunConfig& cfg, int sf);

} // namespace lorasim
