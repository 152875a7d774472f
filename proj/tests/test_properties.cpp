// Randomised scenarios checked against invariants that must hold for any
// configuration.

#include "lorasim/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace lorasim;

namespace {

bool
overlaps(const Packet& a, const Packet& b)
{
    return a.air_start < b.air_end && b.air_start < a.air_end;
}

bool
path_bound(const TxRecord& r)
{
    return r.outcome == ReceptionOutcome::Received || r.outcome == ReceptionOutcome::Collided;
}

RunConfig
random_config(std::mt19937_64& gen, int trial)
{
    RunConfig cfg;
    cfg.scenario = "prop" + std::to_string(trial);
    cfg.seed = gen();
    cfg.n_devices = std::uniform_int_distribution<std::size_t>(1, 60)(gen);
    cfg.sim_time_s = 300.0;
    cfg.period_set_s = {5.0, 10.0, 20.0};
    const std::vector<std::vector<int>> mixes{{8}, {8, 9, 10}, {7, 8}};
    cfg.sf_set = mixes[gen() % mixes.size()];
    cfg.p = std::vector<double>{0.1, 0.25, 0.5, 1.0}[gen() % 4];
    cfg.geometry.n_areas = static_cast<int>(1 + gen() % 3);
    cfg.mac = gen() % 4 == 0 ? MacMode::Aloha : MacMode::PCsma;
    cfg.offsets = gen() % 3 == 0 ? OffsetMode::Zero : OffsetMode::Uniform;
    cfg.gateway_paths = gen() % 2 == 0 ? 8 : 3;
    if (gen() % 3 == 0)
    {
        cfg.shadowing_sigma_db = 6.0;
    }
    return cfg;
}

} // namespace

TEST_CASE("random scenarios satisfy the reception and exclusion invariants")
{
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 40; ++trial)
    {
        const RunConfig cfg = random_config(gen, trial);
        CAPTURE(trial);
        CAPTURE(cfg.n_devices);
        const RunResult r = run_scenario(cfg);
        const Counters& c = r.counters;
        const auto& log = r.log;
        const VicinityMatrix& vis = r.topology.vicinity;

        // conservation
        CHECK(log.size() == c.sent);
        CHECK(c.generated == c.sent + c.suppressed + c.pending_at_end);
        CHECK(c.sent == c.received + c.collided + c.under_sensitivity + c.no_path);
        CHECK(c.books == c.frees);
        CHECK(c.max_bound_paths <= cfg.gateway_paths);

        // log ordering
        CHECK(std::is_sorted(log.begin(), log.end(), [](const TxRecord& a, const TxRecord& b) {
            return a.packet.air_start < b.packet.air_start;
        }));

        for (std::size_t i = 0; i < log.size(); ++i)
        {
            const Packet& a = log[i].packet;
            std::size_t bound_at_start = 0;   // certainly holding a path when a started
            std::size_t bound_or_ending = 0;  // also those ending exactly then
            bool has_bound_same_sf_overlap = false;
            for (std::size_t j = 0; j < log.size(); ++j)
            {
                if (i == j)
                {
                    continue;
                }
                const Packet& b = log[j].packet;
                if (path_bound(log[j]) && b.air_start <= a.air_start && a.air_start <= b.air_end)
                {
                    ++bound_or_ending;
                }
                if (!overlaps(a, b))
                {
                    continue;
                }
                CHECK(a.device != b.device); // one packet on air per device
                if (path_bound(log[j]) && b.air_start <= a.air_start && a.air_start < b.air_end)
                {
                    ++bound_at_start;
                }
                if (path_bound(log[j]) && b.sf == a.sf)
                {
                    has_bound_same_sf_overlap = true;
                }
                if (cfg.mac == MacMode::PCsma)
                {
                    // sensing keeps mutually audible devices apart
                    CHECK_FALSE(vis.mutually_visible(a.device, b.device));
                    // the later starter cannot hear the earlier one
                    if (a.air_start > b.air_start)
                    {
                        CHECK_FALSE(vis.detects(a.device, b.device));
                    }
                }
            }
            switch (log[i].outcome)
            {
            case ReceptionOutcome::Received:
                CHECK_FALSE(has_bound_same_sf_overlap);
                break;
            case ReceptionOutcome::Collided:
                CHECK(has_bound_same_sf_overlap);
                break;
            case ReceptionOutcome::NoDemodPath:
                CHECK(bound_or_ending >= cfg.gateway_paths);
                break;
            case ReceptionOutcome::UnderSensitivity:
                CHECK(r.topology.gateway_prx_dbm[a.device] <
                      cfg.sensitivity.threshold_dbm(Role::Gateway, a.sf));
                break;
            }
            if (path_bound(log[i]))
            {
                CHECK(bound_at_start < cfg.gateway_paths);
            }
        }
    }
}

TEST_CASE("vicinity depends only on geometry and SF")
{
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 20; ++trial)
    {
        RunConfig cfg = random_config(gen, trial);
        const Topology t = build_topology(cfg);
        // changing MAC, persistence and traffic parameters leaves it unchanged
        RunConfig other = cfg;
        other.mac = cfg.mac == MacMode::Aloha ? MacMode::PCsma : MacMode::Aloha;
        other.p = 0.3;
        other.period_set_s = {1000.0};
        other.sensing_interval_s = 0.5;
        CHECK(build_topology(other).vicinity == t.vicinity);

        for (std::size_t i = 0; i < t.devices.size(); ++i)
        {
            for (std::size_t j = 0; j < t.devices.size(); ++j)
            {
                if (i == j)
                {
                    continue;
                }
                const double range = detect_range_m(t.devices[j].sf, Role::EndDevice,
                                                    t.devices[j].tx_power_dbm, cfg.loss, cfg.sensitivity);
                CHECK(t.vicinity.detects(i, j) ==
                      (distance(t.devices[i].position, t.devices[j].position) <= range));
            }
        }
    }
}

TEST_CASE("a single visible cluster carries one packet at a time")
{
    // Dense single cluster, heavy load: every pair mutually visible, so the
    // channel carries at most one packet at a time.
    RunConfig cfg;
    cfg.n_devices = 40;
    cfg.sim_time_s = 600.0;
    cfg.period_set_s = {2.0, 3.0};
    cfg.p = 0.5;
    cfg.seed = 13;
    const RunResult r = run_scenario(cfg);
    CHECK(r.counters.collided == 0);
    CHECK(r.counters.no_path == 0);
    for (std::size_t i = 1; i < r.log.size(); ++i)
    {
        CHECK(r.log[i - 1].packet.air_end <= r.log[i].packet.air_start);
    }
}
