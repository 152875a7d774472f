#include "lorasim/scenario.hpp"

#include "lorasim/kernel.hpp"
#include "lorasim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lorasim {

void
Counters::check() const
{
    auto require = [](bool ok, const std::string& what) {
        if (!ok)
        {
            throw std::logic_error("counter conservation violated: " + what);
        }
    };
    require(sent == received + collided + under_sensitivity + no_path,
            "sent != received + collided + under_sensitivity + no_path");
    require(generated == sent + suppressed + pending_at_end,
            "generated != sent + suppressed + pending_at_end");
    require(books == frees, "book count != free count");
    require(books == sent, "book count != sent");
    require(path_binds == path_releases, "demodulation path binds != releases");
    require(max_bound_paths <= gateway_paths, "bound demodulation paths exceeded the pool");
}

SimTime
sensing_interval(const RunConfig& cfg, int sf)
{
    if (cfg.sensing_interval_s)
    {
        return SimTime::from_seconds(*cfg.sensing_interval_s);
    }
    return SimTime::from_seconds(time_on_air(sf, cfg.radio) / 2.0);
}

Topology
build_topology(const RunConfig& cfg)
{
    cfg.validate();
    Topology topo;
    if (cfg.device_list)
    {
        topo.devices = *cfg.device_list;
        for (auto& d : topo.devices)
        {
            d.tx_power_dbm = cfg.tx_power_dbm;
        }
        topo.area.assign(topo.devices.size(), 0);
    }
    else
    {
        topo.devices =
            assign_attributes(cfg.n_devices, cfg.sf_set, cfg.period_set_s, cfg.p, cfg.tx_power_dbm);
        RngStream placement_rng(cfg.seed, "topology");
        const auto bounds = coverage_bounds(cfg.sf_set, cfg.tx_power_dbm, cfg.loss, cfg.sensitivity);
        Placement placement = place_clusters(cfg.n_devices, cfg.geometry, bounds, placement_rng);
        for (std::size_t i = 0; i < topo.devices.size(); ++i)
        {
            topo.devices[i].position = placement.positions[i];
        }
        topo.area = std::move(placement.area);
    }

    topo.vicinity = build_vicinity(topo.devices, cfg.loss, cfg.sensitivity);

    RngStream shadowing_rng(cfg.seed, "shadowing");
    const Position gateway_at{};
    topo.gateway_prx_dbm.reserve(topo.devices.size());
    for (const auto& d : topo.devices)
    {
        double prx = received_power_dbm(d.tx_power_dbm, distance(d.position, gateway_at), cfg.loss);
        if (cfg.shadowing_sigma_db > 0.0)
        {
            prx += cfg.shadowing_sigma_db * shadowing_rng.next_normal();
        }
        topo.gateway_prx_dbm.push_back(prx);
    }
    return topo;
}

RunResult
run_scenario(const RunConfig& cfg)
{
    RunResult result;
    result.topology = build_topology(cfg);
    const Topology& topo = result.topology;
    const std::size_t n = topo.devices.size();

    Scheduler scheduler;

    std::vector<DeviceTiming> timing(n);
    std::vector<double> p_values(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const DeviceSpec& d = topo.devices[i];
        timing[i].airtime = SimTime::from_seconds(time_on_air(d.sf, cfg.radio));
        timing[i].sensing_interval = sensing_interval(cfg, d.sf);
        timing[i].period = cfg.traffic == TrafficMode::Periodic ? SimTime::from_seconds(d.period_s)
                                                                : SimTime{};
        p_values[i] = d.persistence;
    }

    MacLayer* mac_ptr = nullptr;
    Gateway gateway(cfg.gateway_paths, cfg.sensitivity,
                    [&mac_ptr](DeviceId device) { mac_ptr->free_channel(device); });

    PacketId next_packet = 0;
    auto transmit = [&](DeviceId device, SimTime t) {
        Packet packet;
        packet.id = next_packet++;
        packet.device = device;
        packet.sf = topo.devices[device].sf;
        packet.prx_dbm = topo.gateway_prx_dbm[device];
        packet.air_start = t;
        packet.air_end = t + timing[device].airtime;
        gateway.on_tx_start(packet);
        scheduler.schedule(packet.air_end, [&gateway, id = packet.id] { gateway.on_tx_end(id); });
    };

    MacOptions options;
    options.mode = cfg.mac;
    options.duty_cycle_guard = cfg.duty_cycle_guard;
    MacLayer mac(scheduler, topo.vicinity, timing, PersistenceTable(p_values),
                 RngStream(cfg.seed, "persistence"), options, transmit);
    mac_ptr = &mac;

    RngStream traffic_rng(cfg.seed, "traffic");
    bool accepting = true;
    std::size_t next_device = 0;
    std::function<void(SimTime)> poisson_arrival;

    if (cfg.traffic == TrafficMode::Periodic)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            SimTime first;
            switch (cfg.offsets)
            {
            case OffsetMode::Zero:
                break;
            case OffsetMode::Uniform:
                first = SimTime::from_micros(static_cast<std::int64_t>(
                    std::floor(traffic_rng.next_uniform() *
                               static_cast<double>(timing[i].period.micros()))));
                break;
            case OffsetMode::Explicit:
                first = SimTime::from_seconds(cfg.offsets_s[i]);
                break;
            }
            mac.start_periodic(i, first);
        }
    }
    else
    {
        // Aggregate Poisson process, packets dealt to devices round-robin.
        const double packet_time = time_on_air(cfg.sf_set.front(), cfg.radio);
        const double mean_gap_s = packet_time / cfg.offered_load;
        auto next_gap = [&] {
            const double u = 1.0 - traffic_rng.next_uniform(); // (0, 1]
            return SimTime::from_seconds(-std::log(u) * mean_gap_s);
        };
        poisson_arrival = [&](SimTime t) {
            if (!accepting)
            {
                return;
            }
            mac.on_arrival(next_device, t);
            next_device = (next_device + 1) % n;
            const SimTime next = t + next_gap();
            scheduler.schedule(next, [&poisson_arrival, next] { poisson_arrival(next); });
        };
        const SimTime first = next_gap();
        scheduler.schedule(first, [&poisson_arrival, first] { poisson_arrival(first); });
    }

    const SimTime end = SimTime::from_seconds(cfg.sim_time_s);
    scheduler.run(SimTime::from_micros(end.micros() - 1));
    accepting = false;
    mac.stop();
    scheduler.run_all();

    Counters& c = result.counters;
    const MacTotals totals = mac.totals();
    c.generated = totals.generated;
    c.sent = totals.sent;
    c.suppressed = totals.suppressed;
    c.pending_at_end = totals.pending;
    c.books = mac.channel().book_count();
    c.frees = mac.channel().free_count();
    c.path_binds = gateway.bind_count();
    c.path_releases = gateway.release_count();
    c.max_bound_paths = gateway.max_bound_paths();
    c.gateway_paths = gateway.n_paths();

    result.log = gateway.take_log();
    for (const auto& rec : result.log)
    {
        switch (rec.outcome)
        {
        case ReceptionOutcome::Received:
            ++c.received;
            break;
        case ReceptionOutcome::Collided:
            ++c.collided;
            break;
        case ReceptionOutcome::UnderSensitivity:
            ++c.under_sensitivity;
            break;
        case ReceptionOutcome::NoDemodPath:
            ++c.no_path;
            break;
        }
    }
    std::sort(result.log.begin(), result.log.end(), [](const TxRecord& a, const TxRecord& b) {
        if (a.packet.air_start != b.packet.air_start)
        {
            return a.packet.air_start < b.packet.air_start;
        }
        return a.packet.id < b.packet.id;
    });

    c.check();
    return result;
}

} // namespace lorasim
