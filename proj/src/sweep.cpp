#include "lorasim/sweep.hpp"

#include "lorasim/errors.hpp"
#include "lorasim/scenario.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace lorasim {

void
parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++)
        {
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
                next = count; // stop handing out work
            }
        }
    };

    if (workers <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
        {
            pool.emplace_back(worker);
        }
        for (auto& t : pool)
        {
            t.join();
        }
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

SweepGrid
parse_grid(std::string_view text, const RunConfig& base)
{
    SweepGrid grid;
    bool have_seeds = false;
    for (const auto& kv : detail::split_key_values(text))
    {
        if (kv.key == "device_counts")
        {
            for (const auto& item : detail::list_items(kv))
            {
                auto v = detail::to_int(kv, item);
                if (v < 1)
                {
                    throw ConfigError("grid line " + std::to_string(kv.line) +
                                      ": device counts must be at least 1");
                }
                grid.device_counts.push_back(static_cast<std::size_t>(v));
            }
        }
        else if (kv.key == "p_values")
        {
            for (const auto& item : detail::list_items(kv))
            {
                grid.p_values.push_back(detail::to_real(kv, item));
            }
        }
        else if (kv.key == "sf_sets")
        {
            for (const auto& inner : detail::nested_list_items(kv))
            {
                std::vector<int> sfs;
                for (const auto& item : inner)
                {
                    sfs.push_back(static_cast<int>(detail::to_int(kv, item)));
                }
                grid.sf_sets.push_back(std::move(sfs));
            }
        }
        else if (kv.key == "n_areas_values")
        {
            for (const auto& item : detail::list_items(kv))
            {
                grid.n_areas_values.push_back(static_cast<int>(detail::to_int(kv, item)));
            }
        }
        else if (kv.key == "seeds" || kv.key == "seed_count")
        {
            if (have_seeds)
            {
                throw ConfigError("grid line " + std::to_string(kv.line) +
                                  ": give either seeds or seed_count, not both");
            }
            have_seeds = true;
            if (kv.key == "seeds")
            {
                for (const auto& item : detail::list_items(kv))
                {
                    grid.seeds.push_back(static_cast<std::uint64_t>(detail::to_int(kv, item)));
                }
            }
            else
            {
                const auto count = detail::to_int(kv, kv.value);
                for (std::int64_t s = 1; s <= count; ++s)
                {
                    grid.seeds.push_back(static_cast<std::uint64_t>(s));
                }
            }
        }
        else
        {
            throw ConfigError("grid line " + std::to_string(kv.line) + ": unknown key '" + kv.key +
                              "'");
        }
    }

    if (grid.device_counts.empty())
    {
        grid.device_counts.push_back(base.n_devices);
    }
    if (grid.p_values.empty())
    {
        const auto* global = std::get_if<double>(&base.p);
        if (global == nullptr)
        {
            throw ConfigError("grid: p_values required when the base config uses per-device p");
        }
        grid.p_values.push_back(*global);
    }
    if (grid.sf_sets.empty())
    {
        grid.sf_sets.push_back(base.sf_set);
    }
    if (grid.n_areas_values.empty())
    {
        grid.n_areas_values.push_back(base.geometry.n_areas);
    }
    if (grid.seeds.empty())
    {
        grid.seeds.push_back(base.seed);
    }
    return grid;
}

namespace {

std::string
cell_label(std::size_t index, std::size_t n, double p, const std::vector<int>& sfs, int areas)
{
    std::ostringstream ss;
    char idx[16];
    std::snprintf(idx, sizeof idx, "c%03zu", index);
    ss << idx << "_n" << n << "_p" << p << "_sf";
    for (std::size_t i = 0; i < sfs.size(); ++i)
    {
        ss << (i ? "-" : "") << sfs[i];
    }
    ss << "_a" << areas;
    return ss.str();
}

} // namespace

std::vector<RunConfig>
expand_grid(const RunConfig& base, const SweepGrid& grid)
{
    if (grid.cell_count() == 0 || grid.seeds.empty())
    {
        throw ConfigError("sweep grid is empty");
    }
    if (base.device_list)
    {
        throw ConfigError("sweeps generate their own topology; remove device_file from the config");
    }
    std::vector<RunConfig> out;
    out.reserve(grid.cell_count() * grid.seeds.size());
    std::size_t cell = 0;
    for (std::size_t n : grid.device_counts)
    {
        for (double p : grid.p_values)
        {
            for (const auto& sfs : grid.sf_sets)
            {
                for (int areas : grid.n_areas_values)
                {
                    const std::string label = cell_label(cell++, n, p, sfs, areas);
                    for (std::uint64_t seed : grid.seeds)
                    {
                        RunConfig cfg = base;
                        cfg.scenario = label;
                        cfg.n_devices = n;
                        cfg.p = p;
                        cfg.sf_set = sfs;
                        cfg.geometry.n_areas = areas;
                        cfg.seed = seed;
                        if (cfg.offsets == OffsetMode::Explicit)
                        {
                            throw ConfigError("sweeps need offsets = zero or uniform");
                        }
                        cfg.validate();
                        out.push_back(std::move(cfg));
                    }
                }
            }
        }
    }
    return out;
}

std::vector<ResultRow>
summarize(std::span<const ResultRow> rows)
{
    struct Acc
    {
        const ResultRow* first = nullptr;
        std::vector<double> gen;
        std::vector<double> sent;
    };
    std::map<std::string, Acc> groups;
    for (const auto& r : rows)
    {
        if (r.kind != RowKind::Run)
        {
            continue;
        }
        Acc& acc = groups[r.scenario];
        if (acc.first == nullptr)
        {
            acc.first = &r;
        }
        if (r.prr_generated)
        {
            acc.gen.push_back(*r.prr_generated);
        }
        if (r.prr_sent)
        {
            acc.sent.push_back(*r.prr_sent);
        }
    }

    auto mean = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty())
        {
            return std::nullopt;
        }
        double s = 0.0;
        for (double x : v)
        {
            s += x;
        }
        return s / static_cast<double>(v.size());
    };
    auto stddev = [&](const std::vector<double>& v) -> std::optional<double> {
        auto m = mean(v);
        if (!m)
        {
            return std::nullopt;
        }
        if (v.size() < 2)
        {
            return 0.0;
        }
        double ss = 0.0;
        for (double x : v)
        {
            ss += (x - *m) * (x - *m);
        }
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };

    std::vector<ResultRow> out;
    for (const auto& [scenario, acc] : groups)
    {
        ResultRow m = *acc.first;
        m.counters.reset();
        m.seed = 0;
        m.kind = RowKind::Mean;
        m.prr_generated = mean(acc.gen);
        m.prr_sent = mean(acc.sent);
        out.push_back(m);

        ResultRow s = m;
        s.kind = RowKind::StdDev;
        s.prr_generated = stddev(acc.gen);
        s.prr_sent = stddev(acc.sent);
        out.push_back(s);
    }
    return out;
}

std::vector<ResultRow>
run_sweep(const RunConfig& base, const SweepGrid& grid, unsigned jobs)
{
    const auto configs = expand_grid(base, grid);
    std::vector<ResultRow> rows(configs.size());
    parallel_for(configs.size(), jobs, [&](std::size_t i) {
        const RunResult result = run_scenario(configs[i]);
        rows[i] = make_row(configs[i], result.counters);
    });
    auto summary = summarize(rows);
    rows.insert(rows.end(), summary.begin(), summary.end());
    return rows;
}

RunConfig
aloha_validation_config()
{
    RunConfig cfg;
    cfg.scenario = "aloha";
    cfg.n_devices = 100;
    cfg.mac = MacMode::Aloha;
    cfg.traffic = TrafficMode::Poisson;
    cfg.sf_set = {8};
    return cfg;
}

std::vector<AlohaPoint>
aloha_validation(const RunConfig& base,
                 std::span<const double> g_values,
                 double packet_times,
                 unsigned jobs)
{
    if (base.mac != MacMode::Aloha)
    {
        throw ConfigError("ALOHA validation requires mac = aloha");
    }
    if (base.traffic != TrafficMode::Poisson)
    {
        throw ConfigError("ALOHA validation requires traffic = poisson");
    }
    if (base.sf_set.size() != 1)
    {
        throw ConfigError("ALOHA validation requires a single spreading factor");
    }
    if (g_values.empty())
    {
        throw ConfigError("ALOHA validation needs at least one offered load");
    }
    if (!(packet_times > 0.0))
    {
        throw ConfigError("ALOHA validation needs a positive number of packet-times");
    }

    const double packet_time = time_on_air(base.sf_set.front(), base.radio);
    std::vector<AlohaPoint> points(g_values.size());
    parallel_for(g_values.size(), jobs, [&](std::size_t i) {
        RunConfig cfg = base;
        cfg.offered_load = g_values[i];
        cfg.sim_time_s = packet_times * packet_time;
        const RunResult result = run_scenario(cfg);
        AlohaPoint& pt = points[i];
        pt.offered_load = g_values[i];
        pt.throughput = static_cast<double>(result.counters.received) / packet_times;
        pt.theoretical = g_values[i] * std::exp(-2.0 * g_values[i]);
    });
    return points;
}

void
write_aloha_csv(std::span<const AlohaPoint> points, std::ostream& out)
{
    out << "offered_load,throughput,theoretical\n";
    for (const auto& pt : points)
    {
        out << format_fixed(pt.offered_load) << ',' << format_fixed(pt.throughput) << ','
            << format_fixed(pt.theoretical) << '\n';
    }
}

} // namespace lorasim
