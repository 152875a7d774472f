// Command-line front end: single runs, parameter sweeps and the ALOHA
// throughput validation.

#include "lorasim/config.hpp"
#include "lorasim/errors.hpp"
#include "lorasim/report.hpp"
#include "lorasim/scenario.hpp"
#include "lorasim/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

using namespace lorasim;

void
apply_mode(RunConfig& cfg, const std::string& mode)
{
    if (!mode.empty())
    {
        cfg.mac = parse_mac_mode(mode);
    }
}

template <typename Writer>
void
emit(const std::string& path, Writer&& write)
{
    if (path.empty() || path == "-")
    {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    write(out);
    if (!out)
    {
        throw std::runtime_error("error while writing '" + path + "'");
    }
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"lorasim: single-gateway LoRa network simulator with p-CSMA and ALOHA MACs"};
    app.require_subcommand(1);

    std::string mode;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    // run
    auto* run = app.add_subcommand("run", "Run one scenario");
    std::string run_config;
    std::optional<std::uint64_t> run_seed;
    std::string run_out;
    std::string run_trace;
    run->add_option("--config", run_config, "Scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", run_seed, "Override the config seed");
    run->add_option("--out", run_out, "Result CSV (default: stdout)");
    run->add_option("--trace", run_trace, "Per-packet transmission log (tab-separated)");
    run->add_option("--mode", mode, "Override the MAC: pcsma or aloha")
        ->check(CLI::IsMember({"pcsma", "aloha"}));

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
    std::string sweep_config;
    std::string sweep_grid;
    std::string sweep_out;
    sweep->add_option("--config", sweep_config, "Base scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--grid", sweep_grid, "Grid file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", sweep_out, "Result CSV")->required();
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--mode", mode, "Override the MAC: pcsma or aloha")
        ->check(CLI::IsMember({"pcsma", "aloha"}));

    // validate-aloha
    auto* aloha = app.add_subcommand("validate-aloha", "Measure pure-ALOHA throughput vs offered load");
    std::vector<double> g_values{0.1, 0.25, 0.5, 1.0};
    std::string aloha_out;
    std::string aloha_config;
    double packet_times = 250000.0;
    std::optional<std::uint64_t> aloha_seed;
    aloha->add_option("--g", g_values, "Offered loads in packets per packet-time")->delimiter(',');
    aloha->add_option("--out", aloha_out, "Output CSV (default: stdout)");
    aloha->add_option("--config", aloha_config, "Optional base scenario (must be aloha + poisson)")
        ->check(CLI::ExistingFile);
    aloha->add_option("--packet-times", packet_times, "Simulated duration in packet-times")
        ->check(CLI::PositiveNumber);
    aloha->add_option("--seed", aloha_seed, "Seed");
    aloha->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
        {
            RunConfig cfg = load_config(run_config);
            apply_mode(cfg, mode);
            if (run_seed)
            {
                cfg.seed = *run_seed;
            }
            const RunResult result = run_scenario(cfg);
            const ResultRow row = make_row(cfg, result.counters);
            emit(run_out, [&](std::ostream& out) { write_csv(std::span(&row, 1), out); });
            if (!run_trace.empty())
            {
                write_trace(result.log, std::filesystem::path(run_trace));
            }
        }
        else if (sweep->parsed())
        {
            RunConfig base = load_config(sweep_config);
            apply_mode(base, mode);
            const SweepGrid grid = parse_grid(read_text_file(sweep_grid), base);
            const auto rows = run_sweep(base, grid, jobs);
            write_csv(rows, std::filesystem::path(sweep_out));
        }
        else if (aloha->parsed())
        {
            RunConfig base = aloha_config.empty() ? aloha_validation_config()
                                                  : load_config(aloha_config);
            if (aloha_seed)
            {
                base.seed = *aloha_seed;
            }
            const auto points = aloha_validation(base, g_values, packet_times, jobs);
            emit(aloha_out, [&](std::ostream& out) { write_aloha_csv(points, out); });
        }
    }
    catch (const ConfigError& e)
    {
        std::cerr << "lorasim: configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "lorasim: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
