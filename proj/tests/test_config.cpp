#include "lorasim/config.hpp"
#include "lorasim/errors.hpp"
#include "lorasim/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace lorasim;

TEST_CASE("minimal config takes the reference defaults")
{
    const RunConfig cfg = parse_config("n_devices = 20\n");
    CHECK(cfg.n_devices == 20);
    CHECK(cfg.sim_time_s == 3600.0);
    CHECK(cfg.mac == MacMode::PCsma);
    CHECK(cfg.traffic == TrafficMode::Periodic);
    CHECK(cfg.period_set_s == std::vector<double>{100, 200, 300, 400, 500});
    CHECK(cfg.sf_set == std::vector<int>{8});
    CHECK(std::get<double>(cfg.p) == 1.0);
    CHECK(cfg.geometry.n_areas == 1);
    CHECK(cfg.gateway_paths == 8);
    CHECK(cfg.tx_power_dbm == 14.0);
    CHECK(cfg.radio.payload_bytes == 19);
    CHECK(cfg.offsets == OffsetMode::Uniform);
}

TEST_CASE("full config round")
{
    const RunConfig cfg = parse_config(R"(
        # comment line
        scenario = mixed   # trailing comment
        n_devices = 30
        sim_time_s = 1800
        mac = aloha
        traffic = poisson
        period_set_s = {50, 60}
        sf_set = {8,9,10}
        p = 0.5
        n_areas = 2
        cluster_radius_m = 150
        ring_radius_m = 3000
        seed = 17
        offsets = zero
        low_data_rate_optimize = false
        sensing_interval_s = 0.02
        duty_cycle_guard = true
        offered_load = 0.75
        gateway_paths = 4
    )");
    CHECK(cfg.scenario == "mixed");
    CHECK(cfg.mac == MacMode::Aloha);
    CHECK(cfg.traffic == TrafficMode::Poisson);
    CHECK(cfg.sf_set == std::vector<int>{8, 9, 10});
    CHECK(cfg.geometry.ring_radius_m == 3000.0);
    CHECK(cfg.seed == 17);
    CHECK(cfg.offsets == OffsetMode::Zero);
    CHECK(cfg.radio.low_data_rate_optimize == false);
    CHECK(cfg.sensing_interval_s == 0.02);
    CHECK(cfg.duty_cycle_guard);
    CHECK(cfg.gateway_paths == 4);
}

TEST_CASE("invalid values are rejected")
{
    CHECK_THROWS_WITH_AS(parse_config("n_devices = 5\np = 0\n"), doctest::Contains("p"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 5\np = 1.01\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 5\nsf_set = {6}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 5\nperiod_set_s = {100, -1}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 5\nmac = csma\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 3\np = {0.5, 0.5}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 3\noffsets = {0, 1}\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 3\nsensing_interval_s = 0\n"), ConfigError);
}

TEST_CASE("structural errors name the line and key")
{
    CHECK_THROWS_WITH_AS(parse_config("n_devices = 5\nbogus = 1\n"),
                         doctest::Contains("line 2: unknown key 'bogus'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n_devices = 5\nn_devices = 6\n"),
                         doctest::Contains("repeated"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("sim_time_s = 100\n"), doctest::Contains("n_devices"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("n_devices = 5\n\nsim_time_s = 1x\n"),
                         doctest::Contains("line 3, key 'sim_time_s'"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices = 5\nsf_set = {8,9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n_devices\n"), ConfigError);
}

TEST_CASE("per-device p and explicit offsets")
{
    const RunConfig cfg = parse_config("n_devices = 3\np = {0.1, 0.2, 0.3}\noffsets = {0, 0.5, 1}\n");
    CHECK(std::get<std::vector<double>>(cfg.p) == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(cfg.offsets == OffsetMode::Explicit);
    CHECK(cfg.offsets_s == std::vector<double>{0, 0.5, 1});
}

TEST_CASE("an SF mix splits devices evenly")
{
    const RunConfig cfg = parse_config("n_devices = 60\nsf_set = {8,9,10}\n");
    const Topology topo = build_topology(cfg);
    for (int sf : {8, 9, 10})
    {
        CHECK(std::count_if(topo.devices.begin(), topo.devices.end(),
                            [sf](const DeviceSpec& d) { return d.sf == sf; }) == 20);
    }
}

TEST_CASE("device file is resolved relative to the config")
{
    const auto dir = std::filesystem::temp_directory_path() / "lorasim_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "devices.txt") << "0 10 0 0 8 100 1\n1 -10 0 0 9 200 0.5\n";
        std::ofstream(dir / "run.cfg") << "device_file = devices.txt\nsim_time_s = 600\n";
    }
    const RunConfig cfg = load_config(dir / "run.cfg");
    REQUIRE(cfg.device_list);
    CHECK(cfg.device_list->size() == 2);
    CHECK((*cfg.device_list)[1].sf == 9);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);
}

TEST_CASE("mac mode names")
{
    CHECK(to_string(MacMode::PCsma) == "pcsma");
    CHECK(to_string(MacMode::Aloha) == "aloha");
    CHECK(parse_mac_mode("aloha") == MacMode::Aloha);
    CHECK_THROWS_AS(parse_mac_mode("ALOHA"), ConfigError);
}
