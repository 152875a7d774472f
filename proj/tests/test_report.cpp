#include "lorasim/report.hpp"
#include "lorasim/sweep.hpp"

#include <doctest.h>

#include <sstream>
#include <stdexcept>

using namespace lorasim;

namespace {

Counters
counters(std::uint64_t generated, std::uint64_t sent, std::uint64_t received)
{
    Counters c;
    c.generated = generated;
    c.sent = sent;
    c.suppressed = generated - sent;
    c.received = received;
    c.collided = sent - received;
    return c;
}

std::size_t
line_count(const std::string& s)
{
    std::size_t n = 0;
    for (char c : s)
    {
        n += c == '\n' ? 1 : 0;
    }
    return n;
}

} // namespace

TEST_CASE("reception ratios")
{
    const Prr all = compute_prr(counters(36, 36, 36));
    CHECK(*all.generated == 1.0);
    CHECK(*all.sent == 1.0);

    const Prr half = compute_prr(counters(40, 36, 18));
    CHECK(*half.generated == doctest::Approx(0.45));
    CHECK(*half.sent == doctest::Approx(0.5));

    const Prr none = compute_prr(Counters{});
    CHECK_FALSE(none.generated);
    CHECK_FALSE(none.sent);

    Counters bad = counters(10, 10, 10);
    bad.received = 11;
    CHECK_THROWS_AS(compute_prr(bad), std::logic_error);
}

TEST_CASE("empty result set writes only the header")
{
    std::ostringstream out;
    write_csv(std::span<const ResultRow>{}, out);
    CHECK(out.str() == std::string(kCsvHeader) + "\n");
}

TEST_CASE("result row formatting")
{
    RunConfig cfg;
    cfg.scenario = "s";
    cfg.n_devices = 1;
    cfg.seed = 3;
    cfg.p = 0.25;
    cfg.sf_set = {8, 9};
    cfg.period_set_s = {100, 250.5};
    const ResultRow row = make_row(cfg, counters(36, 36, 36));
    std::ostringstream out;
    write_csv(std::span(&row, 1), out);
    CHECK(out.str() == std::string(kCsvHeader) +
                           "\ns,3,pcsma,1,8;9,0.250000,1,100;250.5,36,36,0,36,0,0,0,1.000000,1.000000\n");

    ResultRow empty = make_row(cfg, Counters{});
    std::ostringstream out2;
    write_csv(std::span(&empty, 1), out2);
    CHECK(out2.str().ends_with(",0,0,0,0,0,0,0,,\n"));
}

TEST_CASE("rows sort by scenario and seed with summaries last")
{
    RunConfig cfg;
    cfg.n_devices = 1;
    std::vector<ResultRow> rows;
    for (const char* name : {"b", "a"})
    {
        for (std::uint64_t seed : {2u, 1u})
        {
            cfg.scenario = name;
            cfg.seed = seed;
            rows.push_back(make_row(cfg, counters(10, 10, seed == 1 ? 10 : 5)));
        }
    }
    auto summary = summarize(rows);
    REQUIRE(summary.size() == 4);
    CHECK(*summary[0].prr_generated == doctest::Approx(0.75));
    CHECK(*summary[1].prr_generated == doctest::Approx(0.3535533906));
    rows.insert(rows.begin(), summary.begin(), summary.end());

    std::ostringstream out;
    write_csv(rows, out);
    std::istringstream in(out.str());
    std::string line;
    std::vector<std::string> prefixes;
    std::getline(in, line);
    while (std::getline(in, line))
    {
        prefixes.push_back(line.substr(0, line.find(',', line.find(',') + 1)));
    }
    CHECK(prefixes ==
          std::vector<std::string>{"a,1", "a,2", "b,1", "b,2", "a,mean", "a,std", "b,mean", "b,std"});
}

TEST_CASE("sweep output is one row per cell and seed and is deterministic")
{
    RunConfig base;
    base.n_devices = 10;
    base.sim_time_s = 600;
    SweepGrid grid;
    grid.device_counts = {10, 20, 30};
    grid.p_values = {0.5, 1.0};
    grid.sf_sets = {{8}};
    grid.n_areas_values = {1};
    grid.seeds = {1, 2, 3, 4, 5};

    const auto rows = run_sweep(base, grid, 3);
    std::size_t run_rows = 0;
    for (const auto& r : rows)
    {
        run_rows += r.kind == RowKind::Run ? 1 : 0;
    }
    CHECK(run_rows == 30);
    CHECK(rows.size() == 30 + 2 * 6);

    std::ostringstream a;
    std::ostringstream b;
    write_csv(rows, a);
    write_csv(run_sweep(base, grid, 1), b);
    CHECK(a.str() == b.str());
    CHECK(line_count(a.str()) == 1 + 42);
}

TEST_CASE("trace lines use exact microsecond times")
{
    std::vector<TxRecord> log{
        {Packet{0, 2, 8, -95.123456789, SimTime::from_micros(1'000'001), SimTime::from_micros(1'102'913)},
         ReceptionOutcome::Collided}};
    std::ostringstream out;
    write_trace(log, out);
    CHECK(out.str() == std::string(kTraceHeader) + "\n2\t8\t1.000001\t1.102913\t-95.123457\tcollided\n");
}
