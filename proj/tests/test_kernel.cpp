#include "lorasim/kernel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

using namespace lorasim;

TEST_CASE("SimTime rounds to whole microseconds")
{
    CHECK(SimTime::from_seconds(0.102912).micros() == 102912);
    CHECK(SimTime::from_seconds(1.0000004).micros() == 1000000);
    CHECK(SimTime::from_seconds(1.0000006).micros() == 1000001);
    CHECK_THROWS_AS(SimTime::from_seconds(-1.0), std::invalid_argument);
    CHECK(SimTime::from_micros(5) + SimTime::from_micros(7) == SimTime::from_micros(12));
}

TEST_CASE("simultaneous events run first-in first-out")
{
    Scheduler s;
    std::vector<char> order;
    s.schedule(SimTime::from_seconds(5.0), [&] { order.push_back('X'); });
    s.schedule(SimTime::from_seconds(5.0), [&] { order.push_back('Y'); });
    s.run(SimTime::from_seconds(10.0));
    CHECK(order == std::vector<char>{'X', 'Y'});
}

TEST_CASE("scheduling in the past is a hard error")
{
    Scheduler s;
    s.run(SimTime::from_seconds(3.0));
    CHECK_THROWS_AS(s.schedule(SimTime::from_seconds(2.0), [] {}), std::logic_error);
    CHECK_NOTHROW(s.schedule(SimTime::from_seconds(3.0), [] {}));
}

TEST_CASE("a million random events execute in (time, seq) order")
{
    Scheduler s;
    std::mt19937_64 gen(42);
    std::uniform_int_distribution<std::int64_t> when(0, 50'000);
    std::vector<std::pair<std::int64_t, std::size_t>> scheduled;
    std::vector<std::pair<std::int64_t, std::size_t>> executed;
    scheduled.reserve(1'000'000);
    executed.reserve(1'000'000);
    for (int i = 0; i < 1'000'000; ++i)
    {
        const auto t = when(gen);
        s.schedule(SimTime::from_micros(t),
                   [&executed, t, idx = scheduled.size()] { executed.emplace_back(t, idx); });
        scheduled.emplace_back(t, scheduled.size());
    }
    CHECK(s.run(SimTime::from_micros(50'000)) == 1'000'000);
    std::stable_sort(scheduled.begin(), scheduled.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    CHECK(executed == scheduled);
}

TEST_CASE("cancel")
{
    Scheduler s;
    int runs = 0;
    auto fired = s.schedule(SimTime::from_seconds(1.0), [&] { ++runs; });
    auto pending = s.schedule(SimTime::from_seconds(2.0), [&] { runs += 10; });
    s.run(SimTime::from_seconds(1.5));
    CHECK_FALSE(s.cancel(fired));
    CHECK(s.cancel(pending));
    CHECK_FALSE(s.cancel(pending));
    CHECK_FALSE(s.cancel(12345));
    s.run(SimTime::from_seconds(10.0));
    CHECK(runs == 1);
}

TEST_CASE("run respects the horizon")
{
    SUBCASE("empty queue advances the clock")
    {
        Scheduler s;
        CHECK(s.run(SimTime::from_seconds(3600)) == 0);
        CHECK(s.now() == SimTime::from_seconds(3600));
    }
    SUBCASE("event inside the horizon fires")
    {
        Scheduler s;
        s.schedule(SimTime::from_seconds(100), [] {});
        CHECK(s.run(SimTime::from_seconds(3600)) == 1);
    }
    SUBCASE("event beyond the horizon stays queued")
    {
        Scheduler s;
        s.schedule(SimTime::from_seconds(4000), [] {});
        CHECK(s.run(SimTime::from_seconds(3600)) == 0);
        CHECK(s.pending() == 1);
        CHECK(s.now() == SimTime::from_seconds(3600));
    }
    SUBCASE("clock never decreases")
    {
        Scheduler s;
        std::vector<SimTime> seen;
        std::mt19937 gen(3);
        for (int i = 0; i < 1000; ++i)
        {
            s.schedule(SimTime::from_micros(gen() % 10000), [&] { seen.push_back(s.now()); });
        }
        s.run_all();
        CHECK(std::is_sorted(seen.begin(), seen.end()));
    }
}

TEST_CASE("events may schedule further events at the current time")
{
    Scheduler s;
    std::vector<int> order;
    s.schedule(SimTime::from_micros(10), [&] {
        order.push_back(1);
        s.schedule(s.now(), [&] { order.push_back(3); });
    });
    s.schedule(SimTime::from_micros(10), [&] { order.push_back(2); });
    s.run_all();
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("RngStream determinism and independence")
{
    RngStream a(99, "traffic");
    RngStream b(99, "traffic");
    for (int i = 0; i < 10; ++i)
    {
        CHECK(a.next_uniform() == b.next_uniform());
    }

    RngStream c(99, "persistence");
    RngStream d(99, "traffic");
    std::set<double> first;
    for (int i = 0; i < 1000; ++i)
    {
        first.insert(d.next_uniform());
    }
    int shared = 0;
    for (int i = 0; i < 1000; ++i)
    {
        shared += first.count(c.next_uniform()) ? 1 : 0;
    }
    CHECK(shared == 0);

    RngStream e(100, "traffic");
    RngStream f(99, "traffic");
    CHECK(e.next_uniform() != f.next_uniform());
}

TEST_CASE("RngStream uniform sample mean")
{
    RngStream r(1, "lln");
    double sum = 0.0;
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 100000; ++i)
    {
        const double u = r.next_uniform();
        sum += u;
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(std::abs(sum / 100000.0 - 0.5) <= 0.01);
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("seed mixing functions match their reference outputs")
{
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
