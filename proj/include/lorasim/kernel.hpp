#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lorasim {

/// Point in (or span of) simulated time, stored as integer microseconds so
/// that event ordering is exact and identical on every platform.
class SimTime
{
  public:
    constexpr SimTime() = default;

    static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }

    /// Rounds to the nearest microsecond. Negative or non-finite input throws.
    static SimTime from_seconds(double seconds);

    constexpr std::int64_t micros() const { return m_us; }
    double seconds() const { return static_cast<double>(m_us) * 1e-6; }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.m_us + b.m_us); }

  private:
    constexpr explicit SimTime(std::int64_t us) : m_us(us) {}
    std::int64_t m_us = 0;
};

using EventId = std::uint64_t;

/// Single-threaded discrete-event scheduler. Events fire in (time, insertion
/// sequence) order, so simultaneous events run first-in first-out.
class Scheduler
{
  public:
    using Action = std::function<void()>;

    /// Throws std::logic_error if `at` lies before the current clock.
    EventId schedule(SimTime at, Action action);

    /// True iff the event was still pending; it will then never run.
    bool cancel(EventId id);

    /// Executes every pending event with fire time <= until, then advances
    /// the clock to `until`. Returns the number of events executed.
    std::size_t run(SimTime until);

    /// Executes events until the queue is empty.
    std::size_t run_all();

    SimTime now() const { return m_now; }
    std::size_t pending() const { return m_actions.size(); }

  private:
    struct Entry
    {
        SimTime at;
        EventId seq;
    };

    struct Later
    {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.at != b.at)
            {
                return a.at > b.at;
            }
            return a.seq > b.seq;
        }
    };

    bool step(SimTime limit);

    std::priority_queue<Entry, std::vector<Entry>, Later> m_queue;
    std::unordered_map<EventId, Action> m_actions;
    SimTime m_now;
    EventId m_next = 0;
};

/// Named, seedable random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. It is seeded with splitmix64(run_seed XOR fnv1a64(stream_id)).
/// Uniform reals take the top 53 bits of each 64-bit output times 2^-53, so a
/// given (seed, stream_id, draw index) yields the same value everywhere.
class RngStream
{
  public:
    RngStream(std::uint64_t run_seed, std::string_view stream_id);

    /// Uniform on [0, 1).
    double next_uniform();

    /// Standard normal via Box-Muller (two uniform draws per call).
    double next_normal();

    const std::string& id() const { return m_id; }

  private:
    std::string m_id;
    std::mt19937_64 m_engine;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

} // namespace lorasim
