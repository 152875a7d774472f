#include "lorasim/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lorasim {

SimTime
SimTime::from_seconds(double seconds)
{
    if (!std::isfinite(seconds) || seconds < 0.0)
    {
        throw std::invalid_argument("SimTime: time must be finite and non-negative");
    }
    return SimTime(std::llround(seconds * 1e6));
}

EventId
Scheduler::schedule(SimTime at, Action action)
{
    if (at < m_now)
    {
        throw std::logic_error("Scheduler: event scheduled at " + std::to_string(at.micros()) +
                               " us, before current time " + std::to_string(m_now.micros()) +
                               " us");
    }
    EventId id = m_next++;
    m_queue.push(Entry{at, id});
    m_actions.emplace(id, std::move(action));
    return id;
}

bool
Scheduler::cancel(EventId id)
{
    return m_actions.erase(id) > 0;
}

bool
Scheduler::step(SimTime limit)
{
    while (!m_queue.empty())
    {
        Entry top = m_queue.top();
        if (top.at > limit)
        {
            return false;
        }
        m_queue.pop();
        auto it = m_actions.find(top.seq);
        if (it == m_actions.end())
        {
            continue; // cancelled
        }
        Action action = std::move(it->second);
        m_actions.erase(it);
        m_now = top.at;
        action();
        return true;
    }
    return false;
}

std::size_t
Scheduler::run(SimTime until)
{
    std::size_t executed = 0;
    while (step(until))
    {
        ++executed;
    }
    if (m_now < until)
    {
        m_now = until;
    }
    return executed;
}

std::size_t
Scheduler::run_all()
{
    std::size_t executed = 0;
    while (step(SimTime::from_micros(INT64_MAX)))
    {
        ++executed;
    }
    return executed;
}

std::uint64_t
fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t
splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t run_seed, std::string_view stream_id)
    : m_id(stream_id),
      m_engine(splitmix64(run_seed ^ fnv1a64(stream_id)))
{
}

double
RngStream::next_uniform()
{
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

double
RngStream::next_normal()
{
    double u1 = 1.0 - next_uniform(); // (0, 1]
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace lorasim
