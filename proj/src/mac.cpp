#include "lorasim/mac.hpp"

#include <stdexcept>
#include <string>

namespace lorasim {

ChannelStateArray::ChannelStateArray(std::size_t n_devices)
    : m_busy(n_devices, 0)
{
}

void
ChannelStateArray::book(DeviceId device)
{
    char& flag = m_busy.at(device);
    if (flag != 0)
    {
        throw std::logic_error("channel already booked by device " + std::to_string(device));
    }
    flag = 1;
    ++m_books;
}

void
ChannelStateArray::free(DeviceId device)
{
    char& flag = m_busy.at(device);
    if (flag == 0)
    {
        throw std::logic_error("channel not booked by device " + std::to_string(device));
    }
    flag = 0;
    ++m_frees;
}

ChannelStateArray
create_channel_state(std::size_t n_devices)
{
    if (n_devices < 1)
    {
        throw std::invalid_argument("channel state needs at least one device");
    }
    return ChannelStateArray(n_devices);
}

ChannelCondition
sense(DeviceId device, const ChannelStateArray& state, const VicinityMatrix& vicinity)
{
    for (DeviceId peer : vicinity.audible_peers(device))
    {
        if (state.is_busy(peer))
        {
            return ChannelCondition::Occupied;
        }
    }
    return ChannelCondition::Idle;
}

PersistenceTable::PersistenceTable(std::vector<double> p_values)
    : m_p(std::move(p_values))
{
    for (std::size_t i = 0; i < m_p.size(); ++i)
    {
        if (!(m_p[i] > 0.0 && m_p[i] <= 1.0))
        {
            throw std::invalid_argument("persistence for device " + std::to_string(i) +
                                        " outside (0,1]");
        }
    }
}

void
PersistenceTable::update(DeviceId device, double p)
{
    if (!(p > 0.0 && p <= 1.0))
    {
        throw std::invalid_argument("persistence " + std::to_string(p) + " outside (0,1]");
    }
    m_p.at(device) = p;
}

bool
shall_it_pass(DeviceId device, const PersistenceTable& table, RngStream& rng)
{
    return rng.next_uniform() < table.get(device);
}

MacLayer::MacLayer(Scheduler& scheduler,
                   const VicinityMatrix& vicinity,
                   std::vector<DeviceTiming> timing,
                   PersistenceTable persistence,
                   RngStream persistence_rng,
                   MacOptions options,
                   TransmitHook transmit)
    : m_scheduler(scheduler),
      m_vicinity(vicinity),
      m_timing(std::move(timing)),
      m_persistence(std::move(persistence)),
      m_rng(std::move(persistence_rng)),
      m_options(options),
      m_transmit(std::move(transmit)),
      m_channel(create_channel_state(m_timing.size())),
      m_states(m_timing.size()),
      m_airtime_history(m_timing.size())
{
    if (m_vicinity.size() != m_timing.size() || m_persistence.size() != m_timing.size())
    {
        throw std::invalid_argument("MacLayer: device count mismatch");
    }
    for (const auto& t : m_timing)
    {
        if (t.sensing_interval.micros() <= 0)
        {
            throw std::invalid_argument("MacLayer: sensing interval must be positive");
        }
    }
}

void
MacLayer::start_periodic(DeviceId device, SimTime first)
{
    m_states.at(device).next_generation_at = first;
    m_scheduler.schedule(first, [this, device, first] { on_generate(device, first); });
}

void
MacLayer::on_generate(DeviceId device, SimTime t)
{
    if (m_stopped)
    {
        return;
    }
    const SimTime period = m_timing.at(device).period;
    if (period.micros() > 0)
    {
        const SimTime next = t + period;
        m_states[device].next_generation_at = next;
        m_scheduler.schedule(next, [this, device, next] { on_generate(device, next); });
    }
    handle_packet(device, t);
}

void
MacLayer::on_arrival(DeviceId device, SimTime t)
{
    if (m_stopped)
    {
        return;
    }
    handle_packet(device, t);
}

void
MacLayer::handle_packet(DeviceId device, SimTime t)
{
    DeviceMacState& st = m_states.at(device);
    ++st.generated;
    if (st.phase != MacPhase::Idle)
    {
        ++st.suppressed_count; // one packet at a time
        return;
    }
    st.pending_since = t;

    if (m_options.mode == MacMode::Aloha || sense(device) == ChannelCondition::Idle)
    {
        transmit(device, t);
    }
    else
    {
        enter_backoff(device, t);
    }
}

void
MacLayer::enter_backoff(DeviceId device, SimTime t)
{
    DeviceMacState& st = m_states[device];
    st.phase = MacPhase::Backoff;
    ++st.backoffs;
    schedule_retry(device, t);
}

void
MacLayer::schedule_retry(DeviceId device, SimTime t)
{
    const SimTime at = t + m_timing[device].sensing_interval;
    m_scheduler.schedule(at, [this, device, at] { retry_claiming(device, at); });
}

void
MacLayer::retry_claiming(DeviceId device, SimTime t)
{
    if (m_stopped)
    {
        return;
    }
    DeviceMacState& st = m_states.at(device);
    if (st.phase != MacPhase::Backoff)
    {
        throw std::logic_error("retry_claiming on device " + std::to_string(device) +
                               " that is not backing off");
    }
    if (sense(device) == ChannelCondition::Occupied)
    {
        schedule_retry(device, t);
        return;
    }
    if (!shall_it_pass(device, m_persistence, m_rng))
    {
        ++st.persistence_refusals;
        schedule_retry(device, t);
        return;
    }
    transmit(device, t);
}

bool
MacLayer::duty_cycle_allows(DeviceId device, SimTime t)
{
    const std::int64_t window = 3'600'000'000; // one hour in us
    auto& history = m_airtime_history[device];
    while (!history.empty() && history.front().first.micros() + window <= t.micros())
    {
        history.pop_front();
    }
    std::int64_t used = m_timing[device].airtime.micros();
    for (const auto& [start, airtime] : history)
    {
        used += airtime.micros();
    }
    if (static_cast<double>(used) > m_options.duty_cycle_limit * static_cast<double>(window))
    {
        return false;
    }
    history.emplace_back(t, m_timing[device].airtime);
    return true;
}

void
MacLayer::transmit(DeviceId device, SimTime t)
{
    DeviceMacState& st = m_states[device];
    if (m_options.duty_cycle_guard && !duty_cycle_allows(device, t))
    {
        ++st.suppressed_count;
        st.pending_since.reset();
        st.phase = MacPhase::Idle;
        return;
    }
    m_channel.book(device);
    st.phase = MacPhase::Transmitting;
    ++st.sent;
    m_transmit(device, t);
}

void
MacLayer::free_channel(DeviceId device)
{
    DeviceMacState& st = m_states.at(device);
    if (st.phase != MacPhase::Transmitting)
    {
        throw std::logic_error("free_channel on device " + std::to_string(device) +
                               " that is not transmitting");
    }
    m_channel.free(device);
    st.phase = MacPhase::Idle;
    st.pending_since.reset();
}

void
MacLayer::update_persistence(DeviceId device, double p)
{
    m_persistence.update(device, p);
}

ChannelCondition
MacLayer::sense(DeviceId device) const
{
    return lorasim::sense(device, m_channel, m_vicinity);
}

MacTotals
MacLayer::totals() const
{
    MacTotals t;
    for (const auto& st : m_states)
    {
        t.generated += st.generated;
        t.sent += st.sent;
        t.suppressed += st.suppressed_count;
        if (st.phase == MacPhase::Backoff)
        {
            ++t.pending;
        }
    }
    return t;
}

} // namespace lorasim
