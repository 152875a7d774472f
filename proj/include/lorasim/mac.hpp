#pragma once

#include "lorasim/kernel.hpp"
#include "lorasim/topology.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace lorasim {

enum class ChannelCondition
{
    Idle,
    Occupied,
};

/// One busy flag per device, raised for exactly the device's on-air interval.
class ChannelStateArray
{
  public:
    explicit ChannelStateArray(std::size_t n_devices);

    std::size_t size() const { return m_busy.size(); }
    bool is_busy(DeviceId device) const { return m_busy.at(device) != 0; }

    /// idle -> occupied. Throws std::logic_error if already occupied.
    void book(DeviceId device);
    /// occupied -> idle. Throws std::logic_error if already idle.
    void free(DeviceId device);

    std::uint64_t book_count() const { return m_books; }
    std::uint64_t free_count() const { return m_frees; }

  private:
    std::vector<char> m_busy;
    std::uint64_t m_books = 0;
    std::uint64_t m_frees = 0;
};

ChannelStateArray create_channel_state(std::size_t n_devices);

/// Occupied iff some device audible to `device` currently holds its flag.
/// The transmitter's SF is not consulted.
ChannelCondition sense(DeviceId device,
                       const ChannelStateArray& state,
                       const VicinityMatrix& vicinity);

class PersistenceTable
{
  public:
    explicit PersistenceTable(std::vector<double> p_values);

    double get(DeviceId device) const { return m_p.at(device); }
    /// Throws std::invalid_argument unless 0 < p <= 1.
    void update(DeviceId device, double p);
    std::size_t size() const { return m_p.size(); }

  private:
    std::vector<double> m_p;
};

/// One persistence draw: true iff u < p(device).
bool shall_it_pass(DeviceId device, const PersistenceTable& table, RngStream& rng);

enum class MacMode
{
    PCsma,
    Aloha,
};

enum class MacPhase
{
    Idle,
    Transmitting,
    Backoff,
};

struct DeviceMacState
{
    MacPhase phase = MacPhase::Idle;
    std::optional<SimTime> pending_since; // generation time of the held packet
    SimTime next_generation_at;
    std::uint64_t generated = 0;
    std::uint64_t sent = 0;
    std::uint64_t suppressed_count = 0;
    std::uint64_t backoffs = 0;
    std::uint64_t persistence_refusals = 0;
};

struct DeviceTiming
{
    SimTime period;           // zero: no self-rescheduling (externally driven)
    SimTime sensing_interval; // back-off re-sensing cadence
    SimTime airtime;
};

struct MacOptions
{
    MacMode mode = MacMode::PCsma;
    // Refuse transmissions that would push a device above duty_cycle_limit
    // of airtime over the preceding hour. Refused packets count as suppressed.
    bool duty_cycle_guard = false;
    double duty_cycle_limit = 0.01;
};

struct MacTotals
{
    std::uint64_t generated = 0;
    std::uint64_t sent = 0;
    std::uint64_t suppressed = 0;
    std::uint64_t pending = 0;
};

/// Per-device periodic sender with p-persistent channel claiming, or pure
/// ALOHA when MacOptions::mode is Aloha.
///
/// A packet starts on air through the transmit hook; the channel is only
/// released again through free_channel(), which the gateway calls at air end.
class MacLayer
{
  public:
    using TransmitHook = std::function<void(DeviceId, SimTime)>;

    MacLayer(Scheduler& scheduler,
             const VicinityMatrix& vicinity,
             std::vector<DeviceTiming> timing,
             PersistenceTable persistence,
             RngStream persistence_rng,
             MacOptions options,
             TransmitHook transmit);

    MacLayer(const MacLayer&) = delete;
    MacLayer& operator=(const MacLayer&) = delete;

    /// Schedules the device's first periodic firing.
    void start_periodic(DeviceId device, SimTime first);

    /// Periodic timer firing: handles the new packet and schedules the next
    /// firing one period later.
    void on_generate(DeviceId device, SimTime t);

    /// A new packet without any rescheduling (used by external traffic).
    void on_arrival(DeviceId device, SimTime t);

    void retry_claiming(DeviceId device, SimTime t);

    /// Called by the gateway at the end of every transmission.
    void free_channel(DeviceId device);

    void update_persistence(DeviceId device, double p);

    /// Stops generation and claiming. Transmissions already on air still
    /// complete; packets held in back-off stay pending.
    void stop() { m_stopped = true; }

    ChannelCondition sense(DeviceId device) const;

    const ChannelStateArray& channel() const { return m_channel; }
    const PersistenceTable& persistence() const { return m_persistence; }
    const DeviceMacState& state(DeviceId device) const { return m_states.at(device); }
    std::size_t size() const { return m_states.size(); }
    MacTotals totals() const;

  private:
    void handle_packet(DeviceId device, SimTime t);
    void enter_backoff(DeviceId device, SimTime t);
    void schedule_retry(DeviceId device, SimTime t);
    void transmit(DeviceId device, SimTime t);
    bool duty_cycle_allows(DeviceId device, SimTime t);

    Scheduler& m_scheduler;
    const VicinityMatrix& m_vicinity;
    std::vector<DeviceTiming> m_timing;
    PersistenceTable m_persistence;
    RngStream m_rng;
    MacOptions m_options;
    TransmitHook m_transmit;
    ChannelStateArray m_channel;
    std::vector<DeviceMacState> m_states;
    std::vector<std::deque<std::pair<SimTime, SimTime>>> m_airtime_history;
    bool m_stopped = false;
};

} // namespace lorasim
