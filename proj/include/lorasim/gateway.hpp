#pragma once

#include "lorasim/kernel.hpp"
#include "lorasim/phy.hpp"
#include "lorasim/topology.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lorasim {

enum class ReceptionOutcome
{
    Received,
    Collided,
    UnderSensitivity,
    NoDemodPath,
};

std::string_view to_string(ReceptionOutcome outcome);

using PacketId = std::uint64_t;

struct Packet
{
    PacketId id = 0;
    DeviceId device = 0;
    int sf = 8;
    double prx_dbm = 0.0;
    SimTime air_start;
    SimTime air_end;
};

struct TxRecord
{
    Packet packet;
    ReceptionOutcome outcome = ReceptionOutcome::Received;
};

inline constexpr std::size_t kDefaultGatewayPaths = 8;

/// Single-channel gateway with a fixed pool of demodulation paths.
///
/// No capture effect: any positive-length overlap between two path-bound
/// packets of the same SF destroys both. Packets dropped for sensitivity or
/// for lack of a path never interfere with anything.
class Gateway
{
  public:
    using FreeChannelHook = std::function<void(DeviceId)>;

    Gateway(std::size_t n_paths, SensitivityTable sensitivity, FreeChannelHook free_channel);

    void on_tx_start(const Packet& packet);

    /// Classifies the packet, releases its path, logs it, and frees the
    /// sender's channel flag. Throws std::logic_error for an unknown id.
    ReceptionOutcome on_tx_end(PacketId id);

    std::size_t n_paths() const { return m_paths.size(); }
    std::size_t bound_paths() const { return m_bound; }
    std::size_t max_bound_paths() const { return m_max_bound; }
    std::uint64_t bind_count() const { return m_binds; }
    std::uint64_t release_count() const { return m_releases; }
    std::size_t in_flight() const { return m_in_flight.size(); }

    const std::vector<TxRecord>& log() const { return m_log; }
    std::vector<TxRecord> take_log() { return std::move(m_log); }

  private:
    struct InFlight
    {
        Packet packet;
        std::optional<ReceptionOutcome> dropped; // UnderSensitivity or NoDemodPath
        std::optional<std::size_t> path;
        bool tainted = false;
    };

    std::vector<std::optional<PacketId>> m_paths;
    SensitivityTable m_sensitivity;
    FreeChannelHook m_free_channel;
    std::unordered_map<PacketId, InFlight> m_in_flight;
    std::vector<TxRecord> m_log;
    std::size_t m_bound = 0;
    std::size_t m_max_bound = 0;
    std::uint64_t m_binds = 0;
    std::uint64_t m_releases = 0;
};

} // namespace lorasim
