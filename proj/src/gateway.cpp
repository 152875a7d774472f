#include "lorasim/gateway.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lorasim {

std::string_view
to_string(ReceptionOutcome outcome)
{
    switch (outcome)
    {
    case ReceptionOutcome::Received:
        return "received";
    case ReceptionOutcome::Collided:
        return "collided";
    case ReceptionOutcome::UnderSensitivity:
        return "under_sensitivity";
    case ReceptionOutcome::NoDemodPath:
        return "no_path";
    }
    return "unknown";
}

Gateway::Gateway(std::size_t n_paths, SensitivityTable sensitivity, FreeChannelHook free_channel)
    : m_paths(n_paths),
      m_sensitivity(std::move(sensitivity)),
      m_free_channel(std::move(free_channel))
{
    if (n_paths < 1)
    {
        throw std::invalid_argument("gateway needs at least one demodulation path");
    }
}

void
Gateway::on_tx_start(const Packet& packet)
{
    if (m_in_flight.contains(packet.id))
    {
        throw std::logic_error("gateway: duplicate packet id " + std::to_string(packet.id));
    }
    InFlight entry{packet, std::nullopt, std::nullopt, false};

    if (!above_sensitivity(packet.prx_dbm, packet.sf, Role::Gateway, m_sensitivity))
    {
        entry.dropped = ReceptionOutcome::UnderSensitivity;
    }
    else
    {
        for (std::size_t i = 0; i < m_paths.size(); ++i)
        {
            if (!m_paths[i])
            {
                entry.path = i;
                break;
            }
        }
        if (!entry.path)
        {
            entry.dropped = ReceptionOutcome::NoDemodPath;
        }
    }

    if (entry.path)
    {
        for (const auto& slot : m_paths)
        {
            if (!slot)
            {
                continue;
            }
            InFlight& other = m_in_flight.at(*slot);
            // Overlap must have positive length; a packet ending exactly now
            // does not interfere.
            if (other.packet.sf == packet.sf && other.packet.air_end > packet.air_start)
            {
                other.tainted = true;
                entry.tainted = true;
            }
        }
        m_paths[*entry.path] = packet.id;
        ++m_bound;
        ++m_binds;
        m_max_bound = std::max(m_max_bound, m_bound);
    }

    m_in_flight.emplace(packet.id, entry);
}

ReceptionOutcome
Gateway::on_tx_end(PacketId id)
{
    auto it = m_in_flight.find(id);
    if (it == m_in_flight.end())
    {
        throw std::logic_error("gateway: unknown packet id " + std::to_string(id));
    }
    InFlight entry = it->second;
    m_in_flight.erase(it);

    ReceptionOutcome outcome;
    if (entry.dropped)
    {
        outcome = *entry.dropped;
    }
    else
    {
        outcome = entry.tainted ? ReceptionOutcome::Collided : ReceptionOutcome::Received;
    }
    if (entry.path)
    {
        m_paths[*entry.path].reset();
        --m_bound;
        ++m_releases;
    }

    m_log.push_back(TxRecord{entry.packet, outcome});
    m_free_channel(entry.packet.device);
    return outcome;
}

} // namespace lorasim
