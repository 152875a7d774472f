#include "lorasim/topology.hpp"

#include "lorasim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace lorasim {

double
distance(const Position& a, const Position& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

VicinityMatrix::VicinityMatrix(std::size_t n)
    : m_n(n),
      m_cells(n * n, 0),
      m_peers(n)
{
}

bool
VicinityMatrix::detects(DeviceId listener, DeviceId talker) const
{
    return m_cells.at(listener * m_n + talker) != 0;
}

void
VicinityMatrix::set(DeviceId listener, DeviceId talker, bool audible)
{
    if (listener == talker)
    {
        return; // diagonal stays false
    }
    char& cell = m_cells.at(listener * m_n + talker);
    if ((cell != 0) == audible)
    {
        return;
    }
    cell = audible ? 1 : 0;
    auto& peers = m_peers[listener];
    auto pos = std::lower_bound(peers.begin(), peers.end(), talker);
    if (audible)
    {
        peers.insert(pos, talker);
    }
    else
    {
        peers.erase(pos);
    }
}

const std::vector<DeviceId>&
VicinityMatrix::audible_peers(DeviceId listener) const
{
    return m_peers.at(listener);
}

CoverageBounds
coverage_bounds(std::span<const int> sfs,
                double tx_power_dbm,
                const LossParams& loss,
                const SensitivityTable& table)
{
    CoverageBounds b;
    b.min_gateway_range_m = INFINITY;
    for (int sf : sfs)
    {
        b.max_vicinity_range_m = std::max(
            b.max_vicinity_range_m, detect_range_m(sf, Role::EndDevice, tx_power_dbm, loss, table));
        b.min_gateway_range_m = std::min(
            b.min_gateway_range_m, detect_range_m(sf, Role::Gateway, tx_power_dbm, loss, table));
    }
    return b;
}

std::vector<std::size_t>
cluster_sizes(std::size_t n_devices, int n_areas)
{
    if (n_areas < 1)
    {
        throw ConfigError("n_areas must be at least 1");
    }
    const auto k = static_cast<std::size_t>(n_areas);
    std::vector<std::size_t> sizes(k, n_devices / k);
    for (std::size_t i = 0; i < n_devices % k; ++i)
    {
        ++sizes[i];
    }
    return sizes;
}

Placement
place_clusters(std::size_t n_devices,
               const ClusterGeometry& geom,
               const CoverageBounds& bounds,
               RngStream& rng)
{
    if (n_devices < 1)
    {
        throw ConfigError("n_devices must be at least 1");
    }
    if (!(geom.cluster_radius_m >= 0.0))
    {
        throw ConfigError("cluster_radius_m must be non-negative");
    }
    const auto sizes = cluster_sizes(n_devices, geom.n_areas);

    const double ring = geom.n_areas == 1 ? 0.0 : geom.ring_radius_m;
    const double farthest = ring + geom.cluster_radius_m;
    if (farthest > bounds.min_gateway_range_m)
    {
        throw ConfigError("geometry: ring_radius_m + cluster_radius_m = " +
                          std::to_string(farthest) + " m exceeds gateway range " +
                          std::to_string(bounds.min_gateway_range_m) + " m");
    }
    if (geom.n_areas >= 2)
    {
        const double chord = 2.0 * ring * std::sin(std::numbers::pi / geom.n_areas);
        const double gap = chord - 2.0 * geom.cluster_radius_m;
        if (!(gap > bounds.max_vicinity_range_m))
        {
            throw ConfigError("geometry: minimum inter-area distance " + std::to_string(gap) +
                              " m does not exceed device detect range " +
                              std::to_string(bounds.max_vicinity_range_m) +
                              " m; areas would not be hidden from each other");
        }
    }

    Placement out;
    out.positions.reserve(n_devices);
    out.area.reserve(n_devices);
    for (int a = 0; a < geom.n_areas; ++a)
    {
        const double angle = 2.0 * std::numbers::pi * a / geom.n_areas;
        const Position centre{ring * std::cos(angle), ring * std::sin(angle), 0.0};
        for (std::size_t k = 0; k < sizes[static_cast<std::size_t>(a)]; ++k)
        {
            const double r = geom.cluster_radius_m * std::sqrt(rng.next_uniform());
            const double theta = 2.0 * std::numbers::pi * rng.next_uniform();
            out.positions.push_back(
                {centre.x + r * std::cos(theta), centre.y + r * std::sin(theta), 0.0});
            out.area.push_back(a);
        }
    }
    return out;
}

std::vector<DeviceSpec>
assign_attributes(std::size_t n_devices,
                  std::span<const int> sf_set,
                  std::span<const double> period_set,
                  const PersistencePolicy& p_policy,
                  double tx_power_dbm)
{
    if (sf_set.empty())
    {
        throw ConfigError("sf_set must not be empty");
    }
    if (period_set.empty())
    {
        throw ConfigError("period_set_s must not be empty");
    }
    const auto* per_device = std::get_if<std::vector<double>>(&p_policy);
    if (per_device != nullptr && per_device->size() != n_devices)
    {
        throw ConfigError("per-device p list has " + std::to_string(per_device->size()) +
                          " entries, expected " + std::to_string(n_devices));
    }

    std::vector<DeviceSpec> devices(n_devices);
    for (std::size_t i = 0; i < n_devices; ++i)
    {
        DeviceSpec& d = devices[i];
        d.id = i;
        d.sf = sf_set[i % sf_set.size()];
        check_sf(d.sf);
        d.period_s = period_set[i % period_set.size()];
        if (!(d.period_s > 0.0))
        {
            throw ConfigError("transmission periods must be positive");
        }
        d.tx_power_dbm = tx_power_dbm;
        d.persistence = per_device ? (*per_device)[i] : std::get<double>(p_policy);
        if (!(d.persistence > 0.0 && d.persistence <= 1.0))
        {
            throw ConfigError("persistence p=" + std::to_string(d.persistence) +
                              " for device " + std::to_string(i) + " outside (0,1]");
        }
    }
    return devices;
}

VicinityMatrix
build_vicinity(std::span<const DeviceSpec> devices,
               const LossParams& loss,
               const SensitivityTable& table)
{
    const std::size_t n = devices.size();
    std::vector<double> range(n);
    for (std::size_t j = 0; j < n; ++j)
    {
        range[j] = detect_range_m(devices[j].sf, Role::EndDevice, devices[j].tx_power_dbm, loss,
                                  table);
    }
    VicinityMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            if (i != j)
            {
                m.set(i, j, distance(devices[i].position, devices[j].position) <= range[j]);
            }
        }
    }
    return m;
}

namespace {

template <typename T>
T
parse_field(const std::string& token, std::size_t line, const char* what)
{
    T value{};
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
    {
        throw ConfigError("device list line " + std::to_string(line) + ": bad " + what + " '" +
                          token + "'");
    }
    return value;
}

} // namespace

std::vector<DeviceSpec>
parse_device_list(std::string_view text, double tx_power_dbm)
{
    std::vector<DeviceSpec> devices;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw))
    {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos)
        {
            raw.erase(hash);
        }
        std::replace(raw.begin(), raw.end(), ',', ' ');
        std::istringstream fields(raw);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;)
        {
            tok.push_back(t);
        }
        if (tok.empty())
        {
            continue;
        }
        if (tok.size() != 7)
        {
            throw ConfigError("device list line " + std::to_string(line_no) +
                              ": expected 7 fields (id x y z sf period_s p), got " +
                              std::to_string(tok.size()));
        }
        DeviceSpec d;
        d.id = parse_field<std::size_t>(tok[0], line_no, "id");
        if (d.id != devices.size())
        {
            throw ConfigError("device list line " + std::to_string(line_no) + ": id " + tok[0] +
                              " out of sequence, expected " + std::to_string(devices.size()));
        }
        d.position = {parse_field<double>(tok[1], line_no, "x"),
                      parse_field<double>(tok[2], line_no, "y"),
                      parse_field<double>(tok[3], line_no, "z")};
        d.sf = parse_field<int>(tok[4], line_no, "sf");
        if (d.sf < kMinSf || d.sf > kMaxSf)
        {
            throw ConfigError("device list line " + std::to_string(line_no) + ": sf outside 7..12");
        }
        d.period_s = parse_field<double>(tok[5], line_no, "period_s");
        if (!(d.period_s > 0.0))
        {
            throw ConfigError("device list line " + std::to_string(line_no) +
                              ": period must be positive");
        }
        d.persistence = parse_field<double>(tok[6], line_no, "p");
        if (!(d.persistence > 0.0 && d.persistence <= 1.0))
        {
            throw ConfigError("device list line " + std::to_string(line_no) + ": p outside (0,1]");
        }
        d.tx_power_dbm = tx_power_dbm;
        devices.push_back(d);
    }
    if (devices.empty())
    {
        throw ConfigError("device list is empty");
    }
    return devices;
}

} // namespace lorasim
