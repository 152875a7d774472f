#pragma once

#include "lorasim/kernel.hpp"
#include "lorasim/phy.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace lorasim {

using DeviceId = std::size_t;

struct Position
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Position& a, const Position& b);

struct DeviceSpec
{
    DeviceId id = 0;
    Position position;
    int sf = 8;
    double tx_power_dbm = kDefaultTxPowerDbm;
    double period_s = 100.0;
    double persistence = 1.0;
};

/// Directed "who can hear whom" table. detects(i, j) is true iff device i
/// detects transmissions of device j. The diagonal is always false.
class VicinityMatrix
{
  public:
    VicinityMatrix() = default;
    explicit VicinityMatrix(std::size_t n);

    std::size_t size() const { return m_n; }
    bool detects(DeviceId listener, DeviceId talker) const;
    void set(DeviceId listener, DeviceId talker, bool audible);

    /// Talkers audible to `listener`, ascending.
    const std::vector<DeviceId>& audible_peers(DeviceId listener) const;

    bool mutually_visible(DeviceId a, DeviceId b) const
    {
        return detects(a, b) && detects(b, a);
    }

    friend bool operator==(const VicinityMatrix& a, const VicinityMatrix& b)
    {
        return a.m_n == b.m_n && a.m_cells == b.m_cells;
    }

  private:
    std::size_t m_n = 0;
    std::vector<char> m_cells;
    std::vector<std::vector<DeviceId>> m_peers;
};

/// Device areas on a ring around the gateway (at the origin). With one area
/// the cluster is centred on the gateway and ring_radius_m is ignored.
struct ClusterGeometry
{
    int n_areas = 1;
    double cluster_radius_m = 200.0;
    double ring_radius_m = 3500.0;
};

/// Range envelope of a device population, used to check that a geometry is
/// realisable.
struct CoverageBounds
{
    double max_vicinity_range_m = 0.0; // largest end-device detect range
    double min_gateway_range_m = 0.0;  // smallest gateway detect range
};

CoverageBounds coverage_bounds(std::span<const int> sfs,
                               double tx_power_dbm,
                               const LossParams& loss,
                               const SensitivityTable& table);

/// Even split with the remainder going to the lowest-indexed areas.
std::vector<std::size_t> cluster_sizes(std::size_t n_devices, int n_areas);

struct Placement
{
    std::vector<Position> positions;
    std::vector<int> area; // area index per device
};

/// Places devices in contiguous index blocks, one block per area, uniformly
/// inside each area's disc. Throws ConfigError if the areas cannot be kept
/// mutually hidden while staying inside gateway coverage.
Placement place_clusters(std::size_t n_devices,
                         const ClusterGeometry& geom,
                         const CoverageBounds& bounds,
                         RngStream& rng);

using PersistencePolicy = std::variant<double, std::vector<double>>;

/// Round-robin SF and period assignment by device index. Positions are left
/// at the origin for the caller to fill in.
std::vector<DeviceSpec> assign_attributes(std::size_t n_devices,
                                          std::span<const int> sf_set,
                                          std::span<const double> period_set,
                                          const PersistencePolicy& p_policy,
                                          double tx_power_dbm = kDefaultTxPowerDbm);

/// Entry (i, j) is distance(i, j) <= detect range of j's SF at the
/// end-device sensitivity with j's transmit power.
VicinityMatrix build_vicinity(std::span<const DeviceSpec> devices,
                              const LossParams& loss,
                              const SensitivityTable& table);

/// Parses a device list: one device per line, `id x y z sf period_s p`
/// separated by whitespace or commas; `#` starts a comment. Ids must be
/// 0..N-1 in order.
std::vector<DeviceSpec> parse_device_list(std::string_view text,
                                          double tx_power_dbm = kDefaultTxPowerDbm);

} // namespace lorasim
