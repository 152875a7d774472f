#pragma once

#include <array>
#include <optional>

namespace lorasim {

inline constexpr int kMinSf = 7;
inline constexpr int kMaxSf = 12;
inline constexpr double kDefaultTxPowerDbm = 14.0; // EU868 ERP limit

/// Throws std::invalid_argument unless 7 <= sf <= 12.
void check_sf(int sf);

enum class Role
{
    EndDevice,
    Gateway,
};

struct RadioParams
{
    double bandwidth_hz = 125000.0;
    int coding_rate_index = 1; // 1 => 4/5 ... 4 => 4/8
    int preamble_symbols = 8;
    bool explicit_header = true;
    bool crc = true;
    std::optional<bool> low_data_rate_optimize; // unset: on iff SF >= 11
    int payload_bytes = 19;
    double carrier_hz = 868.1e6;

    bool ldro_enabled(int sf) const;
    void validate() const;
};

/// Log-distance path loss: reference_loss_db at reference_distance_m, then
/// 10 * exponent dB per decade of distance.
struct LossParams
{
    double reference_loss_db = 7.7;
    double reference_distance_m = 1.0;
    double exponent = 3.76;

    void validate() const;
};

/// Per-SF receiver sensitivity for end-devices and for the gateway.
class SensitivityTable
{
  public:
    using Row = std::array<double, kMaxSf - kMinSf + 1>;

    /// Throws std::invalid_argument unless each row strictly decreases with
    /// SF and the gateway row is element-wise no less sensitive.
    SensitivityTable(const Row& end_device, const Row& gateway);

    static SensitivityTable defaults();

    double threshold_dbm(Role role, int sf) const;
    const Row& row(Role role) const { return role == Role::Gateway ? m_gateway : m_end_device; }

  private:
    Row m_end_device;
    Row m_gateway;
};

/// LoRa time on air in seconds for one packet of params.payload_bytes.
double time_on_air(int sf, const RadioParams& params);

/// Distances below the reference distance are clamped to it.
double path_loss_db(double distance_m, const LossParams& loss);

double received_power_dbm(double tx_power_dbm, double distance_m, const LossParams& loss);

/// prx_dbm >= threshold (the boundary counts as detectable).
bool above_sensitivity(double prx_dbm, int sf, Role role, const SensitivityTable& table);

/// Largest distance at which a transmission at `sf` is still detected by a
/// receiver of the given role. Never below the reference distance.
double detect_range_m(int sf,
                      Role role,
                      double tx_power_dbm,
                      const LossParams& loss,
                      const SensitivityTable& table);

} // namespace lorasim
