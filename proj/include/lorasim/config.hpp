#pragma once

#include "lorasim/gateway.hpp"
#include "lorasim/mac.hpp"
#include "lorasim/phy.hpp"
#include "lorasim/topology.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lorasim {

enum class TrafficMode
{
    Periodic,
    Poisson,
};

enum class OffsetMode
{
    Zero,     // every device fires first at t = 0
    Uniform,  // first firing uniform in [0, period) per device
    Explicit, // first firing given per device in offsets_s
};

/// Everything needed to run one scenario. Defaults reproduce the reference
/// setup: one hour, periods 100..500 s, SF8, p = 1, one area, 8 paths.
struct RunConfig
{
    std::string scenario = "run";
    std::size_t n_devices = 0;
    double sim_time_s = 3600.0;
    MacMode mac = MacMode::PCsma;
    TrafficMode traffic = TrafficMode::Periodic;
    std::vector<double> period_set_s{100.0, 200.0, 300.0, 400.0, 500.0};
    std::vector<int> sf_set{8};
    PersistencePolicy p = 1.0;
    ClusterGeometry geometry;

    RadioParams radio;
    LossParams loss;
    SensitivityTable sensitivity = SensitivityTable::defaults();
    double tx_power_dbm = kDefaultTxPowerDbm;
    double shadowing_sigma_db = 0.0;

    std::size_t gateway_paths = kDefaultGatewayPaths;
    std::optional<double> sensing_interval_s; // unset: half the device's airtime
    bool duty_cycle_guard = false;
    double offered_load = 0.5; // Poisson traffic, packets per packet-time

    std::uint64_t seed = 1;
    OffsetMode offsets = OffsetMode::Uniform;
    std::vector<double> offsets_s;

    // Explicit device list; replaces generated placement and attributes.
    std::optional<std::vector<DeviceSpec>> device_list;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Parses a flat `key = value` document. Lists are written `{a,b,c}`; `#`
/// starts a comment. Unknown or repeated keys are errors. A relative
/// `device_file` is resolved against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);

std::string_view to_string(MacMode mode);
MacMode parse_mac_mode(std::string_view text);

namespace detail {

struct KeyValue
{
    std::string key;
    std::string value;
    std::size_t line = 0;
};

std::vector<KeyValue> split_key_values(std::string_view text);

double to_real(const KeyValue& kv, std::string_view text);
std::int64_t to_int(const KeyValue& kv, std::string_view text);
bool to_bool(const KeyValue& kv);

/// `{a,b}` or a bare scalar, split into trimmed items.
std::vector<std::string> list_items(const KeyValue& kv);

/// `{{a,b},{c}}` split into inner item lists.
std::vector<std::vector<std::string>> nested_list_items(const KeyValue& kv);

} // namespace detail

} // namespace lorasim
