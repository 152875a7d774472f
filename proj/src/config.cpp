#include "lorasim/config.hpp"

#include "lorasim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace lorasim {

namespace detail {

namespace {

std::string
trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void
fail(const KeyValue& kv, const std::string& what)
{
    throw ConfigError("line " + std::to_string(kv.line) + ", key '" + kv.key + "': " + what);
}

std::vector<std::string>
split_top_level(std::string_view body, const KeyValue& kv)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string current;
    for (char c : body)
    {
        if (c == '{')
        {
            ++depth;
        }
        else if (c == '}')
        {
            if (--depth < 0)
            {
                fail(kv, "unbalanced braces");
            }
        }
        if (c == ',' && depth == 0)
        {
            out.push_back(trim(current));
            current.clear();
            continue;
        }
        current += c;
    }
    if (depth != 0)
    {
        fail(kv, "unbalanced braces");
    }
    out.push_back(trim(current));
    for (const auto& item : out)
    {
        if (item.empty())
        {
            fail(kv, "empty list item");
        }
    }
    return out;
}

std::string_view
strip_braces(const std::string& value, const KeyValue& kv)
{
    if (value.size() < 2 || value.front() != '{' || value.back() != '}')
    {
        fail(kv, "expected a list like {a,b,c}");
    }
    return std::string_view(value).substr(1, value.size() - 2);
}

} // namespace

std::vector<KeyValue>
split_key_values(std::string_view text)
{
    std::vector<KeyValue> out;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw))
    {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos)
        {
            raw.erase(hash);
        }
        std::string content = trim(raw);
        if (content.empty())
        {
            continue;
        }
        auto eq = content.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        }
        KeyValue kv{trim(content.substr(0, eq)), trim(content.substr(eq + 1)), line};
        if (kv.key.empty())
        {
            throw ConfigError("line " + std::to_string(line) + ": missing key");
        }
        if (kv.value.empty())
        {
            fail(kv, "missing value");
        }
        if (!seen.insert(kv.key).second)
        {
            fail(kv, "repeated key");
        }
        out.push_back(std::move(kv));
    }
    return out;
}

double
to_real(const KeyValue& kv, std::string_view text)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    {
        fail(kv, "malformed number '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t
to_int(const KeyValue& kv, std::string_view text)
{
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
    {
        fail(kv, "malformed integer '" + std::string(text) + "'");
    }
    return value;
}

bool
to_bool(const KeyValue& kv)
{
    const std::string& v = kv.value;
    if (v == "true" || v == "on" || v == "yes" || v == "1")
    {
        return true;
    }
    if (v == "false" || v == "off" || v == "no" || v == "0")
    {
        return false;
    }
    fail(kv, "expected true/false");
}

std::vector<std::string>
list_items(const KeyValue& kv)
{
    if (kv.value.front() != '{')
    {
        return {kv.value};
    }
    auto items = split_top_level(strip_braces(kv.value, kv), kv);
    for (const auto& item : items)
    {
        if (item.find_first_of("{}") != std::string::npos)
        {
            fail(kv, "nested lists are not allowed here");
        }
    }
    return items;
}

std::vector<std::vector<std::string>>
nested_list_items(const KeyValue& kv)
{
    std::vector<std::vector<std::string>> out;
    for (const auto& inner : split_top_level(strip_braces(kv.value, kv), kv))
    {
        KeyValue sub{kv.key, inner, kv.line};
        out.push_back(list_items(sub));
    }
    return out;
}

} // namespace detail

std::string_view
to_string(MacMode mode)
{
    return mode == MacMode::Aloha ? "aloha" : "pcsma";
}

MacMode
parse_mac_mode(std::string_view text)
{
    if (text == "pcsma")
    {
        return MacMode::PCsma;
    }
    if (text == "aloha")
    {
        return MacMode::Aloha;
    }
    throw ConfigError("mac mode must be pcsma or aloha, got '" + std::string(text) + "'");
}

std::string
read_text_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
    {
        throw ConfigError("cannot open '" + file.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void
RunConfig::validate() const
{
    const std::size_t n = device_list ? device_list->size() : n_devices;
    if (n < 1)
    {
        throw ConfigError("n_devices: required and must be at least 1");
    }
    if (device_list && n_devices != 0 && n_devices != device_list->size())
    {
        throw ConfigError("n_devices: " + std::to_string(n_devices) + " disagrees with device_file (" +
                          std::to_string(device_list->size()) + " devices)");
    }
    if (!(sim_time_s > 0.0))
    {
        throw ConfigError("sim_time_s: must be positive");
    }
    if (period_set_s.empty())
    {
        throw ConfigError("period_set_s: must not be empty");
    }
    for (double period : period_set_s)
    {
        if (!(period > 0.0))
        {
            throw ConfigError("period_set_s: periods must be positive");
        }
    }
    if (sf_set.empty())
    {
        throw ConfigError("sf_set: must not be empty");
    }
    for (int sf : sf_set)
    {
        if (sf < kMinSf || sf > kMaxSf)
        {
            throw ConfigError("sf_set: " + std::to_string(sf) + " outside 7..12");
        }
    }
    if (const auto* global = std::get_if<double>(&p))
    {
        if (!(*global > 0.0 && *global <= 1.0))
        {
            throw ConfigError("p: " + std::to_string(*global) + " outside (0,1]");
        }
    }
    else
    {
        const auto& list = std::get<std::vector<double>>(p);
        if (list.size() != n)
        {
            throw ConfigError("p: per-device list has " + std::to_string(list.size()) +
                              " entries, expected " + std::to_string(n));
        }
        for (double v : list)
        {
            if (!(v > 0.0 && v <= 1.0))
            {
                throw ConfigError("p: " + std::to_string(v) + " outside (0,1]");
            }
        }
    }
    if (geometry.n_areas < 1)
    {
        throw ConfigError("n_areas: must be at least 1");
    }
    if (!(geometry.cluster_radius_m >= 0.0))
    {
        throw ConfigError("cluster_radius_m: must be non-negative");
    }
    if (!(geometry.ring_radius_m >= 0.0))
    {
        throw ConfigError("ring_radius_m: must be non-negative");
    }
    try
    {
        radio.validate();
        loss.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw ConfigError(std::string("radio/loss parameters: ") + e.what());
    }
    if (!(shadowing_sigma_db >= 0.0))
    {
        throw ConfigError("shadowing_sigma_db: must be non-negative");
    }
    if (gateway_paths < 1)
    {
        throw ConfigError("gateway_paths: must be at least 1");
    }
    if (sensing_interval_s && !(*sensing_interval_s >= 1e-6))
    {
        throw ConfigError("sensing_interval_s: must be at least one microsecond");
    }
    if (!(offered_load > 0.0))
    {
        throw ConfigError("offered_load: must be positive");
    }
    if (offsets == OffsetMode::Explicit)
    {
        if (offsets_s.size() != n)
        {
            throw ConfigError("offsets: explicit list has " + std::to_string(offsets_s.size()) +
                              " entries, expected " + std::to_string(n));
        }
        for (double o : offsets_s)
        {
            if (!(o >= 0.0))
            {
                throw ConfigError("offsets: values must be non-negative");
            }
        }
    }
}

RunConfig
parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    using detail::KeyValue;
    RunConfig cfg;
    bool have_n_devices = false;
    std::optional<SensitivityTable::Row> ed_row;
    std::optional<SensitivityTable::Row> gw_row;
    std::optional<std::string> device_file;

    auto real = [](const KeyValue& kv) { return detail::to_real(kv, kv.value); };
    auto positive_int = [](const KeyValue& kv) {
        auto v = detail::to_int(kv, kv.value);
        if (v < 0)
        {
            throw ConfigError("line " + std::to_string(kv.line) + ", key '" + kv.key +
                              "': must be non-negative");
        }
        return v;
    };
    auto real_list = [](const KeyValue& kv) {
        std::vector<double> out;
        for (const auto& item : detail::list_items(kv))
        {
            out.push_back(detail::to_real(kv, item));
        }
        return out;
    };
    auto sensitivity_row = [&](const KeyValue& kv) {
        auto values = real_list(kv);
        if (values.size() != SensitivityTable::Row{}.size())
        {
            throw ConfigError("line " + std::to_string(kv.line) + ", key '" + kv.key +
                              "': expected 6 values for SF7..SF12");
        }
        SensitivityTable::Row row{};
        std::copy(values.begin(), values.end(), row.begin());
        return row;
    };

    const std::map<std::string, std::function<void(const KeyValue&)>> handlers{
        {"scenario", [&](const KeyValue& kv) { cfg.scenario = kv.value; }},
        {"n_devices",
         [&](const KeyValue& kv) {
             cfg.n_devices = static_cast<std::size_t>(positive_int(kv));
             have_n_devices = true;
         }},
        {"sim_time_s", [&](const KeyValue& kv) { cfg.sim_time_s = real(kv); }},
        {"mac", [&](const KeyValue& kv) { cfg.mac = parse_mac_mode(kv.value); }},
        {"traffic",
         [&](const KeyValue& kv) {
             if (kv.value == "periodic")
             {
                 cfg.traffic = TrafficMode::Periodic;
             }
             else if (kv.value == "poisson")
             {
                 cfg.traffic = TrafficMode::Poisson;
             }
             else
             {
                 throw ConfigError("line " + std::to_string(kv.line) +
                                   ", key 'traffic': expected periodic or poisson");
             }
         }},
        {"period_set_s", [&](const KeyValue& kv) { cfg.period_set_s = real_list(kv); }},
        {"sf_set",
         [&](const KeyValue& kv) {
             cfg.sf_set.clear();
             for (const auto& item : detail::list_items(kv))
             {
                 cfg.sf_set.push_back(static_cast<int>(detail::to_int(kv, item)));
             }
         }},
        {"p",
         [&](const KeyValue& kv) {
             if (kv.value.front() == '{')
             {
                 cfg.p = real_list(kv);
             }
             else
             {
                 cfg.p = real(kv);
             }
         }},
        {"n_areas",
         [&](const KeyValue& kv) {
             cfg.geometry.n_areas = static_cast<int>(detail::to_int(kv, kv.value));
         }},
        {"cluster_radius_m", [&](const KeyValue& kv) { cfg.geometry.cluster_radius_m = real(kv); }},
        {"ring_radius_m", [&](const KeyValue& kv) { cfg.geometry.ring_radius_m = real(kv); }},
        {"seed", [&](const KeyValue& kv) { cfg.seed = static_cast<std::uint64_t>(positive_int(kv)); }},
        {"offsets",
         [&](const KeyValue& kv) {
             if (kv.value == "zero")
             {
                 cfg.offsets = OffsetMode::Zero;
             }
             else if (kv.value == "uniform")
             {
                 cfg.offsets = OffsetMode::Uniform;
             }
             else if (kv.value.front() == '{')
             {
                 cfg.offsets = OffsetMode::Explicit;
                 cfg.offsets_s = real_list(kv);
             }
             else
             {
                 throw ConfigError("line " + std::to_string(kv.line) +
                                   ", key 'offsets': expected zero, uniform or {list}");
             }
         }},
        {"tx_power_dbm", [&](const KeyValue& kv) { cfg.tx_power_dbm = real(kv); }},
        {"bandwidth_hz", [&](const KeyValue& kv) { cfg.radio.bandwidth_hz = real(kv); }},
        {"coding_rate",
         [&](const KeyValue& kv) {
             cfg.radio.coding_rate_index = static_cast<int>(detail::to_int(kv, kv.value));
         }},
        {"preamble_symbols",
         [&](const KeyValue& kv) {
             cfg.radio.preamble_symbols = static_cast<int>(detail::to_int(kv, kv.value));
         }},
        {"explicit_header", [&](const KeyValue& kv) { cfg.radio.explicit_header = detail::to_bool(kv); }},
        {"crc", [&](const KeyValue& kv) { cfg.radio.crc = detail::to_bool(kv); }},
        {"low_data_rate_optimize",
         [&](const KeyValue& kv) {
             if (kv.value == "auto")
             {
                 cfg.radio.low_data_rate_optimize.reset();
             }
             else
             {
                 cfg.radio.low_data_rate_optimize = detail::to_bool(kv);
             }
         }},
        {"payload_bytes",
         [&](const KeyValue& kv) {
             cfg.radio.payload_bytes = static_cast<int>(detail::to_int(kv, kv.value));
         }},
        {"carrier_hz", [&](const KeyValue& kv) { cfg.radio.carrier_hz = real(kv); }},
        {"reference_loss_db", [&](const KeyValue& kv) { cfg.loss.reference_loss_db = real(kv); }},
        {"reference_distance_m", [&](const KeyValue& kv) { cfg.loss.reference_distance_m = real(kv); }},
        {"path_loss_exponent", [&](const KeyValue& kv) { cfg.loss.exponent = real(kv); }},
        {"shadowing_sigma_db", [&](const KeyValue& kv) { cfg.shadowing_sigma_db = real(kv); }},
        {"device_sensitivity_dbm", [&](const KeyValue& kv) { ed_row = sensitivity_row(kv); }},
        {"gateway_sensitivity_dbm", [&](const KeyValue& kv) { gw_row = sensitivity_row(kv); }},
        {"gateway_paths",
         [&](const KeyValue& kv) { cfg.gateway_paths = static_cast<std::size_t>(positive_int(kv)); }},
        {"sensing_interval_s", [&](const KeyValue& kv) { cfg.sensing_interval_s = real(kv); }},
        {"duty_cycle_guard", [&](const KeyValue& kv) { cfg.duty_cycle_guard = detail::to_bool(kv); }},
        {"offered_load", [&](const KeyValue& kv) { cfg.offered_load = real(kv); }},
        {"device_file", [&](const KeyValue& kv) { device_file = kv.value; }},
    };

    for (const auto& kv : detail::split_key_values(text))
    {
        auto it = handlers.find(kv.key);
        if (it == handlers.end())
        {
            throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
        }
        it->second(kv);
    }

    if (ed_row || gw_row)
    {
        try
        {
            cfg.sensitivity = SensitivityTable(ed_row.value_or(cfg.sensitivity.row(Role::EndDevice)),
                                               gw_row.value_or(cfg.sensitivity.row(Role::Gateway)));
        }
        catch (const std::invalid_argument& e)
        {
            throw ConfigError(std::string("sensitivity tables: ") + e.what());
        }
    }

    if (device_file)
    {
        std::filesystem::path path(*device_file);
        if (path.is_relative() && !base_dir.empty())
        {
            path = base_dir / path;
        }
        cfg.device_list = parse_device_list(read_text_file(path), cfg.tx_power_dbm);
    }
    else if (!have_n_devices)
    {
        throw ConfigError("n_devices: required key is missing");
    }

    cfg.validate();
    return cfg;
}

RunConfig
load_config(const std::filesystem::path& file)
{
    return parse_config(read_text_file(file), file.parent_path());
}

} // namespace lorasim
