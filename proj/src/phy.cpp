#include "lorasim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lorasim {

void
check_sf(int sf)
{
    if (sf < kMinSf || sf > kMaxSf)
    {
        throw std::invalid_argument("spreading factor " + std::to_string(sf) +
                                    " outside 7..12");
    }
}

bool
RadioParams::ldro_enabled(int sf) const
{
    return low_data_rate_optimize.value_or(sf >= 11);
}

void
RadioParams::validate() const
{
    if (!(bandwidth_hz > 0.0))
    {
        throw std::invalid_argument("bandwidth must be positive");
    }
    if (coding_rate_index < 1 || coding_rate_index > 4)
    {
        throw std::invalid_argument("coding rate index must be in 1..4");
    }
    if (preamble_symbols < 0)
    {
        throw std::invalid_argument("preamble symbol count must be non-negative");
    }
    if (payload_bytes < 1)
    {
        throw std::invalid_argument("payload must be at least one byte");
    }
}

void
LossParams::validate() const
{
    if (!(exponent > 0.0))
    {
        throw std::invalid_argument("path loss exponent must be positive");
    }
    if (!(reference_distance_m > 0.0))
    {
        throw std::invalid_argument("reference distance must be positive");
    }
}

SensitivityTable::SensitivityTable(const Row& end_device, const Row& gateway)
    : m_end_device(end_device),
      m_gateway(gateway)
{
    for (std::size_t i = 0; i < m_gateway.size(); ++i)
    {
        if (i > 0 && !(m_end_device[i] < m_end_device[i - 1]))
        {
            throw std::invalid_argument("end-device sensitivity must decrease strictly with SF");
        }
        if (i > 0 && !(m_gateway[i] < m_gateway[i - 1]))
        {
            throw std::invalid_argument("gateway sensitivity must decrease strictly with SF");
        }
        if (m_gateway[i] > m_end_device[i])
        {
            throw std::invalid_argument("gateway sensitivity must not exceed end-device value");
        }
    }
}

SensitivityTable
SensitivityTable::defaults()
{
    return SensitivityTable({-124.0, -127.0, -130.0, -133.0, -135.0, -137.0},
                            {-130.0, -132.5, -135.0, -137.5, -140.0, -142.5});
}

double
SensitivityTable::threshold_dbm(Role role, int sf) const
{
    check_sf(sf);
    return row(role)[static_cast<std::size_t>(sf - kMinSf)];
}

double
time_on_air(int sf, const RadioParams& params)
{
    check_sf(sf);
    params.validate();

    const int de = params.ldro_enabled(sf) ? 1 : 0;
    const int ih = params.explicit_header ? 0 : 1;
    const int crc = params.crc ? 1 : 0;

    const int numerator = 8 * params.payload_bytes - 4 * sf + 28 + 16 * crc - 20 * ih;
    const int denominator = 4 * (sf - 2 * de);
    // ceil for integers of either sign
    int blocks = numerator / denominator;
    if (numerator % denominator != 0 && numerator > 0)
    {
        ++blocks;
    }
    const int payload_symbols = 8 + std::max(blocks * (params.coding_rate_index + 4), 0);

    const double symbol_s = std::ldexp(1.0, sf) / params.bandwidth_hz;
    return (params.preamble_symbols + 4.25 + payload_symbols) * symbol_s;
}

double
path_loss_db(double distance_m, const LossParams& loss)
{
    if (distance_m <= loss.reference_distance_m)
    {
        return loss.reference_loss_db;
    }
    return loss.reference_loss_db +
           10.0 * loss.exponent * std::log10(distance_m / loss.reference_distance_m);
}

double
received_power_dbm(double tx_power_dbm, double distance_m, const LossParams& loss)
{
    return tx_power_dbm - path_loss_db(distance_m, loss);
}

bool
above_sensitivity(double prx_dbm, int sf, Role role, const SensitivityTable& table)
{
    return prx_dbm >= table.threshold_dbm(role, sf);
}

double
detect_range_m(int sf,
               Role role,
               double tx_power_dbm,
               const LossParams& loss,
               const SensitivityTable& table)
{
    const double threshold = table.threshold_dbm(role, sf);
    const double budget = tx_power_dbm - loss.reference_loss_db - threshold;
    if (budget <= 0.0)
    {
        return loss.reference_distance_m;
    }
    double d = loss.reference_distance_m * std::pow(10.0, budget / (10.0 * loss.exponent));
    // The closed form can land an ulp past the threshold; step back until the
    // returned distance is itself detectable.
    while (d > loss.reference_distance_m &&
           !above_sensitivity(received_power_dbm(tx_power_dbm, d, loss), sf, role, table))
    {
        d = std::nextafter(d, 0.0);
    }
    return d;
}

} // namespace lorasim
