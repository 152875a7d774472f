#pragma once

#include "lorasim/config.hpp"
#include "lorasim/gateway.hpp"
#include "lorasim/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>

namespace lorasim {

/// Packet reception ratios; unset when the denominator is zero.
struct Prr
{
    std::optional<double> generated; // received / generated (headline figure)
    std::optional<double> sent;      // received / sent
};

/// Throws std::logic_error if the counters are inconsistent.
Prr compute_prr(const Counters& c);

enum class RowKind
{
    Run,
    Mean,
    StdDev,
};

struct ResultRow
{
    RowKind kind = RowKind::Run;
    std::string scenario;
    std::uint64_t seed = 0;
    std::string mac;
    std::size_t n_devices = 0;
    std::string sf_set;
    std::string p;
    int n_areas = 1;
    std::string period_set;
    std::optional<Counters> counters; // absent on summary rows
    std::optional<double> prr_generated;
    std::optional<double> prr_sent;
};

ResultRow make_row(const RunConfig& cfg, const Counters& counters);

inline constexpr std::string_view kCsvHeader =
    "scenario,seed,mac,n_devices,sf_set,p,n_areas,period_set,generated,sent,suppressed,"
    "received,collided,under_sensitivity,no_path,prr_generated,prr_sent";

/// Header plus one line per row, sorted by (run rows before summary rows,
/// scenario, seed). Reals use six decimals; undefined ratios are empty.
void write_csv(std::span<const ResultRow> rows, std::ostream& out);

/// Throws std::runtime_error if the file cannot be written.
void write_csv(std::span<const ResultRow> rows, const std::filesystem::path& file);

inline constexpr std::string_view kTraceHeader = "device\tsf\tair_start\tair_end\tprx_dbm\toutcome";

/// One tab-separated line per packet: device index, SF, air start and end in
/// seconds, received power at the gateway in dBm, outcome.
void write_trace(std::span<const TxRecord> log, std::ostream& out);
void write_trace(std::span<const TxRecord> log, const std::filesystem::path& file);

std::string format_fixed(double value, int decimals = 6);

} // namespace lorasim
