#include "lorasim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace lorasim {

Prr
compute_prr(const Counters& c)
{
    if (c.received > c.sent || c.sent > c.generated ||
        c.sent != c.received + c.collided + c.under_sensitivity + c.no_path ||
        c.generated != c.sent + c.suppressed + c.pending_at_end)
    {
        throw std::logic_error("compute_prr: inconsistent counters");
    }
    Prr prr;
    if (c.generated > 0)
    {
        prr.generated = static_cast<double>(c.received) / static_cast<double>(c.generated);
    }
    if (c.sent > 0)
    {
        prr.sent = static_cast<double>(c.received) / static_cast<double>(c.sent);
    }
    return prr;
}

std::string
format_fixed(double value, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

namespace {

template <typename T>
std::string
join(const std::vector<T>& values)
{
    std::ostringstream ss;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i > 0)
        {
            ss << ';';
        }
        ss << values[i];
    }
    return ss.str();
}

std::string
format_seconds(SimTime t)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(t.micros() / 1000000),
                  static_cast<long long>(t.micros() % 1000000));
    return buf;
}

std::string
optional_real(const std::optional<double>& v)
{
    return v ? format_fixed(*v) : std::string();
}

std::string
seed_field(const ResultRow& row)
{
    switch (row.kind)
    {
    case RowKind::Mean:
        return "mean";
    case RowKind::StdDev:
        return "std";
    case RowKind::Run:
        break;
    }
    return std::to_string(row.seed);
}

} // namespace

ResultRow
make_row(const RunConfig& cfg, const Counters& counters)
{
    ResultRow row;
    row.scenario = cfg.scenario;
    row.seed = cfg.seed;
    row.mac = std::string(to_string(cfg.mac));
    row.n_devices = cfg.device_list ? cfg.device_list->size() : cfg.n_devices;
    if (cfg.device_list)
    {
        std::vector<int> sfs;
        std::vector<double> periods;
        for (const auto& d : *cfg.device_list)
        {
            sfs.push_back(d.sf);
            periods.push_back(d.period_s);
        }
        std::sort(sfs.begin(), sfs.end());
        sfs.erase(std::unique(sfs.begin(), sfs.end()), sfs.end());
        std::sort(periods.begin(), periods.end());
        periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
        row.sf_set = join(sfs);
        row.period_set = join(periods);
        row.p = "per-device";
    }
    else
    {
        row.sf_set = join(cfg.sf_set);
        row.period_set = join(cfg.period_set_s);
        if (const auto* global = std::get_if<double>(&cfg.p))
        {
            row.p = format_fixed(*global);
        }
        else
        {
            row.p = "per-device";
        }
    }
    row.n_areas = cfg.geometry.n_areas;
    row.counters = counters;
    const Prr prr = compute_prr(counters);
    row.prr_generated = prr.generated;
    row.prr_sent = prr.sent;
    return row;
}

void
write_csv(std::span<const ResultRow> rows, std::ostream& out)
{
    std::vector<const ResultRow*> ordered;
    ordered.reserve(rows.size());
    for (const auto& r : rows)
    {
        ordered.push_back(&r);
    }
    std::stable_sort(ordered.begin(), ordered.end(), [](const ResultRow* a, const ResultRow* b) {
        const bool a_summary = a->kind != RowKind::Run;
        const bool b_summary = b->kind != RowKind::Run;
        if (a_summary != b_summary)
        {
            return !a_summary;
        }
        if (a->scenario != b->scenario)
        {
            return a->scenario < b->scenario;
        }
        if (a->kind != b->kind)
        {
            return a->kind < b->kind;
        }
        return a->seed < b->seed;
    });

    out << kCsvHeader << '\n';
    for (const ResultRow* r : ordered)
    {
        out << r->scenario << ',' << seed_field(*r) << ',' << r->mac << ',' << r->n_devices << ','
            << r->sf_set << ',' << r->p << ',' << r->n_areas << ',' << r->period_set << ',';
        if (r->counters)
        {
            const Counters& c = *r->counters;
            out << c.generated << ',' << c.sent << ',' << c.suppressed << ',' << c.received << ','
                << c.collided << ',' << c.under_sensitivity << ',' << c.no_path << ',';
        }
        else
        {
            out << ",,,,,,,";
        }
        out << optional_real(r->prr_generated) << ',' << optional_real(r->prr_sent) << '\n';
    }
}

void
write_csv(std::span<const ResultRow> rows, const std::filesystem::path& file)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot write '" + file.string() + "'");
    }
    write_csv(rows, out);
    if (!out)
    {
        throw std::runtime_error("error while writing '" + file.string() + "'");
    }
}

void
write_trace(std::span<const TxRecord> log, std::ostream& out)
{
    out << kTraceHeader << '\n';
    for (const auto& rec : log)
    {
        const Packet& p = rec.packet;
        out << p.device << '\t' << p.sf << '\t' << format_seconds(p.air_start) << '\t'
            << format_seconds(p.air_end) << '\t' << format_fixed(p.prx_dbm) << '\t'
            << to_string(rec.outcome) << '\n';
    }
}

void
write_trace(std::span<const TxRecord> log, const std::filesystem::path& file)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot write '" + file.string() + "'");
    }
    write_trace(log, out);
    if (!out)
    {
        throw std::runtime_error("error while writing '" + file.string() + "'");
    }
}

} // namespace lorasim
