#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wattplan/detail/text.hpp"
#include "wattplan/engine.hpp"

namespace wattplan {

inline std::string format_kwh(double kwh) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", kwh);
    return buf;
}

// Report JSON is fully deterministic: sorted keys, shortest-round-trip
// numbers, no timestamps.
inline nlohmann::json report_to_json(const SimulationReport& report, const PlacementPlan& plan,
                                     std::size_t fleet_size) {
    nlohmann::json j;
    j["schema"] = "wattplan-report-v1";
    j["heuristic"] = std::string(heuristic_name(report.heuristic));
    j["fleet_hosts"] = fleet_size;
    j["vm_count"] = report.vm_count;
    j["cloudlet_count"] = report.cloudlet_count;
    j["rejection_count"] = report.rejection_count;
    j["hosts_used"] = report.hosts_used;
    j["total_energy_kwh"] = report.total_energy_kwh;
    j["config_fingerprint"] = report.config_fingerprint;
    Seconds horizon_start = 0, horizon_end = 0;
    if (!plan.assignments.empty()) {
        horizon_start = plan.assignments.front().start_s;
        horizon_end = plan.assignments.front().end_s;
        for (const Assignment& a : plan.assignments) {
            horizon_start = std::min(horizon_start, a.start_s);
            horizon_end = std::max(horizon_end, a.end_s);
        }
    }
    j["horizon_s"] = {horizon_start, horizon_end};
    nlohmann::json conv;
    for (const auto& [key, value] : conventions()) conv[std::string(key)] = std::string(value);
    j["conventions"] = std::move(conv);
    nlohmann::json per_host = nlohmann::json::array();
    for (const auto& [host_id, kwh] : report.per_host_energy_kwh)
        per_host.push_back({host_id, kwh});
    j["per_host_energy_kwh"] = std::move(per_host);
    nlohmann::json rejections = nlohmann::json::array();
    for (const Rejection& r : plan.rejections)
        rejections.push_back({{"vm_id", r.vm_id}, {"reason", r.reason}});
    j["rejections"] = std::move(rejections);
    return j;
}

inline void write_per_host_csv(std::ostream& out, const SimulationReport& report,
                               std::span<const HostSpec> fleet) {
    out << "host_id,group_label,energy_kwh\n";
    for (const auto& [host_id, kwh] : report.per_host_energy_kwh)
        out << host_id << ',' << fleet[static_cast<std::size_t>(host_id)].group_label << ','
            << detail::format_number(kwh) << '\n';
}

// One comparison-table row per heuristic; savings relative to the baseline,
// positive meaning less energy than the baseline.
struct CompareRow {
    std::string heuristic;
    std::size_t hosts = 0;  // fleet size
    std::int64_t vms = 0;
    std::int64_t cloudlets = 0;
    double energy_kwh = 0.0;
    double savings_vs_baseline_pct = 0.0;
    int migrations = 0;  // placements are final; migration is never modeled
};

inline std::vector<CompareRow> make_compare_rows(
    const std::vector<std::pair<HeuristicKind, SimulationReport>>& results,
    HeuristicKind baseline, std::size_t fleet_size) {
    double baseline_energy = 0.0;
    bool found = false;
    for (const auto& [kind, report] : results) {
        if (kind == baseline) {
            baseline_energy = report.total_energy_kwh;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("compare: baseline heuristic missing from results");
    std::vector<CompareRow> rows;
    for (const auto& [kind, report] : results) {
        CompareRow row;
        row.heuristic = std::string(heuristic_name(kind));
        row.hosts = fleet_size;
        row.vms = report.vm_count;
        row.cloudlets = report.cloudlet_count;
        row.energy_kwh = report.total_energy_kwh;
        row.savings_vs_baseline_pct =
            baseline_energy > 0.0
                ? (baseline_energy - report.total_energy_kwh) / baseline_energy * 100.0
                : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

// Energy to 2 decimals, savings to whole percent; matches the usual
// comparison-table formatting.
inline void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "heuristic,hosts,vms,cloudlets,energy_kwh,savings_vs_baseline_pct,vm_migrations\n";
    for (const CompareRow& row : rows)
        out << row.heuristic << ',' << row.hosts << ',' << row.vms << ',' << row.cloudlets << ','
            << format_kwh(row.energy_kwh) << ',' << std::llround(row.savings_vs_baseline_pct)
            << ',' << row.migrations << '\n';
}

inline void write_savings_csv(std::ostream& out, const std::vector<CompareRow>& rows,
                              HeuristicKind baseline) {
    out << "heuristic,savings_pct\n";
    for (const CompareRow& row : rows) {
        if (row.heuristic == heuristic_name(baseline)) continue;
        out << row.heuristic << ',' << std::llround(row.savings_vs_baseline_pct) << '\n';
    }
}

}  // namespace wattplan
