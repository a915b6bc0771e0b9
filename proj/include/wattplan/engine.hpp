#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wattplan/detail/text.hpp"
#include "wattplan/heuristics.hpp"
#include "wattplan/model.hpp"

namespace wattplan {

struct Rejection {
    std::int64_t vm_id = -1;
    std::string reason;
};

// The complete outcome of one heuristic run: every VM lands in exactly one of
// assignments or rejections.
struct PlacementPlan {
    HeuristicKind heuristic = HeuristicKind::EpobfV1;
    std::vector<Assignment> assignments;
    std::vector<Rejection> rejections;
};

struct SimulationReport {
    double total_energy_kwh = 0.0;
    std::map<int, double> per_host_energy_kwh;  // hosts that ran at least one VM
    int hosts_used = 0;
    std::int64_t vm_count = 0;
    std::int64_t cloudlet_count = 0;  // one task per VM in this model
    std::int64_t rejection_count = 0;
    HeuristicKind heuristic = HeuristicKind::EpobfV1;
    std::string config_fingerprint;
};

struct Violation {
    enum class Kind { CoreMips, Ram, Bw, BadCoreIndex, BadInterval, BadHost };
    Kind kind = Kind::CoreMips;
    int host_id = -1;
    Seconds at = 0;
    int core = -1;
    double amount = 0.0;
    double capacity = 0.0;
    std::string message;
};

namespace detail {

inline void require_indexed_fleet(std::span<const HostSpec> fleet) {
    if (fleet.empty()) throw std::invalid_argument("fleet must not be empty");
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        validate(fleet[i]);
        if (fleet[i].id != static_cast<int>(i))
            throw std::invalid_argument("fleet host ids must equal their position");
    }
}

inline std::vector<std::vector<const Assignment*>> group_by_host(const PlacementPlan& plan,
                                                                 std::size_t fleet_size) {
    std::vector<std::vector<const Assignment*>> per_host(fleet_size);
    for (const Assignment& a : plan.assignments)
        if (a.host_id >= 0 && static_cast<std::size_t>(a.host_id) < fleet_size)
            per_host[static_cast<std::size_t>(a.host_id)].push_back(&a);
    return per_host;
}

}  // namespace detail

// Re-checks constraints 1-3 at every breakpoint of every host's timeline.
// Empty result means the plan is feasible.
inline std::vector<Violation> audit(const PlacementPlan& plan, std::span<const HostSpec> fleet) {
    std::vector<Violation> out;
    for (const Assignment& a : plan.assignments) {
        if (a.host_id < 0 || static_cast<std::size_t>(a.host_id) >= fleet.size()) {
            out.push_back({Violation::Kind::BadHost, a.host_id, a.start_s, -1, 0.0, 0.0,
                           "vm " + std::to_string(a.vm_id) + " mapped to unknown host"});
            continue;
        }
        const HostSpec& spec = fleet[static_cast<std::size_t>(a.host_id)];
        if (a.end_s <= a.start_s)
            out.push_back({Violation::Kind::BadInterval, a.host_id, a.start_s, -1, 0.0, 0.0,
                           "vm " + std::to_string(a.vm_id) + " has an empty interval"});
        std::vector<bool> seen(static_cast<std::size_t>(spec.pe_count), false);
        for (int c : a.core_indices) {
            if (c < 0 || c >= spec.pe_count || seen[static_cast<std::size_t>(c)]) {
                out.push_back({Violation::Kind::BadCoreIndex, a.host_id, a.start_s, c, 0.0, 0.0,
                               "vm " + std::to_string(a.vm_id) + " uses an invalid or repeated core"});
                break;
            }
            seen[static_cast<std::size_t>(c)] = true;
        }
    }
    if (!out.empty()) return out;

    const auto per_host = detail::group_by_host(plan, fleet.size());
    for (std::size_t h = 0; h < fleet.size(); ++h) {
        const HostSpec& spec = fleet[h];
        // (time, is_start, assignment); releases apply before starts at equal t
        std::vector<std::tuple<Seconds, bool, const Assignment*>> events;
        events.reserve(per_host[h].size() * 2);
        for (const Assignment* a : per_host[h]) {
            events.emplace_back(a->start_s, true, a);
            events.emplace_back(a->end_s, false, a);
        }
        std::sort(events.begin(), events.end(), [](const auto& x, const auto& y) {
            if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
            return std::get<1>(x) < std::get<1>(y);
        });

        std::vector<double> core_load(static_cast<std::size_t>(spec.pe_count), 0.0);
        double ram_used = 0.0, bw_used = 0.0;
        const double eps = 1e-9;
        std::size_t i = 0;
        while (i < events.size()) {
            const Seconds t = std::get<0>(events[i]);
            for (; i < events.size() && std::get<0>(events[i]) == t; ++i) {
                const Assignment* a = std::get<2>(events[i]);
                const double sign = std::get<1>(events[i]) ? 1.0 : -1.0;
                for (int c : a->core_indices) core_load[static_cast<std::size_t>(c)] += sign * a->mips_per_pe;
                ram_used += sign * a->ram_mb;
                bw_used += sign * a->bw_kbps;
            }
            for (int c = 0; c < spec.pe_count; ++c) {
                const double cap = spec.mips_per_core[static_cast<std::size_t>(c)];
                if (core_load[static_cast<std::size_t>(c)] > cap + eps * std::max(1.0, cap))
                    out.push_back({Violation::Kind::CoreMips, spec.id, t, c,
                                   core_load[static_cast<std::size_t>(c)], cap,
                                   "core MIPS overcommitted on host " + std::to_string(spec.id)});
            }
            if (ram_used > spec.ram_mb + eps * std::max(1.0, spec.ram_mb))
                out.push_back({Violation::Kind::Ram, spec.id, t, -1, ram_used, spec.ram_mb,
                               "RAM overcommitted on host " + std::to_string(spec.id)});
            if (bw_used > spec.bw_kbps + eps * std::max(1.0, spec.bw_kbps))
                out.push_back({Violation::Kind::Bw, spec.id, t, -1, bw_used, spec.bw_kbps,
                               "bandwidth overcommitted on host " + std::to_string(spec.id)});
        }
    }
    return out;
}

// Exact energy accounting: per host, sweep the piecewise-constant utilization
// between assignment breakpoints; no time-stepping. Throws if the plan fails
// the audit, since that signals an engine bug rather than bad input.
inline SimulationReport integrate_energy(const PlacementPlan& plan, std::span<const HostSpec> fleet) {
    detail::require_indexed_fleet(fleet);
    if (auto violations = audit(plan, fleet); !violations.empty()) {
        std::ostringstream msg;
        msg << "integrate_energy: infeasible plan (" << violations.size() << " violations): "
            << violations.front().message << " at t=" << violations.front().at;
        throw std::logic_error(msg.str());
    }

    SimulationReport report;
    report.heuristic = plan.heuristic;
    report.vm_count = static_cast<std::int64_t>(plan.assignments.size() + plan.rejections.size());
    report.cloudlet_count = report.vm_count;
    report.rejection_count = static_cast<std::int64_t>(plan.rejections.size());

    const auto per_host = detail::group_by_host(plan, fleet.size());
    for (std::size_t h = 0; h < fleet.size(); ++h) {
        if (per_host[h].empty()) continue;
        const HostSpec& spec = fleet[h];
        // delta in allocated MIPS and active count at each breakpoint
        std::map<Seconds, std::pair<double, int>> deltas;
        for (const Assignment* a : per_host[h]) {
            auto& start = deltas[a->start_s];
            start.first += a->total_mips();
            start.second += 1;
            auto& end = deltas[a->end_s];
            end.first -= a->total_mips();
            end.second -= 1;
        }
        double wh = 0.0;
        double allocated = 0.0;
        int active = 0;
        auto it = deltas.begin();
        while (it != deltas.end()) {
            allocated += it->second.first;
            active += it->second.second;
            const Seconds seg_start = it->first;
            ++it;
            if (it == deltas.end()) break;
            const Seconds seg_len = it->first - seg_start;
            if (active > 0 && seg_len > 0) {
                const double u = std::clamp(allocated / spec.total_mips, 0.0, 1.0);
                wh += energy_wh(spec, u, active, static_cast<double>(seg_len));
            }
        }
        report.per_host_energy_kwh[spec.id] = wh / 1000.0;
        report.total_energy_kwh += wh / 1000.0;
        ++report.hosts_used;
    }
    return report;
}

// Deterministic digest of everything that determines a run's outcome other
// than the heuristic itself.
inline std::string config_fingerprint(std::span<const HostSpec> fleet,
                                      std::span<const VmRequest> workload) {
    using detail::format_number;
    std::string buf = "wattplan-fingerprint-v1\n";
    for (const auto& [key, value] : conventions()) {
        buf.append(key);
        buf.push_back('=');
        buf.append(value);
        buf.push_back(';');
    }
    buf.push_back('\n');
    for (const HostSpec& h : fleet) {
        buf += "h," + std::to_string(h.id) + ',' + h.group_label + ',' + std::to_string(h.pe_count);
        for (double m : h.mips_per_core) buf += ',' + format_number(m);
        buf += ',' + format_number(h.ram_mb) + ',' + format_number(h.bw_kbps) + ',' +
               format_number(h.p_idle_w) + ',' + format_number(h.p_max_w) + '\n';
    }
    for (const VmRequest& v : workload) {
        buf += "v," + std::to_string(v.id) + ',' + std::to_string(v.pe_count) + ',' +
               format_number(v.mips_per_pe) + ',' + format_number(v.ram_mb) + ',' +
               format_number(v.bw_kbps) + ',' + std::to_string(v.start_s) + ',' +
               std::to_string(v.duration_s) + ',' + format_number(v.length_mi) + ',' +
               (v.source_job ? std::to_string(*v.source_job) : std::string("-")) + '\n';
    }
    return detail::hex64(detail::fnv1a64(buf));
}

// Runs one full experiment: queue the workload, place each VM at its start
// instant via the chosen heuristic (or record a rejection), then integrate
// energy over the whole horizon.
inline std::pair<PlacementPlan, SimulationReport> run(const std::vector<VmRequest>& workload,
                                                      std::span<const HostSpec> fleet,
                                                      HeuristicKind kind) {
    detail::require_indexed_fleet(fleet);
    for (const VmRequest& vm : workload) validate(vm);

    std::vector<HostState> states;
    states.reserve(fleet.size());
    for (const HostSpec& spec : fleet) states.emplace_back(spec);

    PlacementPlan plan;
    plan.heuristic = kind;

    // earliest-expiry queue so only touched hosts pay release costs
    using Expiry = std::pair<Seconds, int>;
    std::priority_queue<Expiry, std::vector<Expiry>, std::greater<>> expiries;

    for (const VmRequest& vm : sort_queue(workload)) {
        const Seconds t = vm.start_s;
        while (!expiries.empty() && expiries.top().first <= t) {
            states[static_cast<std::size_t>(expiries.top().second)].release_expired(t);
            expiries.pop();
        }
        const std::vector<Candidate> candidates = find_candidate_hosts(vm, states, t);
        if (auto chosen = select_host(kind, vm, candidates, states)) {
            Assignment a;
            a.vm_id = vm.id;
            a.host_id = chosen->host_id;
            a.core_indices = chosen->chosen_cores;
            a.start_s = t;
            a.end_s = vm.end_s();
            a.mips_per_pe = vm.mips_per_pe;
            a.ram_mb = vm.ram_mb;
            a.bw_kbps = vm.bw_kbps;
            states[static_cast<std::size_t>(a.host_id)].add(a);
            expiries.emplace(a.end_s, a.host_id);
            plan.assignments.push_back(std::move(a));
        } else {
            plan.rejections.push_back({vm.id, "no-feasible-host"});
        }
    }

    SimulationReport report = integrate_energy(plan, fleet);
    report.config_fingerprint = config_fingerprint(fleet, workload);
    return {std::move(plan), std::move(report)};
}

}  // namespace wattplan
