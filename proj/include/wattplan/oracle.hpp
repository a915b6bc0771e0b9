#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "wattplan/engine.hpp"
#include "wattplan/heuristics.hpp"
#include "wattplan/model.hpp"

namespace wattplan::oracle {

inline constexpr std::size_t kMaxVms = 8;
inline constexpr std::size_t kMaxHosts = 4;

// A brute-forceable instance: small enough that every host choice per VM can
// be enumerated.
struct TinyInstance {
    std::vector<VmRequest> vms;
    std::vector<HostSpec> hosts;
};

struct OptimalResult {
    bool feasible = false;
    double energy_kwh = 0.0;
    PlacementPlan plan;
};

namespace detail {

// Replays the host's already-chosen VMs in start order (releasing expired
// ones along the way) and reports the cores the next VM would get, if any.
// Core choice follows the same lowest-index-first rule the engine uses;
// within a host, cores of equal capacity are interchangeable, so no core
// permutations need enumerating.
inline std::optional<std::vector<int>> cores_after_replay(const HostSpec& spec,
                                                          const std::vector<const VmRequest*>& placed,
                                                          const VmRequest& next) {
    HostState state(spec);
    for (const VmRequest* vm : placed) {
        state.release_expired(vm->start_s);
        auto cores = pick_cores(state, *vm);
        if (!cores) return std::nullopt;  // unreachable for feasibly built prefixes
        Assignment a;
        a.vm_id = vm->id;
        a.host_id = spec.id;
        a.core_indices = std::move(*cores);
        a.start_s = vm->start_s;
        a.end_s = vm->end_s();
        a.mips_per_pe = vm->mips_per_pe;
        a.ram_mb = vm->ram_mb;
        a.bw_kbps = vm->bw_kbps;
        state.add(a);
    }
    state.release_expired(next.start_s);
    return pick_cores(state, next);
}

}  // namespace detail

// Exhaustive minimum-energy placement. Enumerates every host choice per VM in
// start order (instant feasibility suffices there, exactly as in the engine)
// and keeps the cheapest complete plan; deterministic tie-breaking via
// lexicographically-first host choices.
inline OptimalResult optimal_energy(const TinyInstance& instance) {
    if (instance.vms.size() > kMaxVms)
        throw std::invalid_argument("optimal_energy: too many VMs for exhaustive search");
    if (instance.hosts.size() > kMaxHosts)
        throw std::invalid_argument("optimal_energy: too many hosts for exhaustive search");
    std::vector<HostSpec> fleet = instance.hosts;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        fleet[i].id = static_cast<int>(i);
        validate(fleet[i]);
    }
    const std::vector<VmRequest> vms = sort_queue(instance.vms);
    for (const VmRequest& vm : vms) validate(vm);

    OptimalResult best;
    best.energy_kwh = std::numeric_limits<double>::infinity();
    if (vms.empty()) {
        best.feasible = true;
        best.energy_kwh = 0.0;
        return best;
    }
    if (fleet.empty()) return best;

    std::vector<int> choice(vms.size(), -1);
    std::vector<std::vector<const VmRequest*>> per_host(fleet.size());

    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == vms.size()) {
            // materialize assignments host by host so core indices match the replay
            PlacementPlan plan;
            std::vector<std::vector<const VmRequest*>> placed(fleet.size());
            for (std::size_t v = 0; v < vms.size(); ++v) {
                const std::size_t h = static_cast<std::size_t>(choice[v]);
                auto cores = detail::cores_after_replay(fleet[h], placed[h], vms[v]);
                if (!cores) throw std::logic_error("optimal_energy: descent accepted an infeasible prefix");
                Assignment a;
                a.vm_id = vms[v].id;
                a.host_id = static_cast<int>(h);
                a.core_indices = std::move(*cores);
                a.start_s = vms[v].start_s;
                a.end_s = vms[v].end_s();
                a.mips_per_pe = vms[v].mips_per_pe;
                a.ram_mb = vms[v].ram_mb;
                a.bw_kbps = vms[v].bw_kbps;
                plan.assignments.push_back(std::move(a));
                placed[h].push_back(&vms[v]);
            }
            const SimulationReport report = integrate_energy(plan, fleet);
            if (report.total_energy_kwh < best.energy_kwh) {
                best.feasible = true;
                best.energy_kwh = report.total_energy_kwh;
                best.plan = std::move(plan);
            }
            return;
        }
        for (std::size_t h = 0; h < fleet.size(); ++h) {
            if (!detail::cores_after_replay(fleet[h], per_host[h], vms[i])) continue;
            choice[i] = static_cast<int>(h);
            per_host[h].push_back(&vms[i]);
            self(self, i + 1);
            per_host[h].pop_back();
            choice[i] = -1;
        }
    };
    recurse(recurse, 0);
    return best;
}

// Left-rectangle discretization of the energy integral at step dt; the
// independent cross-check for the engine's exact segment sweep.
inline double numeric_energy(const PlacementPlan& plan, std::span<const HostSpec> fleet, double dt_s) {
    if (!(dt_s > 0.0)) throw std::invalid_argument("numeric_energy: dt must be > 0");
    if (plan.assignments.empty()) return 0.0;
    Seconds t0 = plan.assignments.front().start_s;
    Seconds t1 = plan.assignments.front().end_s;
    for (const Assignment& a : plan.assignments) {
        t0 = std::min(t0, a.start_s);
        t1 = std::max(t1, a.end_s);
    }
    double wh = 0.0;
    for (const HostSpec& spec : fleet) {
        double host_wh = 0.0;
        for (double t = static_cast<double>(t0); t < static_cast<double>(t1); t += dt_s) {
            double allocated = 0.0;
            int active = 0;
            for (const Assignment& a : plan.assignments) {
                if (a.host_id != spec.id) continue;
                if (static_cast<double>(a.start_s) <= t && t < static_cast<double>(a.end_s)) {
                    allocated += a.total_mips();
                    ++active;
                }
            }
            const double width = std::min(dt_s, static_cast<double>(t1) - t);
            if (active > 0) {
                const double u = std::clamp(allocated / spec.total_mips, 0.0, 1.0);
                host_wh += power(spec, u, active) * width / 3600.0;
            }
        }
        wh += host_wh;
    }
    return wh / 1000.0;
}

}  // namespace wattplan::oracle
