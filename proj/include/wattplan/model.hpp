#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wattplan {

using Seconds = std::int64_t;

// Static description of a physical machine: per-core capacities plus the two
// anchor points of its linear power curve.
struct HostSpec {
    int id = -1;
    std::string group_label;
    int pe_count = 0;
    std::vector<double> mips_per_core;
    double ram_mb = 0.0;
    double bw_kbps = 0.0;
    double p_idle_w = 0.0;
    double p_max_w = 0.0;
    double total_mips = 0.0;  // cached; must equal the sum of mips_per_core

    static HostSpec uniform(int id, std::string group_label, int pe_count, double mips_per_core,
                            double ram_mb, double bw_kbps, double p_idle_w, double p_max_w) {
        HostSpec s;
        s.id = id;
        s.group_label = std::move(group_label);
        s.pe_count = pe_count;
        s.mips_per_core.assign(static_cast<std::size_t>(pe_count > 0 ? pe_count : 0), mips_per_core);
        s.ram_mb = ram_mb;
        s.bw_kbps = bw_kbps;
        s.p_idle_w = p_idle_w;
        s.p_max_w = p_max_w;
        s.total_mips = std::accumulate(s.mips_per_core.begin(), s.mips_per_core.end(), 0.0);
        return s;
    }
};

inline void validate(const HostSpec& h) {
    if (h.pe_count < 1) throw std::invalid_argument("host " + std::to_string(h.id) + ": pe_count must be >= 1");
    if (h.mips_per_core.size() != static_cast<std::size_t>(h.pe_count))
        throw std::invalid_argument("host " + std::to_string(h.id) + ": mips_per_core length != pe_count");
    for (double m : h.mips_per_core)
        if (!(m > 0.0)) throw std::invalid_argument("host " + std::to_string(h.id) + ": core MIPS must be > 0");
    if (!(h.ram_mb > 0.0)) throw std::invalid_argument("host " + std::to_string(h.id) + ": ram_mb must be > 0");
    if (!(h.bw_kbps > 0.0)) throw std::invalid_argument("host " + std::to_string(h.id) + ": bw_kbps must be > 0");
    if (h.p_idle_w < 0.0 || h.p_idle_w > h.p_max_w)
        throw std::invalid_argument("host " + std::to_string(h.id) + ": need 0 <= p_idle_w <= p_max_w");
    const double sum = std::accumulate(h.mips_per_core.begin(), h.mips_per_core.end(), 0.0);
    if (h.total_mips != sum)
        throw std::invalid_argument("host " + std::to_string(h.id) + ": cached total_mips does not match core sum");
}

// One VM demand vector with a fixed start and a fixed, non-interruptible
// duration; occupies exactly [start_s, start_s + duration_s).
struct VmRequest {
    std::int64_t id = -1;
    int pe_count = 1;
    double mips_per_pe = 0.0;
    double ram_mb = 0.0;
    double bw_kbps = 0.0;
    Seconds start_s = 0;
    Seconds duration_s = 0;
    double length_mi = 0.0;  // trace provenance; 0 for synthetic requests
    std::optional<std::int64_t> source_job;

    Seconds end_s() const { return start_s + duration_s; }
    double total_mips() const { return static_cast<double>(pe_count) * mips_per_pe; }

    friend bool operator==(const VmRequest&, const VmRequest&) = default;
};

inline void validate(const VmRequest& v) {
    if (v.pe_count < 1) throw std::invalid_argument("vm " + std::to_string(v.id) + ": pe_count must be >= 1");
    if (!(v.mips_per_pe > 0.0)) throw std::invalid_argument("vm " + std::to_string(v.id) + ": mips_per_pe must be > 0");
    if (v.duration_s <= 0) throw std::invalid_argument("vm " + std::to_string(v.id) + ": duration_s must be > 0");
    if (v.start_s < 0) throw std::invalid_argument("vm " + std::to_string(v.id) + ": start_s must be >= 0");
    if (v.ram_mb < 0.0 || v.bw_kbps < 0.0)
        throw std::invalid_argument("vm " + std::to_string(v.id) + ": negative resource demand");
}

// A committed VM->host mapping: which cores carry the VM's per-core MIPS and
// over which half-open interval. Carries the demand vector so plans are
// self-contained for auditing and energy integration.
struct Assignment {
    std::int64_t vm_id = -1;
    int host_id = -1;
    std::vector<int> core_indices;
    Seconds start_s = 0;
    Seconds end_s = 0;
    double mips_per_pe = 0.0;
    double ram_mb = 0.0;
    double bw_kbps = 0.0;

    bool active_at(Seconds t) const { return start_s <= t && t < end_s; }
    double total_mips() const { return static_cast<double>(core_indices.size()) * mips_per_pe; }
};

// A host plus the set of assignments active at the engine's current instant,
// with residual capacities cached for O(cores) feasibility checks.
struct HostState {
    HostSpec spec;
    std::vector<Assignment> active;
    std::vector<double> core_free_mips;
    double ram_free = 0.0;
    double bw_free = 0.0;
    double allocated_mips = 0.0;

    explicit HostState(HostSpec s)
        : spec(std::move(s)),
          core_free_mips(spec.mips_per_core),
          ram_free(spec.ram_mb),
          bw_free(spec.bw_kbps) {}

    int active_count() const { return static_cast<int>(active.size()); }

    void add(const Assignment& a) {
        for (int c : a.core_indices) core_free_mips[static_cast<std::size_t>(c)] -= a.mips_per_pe;
        ram_free -= a.ram_mb;
        bw_free -= a.bw_kbps;
        allocated_mips += a.total_mips();
        active.push_back(a);
    }

    // Drops every assignment whose interval has ended by t and restores the
    // capacity it held.
    void release_expired(Seconds t) {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const Assignment& a = active[i];
            if (a.end_s <= t) {
                for (int c : a.core_indices) core_free_mips[static_cast<std::size_t>(c)] += a.mips_per_pe;
                ram_free += a.ram_mb;
                bw_free += a.bw_kbps;
                allocated_mips -= a.total_mips();
            } else {
                if (kept != i) active[kept] = std::move(active[i]);
                ++kept;
            }
        }
        active.resize(kept);
    }
};

// Instantaneous CPU utilization: allocated MIPS over total MIPS, in [0,1].
// The per-core ratio sum is normalized by the host's total capacity so the
// bound holds on multicore hosts.
inline double utilization(const HostState& host, Seconds t) {
    double allocated = 0.0;
    for (const Assignment& a : host.active)
        if (a.active_at(t)) allocated += a.total_mips();
    if (host.spec.total_mips <= 0.0) return 0.0;
    return std::clamp(allocated / host.spec.total_mips, 0.0, 1.0);
}

// Linear power curve between p_idle and p_max; a host running no VM draws
// nothing.
inline double power(const HostSpec& spec, double utilization, int active_count) {
    constexpr double kSlack = 1e-9;
    if (utilization < -kSlack || utilization > 1.0 + kSlack)
        throw std::invalid_argument("power: utilization outside [0,1]");
    if (active_count <= 0) return 0.0;
    const double u = std::clamp(utilization, 0.0, 1.0);
    return spec.p_idle_w + (spec.p_max_w - spec.p_idle_w) * u;
}

// Energy over an interval of piecewise-constant utilization, in watt-hours.
inline double energy_wh(const HostSpec& spec, double utilization, int active_count, double dt_s) {
    if (dt_s < 0.0) throw std::invalid_argument("energy_wh: negative interval");
    return power(spec, utilization, active_count) * dt_s / 3600.0;
}

// Performance-per-watt at full load: total MIPS over P_max.
inline double green_metric(const HostSpec& spec) {
    if (!(spec.p_max_w > 0.0)) throw std::invalid_argument("green_metric: p_max_w must be > 0");
    return spec.total_mips / spec.p_max_w;
}

struct PowerSample {
    double utilization = 0.0;
    double watts = 0.0;
};

inline PowerSample power_sample(const HostState& host, Seconds t) {
    int count = 0;
    for (const Assignment& a : host.active)
        if (a.active_at(t)) ++count;
    const double u = utilization(host, t);
    return PowerSample{u, power(host.spec, u, count)};
}

}  // namespace wattplan
