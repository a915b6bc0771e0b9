#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wattplan/detail/text.hpp"
#include "wattplan/model.hpp"

namespace wattplan {

enum class HeuristicKind { EpobfV1, EpobfV2, Pabfd, VbpGreedyL1, VbpGreedyL2 };

inline constexpr std::array<HeuristicKind, 5> kAllHeuristics = {
    HeuristicKind::EpobfV1, HeuristicKind::EpobfV2, HeuristicKind::Pabfd,
    HeuristicKind::VbpGreedyL1, HeuristicKind::VbpGreedyL2};

inline std::string_view heuristic_name(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::EpobfV1: return "epobf-v1";
        case HeuristicKind::EpobfV2: return "epobf-v2";
        case HeuristicKind::Pabfd: return "pabfd";
        case HeuristicKind::VbpGreedyL1: return "vbp-l1";
        case HeuristicKind::VbpGreedyL2: return "vbp-l2";
    }
    return "?";
}

inline std::optional<HeuristicKind> parse_heuristic(std::string_view name) {
    const std::string lower = detail::to_lower(name);
    for (HeuristicKind k : kAllHeuristics)
        if (lower == heuristic_name(k)) return k;
    return std::nullopt;
}

// A feasible host for one VM at its start instant, with the concrete cores
// the placement would occupy and the score the selecting heuristic assigned.
struct Candidate {
    int host_id = -1;
    double score = 0.0;
    std::vector<int> chosen_cores;
};

// Ascending start time, ties by ascending VM id.
inline std::vector<VmRequest> sort_queue(std::vector<VmRequest> vms) {
    std::stable_sort(vms.begin(), vms.end(), [](const VmRequest& a, const VmRequest& b) {
        if (a.start_s != b.start_s) return a.start_s < b.start_s;
        return a.id < b.id;
    });
    return vms;
}

// Lowest-index-first choice of pe_count distinct cores with enough residual
// MIPS; nullopt when the host cannot take the VM at this instant.
inline std::optional<std::vector<int>> pick_cores(const HostState& host, const VmRequest& vm) {
    if (host.ram_free < vm.ram_mb || host.bw_free < vm.bw_kbps) return std::nullopt;
    std::vector<int> cores;
    cores.reserve(static_cast<std::size_t>(vm.pe_count));
    for (int c = 0; c < host.spec.pe_count && static_cast<int>(cores.size()) < vm.pe_count; ++c)
        if (host.core_free_mips[static_cast<std::size_t>(c)] >= vm.mips_per_pe) cores.push_back(c);
    if (static_cast<int>(cores.size()) < vm.pe_count) return std::nullopt;
    return cores;
}

// Every host on which the VM fits at instant t. An instant check suffices:
// VMs are admitted in start order and never move, so a host's load between
// two of its placements only decreases.
inline std::vector<Candidate> find_candidate_hosts(const VmRequest& vm,
                                                   std::span<const HostState> fleet, Seconds t) {
    (void)t;  // states are already the time-t view
    std::vector<Candidate> out;
    for (const HostState& host : fleet) {
        if (auto cores = pick_cores(host, vm)) {
            out.push_back(Candidate{host.spec.id, 0.0, std::move(*cores)});
        }
    }
    return out;
}

// Power increase the placement would cause: power-after minus power-now with
// the zero-when-empty convention. On a linear curve the increase on an
// already-running host is slope times the demand ratio, independent of its
// current load; computing that form directly avoids the cancellation that
// would otherwise let mathematically tied hosts round apart.
inline double power_delta(const HostState& host, const VmRequest& vm) {
    const double slope = host.spec.p_max_w - host.spec.p_idle_w;
    const double demand_ratio = std::clamp(vm.total_mips() / host.spec.total_mips, 0.0, 1.0);
    const double dynamic_step = slope * demand_ratio;
    if (host.active_count() == 0) return host.spec.p_idle_w + dynamic_step;
    return dynamic_step;
}

namespace detail {

// Ties always break toward the lowest host id, independent of candidate
// order.
template <typename ScoreFn>
std::optional<Candidate> select_extreme(std::span<const Candidate> candidates, bool maximize,
                                        ScoreFn&& score_of) {
    if (candidates.empty()) return std::nullopt;
    const Candidate* best = nullptr;
    double best_score = 0.0;
    for (const Candidate& cand : candidates) {
        const double s = score_of(cand);
        const bool better =
            best == nullptr || (maximize ? s > best_score : s < best_score) ||
            (s == best_score && cand.host_id < best->host_id);
        if (better) {
            best = &cand;
            best_score = s;
        }
    }
    Candidate chosen = *best;
    chosen.score = best_score;
    return chosen;
}

}  // namespace detail

// Highest total-MIPS-per-watt-at-full-load host wins; load never matters.
inline std::optional<Candidate> epobf_v1_select(const VmRequest& vm,
                                                std::span<const Candidate> candidates,
                                                std::span<const HostState> states) {
    (void)vm;
    return detail::select_extreme(candidates, /*maximize=*/true, [&](const Candidate& c) {
        return green_metric(states[static_cast<std::size_t>(c.host_id)].spec);
    });
}

// Highest total-MIPS per watt of power *increase* wins. The increase is
// strictly positive whenever idle power is, because waking an empty host
// charges its full idle draw.
inline std::optional<Candidate> epobf_v2_select(const VmRequest& vm,
                                                std::span<const Candidate> candidates,
                                                std::span<const HostState> states) {
    return detail::select_extreme(candidates, /*maximize=*/true, [&](const Candidate& c) {
        const HostState& host = states[static_cast<std::size_t>(c.host_id)];
        const double dp = power_delta(host, vm);
        if (dp <= 0.0) return std::numeric_limits<double>::infinity();
        return host.spec.total_mips / dp;
    });
}

// Smallest power increase wins (power-aware best fit).
inline std::optional<Candidate> pabfd_select(const VmRequest& vm,
                                             std::span<const Candidate> candidates,
                                             std::span<const HostState> states) {
    return detail::select_extreme(candidates, /*maximize=*/false, [&](const Candidate& c) {
        return power_delta(states[static_cast<std::size_t>(c.host_id)], vm);
    });
}

// Norm-based greedy vector bin packing: each dimension normalized by the
// host's own capacity, unit weights, minimize sum_k |residual_k - demand_k|^p.
inline std::optional<Candidate> vbp_select(const VmRequest& vm,
                                           std::span<const Candidate> candidates,
                                           std::span<const HostState> states, int norm_order) {
    if (norm_order != 1 && norm_order != 2)
        throw std::invalid_argument("vbp_select: norm order must be 1 or 2");
    return detail::select_extreme(candidates, /*maximize=*/false, [&](const Candidate& c) {
        const HostState& host = states[static_cast<std::size_t>(c.host_id)];
        const std::array<double, 3> residual = {
            (host.spec.total_mips - host.allocated_mips) / host.spec.total_mips,
            host.ram_free / host.spec.ram_mb,
            host.bw_free / host.spec.bw_kbps,
        };
        const std::array<double, 3> demand = {
            vm.total_mips() / host.spec.total_mips,
            vm.ram_mb / host.spec.ram_mb,
            vm.bw_kbps / host.spec.bw_kbps,
        };
        double score = 0.0;
        for (std::size_t k = 0; k < residual.size(); ++k) {
            const double gap = std::abs(residual[k] - demand[k]);
            score += norm_order == 1 ? gap : gap * gap;
        }
        return score;
    });
}

inline std::optional<Candidate> select_host(HeuristicKind kind, const VmRequest& vm,
                                            std::span<const Candidate> candidates,
                                            std::span<const HostState> states) {
    switch (kind) {
        case HeuristicKind::EpobfV1: return epobf_v1_select(vm, candidates, states);
        case HeuristicKind::EpobfV2: return epobf_v2_select(vm, candidates, states);
        case HeuristicKind::Pabfd: return pabfd_select(vm, candidates, states);
        case HeuristicKind::VbpGreedyL1: return vbp_select(vm, candidates, states, 1);
        case HeuristicKind::VbpGreedyL2: return vbp_select(vm, candidates, states, 2);
    }
    return std::nullopt;
}

// Modeling conventions every run shares; embedded in reports and in the
// configuration fingerprint so results are traceable to them.
inline const std::vector<std::pair<std::string_view, std::string_view>>& conventions() {
    static const std::vector<std::pair<std::string_view, std::string_view>> kConventions = {
        {"empty_host_power", "zero"},
        {"power_delta_sign", "after-minus-before"},
        {"queue_order", "start-time-asc-then-id"},
        {"tie_break", "lowest-host-id"},
        {"vbp_weights", "unit"},
        {"core_choice", "lowest-index-first"},
    };
    return kConventions;
}

}  // namespace wattplan
