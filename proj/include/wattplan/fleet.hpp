#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wattplan/model.hpp"

namespace wattplan {

struct HostGroup {
    HostSpec spec_template;  // id field ignored; assigned on expansion
    int count = 0;
};

struct FleetConfig {
    std::string name;
    std::vector<HostGroup> groups;
};

// Table-style presets for the three reference servers. RAM is configured in
// binary megabytes (4 GB -> 4096 MB).
inline HostSpec hp_ml110g5(int id = 0) {
    return HostSpec::uniform(id, "hp-ml110g5", 2, 2660.0, 4096.0, 10000000.0, 93.7, 135.0);
}

inline HostSpec ibm_x3250(int id = 0) {
    return HostSpec::uniform(id, "ibm-x3250", 4, 2933.0, 8192.0, 10000000.0, 41.6, 113.0);
}

inline HostSpec dell_r620(int id = 0) {
    return HostSpec::uniform(id, "dell-r620", 16, 2660.0, 24576.0, 10000000.0, 56.1, 263.0);
}

inline FleetConfig reference_fleet(int hp_count, int ibm_count, int dell_count, std::string name) {
    FleetConfig cfg;
    cfg.name = std::move(name);
    cfg.groups.push_back({hp_ml110g5(), hp_count});
    cfg.groups.push_back({ibm_x3250(), ibm_count});
    cfg.groups.push_back({dell_r620(), dell_count});
    return cfg;
}

// 5000 hosts split one-third per group; the non-integral thirds round by
// largest remainder, so the last group takes 1666.
inline FleetConfig default_fleet_5000() { return reference_fleet(1667, 1667, 1666, "reference-5000"); }

inline FleetConfig desk_fleet_150() { return reference_fleet(50, 50, 50, "reference-150"); }

// Expands groups into a concrete fleet with ids 0..n-1 in declaration order.
// Configuration errors (including p_max = 0, which would break the
// performance-per-watt metric) are rejected here.
inline std::vector<HostSpec> expand(const FleetConfig& cfg) {
    std::vector<HostSpec> fleet;
    for (const HostGroup& group : cfg.groups) {
        if (group.count < 0) throw std::invalid_argument("fleet config: negative group count");
        for (int i = 0; i < group.count; ++i) {
            HostSpec spec = group.spec_template;
            spec.id = static_cast<int>(fleet.size());
            validate(spec);
            if (!(spec.p_max_w > 0.0))
                throw std::invalid_argument("fleet config: p_max_w must be > 0 (group " +
                                            spec.group_label + ")");
            fleet.push_back(std::move(spec));
        }
    }
    return fleet;
}

inline FleetConfig fleet_from_json(const nlohmann::json& j) {
    FleetConfig cfg;
    try {
        cfg.name = j.value("name", std::string("unnamed"));
        for (const auto& g : j.at("groups")) {
            HostGroup group;
            group.count = g.at("count").get<int>();
            const int pe_count = g.at("pe_count").get<int>();
            HostSpec spec;
            spec.group_label = g.at("label").get<std::string>();
            spec.pe_count = pe_count;
            const auto& mips = g.at("mips_per_core");
            if (mips.is_array()) {
                spec.mips_per_core = mips.get<std::vector<double>>();
            } else {
                spec.mips_per_core.assign(static_cast<std::size_t>(pe_count > 0 ? pe_count : 0),
                                          mips.get<double>());
            }
            spec.total_mips = 0.0;
            for (double m : spec.mips_per_core) spec.total_mips += m;
            spec.ram_mb = g.at("ram_mb").get<double>();
            spec.bw_kbps = g.at("bw_kbps").get<double>();
            spec.p_idle_w = g.at("p_idle_w").get<double>();
            spec.p_max_w = g.at("p_max_w").get<double>();
            group.spec_template = std::move(spec);
            cfg.groups.push_back(std::move(group));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("fleet config: ") + e.what());
    }
    return cfg;
}

inline nlohmann::json fleet_to_json(const FleetConfig& cfg) {
    nlohmann::json j;
    j["name"] = cfg.name;
    j["groups"] = nlohmann::json::array();
    for (const HostGroup& group : cfg.groups) {
        const HostSpec& s = group.spec_template;
        nlohmann::json g;
        g["label"] = s.group_label;
        g["count"] = group.count;
        g["pe_count"] = s.pe_count;
        bool uniform = true;
        for (double m : s.mips_per_core)
            if (m != s.mips_per_core.front()) uniform = false;
        if (uniform && !s.mips_per_core.empty())
            g["mips_per_core"] = s.mips_per_core.front();
        else
            g["mips_per_core"] = s.mips_per_core;
        g["ram_mb"] = s.ram_mb;
        g["bw_kbps"] = s.bw_kbps;
        g["p_idle_w"] = s.p_idle_w;
        g["p_max_w"] = s.p_max_w;
        j["groups"].push_back(std::move(g));
    }
    return j;
}

// Resolves a --fleet argument: a builtin name or a JSON file path. An empty
// value means the bundled 5000-host default.
inline FleetConfig load_fleet(const std::string& name_or_path) {
    if (name_or_path.empty() || name_or_path == "reference-5000") return default_fleet_5000();
    if (name_or_path == "reference-150") return desk_fleet_150();
    std::ifstream in(name_or_path);
    if (!in) throw std::runtime_error("cannot open fleet config: " + name_or_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("fleet config " + name_or_path + ": " + e.what());
    }
    return fleet_from_json(j);
}

}  // namespace wattplan
