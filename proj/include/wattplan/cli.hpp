#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wattplan/engine.hpp"
#include "wattplan/fleet.hpp"
#include "wattplan/oracle.hpp"
#include "wattplan/report.hpp"
#include "wattplan/workload.hpp"

namespace wattplan::cli {

namespace fs = std::filesystem;

inline void write_text_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct ConvertOptions {
    std::string swf_path;
    std::string out_path;  // workload CSV; summary goes to <out>.summary.json
    ConversionParams params;
};

inline int cmd_convert(const ConvertOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const SwfParseResult parsed = parse_swf_file(opt.swf_path);
        for (const SwfSkip& skip : parsed.skipped)
            err << opt.swf_path << ':' << skip.line_no << ": skipped: " << skip.reason << '\n';
        if (parsed.jobs.empty()) {
            err << "error: empty trace: " << opt.swf_path << " has no data records\n";
            return 1;
        }
        auto [workload, summary] = convert(parsed.jobs, opt.params);

        std::ostringstream csv;
        write_workload_csv(csv, workload);
        write_text_file(opt.out_path, csv.str());

        nlohmann::json j;
        j["input"] = opt.swf_path;
        j["jobs_total"] = summary.jobs_total;
        j["jobs_skipped_invalid"] = summary.jobs_skipped_invalid;
        j["jobs_filtered_short"] = summary.jobs_filtered_short;
        j["jobs_converted"] = summary.jobs_converted;
        j["tasks_emitted"] = summary.tasks_emitted;
        j["malformed_lines"] = parsed.skipped.size();
        j["params"] = {
            {"cpu_rating", opt.params.cpu_rating},
            {"min_runtime_s", opt.params.min_runtime_s},
            {"duration_mode", std::string(duration_mode_name(opt.params.duration_mode))},
            {"vm_type_policy", vm_type_policy_name(opt.params.vm_type_policy)},
            {"start_time_rule", "submit-plus-wait"},
        };
        write_text_file(opt.out_path + ".summary.json", j.dump(2) + "\n");

        out << "converted " << summary.jobs_converted << " jobs into " << summary.tasks_emitted
            << " tasks (" << summary.jobs_filtered_short << " short jobs filtered, "
            << summary.jobs_skipped_invalid << " invalid records skipped) -> " << opt.out_path
            << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

struct SimulateOptions {
    std::string workload_path;
    std::string fleet = "reference-5000";  // builtin name or JSON path
    std::string heuristic = "epobf-v1";
    std::string out_dir = "wattplan-out";
};

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const auto kind = parse_heuristic(opt.heuristic);
        if (!kind) {
            err << "error: unknown heuristic: " << opt.heuristic << '\n';
            return 1;
        }
        const std::vector<VmRequest> workload = read_workload_csv_file(opt.workload_path);
        const std::vector<HostSpec> fleet = expand(load_fleet(opt.fleet));
        auto [plan, report] = run(workload, fleet, *kind);

        const fs::path dir(opt.out_dir);
        write_text_file(dir / "report.json", report_to_json(report, plan, fleet.size()).dump(2) + "\n");
        std::ostringstream csv;
        write_per_host_csv(csv, report, fleet);
        write_text_file(dir / "per_host.csv", csv.str());

        out << "heuristic=" << heuristic_name(*kind) << " energy_kwh=" << format_kwh(report.total_energy_kwh)
            << " hosts_used=" << report.hosts_used << " vms=" << report.vm_count
            << " rejected=" << report.rejection_count << " fingerprint=" << report.config_fingerprint
            << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

struct CompareOptions {
    std::string workload_path;
    std::string fleet = "reference-5000";
    std::vector<std::string> heuristics = {"pabfd", "vbp-l1", "vbp-l2", "epobf-v1", "epobf-v2"};
    std::string baseline = "pabfd";
    std::string out_dir = "wattplan-out";
};

// Runs every requested heuristic (in parallel; inputs are immutable) and
// writes the comparison table plus the savings-vs-baseline table.
inline int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        std::vector<HeuristicKind> kinds;
        for (const std::string& name : opt.heuristics) {
            const auto kind = parse_heuristic(name);
            if (!kind) {
                err << "error: unknown heuristic: " << name << '\n';
                return 1;
            }
            kinds.push_back(*kind);
        }
        if (kinds.empty()) {
            err << "error: no heuristics requested\n";
            return 1;
        }
        const auto baseline = parse_heuristic(opt.baseline);
        if (!baseline) {
            err << "error: unknown baseline heuristic: " << opt.baseline << '\n';
            return 1;
        }
        if (std::find(kinds.begin(), kinds.end(), *baseline) == kinds.end()) {
            err << "error: baseline " << opt.baseline << " is not among the requested heuristics\n";
            return 1;
        }

        const std::vector<VmRequest> workload = read_workload_csv_file(opt.workload_path);
        const std::vector<HostSpec> fleet = expand(load_fleet(opt.fleet));

        std::vector<std::future<SimulationReport>> futures;
        futures.reserve(kinds.size());
        for (HeuristicKind kind : kinds)
            futures.push_back(std::async(std::launch::async, [&, kind] {
                return run(workload, fleet, kind).second;
            }));
        std::vector<std::pair<HeuristicKind, SimulationReport>> results;
        results.reserve(kinds.size());
        for (std::size_t i = 0; i < kinds.size(); ++i) results.emplace_back(kinds[i], futures[i].get());

        const std::vector<CompareRow> rows = make_compare_rows(results, *baseline, fleet.size());
        const fs::path dir(opt.out_dir);
        std::ostringstream table;
        write_compare_csv(table, rows);
        write_text_file(dir / "compare.csv", table.str());
        std::ostringstream savings;
        write_savings_csv(savings, rows, *baseline);
        write_text_file(dir / "savings.csv", savings.str());

        for (const CompareRow& row : rows)
            out << row.heuristic << " energy_kwh=" << format_kwh(row.energy_kwh) << " savings="
                << std::llround(row.savings_vs_baseline_pct) << "%\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

struct StatsOptions {
    std::string workload_path;
    std::string out_dir = "wattplan-out";
    double start_bucket_s = 3600.0;
    double length_bucket_mi = 1.0e6;
};

inline int cmd_stats(const StatsOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const std::vector<VmRequest> workload = read_workload_csv_file(opt.workload_path);
        const WorkloadStats s = stats(workload, opt.start_bucket_s, opt.length_bucket_mi);
        const fs::path dir(opt.out_dir);
        std::ostringstream start_csv;
        write_histogram_csv(start_csv, s.start_time);
        write_text_file(dir / "start_time_hist.csv", start_csv.str());
        std::ostringstream length_csv;
        write_histogram_csv(length_csv, s.length);
        write_text_file(dir / "length_mi_hist.csv", length_csv.str());
        out << "tasks=" << s.task_count << " start_buckets=" << s.start_time.buckets.size()
            << " length_buckets=" << s.length.buckets.size() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

struct OracleOptions {
    std::string workload_path;
    std::string fleet;  // JSON path or builtin; must expand to a tiny fleet
};

// Debug-only exhaustive optimum for tiny instances.
inline int cmd_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        oracle::TinyInstance instance;
        instance.vms = read_workload_csv_file(opt.workload_path);
        instance.hosts = expand(load_fleet(opt.fleet));
        const oracle::OptimalResult result = oracle::optimal_energy(instance);
        if (!result.feasible) {
            out << "infeasible\n";
            return 0;
        }
        out << "optimal_energy_kwh=" << detail::format_number(result.energy_kwh) << '\n';
        for (const Assignment& a : result.plan.assignments) {
            out << "vm " << a.vm_id << " -> host " << a.host_id << " cores [";
            for (std::size_t i = 0; i < a.core_indices.size(); ++i)
                out << (i ? "," : "") << a.core_indices[i];
            out << "] interval [" << a.start_s << ',' << a.end_s << ")\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace wattplan::cli
