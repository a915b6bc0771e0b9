#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wattplan/detail/text.hpp"
#include "wattplan/model.hpp"

namespace wattplan {

// One Standard Workload Format record. The named fields are the ones the
// converter needs; all 18 raw values ride along untouched.
struct SwfJob {
    std::int64_t job_id = -1;
    double submit_s = 0.0;
    double wait_s = 0.0;
    double run_s = 0.0;
    std::int64_t procs_allocated = -1;
    std::int64_t procs_requested = -1;
    std::array<double, 18> raw{};
};

struct SwfSkip {
    std::size_t line_no = 0;
    std::string reason;
};

struct SwfParseResult {
    std::vector<SwfJob> jobs;
    std::vector<SwfSkip> skipped;  // malformed data lines, with line numbers
};

// Reads SWF text: ';' header/comment lines, then whitespace-separated
// 18-field records. Malformed lines are reported and skipped, not fatal.
inline SwfParseResult parse_swf(std::istream& in) {
    SwfParseResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        std::size_t first = view.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;
        if (view[first] == ';') continue;

        const auto tokens = detail::split_ws(view);
        if (tokens.size() < 18) {
            result.skipped.push_back({line_no, "expected 18 fields, got " + std::to_string(tokens.size())});
            continue;
        }
        SwfJob job;
        bool ok = true;
        for (std::size_t f = 0; f < 18; ++f) {
            if (!detail::parse_double(tokens[f], job.raw[f])) {
                result.skipped.push_back({line_no, "field " + std::to_string(f + 1) + " is not numeric"});
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        job.job_id = static_cast<std::int64_t>(job.raw[0]);
        job.submit_s = job.raw[1];
        job.wait_s = job.raw[2];
        job.run_s = job.raw[3];
        job.procs_allocated = static_cast<std::int64_t>(job.raw[4]);
        job.procs_requested = static_cast<std::int64_t>(job.raw[7]);
        result.jobs.push_back(job);
    }
    if (in.bad()) throw std::runtime_error("parse_swf: stream read error");
    return result;
}

inline SwfParseResult parse_swf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open SWF file: " + path);
    return parse_swf(in);
}

// The four VM flavors every task is assigned one of (single core each).
struct VmType {
    std::string name;
    double mips = 0.0;
    double ram_mb = 0.0;
    double bw_kbps = 0.0;
    int pe_count = 1;
};

inline const std::array<VmType, 4>& vm_type_catalog() {
    static const std::array<VmType, 4> kCatalog = {{
        {"highcpu", 2500.0, 870.0, 10000.0, 1},
        {"extra", 2000.0, 3840.0, 10000.0, 1},
        {"small", 1000.0, 1740.0, 10000.0, 1},
        {"micro", 500.0, 613.0, 10000.0, 1},
    }};
    return kCatalog;
}

enum class DurationMode { TraceRuntime, MipsScaled };

struct VmTypePolicy {
    enum class Kind { Cyclic, Fixed };
    Kind kind = Kind::Cyclic;
    std::size_t fixed_index = 0;
};

inline DurationMode parse_duration_mode(std::string_view s) {
    const std::string lower = detail::to_lower(s);
    if (lower == "trace-runtime") return DurationMode::TraceRuntime;
    if (lower == "mips-scaled") return DurationMode::MipsScaled;
    throw std::invalid_argument("unknown duration mode: " + std::string(s));
}

inline std::string_view duration_mode_name(DurationMode m) {
    return m == DurationMode::TraceRuntime ? "trace-runtime" : "mips-scaled";
}

inline VmTypePolicy parse_vm_type_policy(std::string_view s) {
    const std::string lower = detail::to_lower(s);
    if (lower == "cyclic") return {VmTypePolicy::Kind::Cyclic, 0};
    if (lower.rfind("fixed:", 0) == 0) {
        const std::string name = lower.substr(6);
        const auto& catalog = vm_type_catalog();
        for (std::size_t i = 0; i < catalog.size(); ++i)
            if (catalog[i].name == name) return {VmTypePolicy::Kind::Fixed, i};
        throw std::invalid_argument("unknown VM type in policy: " + name);
    }
    throw std::invalid_argument("unknown VM type policy: " + std::string(s));
}

inline std::string vm_type_policy_name(const VmTypePolicy& p) {
    if (p.kind == VmTypePolicy::Kind::Cyclic) return "cyclic";
    return "fixed:" + vm_type_catalog()[p.fixed_index].name;
}

struct ConversionParams {
    double cpu_rating = 375.0;        // MI per second of trace runtime
    Seconds min_runtime_s = 300;      // jobs shorter than this are dropped
    DurationMode duration_mode = DurationMode::MipsScaled;
    VmTypePolicy vm_type_policy{};
};

inline void validate(const ConversionParams& p) {
    if (!(p.cpu_rating > 0.0)) throw std::invalid_argument("cpu_rating must be > 0");
    if (p.min_runtime_s < 0) throw std::invalid_argument("min_runtime_s must be >= 0");
}

struct ConversionSummary {
    std::int64_t jobs_total = 0;
    std::int64_t jobs_skipped_invalid = 0;  // -1 sentinels in required fields
    std::int64_t jobs_filtered_short = 0;   // below min_runtime_s
    std::int64_t jobs_converted = 0;
    std::int64_t tasks_emitted = 0;
};

// Whether a record carries everything conversion needs: submit, wait, runtime
// and a processor count (allocated, falling back to requested).
inline bool job_usable(const SwfJob& job, std::int64_t& procs_out) {
    procs_out = job.procs_allocated >= 1 ? job.procs_allocated : job.procs_requested;
    return job.submit_s >= 0.0 && job.wait_s >= 0.0 && job.run_s >= 1.0 && procs_out >= 1;
}

inline bool job_survives(const SwfJob& job, const ConversionParams& params) {
    std::int64_t procs = 0;
    return job_usable(job, procs) && job.run_s >= static_cast<double>(params.min_runtime_s);
}

// Each surviving job fans out into one single-core task per allocated
// processor: task length = runtime x cpu_rating, start = submit + wait, VM
// type per policy, duration either the trace runtime or length/MIPS.
inline std::pair<std::vector<VmRequest>, ConversionSummary> convert(const std::vector<SwfJob>& jobs,
                                                                    const ConversionParams& params) {
    validate(params);
    const auto& catalog = vm_type_catalog();
    std::vector<VmRequest> out;
    ConversionSummary summary;
    summary.jobs_total = static_cast<std::int64_t>(jobs.size());
    std::size_t task_index = 0;
    for (const SwfJob& job : jobs) {
        std::int64_t procs = 0;
        if (!job_usable(job, procs)) {
            ++summary.jobs_skipped_invalid;
            continue;
        }
        if (job.run_s < static_cast<double>(params.min_runtime_s)) {
            ++summary.jobs_filtered_short;
            continue;
        }
        ++summary.jobs_converted;
        const double length_mi = job.run_s * params.cpu_rating;
        const Seconds start = static_cast<Seconds>(std::llround(job.submit_s + job.wait_s));
        for (std::int64_t p = 0; p < procs; ++p, ++task_index) {
            const VmType& type = params.vm_type_policy.kind == VmTypePolicy::Kind::Cyclic
                                     ? catalog[task_index % catalog.size()]
                                     : catalog[params.vm_type_policy.fixed_index];
            VmRequest vm;
            vm.id = static_cast<std::int64_t>(out.size());
            vm.pe_count = type.pe_count;
            vm.mips_per_pe = type.mips;
            vm.ram_mb = type.ram_mb;
            vm.bw_kbps = type.bw_kbps;
            vm.start_s = start;
            vm.duration_s = params.duration_mode == DurationMode::TraceRuntime
                                ? static_cast<Seconds>(std::llround(job.run_s))
                                : static_cast<Seconds>(std::ceil(length_mi / type.mips));
            vm.length_mi = length_mi;
            vm.source_job = job.job_id;
            validate(vm);
            out.push_back(std::move(vm));
        }
    }
    summary.tasks_emitted = static_cast<std::int64_t>(out.size());
    return {std::move(out), summary};
}

struct HistogramBucket {
    double start = 0.0;
    double end = 0.0;
    std::int64_t count = 0;
};

struct Histogram {
    double bucket_width = 0.0;
    std::vector<HistogramBucket> buckets;  // non-empty buckets, ascending
};

inline Histogram build_histogram(const std::vector<double>& values, double bucket_width) {
    if (!(bucket_width > 0.0)) throw std::invalid_argument("bucket width must be > 0");
    std::map<std::int64_t, std::int64_t> counts;
    for (double v : values) ++counts[static_cast<std::int64_t>(std::floor(v / bucket_width))];
    Histogram hist;
    hist.bucket_width = bucket_width;
    for (const auto& [idx, count] : counts)
        hist.buckets.push_back({static_cast<double>(idx) * bucket_width,
                                static_cast<double>(idx + 1) * bucket_width, count});
    return hist;
}

struct WorkloadStats {
    std::int64_t task_count = 0;
    Histogram start_time;  // seconds
    Histogram length;      // millions of instructions
};

inline WorkloadStats stats(const std::vector<VmRequest>& workload, double start_bucket_s = 3600.0,
                           double length_bucket_mi = 1.0e6) {
    WorkloadStats s;
    s.task_count = static_cast<std::int64_t>(workload.size());
    std::vector<double> starts, lengths;
    starts.reserve(workload.size());
    lengths.reserve(workload.size());
    for (const VmRequest& vm : workload) {
        starts.push_back(static_cast<double>(vm.start_s));
        lengths.push_back(vm.length_mi);
    }
    s.start_time = build_histogram(starts, start_bucket_s);
    s.length = build_histogram(lengths, length_bucket_mi);
    return s;
}

inline void write_histogram_csv(std::ostream& out, const Histogram& hist) {
    out << "bucket_start,bucket_end,count\n";
    for (const HistogramBucket& b : hist.buckets)
        out << detail::format_number(b.start) << ',' << detail::format_number(b.end) << ','
            << b.count << '\n';
}

inline constexpr std::string_view kWorkloadCsvHeader =
    "vm_id,start_s,duration_s,pe,mips,ram_mb,bw_kbps,length_mi,source_job";

inline void write_workload_csv(std::ostream& out, const std::vector<VmRequest>& workload) {
    out << kWorkloadCsvHeader << '\n';
    for (const VmRequest& vm : workload) {
        out << vm.id << ',' << vm.start_s << ',' << vm.duration_s << ',' << vm.pe_count << ','
            << detail::format_number(vm.mips_per_pe) << ',' << detail::format_number(vm.ram_mb)
            << ',' << detail::format_number(vm.bw_kbps) << ',' << detail::format_number(vm.length_mi)
            << ',' << (vm.source_job ? std::to_string(*vm.source_job) : std::string()) << '\n';
    }
}

inline std::vector<VmRequest> read_workload_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("workload CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kWorkloadCsvHeader)
        throw std::runtime_error("workload CSV: unexpected header: " + line);
    std::vector<VmRequest> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_char(line, ',');
        if (fields.size() != 9)
            throw std::runtime_error("workload CSV line " + std::to_string(line_no) + ": expected 9 fields");
        VmRequest vm;
        std::int64_t pe = 0;
        const bool ok = detail::parse_i64(fields[0], vm.id) && detail::parse_i64(fields[1], vm.start_s) &&
                        detail::parse_i64(fields[2], vm.duration_s) && detail::parse_i64(fields[3], pe) &&
                        detail::parse_double(fields[4], vm.mips_per_pe) &&
                        detail::parse_double(fields[5], vm.ram_mb) &&
                        detail::parse_double(fields[6], vm.bw_kbps) &&
                        detail::parse_double(fields[7], vm.length_mi);
        if (!ok) throw std::runtime_error("workload CSV line " + std::to_string(line_no) + ": bad number");
        vm.pe_count = static_cast<int>(pe);
        if (!fields[8].empty()) {
            std::int64_t src = 0;
            if (!detail::parse_i64(fields[8], src))
                throw std::runtime_error("workload CSV line " + std::to_string(line_no) + ": bad source_job");
            vm.source_job = src;
        }
        validate(vm);
        out.push_back(std::move(vm));
    }
    return out;
}

inline std::vector<VmRequest> read_workload_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open workload file: " + path);
    return read_workload_csv(in);
}

}  // namespace wattplan
