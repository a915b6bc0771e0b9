#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wattplan/cli.hpp"

int main(int argc, char** argv) {
    using namespace wattplan;

    CLI::App app{"wattplan: trace-driven energy simulator for VM placement heuristics"};
    app.require_subcommand(1);

    cli::ConvertOptions convert_opt;
    std::string duration_mode = "mips-scaled";
    std::string vm_type_policy = "cyclic";
    auto* convert = app.add_subcommand("convert", "convert an SWF trace into a workload CSV");
    convert->add_option("swf", convert_opt.swf_path, "input SWF trace")->required();
    convert->add_option("--out", convert_opt.out_path, "output workload CSV")->required();
    convert->add_option("--cpu-rating", convert_opt.params.cpu_rating,
                        "MI per second of trace runtime (default 375)");
    convert->add_option("--min-runtime", convert_opt.params.min_runtime_s,
                        "drop jobs shorter than this many seconds (default 300)");
    convert->add_option("--duration-mode", duration_mode, "trace-runtime | mips-scaled");
    convert->add_option("--vm-type-policy", vm_type_policy, "cyclic | fixed:<type>");

    cli::SimulateOptions sim_opt;
    auto* simulate = app.add_subcommand("simulate", "run one heuristic over a workload");
    simulate->add_option("--workload", sim_opt.workload_path, "workload CSV")->required();
    simulate->add_option("--fleet", sim_opt.fleet, "fleet JSON path or builtin (reference-5000, reference-150)");
    simulate->add_option("--heuristic", sim_opt.heuristic,
                         "epobf-v1 | epobf-v2 | pabfd | vbp-l1 | vbp-l2");
    simulate->add_option("--out", sim_opt.out_dir, "output directory");

    cli::CompareOptions cmp_opt;
    auto* compare = app.add_subcommand("compare", "run several heuristics and tabulate savings");
    compare->add_option("--workload", cmp_opt.workload_path, "workload CSV")->required();
    compare->add_option("--fleet", cmp_opt.fleet, "fleet JSON path or builtin");
    compare->add_option("--heuristics", cmp_opt.heuristics, "heuristics to run")->delimiter(',');
    compare->add_option("--baseline", cmp_opt.baseline, "savings baseline (default pabfd)");
    compare->add_option("--out", cmp_opt.out_dir, "output directory");

    cli::StatsOptions stats_opt;
    auto* stats = app.add_subcommand("stats", "emit start-time and task-length histograms");
    stats->add_option("--workload", stats_opt.workload_path, "workload CSV")->required();
    stats->add_option("--out", stats_opt.out_dir, "output directory");
    stats->add_option("--start-bucket", stats_opt.start_bucket_s, "start-time bucket width, seconds");
    stats->add_option("--length-bucket", stats_opt.length_bucket_mi, "length bucket width, MI");

    cli::OracleOptions oracle_opt;
    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum for tiny instances (debug)");
    oracle->group("");  // hidden
    oracle->add_option("--workload", oracle_opt.workload_path, "tiny workload CSV")->required();
    oracle->add_option("--fleet", oracle_opt.fleet, "tiny fleet JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*convert) {
            convert_opt.params.duration_mode = wattplan::parse_duration_mode(duration_mode);
            convert_opt.params.vm_type_policy = wattplan::parse_vm_type_policy(vm_type_policy);
            return cli::cmd_convert(convert_opt, std::cout, std::cerr);
        }
        if (*simulate) return cli::cmd_simulate(sim_opt, std::cout, std::cerr);
        if (*compare) return cli::cmd_compare(cmp_opt, std::cout, std::cerr);
        if (*stats) return cli::cmd_stats(stats_opt, std::cout, std::cerr);
        if (*oracle) return cli::cmd_oracle(oracle_opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
