// mrv: simulate, order, verify and benchmark committed-DAG logs.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrv/bench.hpp"
#include "mrv/engine.hpp"
#include "mrv/error.hpp"
#include "mrv/exporter.hpp"
#include "mrv/oracle.hpp"
#include "mrv/simulator.hpp"

namespace {

constexpr int kExitInvariant = 2;
constexpr int kExitInput = 3;

struct InvariantFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanArgs {
    std::uint32_t n = 4;
    std::uint32_t f = 1;
    std::uint32_t w_max = 4;
    std::uint64_t seed = 0;
    mrv::Round rounds = 8;
    mrv::Round wave = 2;
    std::vector<std::string> strategies;
    bool sparse = false;
    std::uint64_t max_payload = 4096;
};

void add_plan_options(CLI::App* cmd, PlanArgs& a) {
    cmd->add_option("--n", a.n, "replica count")->capture_default_str();
    cmd->add_option("--f", a.f, "fault bound")->capture_default_str();
    cmd->add_option("--w-max", a.w_max, "observation cap in rounds")->capture_default_str();
    cmd->add_option("--seed", a.seed, "plan seed (MRV_SEED overrides)")->capture_default_str();
    cmd->add_option("--rounds", a.rounds, "rounds after genesis")->capture_default_str();
    cmd->add_option("--wave", a.wave, "rounds per leader commit")->capture_default_str();
    cmd->add_option("--strategy", a.strategies,
                    "CREATOR=SPEC, SPEC one of honest, withhold:P, selective:F/S, conflict:T");
    cmd->add_flag("--sparse", a.sparse, "honest creators reference exactly 2f+1 parents");
    cmd->add_option("--max-payload", a.max_payload, "payload sizes drawn below this")
        ->capture_default_str();
}

mrv::SimPlan make_plan(const PlanArgs& a) {
    mrv::SimPlan plan;
    plan.config.n = a.n;
    plan.config.f = a.f;
    plan.config.w_max = a.w_max;
    plan.config.seed = a.seed;
    if (const char* env = std::getenv("MRV_SEED")) {
        try {
            std::size_t used = 0;
            plan.config.seed = std::stoull(env, &used);
            if (env[used] != '\0') throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw mrv::MrvError(mrv::ErrorCode::InvalidConfig, "MRV_SEED is not an integer");
        }
    }
    plan.rounds = a.rounds;
    plan.wave_length = a.wave;
    plan.parent_mode = a.sparse ? mrv::ParentMode::Sparse : mrv::ParentMode::Dense;
    plan.max_payload = a.max_payload;
    for (const auto& s : a.strategies) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw mrv::MrvError(mrv::ErrorCode::InfeasiblePlan, "strategy needs CREATOR=SPEC: " + s);
        }
        std::uint32_t creator = 0;
        try {
            creator = static_cast<std::uint32_t>(std::stoul(s.substr(0, eq)));
        } catch (const std::exception&) {
            throw mrv::MrvError(mrv::ErrorCode::InfeasiblePlan, "bad creator in " + s);
        }
        plan.strategies[creator] = mrv::parse_strategy(s.substr(eq + 1));
    }
    return plan;
}

mrv::EngineFault parse_fault(const std::string& s) {
    if (s == "none") return mrv::EngineFault::None;
    if (s == "window") return mrv::EngineFault::WindowFromCoexistence;
    if (s == "threshold") return mrv::EngineFault::ThresholdF;
    throw mrv::MrvError(mrv::ErrorCode::InvalidConfig, "unknown fault " + s);
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw mrv::MrvError(mrv::ErrorCode::InvalidConfig, "cannot write " + path);
    out << bytes;
}

void write_table(const std::string& path, const mrv::EngineTrace& trace) {
    std::ostringstream out;
    out << "slice\tposition\tdigest\n";
    for (const auto& s : trace.slices) {
        for (std::size_t i = 0; i < s.ordered.size(); ++i) {
            out << s.slice_index << '\t' << i << '\t' << s.ordered[i].hex() << '\n';
        }
    }
    write_file(path, out.str());
}

/// Runs the engine over `log` and prints the metric records. Returns the run.
mrv::EngineRun order_log(const mrv::EventLog& log, const mrv::RunConfig& config,
                         const std::string& out_path, const std::string& table_path) {
    mrv::EngineRun run = mrv::run_engine(log.events, config);
    if (!out_path.empty()) write_file(out_path, mrv::encode_order_log(config, run.orders));
    if (!table_path.empty()) write_table(table_path, run.trace);
    std::cout << run.metrics.to_record() << '\n' << run.metrics.timing_record() << '\n';
    if (!run.metrics.invariants_hold()) throw InvariantFailure("engine invariant violated");
    return run;
}

void verify_log(const mrv::EventLog& log, const mrv::RunConfig& config, mrv::EngineFault fault) {
    const mrv::EngineRun run = mrv::run_engine(log.events, config, {fault, true});
    const mrv::OracleReport report = mrv::oracle_evaluate(log.events, config);
    const auto diffs = mrv::diff_reports(config, run.trace, report);
    for (const auto& d : diffs) std::cout << "discrepancy: " << d << '\n';
    if (!diffs.empty()) {
        throw InvariantFailure(std::to_string(diffs.size()) + " engine/oracle discrepancies");
    }
    std::cout << "verify: ok (" << report.aufs.size() << " aufs, " << report.verdicts.size()
              << " pairs, " << report.slices.size() << " slices)\n";
}

mrv::RunConfig config_of(const mrv::EventLog& log) { return log.config.value_or(mrv::RunConfig{}); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-round visibility ordering over committed DAG logs"};
    app.require_subcommand(1);

    PlanArgs sim_args;
    std::string sim_log;
    auto* simulate = app.add_subcommand("simulate", "generate a committed-DAG event log");
    add_plan_options(simulate, sim_args);
    simulate->add_option("--log", sim_log, "output log path")->required();

    std::string order_in, order_out, order_table;
    auto* order = app.add_subcommand("order", "replay a log through the ordering engine");
    order->add_option("--log", order_in, "input log")->required()->check(CLI::ExistingFile);
    order->add_option("--out", order_out, "write sealed slice orders here");
    order->add_option("--table", order_table, "write a TSV of slice positions here");

    std::string verify_in, verify_fault = "none";
    auto* verify = app.add_subcommand("verify", "diff the engine against the reference oracle");
    verify->add_option("--log", verify_in, "input log")->required()->check(CLI::ExistingFile);
    verify->add_option("--inject-fault", verify_fault, "none, window or threshold")
        ->capture_default_str();

    PlanArgs run_args;
    std::string run_out, run_table;
    auto* run = app.add_subcommand("run", "simulate, order and verify in one pass");
    add_plan_options(run, run_args);
    run->add_option("--out", run_out, "write sealed slice orders here");
    run->add_option("--table", run_table, "write a TSV of slice positions here");

    std::vector<std::uint32_t> bench_sizes{32, 64, 128, 256, 512};
    int bench_repeats = 3;
    auto* bench = app.add_subcommand("bench", "pair-evaluation scaling over slice sizes");
    bench->add_option("--sizes", bench_sizes, "ascending slice sizes")->delimiter(',');
    bench->add_option("--repeats", bench_repeats, "take the best of this many runs")
        ->capture_default_str();

    std::string scenario_name, scenario_log;
    bool scenario_list = false;
    auto* scenario = app.add_subcommand("scenario", "write a hand-built boundary-case log");
    scenario->add_option("name", scenario_name, "scenario name");
    scenario->add_option("--log", scenario_log, "output log path");
    scenario->add_flag("--list", scenario_list, "list scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (simulate->parsed()) {
            const auto log = mrv::generate(make_plan(sim_args));
            log.save(sim_log);
            std::cout << "wrote " << log.events.size() << " events to " << sim_log << '\n';
        } else if (order->parsed()) {
            const auto log = mrv::EventLog::load(order_in);
            order_log(log, config_of(log), order_out, order_table);
        } else if (verify->parsed()) {
            const auto log = mrv::EventLog::load(verify_in);
            verify_log(log, config_of(log), parse_fault(verify_fault));
        } else if (run->parsed()) {
            const auto plan = make_plan(run_args);
            const auto log = mrv::generate(plan);
            order_log(log, plan.config, run_out, run_table);
            verify_log(log, plan.config, mrv::EngineFault::None);
        } else if (bench->parsed()) {
            const auto rows = mrv::scaling_bench(bench_sizes, bench_repeats);
            std::vector<double> xs, ys;
            std::cout << "size\tpair_evaluations\texpected_pairs\twall_ns\tseal_ns\n";
            for (const auto& r : rows) {
                std::cout << r.size << '\t' << r.pair_evaluations << '\t'
                          << std::uint64_t{r.size} * (r.size - 1) / 2 << '\t' << r.wall.count()
                          << '\t' << r.seal.count() << '\n';
                xs.push_back(r.size);
                ys.push_back(static_cast<double>(std::max<std::int64_t>(r.wall.count(), 1)));
            }
            std::cout << "loglog_slope\t" << mrv::loglog_slope(xs, ys) << '\n';
        } else if (scenario->parsed()) {
            if (scenario_list || scenario_name.empty()) {
                for (const auto& name : mrv::scenario_names()) std::cout << name << '\n';
                return 0;
            }
            const auto s = mrv::targeted_scenario(scenario_name);
            if (scenario_log.empty()) {
                std::cout << s.log.to_bytes();
            } else {
                s.log.save(scenario_log);
            }
            std::cerr << s.name << ": " << s.description << '\n';
            for (const auto& [role, d] : s.roles) std::cerr << "  " << role << " = " << d.hex() << '\n';
        }
    } catch (const InvariantFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const mrv::MrvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
