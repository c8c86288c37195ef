#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrv/bench.hpp"
#include "mrv/engine.hpp"
#include "mrv/error.hpp"
#include "mrv/oracle.hpp"
#include "mrv/simulator.hpp"

namespace py = pybind11;

namespace {

mrv::EngineFault fault_from(const std::string& s) {
    if (s == "none") return mrv::EngineFault::None;
    if (s == "window") return mrv::EngineFault::WindowFromCoexistence;
    if (s == "threshold") return mrv::EngineFault::ThresholdF;
    throw mrv::MrvError(mrv::ErrorCode::InvalidConfig, "unknown fault " + s);
}

mrv::RunConfig config_of(const mrv::EventLog& log, const std::optional<mrv::RunConfig>& override) {
    if (override) return *override;
    return log.config.value_or(mrv::RunConfig{});
}

py::dict order_to_dict(const mrv::SliceOrder& o) {
    py::list ordered, enforceable;
    for (const auto& d : o.ordered) ordered.append(d.hex());
    for (const auto& [a, b] : o.enforceable_svp) enforceable.append(py::make_tuple(a.hex(), b.hex()));
    py::dict out;
    out["slice"] = o.slice_index;
    out["ordered"] = ordered;
    out["enforceable"] = enforceable;
    return out;
}

}  // namespace

PYBIND11_MODULE(_mrv, m) {
    m.doc() = "Multi-round visibility ordering over committed DAG logs.";

    py::register_exception<mrv::MrvError>(m, "MrvError", PyExc_RuntimeError);

    py::class_<mrv::RunConfig>(m, "RunConfig")
        .def(py::init([](std::uint32_t n, std::uint32_t f, std::uint32_t w_max, std::uint64_t seed) {
                 mrv::RunConfig c{n, f, w_max, seed};
                 c.validate();
                 return c;
             }),
             py::arg("n") = 4, py::arg("f") = 1, py::arg("w_max") = 4, py::arg("seed") = 0)
        .def_readwrite("n", &mrv::RunConfig::n)
        .def_readwrite("f", &mrv::RunConfig::f)
        .def_readwrite("w_max", &mrv::RunConfig::w_max)
        .def_readwrite("seed", &mrv::RunConfig::seed)
        .def("__repr__", [](const mrv::RunConfig& c) {
            return "RunConfig(n=" + std::to_string(c.n) + ", f=" + std::to_string(c.f) +
                   ", w_max=" + std::to_string(c.w_max) + ", seed=" + std::to_string(c.seed) + ")";
        });

    m.def(
        "simulate",
        [](const mrv::RunConfig& config, mrv::Round rounds, mrv::Round wave,
           const std::map<std::uint32_t, std::string>& strategies, bool sparse,
           std::uint64_t max_payload) {
            mrv::SimPlan plan;
            plan.config = config;
            plan.rounds = rounds;
            plan.wave_length = wave;
            plan.parent_mode = sparse ? mrv::ParentMode::Sparse : mrv::ParentMode::Dense;
            plan.max_payload = max_payload;
            for (const auto& [c, s] : strategies) plan.strategies[c] = mrv::parse_strategy(s);
            return py::bytes(mrv::generate(plan).to_bytes());
        },
        py::arg("config"), py::arg("rounds") = 8, py::arg("wave") = 2,
        py::arg("strategies") = std::map<std::uint32_t, std::string>{}, py::arg("sparse") = false,
        py::arg("max_payload") = 4096, "Generate a committed-DAG event log as bytes.");

    m.def("scenario_names", &mrv::scenario_names);
    m.def(
        "scenario",
        [](const std::string& name) {
            const auto s = mrv::targeted_scenario(name);
            py::dict roles;
            for (const auto& [role, d] : s.roles) roles[py::str(role)] = d.hex();
            return py::make_tuple(py::bytes(s.log.to_bytes()), roles);
        },
        py::arg("name"), "Hand-built boundary-case log and its named AUFs.");

    m.def(
        "order",
        [](const py::bytes& log_bytes, std::optional<mrv::RunConfig> config) {
            const auto log = mrv::EventLog::from_bytes(std::string(log_bytes));
            const auto run = mrv::run_engine(log.events, config_of(log, config));
            py::list orders;
            for (const auto& o : run.orders) orders.append(order_to_dict(o));
            return py::make_tuple(orders, run.metrics.to_record(), run.metrics.timing_record(),
                                  run.metrics.invariants_hold());
        },
        py::arg("log"), py::arg("config") = py::none(),
        "Replay a log through the engine: (orders, metrics record, timing record, invariants ok).");

    m.def(
        "verify",
        [](const py::bytes& log_bytes, const std::string& fault, std::optional<mrv::RunConfig> config) {
            const auto log = mrv::EventLog::from_bytes(std::string(log_bytes));
            const auto cfg = config_of(log, config);
            const auto run = mrv::run_engine(log.events, cfg, {fault_from(fault), true});
            return mrv::diff_reports(cfg, run.trace, mrv::oracle_evaluate(log.events, cfg));
        },
        py::arg("log"), py::arg("fault") = "none", py::arg("config") = py::none(),
        "Engine/oracle discrepancies; empty when they agree.");

    m.def(
        "bench",
        [](const std::vector<std::uint32_t>& sizes, int repeats) {
            py::list rows;
            for (const auto& r : mrv::scaling_bench(sizes, repeats)) {
                py::dict row;
                row["size"] = r.size;
                row["pair_evaluations"] = r.pair_evaluations;
                row["wall_ns"] = r.wall.count();
                row["seal_ns"] = r.seal.count();
                rows.append(row);
            }
            return rows;
        },
        py::arg("sizes"), py::arg("repeats") = 3);

    m.def("loglog_slope", &mrv::loglog_slope);
}
