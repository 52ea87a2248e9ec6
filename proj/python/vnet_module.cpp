#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <random>

#include "vnet/content/merkle.hpp"
#include "vnet/experiments/report.hpp"
#include "vnet/sim/closed_form.hpp"
#include "vnet/sim/world.hpp"

namespace py = pybind11;
using namespace vnet;

namespace {

sim::SimScenario scenario_from(const py::dict& overrides) {
    sim::SimScenario sc;
    for (const auto& [k, v] : overrides) sim::set_scenario_key(sc, py::str(k), py::str(v));
    sc.validate();
    return sc;
}

py::dict metrics_dict(const sim::Metrics& m) {
    py::dict d;
    d["events_sent"] = m.events_sent;
    d["updates_delivered"] = m.updates_delivered;
    d["delivery_rate"] = m.delivery_rate();
    d["mean_latency_ms"] = m.mean_latency();
    d["p95_latency_ms"] = m.p95_latency();
    d["latencies"] = m.latencies;
    d["consensus_triggers"] = m.consensus_triggers;
    d["p_sync"] = m.p_sync();
    d["sync_delay_ms"] = m.sync_delay_ms();
    d["d_c_ms"] = m.d_c();
    d["d_m_ms"] = m.d_m();
    d["qd_max"] = m.qd_max;
    d["qd_final"] = m.qd_final;
    d["qd_series"] = m.qd_series;
    d["elections"] = m.elections;
    d["reconfigurations"] = m.reconfigurations;
    d["group_failed"] = m.group_failed;
    d["late_staged"] = m.late_staged;
    d["late_dropped"] = m.late_dropped;
    d["divergence"] = m.divergence;
    d["violations"] = m.violations.total();
    d["first_error"] = m.first_error;
    d["serialized"] = m.serialize();
    return d;
}

py::dict row_dict(const experiments::RunRow& r) {
    py::dict d;
    d["experiment"] = r.experiment;
    d["variant"] = r.variant;
    d["sweep_key"] = r.sweep_key;
    d["sweep_value"] = r.sweep_value;
    d["rep"] = r.rep;
    d["seed"] = r.seed;
    d["strategy"] = r.strategy;
    d["delivery_rate"] = r.delivery_rate;
    d["mean_latency_ms"] = r.mean_latency_ms;
    d["p95_latency_ms"] = r.p95_latency_ms;
    d["mean_qd"] = r.mean_qd;
    d["max_qd"] = r.max_qd;
    d["consensus_rate"] = r.consensus_rate;
    d["elections"] = r.elections;
    d["reconfigurations"] = r.reconfigurations;
    d["group_failed"] = r.group_failed;
    d["violations"] = r.violations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_vnet, m) {
    m.doc() = "Replica-group simulator, closed forms and Merkle verification";

    m.def(
        "simulate",
        [](const py::dict& overrides) {
            const auto sc = scenario_from(overrides);
            sim::Metrics out;
            {
                py::gil_scoped_release nogil;
                out = sim::run(sc);
            }
            return metrics_dict(out);
        },
        py::arg("overrides") = py::dict(), "Run one scenario; keys follow the scenario file format.");

    m.def("format_scenario", [](const py::dict& overrides) { return sim::format_scenario(scenario_from(overrides)); },
          py::arg("overrides") = py::dict());

    m.def(
        "closed_form",
        [](const std::string& strategy, int n, double p_loss, double d_c, double d_m, double p_sync) {
            const auto c = sim::closed_form(sim::parse_strategy(strategy), n, p_loss, d_c, d_m, p_sync);
            return py::make_tuple(c.sync_delay_ms, c.loss_rate);
        },
        py::arg("strategy"), py::arg("n"), py::arg("p_loss"), py::arg("d_c") = 0.0, py::arg("d_m") = 0.0,
        py::arg("p_sync") = 0.0, "(sync delay ms, update loss rate)");

    m.def("check_loss_grid", [](int lo, int hi) {
        const auto g = sim::check_loss_grid(lo, hi);
        return py::make_tuple(g.points, g.violations, g.non_monotone);
    }, py::arg("n_lo") = 2, py::arg("n_hi") = 10);

    m.def("experiments", [] {
        std::vector<std::string> out;
        for (auto ids : {experiments::studies(), experiments::suites()})
            for (auto id : ids) out.push_back(experiments::to_string(id));
        return out;
    });

    m.def(
        "run_experiment",
        [](const std::string& id, std::optional<int> events, std::optional<int> repetitions, std::uint64_t seed,
           int workers) {
            auto plan = experiments::default_plan(experiments::parse_experiment(id));
            if (events) plan.base.events_per_client = *events;
            if (repetitions) plan.repetitions = *repetitions;
            plan.seed = seed;
            experiments::PlanResult res;
            {
                py::gil_scoped_release nogil;
                res = experiments::run_plan(plan, workers);
            }
            py::list rows;
            for (const auto& r : res.rows) rows.append(row_dict(r));
            for (const auto& r : res.merkle) {
                py::dict d;
                d["variant"] = r.variant;
                d["changed_files"] = r.changed_files;
                d["merkle_comparisons"] = r.merkle_comparisons;
                d["flat_comparisons"] = r.flat_comparisons;
                d["sets_equal"] = r.sets_equal;
                rows.append(d);
            }
            return rows;
        },
        py::arg("experiment"), py::arg("events_per_client") = py::none(), py::arg("repetitions") = py::none(),
        py::arg("seed") = 1, py::arg("workers") = 1);

    m.def(
        "merkle_compare",
        [](std::size_t objects, std::size_t comps, std::size_t files, std::size_t changes, std::uint64_t seed) {
            auto inv = content::generate_corpus(objects, comps, files, seed);
            const auto local = content::build_tree(inv);
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
            content::mutate_files(inv, changes, rng);
            const auto remote = content::build_tree(inv);
            const auto h = content::verify(local, remote);
            const auto f = content::flat_verify(local, remote);
            py::dict d;
            d["files"] = local.file_count();
            d["merkle_comparisons"] = h.comparisons;
            d["flat_comparisons"] = f.comparisons;
            d["changed"] = std::vector<std::string>(h.changed.begin(), h.changed.end());
            d["sets_equal"] = h.changed == f.changed;
            return d;
        },
        py::arg("objects") = 200, py::arg("components_per_object") = 5, py::arg("files_per_component") = 5,
        py::arg("changes") = 1, py::arg("seed") = 1);

    m.def("resolve_master", &content::resolve_master, py::arg("file_id"), py::arg("node_ids"));
}
