#include <sstream>

#include "doctest.h"
#include "vnet/experiments/report.hpp"
#include "vnet/sim/world.hpp"

using namespace vnet;
using namespace vnet::experiments;

namespace {

ExperimentPlan tiny(ExperimentId id) {
    auto p = default_plan(id);
    p.base.events_per_client = 40;
    p.repetitions = 1;
    return p;
}

}  // namespace

TEST_CASE("experiment ids round trip") {
    for (auto ids : {studies(), suites()})
        for (auto id : ids) CHECK(parse_experiment(to_string(id)) == id);
    CHECK(studies().size() == 8);
    CHECK_THROWS_AS(parse_experiment("E-nope"), std::invalid_argument);
}

TEST_CASE("sweep points form a grid, last axis fastest") {
    ExperimentPlan p;
    p.axes = {{"net.jitter_std_ms", {"50", "150"}}, {"net.p_loss", {"0", "0.3", "0.5"}}};
    const auto pts = expand_points(p);
    REQUIRE(pts.size() == 6);
    CHECK(pts[1].value == "50/0.3");
    CHECK(pts[3].key == "net.jitter_std_ms/net.p_loss");
    CHECK(pts[5].index == 5);
    CHECK(expand_points(ExperimentPlan{}).size() == 1);
}

TEST_CASE("seeds depend on point and repetition only") {
    CHECK(run_seed(1, 0, 0) != run_seed(1, 1, 0));
    CHECK(run_seed(1, 0, 0) != run_seed(1, 0, 1));
    CHECK(run_seed(1, 2, 3) == run_seed(1, 2, 3));
    CHECK(run_seed(1, 2, 3) != run_seed(2, 2, 3));
}

TEST_CASE("default sweeps") {
    const auto drop = default_plan(ExperimentId::DeliveryDrop);
    REQUIRE(drop.axes.size() == 1);
    CHECK(drop.axes[0].values == std::vector<std::string>{"0.3", "0.4", "0.5", "0.6", "0.7"});
    CHECK(drop.variants.size() == 3);
    const auto late = default_plan(ExperimentId::LateEvents);
    CHECK(late.axes[0].values.back() == "400");
    CHECK(default_plan(ExperimentId::GcCycle).axes[0].values.size() == 10);
    CHECK(default_plan(ExperimentId::LatencyJitter).base.events_per_client == 1000);
    CHECK(default_plan(ExperimentId::LatencyJitter, true).base.events_per_client == 9000);
    CHECK(expand_points(default_plan(ExperimentId::Safety)).size() * 12 >= 100);
}

TEST_CASE("plan file parsing") {
    std::istringstream in(R"(
        experiment = E-latency-drop   # comment
        seed = 9
        repetitions = 3
        set = events_per_client=50
        variant = fast: strategy=fast
        variant = pb: strategy=pb net.jitter_std_ms=10
        sweep = net.p_loss: 0.1 0.2
    )");
    const auto p = parse_plan(in);
    CHECK(p.id == ExperimentId::LatencyDrop);
    CHECK(p.seed == 9);
    CHECK(p.repetitions == 3);
    CHECK(p.base.events_per_client == 50);
    REQUIRE(p.variants.size() == 2);
    CHECK(p.variants[1].set.size() == 2);
    CHECK(p.axes[0].values.size() == 2);

    std::istringstream again(format_plan(p));
    const auto q = parse_plan(again);
    CHECK(q.base == p.base);
    CHECK(q.variants.size() == 2);
    CHECK(q.axes[0].values == p.axes[0].values);

    std::istringstream bad_key("experiment = E-gc-onoff\nsweep = net.nope: 1 2\n");
    CHECK_THROWS_AS(parse_plan(bad_key), std::invalid_argument);
    std::istringstream no_id("seed = 3\n");
    CHECK_THROWS_AS(parse_plan(no_id), std::invalid_argument);
    std::istringstream defaults("experiment = E-gc-cycle\ndefaults = 1\nrepetitions = 2\n");
    const auto d = parse_plan(defaults);
    CHECK(d.axes[0].values.size() == 10);
    CHECK(d.repetitions == 2);
}

TEST_CASE("run_plan is deterministic and independent of the worker count") {
    auto p = tiny(ExperimentId::LatencyJitter);
    p.axes[0].values = {"50", "250"};
    const auto a = run_plan(p, 1);
    const auto b = run_plan(p, 3);
    std::ostringstream sa, sb;
    write_csv(sa, a.rows);
    write_csv(sb, b.rows);
    CHECK(sa.str() == sb.str());
    CHECK(a.rows.size() == 6);
    CHECK(a.rows[0].variant == "fast");
    CHECK(a.rows[0].seed == a.rows[2].seed);  // fast and PB at sigma 50
    CHECK(a.rows[0].seed != a.rows[1].seed);
}

TEST_CASE("variants share seeds at a sweep point") {
    auto p = tiny(ExperimentId::DeliveryDrop);
    p.axes[0].values = {"0.3"};
    const auto r = run_plan(p, 2);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].seed == r.rows[1].seed);
    CHECK(r.rows[1].seed == r.rows[2].seed);
    CHECK(r.rows[0].strategy == "fast");
    CHECK(r.rows[1].strategy == "primary_backup");
}

TEST_CASE("results csv round trip") {
    auto p = tiny(ExperimentId::GcOnOff);
    const auto r = run_plan(p);
    CHECK_FALSE(r.qd.empty());
    std::ostringstream out;
    write_csv(out, r.rows);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    REQUIRE(back.size() == r.rows.size());
    std::ostringstream again;
    write_csv(again, back);
    CHECK(again.str() == out.str());

    std::istringstream bad("nope\n");
    CHECK_THROWS(read_csv(bad));
}

TEST_CASE("quoted fields survive the csv") {
    RunRow r;
    r.experiment = "S-safety";
    r.first_error = "different event at lambda 3, \"x\"";
    std::ostringstream out;
    write_csv(out, {r});
    std::istringstream in(out.str());
    CHECK(read_csv(in).at(0).first_error == r.first_error);
}

TEST_CASE("simple discard equals dynamic without clock error or loss") {
    sim::SimScenario sc;
    sc.events_per_client = 60;
    sc.net.jitter_std_ms = 10;
    const auto dyn = sim::run(sc);
    sc.late_policy = delivery::WindowPolicy::Discard;
    const auto dis = sim::run(sc);
    CHECK(dyn.serialize() == dis.serialize());
}

TEST_CASE("merkle study rows") {
    auto p = default_plan(ExperimentId::Merkle);
    p.merkle.objects = 20;
    p.merkle.changes = {1, 3, 8};
    p.merkle.equivalence_corpora = 10;
    const auto r = run_plan(p);
    REQUIRE(r.merkle.size() == 13);
    CHECK(r.merkle[0].path_cost == 1 + 20 + 5 + 5);
    CHECK(r.merkle[0].merkle_comparisons == r.merkle[0].path_cost);
    for (const auto& m : r.merkle) {
        CHECK(m.sets_equal);
        CHECK(m.merkle_comparisons == m.oracle_comparisons);
    }
    std::ostringstream out;
    write_merkle_csv(out, r.merkle);
    std::istringstream in(out.str());
    CHECK(read_merkle_csv(in).size() == 13);
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Ties take the average rank: ranks y = {1.5, 1.5, 3}.
    CHECK(spearman({1, 2, 3}, {5, 5, 9}) == doctest::Approx(0.8660254));
}

TEST_CASE("summary reports missing experiments as not run") {
    const auto res = evaluate_criteria(ResultBundle{});
    REQUIRE(res.size() == 13);
    for (const auto& r : res) {
        if (r.number == 12) CHECK(r.verdict == Verdict::Pass);
        else CHECK(r.verdict == Verdict::NotRun);
    }
    std::ostringstream out;
    CHECK(emit_summary(out, res) != 0);
    CHECK(out.str().find("NOT RUN") != std::string::npos);
}

TEST_CASE("summary verdicts follow thresholds") {
    ResultBundle b;
    for (int i = 0; i < 5; ++i) {
        RunRow r;
        r.experiment = "S-fast-path";
        r.consensus_triggers = i == 3 ? 2 : 0;
        b.rows.push_back(r);
    }
    auto res = evaluate_criteria(b);
    CHECK(res[9].verdict == Verdict::Fail);
    b.rows[3].consensus_triggers = 0;
    res = evaluate_criteria(b);
    CHECK(res[9].verdict == Verdict::Pass);
}

TEST_CASE("closed-form comparison") {
    RunRow r;
    r.experiment = "E-delivery-drop";
    r.variant = "primary_backup";
    r.sweep_value = "0.3";
    r.strategy = "primary_backup";
    r.group_size = 5;
    r.p_loss = 0.3;
    r.delivery_rate = 0.5;
    const auto c = compare_with_closed_form({r, r});
    REQUIRE(c.size() == 1);
    CHECK(c[0].runs == 2);
    CHECK(c[0].predicted_loss == doctest::Approx(0.51));
    CHECK(c[0].loss_abs_err == doctest::Approx(0.01));
    CHECK(c[0].predicted_sync_delay_ms == 0.0);
}
