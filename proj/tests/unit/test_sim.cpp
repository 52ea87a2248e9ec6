#include <cmath>

#include "doctest.h"
#include "vnet/sim/closed_form.hpp"
#include "vnet/sim/world.hpp"

using namespace vnet;
using namespace vnet::sim;

namespace {

SimScenario small(int events = 120) {
    SimScenario sc;
    sc.events_per_client = events;
    return sc;
}

}  // namespace

TEST_CASE("delay sampling") {
    Rng rng = make_stream(7, "t", "delay");
    NetModel fixed{50, 50, 0, 0};
    for (int i = 0; i < 100; ++i) CHECK(sample_delay(fixed, rng) == 100.0);

    NetModel net{50, 50, 50, 0};
    double sum = 0, lo = 1e9;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double d = sample_delay(net, rng);
        sum += d;
        lo = std::min(lo, d);
    }
    const double expect = 50 + truncated_normal_mean(50, 50);
    CHECK(std::abs(sum / n - expect) / expect < 0.03);
    CHECK(lo >= 50.0);
}

TEST_CASE("truncated normal mean matches a numeric integral") {
    // E[X | X >= 0] for N(50, 50) by trapezoid over [0, 600].
    double num = 0, den = 0;
    const double h = 0.01;
    for (double x = 0; x < 600; x += h) {
        const double f = std::exp(-0.5 * std::pow((x - 50) / 50, 2));
        num += x * f * h;
        den += f * h;
    }
    CHECK(truncated_normal_mean(50, 50) == doctest::Approx(num / den).epsilon(1e-4));
}

TEST_CASE("weibull sessions have the configured mean") {
    ChurnModel m{true, 1800, 0.5};
    Rng rng = make_stream(3, "replica:1", "churn");
    double sum = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double s = sample_session_ms(m, rng);
        CHECK_MESSAGE(s > 0, "session must be positive");
        sum += s;
    }
    CHECK(sum / n / 1000.0 == doctest::Approx(1800).epsilon(0.03));
}

TEST_CASE("streams are independent of each other") {
    Rng a = make_stream(1, "node:1", "delay");
    Rng b = make_stream(1, "node:1", "drop");
    Rng c = make_stream(1, "node:1", "delay");
    CHECK(a() != b());
    Rng a2 = make_stream(1, "node:1", "delay");
    CHECK(a2() == c());
}

TEST_CASE("closed forms") {
    const auto fast = closed_form(Strategy::Fast, 5, 0.5, 80, 40, 0.0);
    CHECK(fast.loss_rate == doctest::Approx(0.03125 + 0.96875 * 0.03125));
    CHECK(fast.loss_rate == doctest::Approx(0.06152).epsilon(1e-3));
    CHECK(fast.sync_delay_ms == 0.0);
    CHECK(closed_form(Strategy::PrimaryBackup, 5, 0.3, 80, 40, 0).loss_rate == doctest::Approx(0.51));
    CHECK(closed_form(Strategy::PrimaryBackup, 5, 0.3, 80, 40, 0).sync_delay_ms == 0.0);
    CHECK(closed_form(Strategy::ReliablePrimaryBackup, 5, 0.3, 80, 40, 0).sync_delay_ms == 120.0);
    CHECK(closed_form(Strategy::ConsensusTotalOrder, 5, 0.3, 80, 40, 0).sync_delay_ms == 160.0);
    CHECK(closed_form(Strategy::Fast, 5, 0.3, 80, 40, 0.25).sync_delay_ms == 40.0);
    CHECK_THROWS(closed_form(Strategy::Fast, 0, 0.3, 0, 0, 0));
    CHECK_THROWS(closed_form(Strategy::Fast, 5, 1.3, 0, 0, 0));

    const auto grid = check_loss_grid();
    CHECK(grid.points == 99 * 9);
    CHECK(grid.violations == 0);
    CHECK(grid.non_monotone == 0);
}

TEST_CASE("scenario text round trip") {
    SimScenario sc;
    sc.seed = 42;
    sc.net.p_loss = 0.3;
    sc.churn.enabled = true;
    sc.strategy = Strategy::ReliablePrimaryBackup;
    sc.late_policy = delivery::WindowPolicy::Discard;
    sc.script.push_back(ScriptedChange{ScriptedChange::Kind::Join, "x1", 5000, 2});
    sc.script.push_back(ScriptedChange{ScriptedChange::Kind::Leave, "c03", 9000, 1});
    CHECK(parse_scenario_text(format_scenario(sc)) == sc);

    const auto p = parse_scenario_text("# comment\nseed=9\nnet.p_loss = 0.5\nstrategy=pb\n");
    CHECK(p.seed == 9);
    CHECK(p.net.p_loss == 0.5);
    CHECK(p.strategy == Strategy::PrimaryBackup);
    CHECK_THROWS(parse_scenario_text("no_such_key=1\n"));
    CHECK_THROWS(parse_scenario_text("seed=abc\n"));
}

TEST_CASE("equal scenarios give identical metrics") {
    auto sc = small();
    sc.net.p_loss = 0.3;
    sc.churn = ChurnModel{true, 30, 0.5};
    const auto a = run(sc).serialize();
    const auto b = run(sc).serialize();
    CHECK(a == b);
    sc.seed = 2;
    CHECK(run(sc).serialize() != a);
}

TEST_CASE("fast path never asks for consensus on a clean network") {
    auto sc = small(200);
    sc.net.jitter_std_ms = 10;
    const auto m = run(sc);
    CHECK(m.consensus_triggers == 0);
    CHECK(m.delivery_rate() == 1.0);
    CHECK(m.violations.total() == 0);
}

TEST_CASE("churn triggers reconfiguration without breaking safety") {
    std::uint64_t reconf = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto sc = small(200);
        sc.seed = seed;
        sc.churn = ChurnModel{true, 30, 0.5};
        sc.net.p_loss = 0.3;
        const auto m = run(sc);
        reconf += m.reconfigurations;
        CHECK_MESSAGE(m.violations.total() == 0, m.first_error);
    }
    CHECK(reconf >= 1);
}

TEST_CASE("leader crash mid-instance is followed by one election") {
    auto sc = small(200);
    sc.net.p_loss = 0.3;
    sc.crash_leader_at_ms = 10000;
    const auto m = run(sc);
    CHECK(m.elections >= 1);
    CHECK(m.violations.total() == 0);
    CHECK(m.final_replicas == 5);
}

TEST_CASE("consensus baseline is slower than the fast path") {
    auto sc = small(200);
    const auto fast = run(sc);
    sc.strategy = Strategy::ConsensusTotalOrder;
    const auto cons = run(sc);
    CHECK(cons.p_sync() == 1.0);
    CHECK(cons.mean_latency() > fast.mean_latency());
    CHECK(cons.violations.total() == 0);
}

TEST_CASE("primary-backup replies from the primary only") {
    auto sc = small(200);
    sc.strategy = Strategy::PrimaryBackup;
    const auto m = run(sc);
    CHECK(m.delivery_rate() == 1.0);
    CHECK(m.consensus_triggers == 0);
    sc.strategy = Strategy::ReliablePrimaryBackup;
    const auto r = run(sc);
    CHECK(r.mean_latency() > m.mean_latency());
}

TEST_CASE("scripted join and leave are agreed by every replica") {
    auto sc = small(150);
    sc.net.p_loss = 0.3;
    sc.script.push_back(ScriptedChange{ScriptedChange::Kind::Join, "x1", 5000, 0});
    sc.script.push_back(ScriptedChange{ScriptedChange::Kind::Leave, "c03", 9000, 1});
    const auto m = run(sc);
    CHECK(m.milestone_checks >= 10);  // two milestones on five replicas
    CHECK_MESSAGE(m.violations.total() == 0, m.first_error);
}

TEST_CASE("garbage collection bounds the queue") {
    auto sc = small(300);
    const auto on = run(sc);
    sc.gc_enabled = false;
    const auto off = run(sc);
    CHECK(on.qd_max <= 300);
    CHECK(off.qd_final >= 3000);
    CHECK(on.violations.gc_unsafe == 0);
}
