#include <random>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "vnet/delivery/engine.hpp"
#include "vnet/delivery/timing.hpp"

using namespace vnet;
using namespace vnet::delivery;

namespace {

SenderRecord rec(const char* id, Cycle c0, SeqNo max_seq = -1) {
    SenderRecord r;
    r.id = SenderId{id, 0};
    r.first_cycle = c0;
    r.max_seq_delivered = max_seq;
    return r;
}

Event ev(const char* id, SeqNo seq) { return Event::operation(SenderId{id, 0}, seq, "op" + std::to_string(seq)); }

}  // namespace

TEST_CASE("seq_of_cycle") {
    auto s = rec("s", 10);
    CHECK(seq_of_cycle(s, 10) == 0);
    CHECK(seq_of_cycle(s, 15) == 5);
    CHECK_THROWS_AS(seq_of_cycle(s, 9), std::out_of_range);
}

TEST_CASE("expected_window") {
    CHECK(expected_window(rec("s", 10), 10) == SeqWindow{0, 0});
    CHECK(expected_window(rec("s", 0, 2), 5) == SeqWindow{3, 5});
    CHECK_THROWS_AS(expected_window(rec("s", 0, 5), 5), std::logic_error);
}

TEST_CASE("window widens across three Empty decisions") {
    // Sender starts at cycle 1; seq k = 4 is missing everywhere from cycle 5 on.
    DeliveryEngine eng(WindowPolicy::Dynamic, DeliveryMode::Fast);
    auto s = rec("s", 1);
    eng.senders().add(s);
    for (Cycle c = 1; c <= 4; ++c) {
        eng.on_event_received(ev("s", c - 1));
        eng.close_cycle(c);
        CHECK(eng.try_deliver().status == DeliveryStatus::Delivered);
    }
    CHECK(eng.senders().find(s.id)->max_seq_delivered == 3);
    // Cycles 5..7: nothing arrives, consensus decides Empty for every seq.
    for (Cycle c = 5; c <= 7; ++c) {
        eng.close_cycle(c);
        auto out = eng.try_deliver();
        REQUIRE(out.status == DeliveryStatus::AwaitingConsensus);
        std::vector<Event> empties;
        for (const auto& w : out.windows)
            for (SeqNo j = w.window.min_seq; j <= w.window.max_seq; ++j) empties.push_back(Event::empty(w.sender, j));
        eng.record_decision(c, empties);
        CHECK(eng.try_deliver().status == DeliveryStatus::Delivered);
        CHECK(eng.senders().find(s.id)->max_seq_delivered == 3);
    }
    auto w = eng.windows_for(8);
    REQUIRE(w.size() == 1);
    CHECK(w[0].window == SeqWindow{4, 7});
}

TEST_CASE("on_event_received watermark and duplicates") {
    SenderSet ss;
    ss.add(rec("s", 0, 4));
    EventCollector col;
    CHECK(col.on_event_received(ev("s", 7), ss) == Admission::Accepted);
    CHECK(col.on_event_received(ev("s", 3), ss) == Admission::Stale);
    CHECK(col.on_event_received(ev("s", 4), ss) == Admission::Stale);
    CHECK(col.on_event_received(ev("s", 7), ss) == Admission::Duplicate);
    CHECK(col.on_event_received(ev("x", 0), ss) == Admission::UnknownSender);
    CHECK(col.received().size() == 1);
    CHECK_THROWS_AS(col.on_event_received(Event::bottom(SenderId{"s", 0}, 9), ss), std::logic_error);
}

TEST_CASE("on_cycle_timeout stages cycle events and placeholders") {
    SenderSet ss;
    ss.add(rec("a", 1));
    ss.add(rec("b", 1));
    EventCollector col;
    col.on_event_received(ev("a", 0), ss);
    col.on_cycle_timeout(1, ss);
    const auto& st = col.staged();
    REQUIRE(st.size() == 2);
    CHECK(st.at(EventKey{SenderId{"a", 0}, 0}).event == ev("a", 0));
    CHECK(st.at(EventKey{SenderId{"b", 0}, 0}).event.is_bottom());
    CHECK(col.held(EventKey{SenderId{"b", 0}, 0}) == nullptr);

    // duplicate after staging is ignored
    CHECK(col.on_event_received(ev("a", 0), ss) == Admission::Duplicate);
    // the missing event shows up late: it replaces the placeholder next cycle
    col.on_event_received(ev("b", 0), ss);
    col.on_cycle_timeout(2, ss);
    CHECK(col.staged().at(EventKey{SenderId{"b", 0}, 0}).event == ev("b", 0));
    CHECK(col.staged().at(EventKey{SenderId{"b", 0}, 0}).cycle == 2);
    CHECK_THROWS_AS(col.on_cycle_timeout(4, ss), std::logic_error);
}

TEST_CASE("late events inside the window are all staged") {
    // Omega = [3,5]: seq 3 arrives one cycle late together with 4 and 5.
    SenderSet ss;
    ss.add(rec("s", 0, 2));
    EventCollector col;
    col.set_last_closed(3);
    col.on_cycle_timeout(4, ss);  // seq 4 missing
    col.on_event_received(ev("s", 3), ss);
    col.on_event_received(ev("s", 4), ss);
    col.on_event_received(ev("s", 5), ss);
    col.on_cycle_timeout(5, ss);
    int staged_real = 0;
    for (const auto& [k, e] : col.staged()) {
        if (!e.event.is_bottom()) {
            ++staged_real;
            CHECK(e.cycle == 5);
        }
    }
    CHECK(staged_real == 3);
    CHECK(col.received().empty());
}

TEST_CASE("discard policy drops late events") {
    SenderSet ss;
    ss.add(rec("s", 1));
    EventCollector col(WindowPolicy::Discard);
    col.on_cycle_timeout(1, ss);
    CHECK(col.on_event_received(ev("s", 0), ss) == Admission::Late);
    CHECK(col.on_event_received(ev("s", 1), ss) == Admission::Accepted);
    col.on_cycle_timeout(2, ss);
    CHECK(col.held(EventKey{SenderId{"s", 0}, 1}) != nullptr);
}

TEST_CASE("gamma formula") {
    SenderSet one;
    one.add(rec("s", 0));
    CHECK(gamma(SenderId{"s", 0}, 7, 7, one.active_at(7)) == 7);

    SenderSet two;
    two.add(rec("s1", 10));
    two.add(rec("s2", 10));
    const auto act = two.active_at(14);  // Seq(s1, 14) = 4
    CHECK(gamma(SenderId{"s2", 0}, 4, 14, act) == 9);
    CHECK(gamma(SenderId{"s1", 0}, 3, 14, act) == 3);
    CHECK(two.index_of(SenderId{"s2", 0}, 14) == 2);
    CHECK_THROWS_AS(gamma(SenderId{"zz", 0}, 0, 14, act), std::logic_error);
}

TEST_CASE("gamma is injective over all window pairs (brute force)") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        SenderSet ss;
        const int n = 1 + static_cast<int>(rng() % 5);
        const Cycle c = 20;
        for (int i = 0; i < n; ++i) {
            auto r = rec(("s" + std::to_string(i)).c_str(), static_cast<Cycle>(rng() % 20));
            r.id.join_timestamp = static_cast<std::int64_t>(rng() % 2);
            const SeqNo top = c - r.first_cycle;
            r.max_seq_delivered = static_cast<SeqNo>(rng() % (top + 1)) - 1;
            ss.add(r);
        }
        const auto act = ss.active_at(c);
        std::set<std::int64_t> seen;
        std::vector<std::pair<std::int64_t, EventKey>> order;
        for (const auto* r : act) {
            const auto w = expected_window(*r, c);
            for (SeqNo j = w.min_seq; j <= w.max_seq; ++j) {
                const auto g = gamma(r->id, j, c, act);
                CHECK(seen.insert(g).second);
                order.push_back({g, EventKey{r->id, j}});
            }
        }
        // gamma order is (sender index, seq) order
        std::sort(order.begin(), order.end());
        for (std::size_t i = 1; i < order.size(); ++i) CHECK(order[i - 1].second < order[i].second);
    }
}

TEST_CASE("schedule") {
    TimingParams p;
    auto s1 = schedule(1000, 1, p);
    CHECK(s1.send == 950);
    CHECK(s1.recv_deadline == 1200);
    auto s3 = schedule(1000, 3, p);
    CHECK(s3.send == 1350);
    CHECK(s3.recv_deadline == 1600);
    TimingParams z = TimingParams::from_bounds(0, 200);
    CHECK(schedule(1000, 2, z).send == 1200);
    CHECK_THROWS_AS(TimingParams::from_bounds(250, 50), std::invalid_argument);
    CHECK_THROWS_AS(schedule(1000, 0, p), std::invalid_argument);
}

TEST_CASE("cycle clock") {
    CycleClock clk{0, 200};
    CHECK(clk.close_time(5) == 1000);
    CHECK(clk.closed_by(999.9) == 4);
    CHECK(clk.closed_by(1000) == 5);
    CHECK(clk.first_cycle_for(1000) == 6);
    // deadline of seq 0 is close(first cycle)
    CHECK(clk.close_time(clk.first_cycle_for(1000)) == schedule(1000, 1, TimingParams{}).recv_deadline);
}

TEST_CASE("try_deliver fast path") {
    DeliveryEngine eng(WindowPolicy::Dynamic, DeliveryMode::Fast);
    eng.senders().add(rec("a", 1));
    eng.senders().add(rec("b", 1));
    CHECK(eng.try_deliver().status == DeliveryStatus::NotReady);
    eng.on_event_received(ev("b", 0));
    eng.on_event_received(ev("a", 0));
    eng.close_cycle(1);
    auto out = eng.try_deliver();
    CHECK(out.status == DeliveryStatus::Delivered);
    CHECK_FALSE(out.via_decision);
    REQUIRE(out.slots.size() == 2);
    CHECK(out.slots[0].event.sender.base_id == "a");
    CHECK(out.slots[1].gamma == 1);
    CHECK(eng.next_cycle() == 2);
}

TEST_CASE("try_deliver waits for consensus on a placeholder and never fast-delivers afterwards") {
    DeliveryEngine eng(WindowPolicy::Dynamic, DeliveryMode::Fast);
    eng.senders().add(rec("a", 1));
    eng.senders().add(rec("b", 1));
    eng.on_event_received(ev("a", 0));
    eng.close_cycle(1);
    auto out = eng.try_deliver();
    CHECK(out.status == DeliveryStatus::AwaitingConsensus);
    CHECK(out.windows.size() == 2);
    eng.on_event_received(ev("b", 0));
    CHECK(eng.try_deliver().status == DeliveryStatus::AwaitingConsensus);
    auto prop = eng.proposal_for(1, out.windows);
    CHECK(prop.size() == 2);
    CHECK_FALSE(prop[1].is_bottom());
}

TEST_CASE("decision wins over staged events (cycles 3 and 4 trace)") {
    DeliveryEngine eng(WindowPolicy::Dynamic, DeliveryMode::Fast);
    const SenderId s{"s", 0};
    eng.senders().add(rec("s", 1));
    for (Cycle c = 1; c <= 2; ++c) {
        eng.on_event_received(ev("s", c - 1));
        eng.close_cycle(c);
        REQUIRE(eng.try_deliver().status == DeliveryStatus::Delivered);
    }
    // cycle 3: e_2 missing here, decided from another replica's proposal
    eng.close_cycle(3);
    REQUIRE(eng.try_deliver().status == DeliveryStatus::AwaitingConsensus);
    eng.record_decision(3, {ev("s", 2)});
    auto d3 = eng.try_deliver();
    REQUIRE(d3.status == DeliveryStatus::Delivered);
    CHECK(d3.via_decision);
    CHECK(d3.slots.at(0).event == ev("s", 2));
    // cycle 4: nobody had e_3, Empty decided; e_3 shows up afterwards
    eng.close_cycle(4);
    REQUIRE(eng.try_deliver().status == DeliveryStatus::AwaitingConsensus);
    eng.on_event_received(ev("s", 3));
    eng.record_decision(4, {Event::empty(s, 3)});
    auto d4 = eng.try_deliver();
    REQUIRE(d4.status == DeliveryStatus::Delivered);
    CHECK(d4.slots.at(0).event.is_empty());
    CHECK(eng.senders().find(s)->max_seq_delivered == 2);
    // the real e_3 is still deliverable in cycle 5 alongside e_4
    eng.on_event_received(ev("s", 4));
    eng.close_cycle(5);
    auto d5 = eng.try_deliver();
    REQUIRE(d5.status == DeliveryStatus::Delivered);
    REQUIRE(d5.slots.size() == 2);
    CHECK(d5.slots[0].event == ev("s", 3));
    CHECK(d5.slots[1].event == ev("s", 4));
    CHECK(eng.senders().find(s)->max_seq_delivered == 4);
}

TEST_CASE("mismatched decision is rejected") {
    DeliveryEngine eng(WindowPolicy::Dynamic, DeliveryMode::Fast);
    eng.senders().add(rec("s", 1));
    eng.close_cycle(1);
    eng.record_decision(1, {ev("s", 5)});
    CHECK_THROWS_AS(eng.try_deliver(), std::logic_error);
}

TEST_CASE("always-consensus mode never fast-delivers") {
    DeliveryEngine eng(WindowPolicy::Discard, DeliveryMode::AlwaysConsensus);
    eng.senders().add(rec("s", 1));
    eng.on_event_received(ev("s", 0));
    eng.close_cycle(1);
    auto out = eng.try_deliver();
    CHECK(out.status == DeliveryStatus::AwaitingConsensus);
    std::vector<Event> held;
    CHECK(eng.holds_all(1, out.windows, &held));
    eng.record_decision(1, held);
    CHECK(eng.try_deliver().status == DeliveryStatus::Delivered);
}

TEST_CASE("proposal includes events already delivered to Q_d") {
    DeliveryEngine eng(WindowPolicy::Dynamic, DeliveryMode::Fast);
    eng.senders().add(rec("s", 1));
    eng.on_event_received(ev("s", 0));
    eng.close_cycle(1);
    auto out = eng.try_deliver();
    REQUIRE(out.status == DeliveryStatus::Delivered);
    auto prop = eng.proposal_for(1, out.windows);
    REQUIRE(prop.size() == 1);
    CHECK(prop[0] == ev("s", 0));
}
