#include <stdexcept>

#include "doctest.h"
#include "vnet/gc/gossip.hpp"

using namespace vnet;
using namespace vnet::gc;

namespace {

DeliveryQueue queue_of(int n) {
    DeliveryQueue q;
    for (int i = 0; i < n; ++i) q.append(i + 1, 0, Event::operation(SenderId{"s", 0}, i, "x"));
    return q;
}

const ReplicaId r1{1}, r2{2}, r3{3};

}  // namespace

TEST_CASE("watermark is the minimum once every member reported") {
    auto q = queue_of(20);
    GossipState st;
    const std::set<ReplicaId> g{r1, r2, r3};
    CHECK_FALSE(on_lambda(st, q, r1, 12, g).has_value());
    CHECK_FALSE(on_lambda(st, q, r2, 9, g).has_value());  // 2 of 3
    CHECK(q.size() == 20);
    auto res = on_lambda(st, q, r3, 15, g);
    REQUIRE(res.has_value());
    CHECK(res->upto == 9);
    CHECK(res->removed == 10);
    CHECK(q.slots().front().lambda == 10);
    CHECK(st.cle() == 9);
}

TEST_CASE("stale and sentinel reports are ignored") {
    GossipState st;
    CHECK(st.record(r1, 5));
    CHECK_FALSE(st.record(r1, 5));
    CHECK_FALSE(st.record(r1, 3));
    CHECK(st.acks().at(r1) == 5);
    CHECK_FALSE(st.record(r2, kNoneApplied));
    auto q = queue_of(5);
    CHECK_FALSE(on_lambda(st, q, ReplicaId{9}, 4, {r1}).has_value());  // non-member
}

TEST_CASE("no pruning until every replica applied something") {
    auto q = queue_of(5);
    GossipState st;
    const std::set<ReplicaId> g{r1, r2};
    on_lambda(st, q, r1, 4, g);
    CHECK_FALSE(on_lambda(st, q, r2, kNoneApplied, g).has_value());
    CHECK(q.size() == 5);
}

TEST_CASE("trailing Empty slots are kept") {
    DeliveryQueue q;
    const SenderId s{"s", 0};
    q.append(1, 0, Event::operation(s, 0, "x"));
    q.append(2, 0, Event::operation(s, 1, "x"));
    q.append(3, 0, Event::empty(s, 2));
    q.append(4, 0, Event::empty(s, 2));
    CHECK(step_back_trailing_empty(q, 3) == 1);
    CHECK(step_back_trailing_empty(q, 2) == 2);  // not the last slot: untouched
    GossipState st;
    auto res = on_lambda(st, q, r1, 3, {r1});
    REQUIRE(res.has_value());
    CHECK(res->upto == 1);
    REQUIRE(q.size() == 2);
    CHECK(q.slots().front().event.is_empty());
    // the retained rounds are still there for a re-run of cycles 3 and 4
    CHECK(q.lambda_of(3, 0) == 2);
    CHECK(q.lambda_of(4, 0) == 3);
}

TEST_CASE("membership change drops removed members and waits for added ones") {
    auto q = queue_of(30);
    GossipState st;
    on_lambda(st, q, r1, 10, {r1, r2});
    auto res = on_lambda(st, q, r2, 12, {r1, r2});
    REQUIRE(res.has_value());
    st.retain({r2, r3});
    CHECK(st.acks().count(r1) == 0);
    CHECK_FALSE(on_lambda(st, q, r2, 20, {r2, r3}).has_value());
    auto res2 = on_lambda(st, q, r3, 25, {r2, r3});
    REQUIRE(res2.has_value());
    CHECK(res2->upto == 20);
}
