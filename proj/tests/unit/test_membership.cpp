#include <stdexcept>

#include "doctest.h"
#include "vnet/membership/group.hpp"

using namespace vnet;
using namespace vnet::membership;

namespace {

const ReplicaId a{1}, b{2}, c{3}, d{4}, e{5};

SyncPackage pkg_with(int slots, std::int64_t epoch = 1, std::int64_t cid = 1) {
    SyncPackage p;
    for (int i = 0; i < slots; ++i) p.q_d.append(i + 1, 0, Event::operation(SenderId{"s", 0}, i, "x"));
    p.cursor.next_cycle = slots + 1;
    p.epoch = epoch;
    p.cid = cid;
    p.config = {a, b, c};
    return p;
}

}  // namespace

TEST_CASE("select_leader picks the youngest, ties to the smaller id") {
    CHECK(select_leader({a, b, c}, {{a, 3}, {b, 1}, {c, 2}}) == b);
    CHECK(select_leader({a, b}, {{a, 1}, {b, 1}}) == a);
    CHECK(select_leader({c}, {}) == c);
    CHECK_THROWS_AS(select_leader({}, {}), std::invalid_argument);
}

TEST_CASE("GroupState sets") {
    GroupState g;
    g.members = {a, b, c};
    g.live = {b, c, d};
    CHECK(g.live_members() == std::set<ReplicaId>{b, c});
    CHECK(g.has_new_live());
    g.live = {b, c};
    CHECK_FALSE(g.has_new_live());
}

TEST_CASE("Longest picks the 12-slot queue of 10/10/12") {
    std::vector<SyncPackage> ps{pkg_with(10), pkg_with(10), pkg_with(12)};
    CHECK(longest(ps) == 2);
    auto m = merge_states(ps, std::nullopt);
    CHECK(m.q_d.next_lambda() == 12);
    CHECK(m.cursor.next_cycle == 13);
}

TEST_CASE("Latest epoch and config") {
    std::vector<SyncPackage> ps{pkg_with(3, 4, 2), pkg_with(3, 4, 2), pkg_with(3, 5, 3)};
    ps[2].config = {a, b, c, d};
    auto m = merge_states(ps, std::nullopt);
    CHECK(m.epoch == 5);
    CHECK(m.epoch + 1 == 6);  // loaders install Latest + 1
    CHECK(m.cid == 3);
    CHECK(m.config == std::set<ReplicaId>{a, b, c, d});
}

TEST_CASE("merge is the identity on identical packages and unions decisions") {
    auto p = pkg_with(5);
    p.decided[5] = {Event::operation(SenderId{"s", 0}, 4, "x")};
    auto m = merge_states({p, p, p}, std::nullopt);
    CHECK(m.q_d == p.q_d);
    CHECK(m.decided == p.decided);

    auto q = p;
    q.decided[6] = {Event::empty(SenderId{"s", 0}, 5)};
    auto u = merge_states({p, q}, std::nullopt);
    CHECK(u.decided.size() == 2);
}

TEST_CASE("prefix property is asserted") {
    auto p = pkg_with(12);
    auto q = pkg_with(10);
    CHECK_NOTHROW(merge_states({p, q}, std::nullopt));
    // pairwise prefix oracle
    CHECK(p.q_d.consistent_with(q.q_d));

    SyncPackage r;
    for (int i = 0; i < 10; ++i) r.q_d.append(i + 1, 0, Event::operation(SenderId{"s", 0}, i, i == 7 ? "y" : "x"));
    CHECK_FALSE(p.q_d.consistent_with(r.q_d));
    CHECK_THROWS_AS(merge_states({p, r}, std::nullopt), std::logic_error);
}

TEST_CASE("uninitialized packages only contribute counters") {
    auto p = pkg_with(4, 2, 3);
    SyncPackage fresh;
    fresh.initialized = false;
    fresh.cid = 4;
    auto m = merge_states({fresh, p}, std::nullopt);
    CHECK(m.cid == 4);
    CHECK(m.q_d == p.q_d);
    CHECK_THROWS_AS(merge_states({fresh}, std::nullopt), std::logic_error);
}

TEST_CASE("Longest tie keeps the least pruned queue") {
    auto p = pkg_with(10);
    auto q = pkg_with(10);
    q.q_d.prune_through(4);
    CHECK(longest({q, p}) == 1);
}

TEST_CASE("partitioned leaders: one survives once the minority is removed") {
    const Ages ages{{a, 2}, {b, 1}, {c, 3}, {d, 0}, {e, 4}};
    GroupState g;
    g.members = {a, b, c, d, e};
    g.live = {a, b, c};
    const auto p_leader = select_leader(g.live_members(), ages);
    g.live = {d, e};
    const auto q_leader = select_leader(g.live_members(), ages);
    CHECK(p_leader != q_leader);
    // the Rendezvous keeps the majority side
    g.live = {a, b, c};
    CHECK(select_leader(g.live_members(), ages) == p_leader);
}

TEST_CASE("sync digest is insensitive to the applied marker") {
    auto p = pkg_with(3);
    auto q = p;
    q.q_d.mark_applied(2);
    CHECK(sync_digest(p.q_d, p.decided, p.config) == sync_digest(q.q_d, q.decided, q.config));
    q.decided[2] = {};
    CHECK(sync_digest(p.q_d, p.decided, p.config) != sync_digest(q.q_d, q.decided, q.config));
}
