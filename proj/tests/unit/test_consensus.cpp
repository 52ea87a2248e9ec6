#include <stdexcept>

#include "doctest.h"
#include "vnet/consensus/consensus.hpp"

using namespace vnet;
using namespace vnet::consensus;

namespace {

const SenderId S{"s", 0};

Event real(SeqNo j) { return Event::operation(S, j, "e" + std::to_string(j)); }

CycleWindows window(SeqNo lo, SeqNo hi) { return {delivery::SenderWindow{S, {lo, hi}}}; }

Proposal prop(std::uint32_t r, std::vector<Event> entries) { return Proposal{ReplicaId{r}, 7, std::move(entries)}; }

}  // namespace

TEST_CASE("decide: any real proposal wins, otherwise Empty") {
    const auto w = window(3, 3);
    auto d = decide(w, {prop(1, {Event::bottom(S, 3)}), prop(2, {real(3)}), prop(3, {Event::bottom(S, 3)})});
    REQUIRE(d.size() == 1);
    CHECK(d[0] == real(3));

    auto e = decide(w, {prop(1, {Event::bottom(S, 3)}), prop(2, {Event::bottom(S, 3)}), prop(3, {Event::bottom(S, 3)})});
    CHECK(e[0] == Event::empty(S, 3));
}

TEST_CASE("decide rejects entries outside the windows and conflicting real events") {
    CHECK_THROWS_AS(decide(window(3, 3), {prop(1, {real(4)})}), std::logic_error);
    auto other = real(3);
    other.op = "different";
    CHECK_THROWS_AS(decide(window(3, 3), {prop(1, {real(3)}), prop(2, {other})}), std::logic_error);
}

TEST_CASE("decide brute force over every knowledge pattern of 3 replicas x 3 seqs") {
    const auto w = window(3, 5);
    for (unsigned mask = 0; mask < (1u << 9); ++mask) {
        std::vector<Proposal> ps;
        for (std::uint32_t r = 0; r < 3; ++r) {
            std::vector<Event> entries;
            for (SeqNo j = 3; j <= 5; ++j) {
                const bool knows = mask & (1u << (r * 3 + static_cast<unsigned>(j - 3)));
                entries.push_back(knows ? real(j) : Event::bottom(S, j));
            }
            ps.push_back(prop(r, entries));
        }
        const auto d = decide(w, ps);
        REQUIRE(d.size() == 3);
        for (SeqNo j = 3; j <= 5; ++j) {
            bool someone = false;
            for (unsigned r = 0; r < 3; ++r) someone |= (mask >> (r * 3 + static_cast<unsigned>(j - 3))) & 1u;
            const Event& got = d[static_cast<std::size_t>(j - 3)];
            CHECK(got.seq == j);
            CHECK(got.is_operation() == someone);
            CHECK(got.is_empty() == !someone);
        }
    }
}

TEST_CASE("ledger pending, in-flight and decision") {
    ConsensusLedger led;
    CHECK(led.enqueue(7, window(3, 3)));
    CHECK_FALSE(led.enqueue(7, window(3, 3)));
    CHECK(led.enqueue(8, window(4, 4)));
    auto started = led.start_pending();
    CHECK(started == std::vector<Cycle>{7, 8});
    CHECK(led.is_in_flight(7));
    CHECK_FALSE(led.enqueue(7, window(3, 3)));  // Z guard

    const std::set<ReplicaId> members{ReplicaId{1}, ReplicaId{2}};
    CHECK(led.add_proposal(prop(1, {Event::bottom(S, 3)})));
    CHECK_FALSE(led.try_decide(7, members).has_value());
    CHECK(led.add_proposal(prop(2, {real(3)})));
    auto d = led.try_decide(7, members);
    REQUIRE(d.has_value());
    CHECK((*d)[0] == real(3));
    CHECK_FALSE(led.is_in_flight(7));
    CHECK(led.is_in_flight(8));
    CHECK_FALSE(led.add_proposal(prop(1, {real(3)})));  // terminated instance

    // a member dropping out of R lets the instance finish with the rest
    Proposal p8{ReplicaId{1}, 8, {real(4)}};
    led.add_proposal(p8);
    CHECK(led.try_decide(8, {ReplicaId{1}}).has_value());
}
