#include <algorithm>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "vnet/core/app_state.hpp"
#include "vnet/core/codec.hpp"
#include "vnet/core/delivery_queue.hpp"

using namespace vnet;

namespace {
Event op(const char* s, SeqNo seq) { return Event::operation(SenderId{s, 0}, seq, "x"); }
}  // namespace

TEST_CASE("order_key is lexicographic over (cycle, gamma)") {
    DeliverySlot a{3, 0, op("a", 0), 0}, b{3, 1, op("a", 1), 1}, c{3, 9, op("a", 2), 2}, d{4, 0, op("a", 3), 3};
    CHECK(order_key(a) < order_key(b));
    CHECK(order_key(c) < order_key(d));
    std::vector<OrderKey> keys{{4, 1}, {3, 2}, {3, 0}};
    std::sort(keys.begin(), keys.end());
    CHECK(keys == std::vector<OrderKey>{{3, 0}, {3, 2}, {4, 1}});
}

TEST_CASE("lambda assignment and pruning") {
    DeliveryQueue q;
    CHECK(q.last_applied() == kNoneApplied);
    CHECK(q.append(1, 0, op("a", 0)) == 0);
    CHECK(q.append(1, 1, op("b", 0)) == 1);
    CHECK(q.append(2, 0, op("a", 1)) == 2);
    CHECK(q.lambda_of(1, 0) == 0);
    CHECK(q.lambda_of(2, 0) == 2);
    CHECK_FALSE(q.lambda_of(2, 1).has_value());

    q.prune_through(1);
    CHECK(q.size() == 1);
    CHECK(q.lambda_of(2, 0) == 2);
    CHECK(q.pruned_upto() == 1);
    CHECK(q.append(3, 0, op("a", 2)) == 3);

    CHECK_THROWS_AS(q.append(3, 0, op("a", 3)), std::logic_error);
    CHECK_THROWS_AS(q.append(4, 0, Event::bottom(SenderId{"a", 0}, 4)), std::logic_error);
}

TEST_CASE("fully pruned queue still rejects older keys") {
    DeliveryQueue q;
    q.append(5, 0, op("a", 0));
    q.prune_through(0);
    CHECK(q.empty());
    CHECK_THROWS_AS(q.append(4, 0, op("a", 1)), std::logic_error);
    CHECK(q.append(6, 0, op("a", 1)) == 1);
}

TEST_CASE("last_applied counts applied slots only") {
    DeliveryQueue q;
    for (int i = 0; i < 6; ++i) q.append(i + 1, 0, op("a", i));
    for (Lambda l = 0; l <= 4; ++l) q.mark_applied(l);
    CHECK(q.last_applied() == 4);
    CHECK_THROWS_AS(q.mark_applied(3), std::logic_error);
}

TEST_CASE("lambda equals insertion index under random pruning (counter oracle)") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        DeliveryQueue q;
        std::vector<std::pair<OrderKey, Lambda>> oracle;
        Lambda counter = 0;
        Cycle c = 1;
        for (int step = 0; step < 200; ++step) {
            const int width = 1 + static_cast<int>(rng() % 4);
            for (int g = 0; g < width; ++g) {
                const Lambda l = q.append(c, g * 2, op("s", step * 10 + g));
                CHECK(l == counter);
                oracle.push_back({{c, g * 2}, counter++});
            }
            ++c;
            if (rng() % 5 == 0 && !q.empty()) {
                const Lambda upto = q.slots().front().lambda + static_cast<Lambda>(rng() % q.size());
                q.prune_through(upto);
            }
        }
        for (const auto& [k, l] : oracle) {
            auto got = q.lambda_of(k.first, k.second);
            if (q.pruned_upto() && l <= *q.pruned_upto())
                CHECK_FALSE(got.has_value());
            else
                CHECK(got == l);
        }
        for (std::size_t i = 1; i < q.slots().size(); ++i) CHECK(q.slots()[i].lambda == q.slots()[i - 1].lambda + 1);
    }
}

TEST_CASE("SenderId total order") {
    std::mt19937_64 rng(3);
    std::vector<SenderId> ids;
    for (int i = 0; i < 40; ++i)
        ids.push_back(SenderId{std::string(1, static_cast<char>('a' + rng() % 4)) + (rng() % 2 ? "\xff" : ""),
                               static_cast<std::int64_t>(rng() % 3)});
    for (const auto& a : ids)
        for (const auto& b : ids) {
            CHECK(((a < b) + (b < a) + (a == b)) == 1);
            for (const auto& c : ids)
                if (a < b && b < c) CHECK(a < c);
        }
    CHECK(SenderId{"k", 1000} != SenderId{"k", 2000});
    // bytes compare unsigned: 0xff sorts after ASCII
    CHECK(SenderId{"a", 0} < SenderId{"\xff", 0});
}

TEST_CASE("codec round trip and little-endian layout") {
    ByteWriter w;
    w.u32(0x01020304);
    CHECK(w.data() == std::string("\x04\x03\x02\x01", 4));

    DeliveryQueue q;
    q.append(2, 0, op("a", 0));
    q.append(2, 3, Event::empty(SenderId{"b", 9}, 2));
    q.append(3, 1, op("c", 7));
    q.mark_applied(1);
    q.prune_through(0);
    auto bytes = to_bytes(q);
    ByteReader r(bytes);
    auto back = decode_queue(r);
    r.expect_done();
    CHECK(back == q);

    ByteReader bad(std::string_view(bytes).substr(0, bytes.size() - 2));
    CHECK_THROWS_AS(decode_queue(bad), DecodeError);
}

TEST_CASE("app state digest ignores Empty and depends on order") {
    DeliverySlot s0{1, 0, op("a", 0), 0};
    DeliverySlot s1{1, 1, Event::empty(SenderId{"b", 0}, 0), 1};
    DeliverySlot s2{2, 0, op("a", 1), 2};
    AppState x, y;
    x.apply(s0);
    const auto after0 = x.digest();
    x.apply(s1);
    CHECK(x.digest() == after0);
    x.apply(s2);
    y.apply(s0);
    y.apply(s1);
    y.apply(s2);
    CHECK(x == y);
    AppState z;
    CHECK_THROWS_AS(z.apply(s2), std::logic_error);
}
