#include <random>
#include <stdexcept>

#include "doctest.h"
#include "vnet/content/merkle.hpp"

using namespace vnet::content;

namespace {

// Brute-force descent oracle: counts comparisons by walking the full tree
// and charging a level only when its parent mismatched.
std::size_t oracle_count(const ContentTree& a, const ContentTree& b) {
    std::size_t n = 1;
    if (a.inventory_hash == b.inventory_hash) return n;
    for (std::size_t i = 0; i < a.objects.size(); ++i) {
        ++n;
        if (a.objects[i].hash == b.objects[i].hash) continue;
        for (std::size_t j = 0; j < a.objects[i].components.size(); ++j) {
            ++n;
            if (a.objects[i].components[j].hash == b.objects[i].components[j].hash) continue;
            n += a.objects[i].components[j].files.size();
        }
    }
    return n;
}

}  // namespace

TEST_CASE("sha256 provider known answer") {
    CHECK(to_hex(default_provider().hash("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("build_tree is deterministic and input-order independent") {
    auto inv = generate_corpus(4, 3, 3, 1);
    auto t1 = build_tree(inv);
    auto t2 = build_tree(inv);
    CHECK(t1.inventory_hash == t2.inventory_hash);
    auto shuffled = inv;
    std::reverse(shuffled.objects.begin(), shuffled.objects.end());
    std::reverse(shuffled.objects[0].components.begin(), shuffled.objects[0].components.end());
    CHECK(build_tree(shuffled).inventory_hash == t1.inventory_hash);
    CHECK(t1.inventory_id == default_provider().hash(inv.user_id));
    CHECK(t1.objects[0].components[0].files[0].file_id == default_provider().hash(inv.objects[0].components[0].files[0].bytes));
}

TEST_CASE("one flipped byte changes the root") {
    auto inv = generate_corpus(4, 3, 3, 2);
    auto before = build_tree(inv).inventory_hash;
    inv.objects[2].components[1].files[0].bytes[5] ^= 1;
    CHECK(build_tree(inv).inventory_hash != before);
}

TEST_CASE("empty inventory has a defined root") {
    Inventory inv;
    auto t = build_tree(inv);
    CHECK(t.inventory_hash == default_provider().hash(""));
    CHECK(verify(t, t).comparisons == 1);
}

TEST_CASE("verify: identical trees cost one comparison") {
    auto t = build_tree(generate_corpus(2, 2, 2, 3));
    auto r = verify(t, t);
    CHECK(r.changed.empty());
    CHECK(r.comparisons == 1);
}

TEST_CASE("verify: one change in a 2x2x2 tree costs 7 comparisons") {
    auto inv = generate_corpus(2, 2, 2, 4);
    auto local = build_tree(inv);
    std::mt19937_64 rng(1);
    auto changed = mutate_files(inv, 1, rng);
    auto remote = build_tree(inv);
    auto r = verify(local, remote);
    CHECK(r.comparisons == 7);
    CHECK(r.changed == std::set<std::string>(changed.begin(), changed.end()));
    auto f = flat_verify(local, remote);
    CHECK(f.comparisons == 8);
    CHECK(f.changed == r.changed);
}

TEST_CASE("single change path cost closed form on the 200-object corpus") {
    auto inv = generate_corpus(200, 5, 5, 5);
    auto local = build_tree(inv);
    CHECK(local.file_count() == 5000);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 5; ++k) {
        auto copy = inv;
        mutate_files(copy, 1, rng);
        auto remote = build_tree(copy);
        auto r = verify(local, remote);
        CHECK(r.comparisons == 1 + 200 + 5 + 5);
        CHECK(r.comparisons == oracle_count(local, remote));
        CHECK(flat_verify(local, remote).comparisons == 5000);
    }
}

TEST_CASE("hierarchical and flat verifiers agree on random corpora") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        auto inv = generate_corpus(1 + rng() % 6, 1 + rng() % 4, 1 + rng() % 4, rng());
        auto local = build_tree(inv);
        std::size_t total = local.file_count();
        mutate_files(inv, rng() % (total + 1), rng);
        auto remote = build_tree(inv);
        auto h = verify(local, remote);
        auto f = flat_verify(local, remote);
        CHECK(h.changed == f.changed);
        CHECK(h.comparisons == oracle_count(local, remote));
    }
}

TEST_CASE("structural mismatch lists the whole subtree") {
    auto inv = generate_corpus(3, 2, 2, 6);
    auto local = build_tree(inv);
    inv.objects.pop_back();
    auto remote = build_tree(inv);
    auto r = verify(local, remote);
    CHECK(r.changed.size() == 4);
    CHECK(flat_verify(local, remote).changed == r.changed);
}

TEST_CASE("comparison count grows with changes in fresh branches") {
    auto inv = generate_corpus(10, 3, 3, 7);
    auto local = build_tree(inv);
    std::size_t prev = 1;
    for (std::size_t o = 0; o < 10; ++o) {
        inv.objects[o].components[0].files[0].bytes[0] ^= 1;
        auto r = verify(local, build_tree(inv));
        CHECK(r.comparisons >= prev);
        prev = r.comparisons;
    }
}

TEST_CASE("resolve_master") {
    CHECK(resolve_master(48, {10, 50, 90}) == 50);
    CHECK(resolve_master(90, {10, 50, 90}) == 90);
    CHECK(resolve_master(50, {60, 40}) == 40);
    CHECK_THROWS_AS(resolve_master(1, {}), std::invalid_argument);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint64_t> nodes;
        for (int k = 0; k < 6; ++k) nodes.push_back(rng() % 100);
        const std::uint64_t f = rng() % 100;
        std::uint64_t best = nodes[0];
        for (auto n : nodes) {
            auto dn = n > f ? n - f : f - n, db = best > f ? best - f : f - best;
            if (dn < db || (dn == db && n < best)) best = n;
        }
        CHECK(resolve_master(f, nodes) == best);
    }
    CHECK(id_prefix(Digest{0, 0, 0, 0, 0, 0, 1, 2}) == 258);
}
