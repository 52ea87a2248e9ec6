#include "vnet/membership/group.hpp"

#include <algorithm>
#include <stdexcept>

#include "vnet/core/codec.hpp"

namespace vnet::membership {

ReplicaId select_leader(const std::set<ReplicaId>& candidates, const Ages& ages) {
    if (candidates.empty()) throw std::invalid_argument("select_leader: no live candidates");
    auto age_of = [&](ReplicaId r) {
        auto it = ages.find(r);
        return it == ages.end() ? std::int64_t{0} : it->second;
    };
    ReplicaId best = *candidates.begin();
    for (const auto& r : candidates) {
        const auto a = age_of(r), b = age_of(best);
        if (a < b || (a == b && r < best)) best = r;
    }
    return best;
}

std::set<ReplicaId> GroupState::live_members() const {
    std::set<ReplicaId> out;
    std::set_intersection(members.begin(), members.end(), live.begin(), live.end(),
                          std::inserter(out, out.end()));
    return out;
}

bool GroupState::has_new_live() const {
    return std::any_of(live.begin(), live.end(), [&](ReplicaId r) { return !members.count(r); });
}

std::size_t longest(const std::vector<SyncPackage>& packages) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < packages.size(); ++i) {
        const auto& p = packages[i];
        if (!p.initialized) continue;
        for (std::size_t j = 0; j < i; ++j) {
            if (packages[j].initialized && !p.q_d.consistent_with(packages[j].q_d))
                throw std::logic_error("delivery queues are not prefixes of one another");
        }
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = packages[*best];
        const auto key = [](const SyncPackage& s) {
            return std::tuple(s.q_d.next_lambda(), s.cursor.next_cycle,
                              -s.q_d.pruned_upto().value_or(kNoneApplied));
        };
        if (key(p) > key(b)) best = i;
    }
    if (!best) throw std::logic_error("no initialized package to merge");
    return *best;
}

SyncPackage merge_states(const std::vector<SyncPackage>& packages, std::optional<InitState> init) {
    const std::size_t li = longest(packages);
    SyncPackage out;
    out.q_d = packages[li].q_d;
    out.cursor = packages[li].cursor;
    bool have_config = false;
    for (const auto& p : packages) {
        out.epoch = std::max(out.epoch, p.epoch);
        if (!p.initialized) {
            out.cid = std::max(out.cid, p.cid);
            continue;
        }
        for (const auto& [c, evs] : p.decided) {
            auto [it, fresh] = out.decided.emplace(c, evs);
            if (!fresh && it->second != evs) throw std::logic_error("conflicting decisions while merging");
        }
        if (!have_config || p.cid > out.cid) {
            out.config = p.config;
            have_config = true;
        }
        out.cid = std::max(out.cid, p.cid);
    }
    out.init = std::move(init);
    return out;
}

std::uint64_t sync_digest(const DeliveryQueue& q, const delivery::DecidedMap& e, const std::set<ReplicaId>& g) {
    ByteWriter w;
    w.i64(q.next_lambda());
    w.i64(q.pruned_upto().value_or(kNoneApplied));
    for (const auto& s : q.slots()) encode(w, s);
    for (const auto& [c, evs] : e) {
        w.i64(c);
        for (const auto& ev : evs) encode(w, ev);
    }
    for (const auto& r : g) w.u32(r.value);
    return fnv1a(kFnvOffset, w.data());
}

std::size_t encoded_size(const SyncPackage& p) {
    ByteWriter w;
    encode(w, p.q_d);
    for (const auto& [c, evs] : p.decided) {
        w.i64(c);
        for (const auto& ev : evs) encode(w, ev);
    }
    std::size_t n = w.size() + 16 + 4 * p.config.size();
    n += 64 * p.cursor.senders.size();
    if (p.init) n += 64 * p.init->cursor.senders.size() + 16 * p.init->ages.size() + 32;
    return n;
}

}  // namespace vnet::membership
