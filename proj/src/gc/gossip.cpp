#include "vnet/gc/gossip.hpp"

#include <algorithm>
#include <limits>

namespace vnet::gc {

bool GossipState::record(ReplicaId from, Lambda lambda_c) {
    if (lambda_c == kNoneApplied) return false;
    auto it = acks_.find(from);
    if (it != acks_.end() && lambda_c <= it->second) return false;
    acks_[from] = lambda_c;
    return true;
}

void GossipState::retain(const std::set<ReplicaId>& members) {
    for (auto it = acks_.begin(); it != acks_.end();) {
        if (members.count(it->first))
            ++it;
        else
            it = acks_.erase(it);
    }
}

std::optional<Lambda> GossipState::common_latest(const std::set<ReplicaId>& members) const {
    if (members.empty()) return std::nullopt;
    Lambda m = std::numeric_limits<Lambda>::max();
    for (const auto& r : members) {
        auto it = acks_.find(r);
        if (it == acks_.end()) return std::nullopt;
        m = std::min(m, it->second);
    }
    return m;
}

Lambda step_back_trailing_empty(const DeliveryQueue& q, Lambda cle) {
    const auto last = q.last_lambda();
    if (!last || cle != *last) return cle;
    while (cle > kNoneApplied) {
        const DeliverySlot* s = q.find(cle);
        if (!s || !s->event.is_empty()) break;
        --cle;
    }
    return cle;
}

std::optional<PruneResult> on_lambda(GossipState& st, DeliveryQueue& q, ReplicaId from, Lambda lambda_c,
                                     const std::set<ReplicaId>& members) {
    if (!members.count(from)) return std::nullopt;
    if (!st.record(from, lambda_c)) return std::nullopt;
    auto cle = st.common_latest(members);
    if (!cle) return std::nullopt;
    st.set_cle(*cle);
    const Lambda upto = step_back_trailing_empty(q, *cle);
    if (upto == kNoneApplied || q.empty() || q.slots().front().lambda > upto) return std::nullopt;
    PruneResult res;
    res.upto = upto;
    res.last_cycle = q.find(upto)->cycle;
    res.removed = q.prune_through(upto);
    return res;
}

}  // namespace vnet::gc
