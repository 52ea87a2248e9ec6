#pragma once

#include <map>
#include <optional>
#include <set>

#include "vnet/core/delivery_queue.hpp"
#include "vnet/core/types.hpp"

namespace vnet::gc {

// A: last lambda_c reported by each member.
class GossipState {
public:
    // Returns false when the report does not raise the stored value
    // (or is the none-applied sentinel).
    bool record(ReplicaId from, Lambda lambda_c);

    // Keeps only entries of `members`.
    void retain(const std::set<ReplicaId>& members);

    // Min over members once all of them reported.
    std::optional<Lambda> common_latest(const std::set<ReplicaId>& members) const;

    const std::map<ReplicaId, Lambda>& acks() const { return acks_; }
    std::optional<Lambda> cle() const { return cle_; }
    void set_cle(Lambda l) { cle_ = l; }

private:
    std::map<ReplicaId, Lambda> acks_;
    std::optional<Lambda> cle_;
};

// If cle is the last slot, steps back over trailing Empty slots. Returns
// kNoneApplied when nothing is left to prune.
Lambda step_back_trailing_empty(const DeliveryQueue& q, Lambda cle);

struct PruneResult {
    Lambda upto = kNoneApplied;
    std::size_t removed = 0;
    Cycle last_cycle = 0;  // cycle of the last removed slot
};

// Handles one GC_LAMBDA report; prunes Q_d when the watermark moves.
std::optional<PruneResult> on_lambda(GossipState& st, DeliveryQueue& q, ReplicaId from, Lambda lambda_c,
                                     const std::set<ReplicaId>& members);

}  // namespace vnet::gc
