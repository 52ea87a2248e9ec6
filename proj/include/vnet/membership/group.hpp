#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "vnet/core/app_state.hpp"
#include "vnet/core/delivery_queue.hpp"
#include "vnet/delivery/engine.hpp"

namespace vnet::membership {

using Ages = std::map<ReplicaId, std::int64_t>;

// Youngest member, ties to the smallest id. Members missing from `ages`
// count as age 0. Throws std::invalid_argument on an empty set.
ReplicaId select_leader(const std::set<ReplicaId>& candidates, const Ages& ages);

struct GroupState {
    std::set<ReplicaId> members;           // G
    std::set<ReplicaId> live;              // R
    std::set<ReplicaId> reconfig_target;   // G_T
    std::optional<ReplicaId> leader;       // r_L
    std::optional<ReplicaId> candidate;    // r_c
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
    Ages ages;
    bool le = false;
    bool gr = false;
    bool new_replica = false;
    int min_size = 5;
    int spare_count = 0;

    std::set<ReplicaId> live_members() const;  // G ∩ R
    bool has_new_live() const;                 // R \ G non-empty
};

struct InitState {
    TimeMs t0 = 0;
    delivery::DeliveryCursor cursor;  // includes per-sender t_start and S
    Lambda applied = kNoneApplied;
    std::uint64_t app_digest = 0;
    Ages ages;
    bool operator==(const InitState&) const = default;
};

struct SyncPackage {
    DeliveryQueue q_d;
    delivery::DeliveryCursor cursor;
    delivery::DecidedMap decided;
    std::int64_t cid = 0;
    std::set<ReplicaId> config;
    std::int64_t epoch = 0;
    bool initialized = true;
    std::optional<InitState> init;

    bool operator==(const SyncPackage&) const = default;
};

// Index of the package whose queue is chosen by Longest: most slots ever
// delivered, then furthest cursor, then least pruned. Throws
// std::logic_error when two queues disagree on a shared slot.
std::size_t longest(const std::vector<SyncPackage>& packages);

// (Q_d, cursor) of Longest, union of E, Latest (cid, G), max epoch.
// Uninitialized packages only contribute epoch/cid. `init` is attached as is.
SyncPackage merge_states(const std::vector<SyncPackage>& packages, std::optional<InitState> init);

// Digest over Q_d, E and G used by the state-synchrony observer.
std::uint64_t sync_digest(const DeliveryQueue& q, const delivery::DecidedMap& e, const std::set<ReplicaId>& g);

// Encoded size, for transmission delay modelling.
std::size_t encoded_size(const SyncPackage& p);

}  // namespace vnet::membership
