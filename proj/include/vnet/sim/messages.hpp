#pragma once

#include <memory>
#include <set>
#include <variant>
#include <vector>

#include "vnet/core/types.hpp"
#include "vnet/delivery/senders.hpp"
#include "vnet/membership/group.hpp"

namespace vnet::sim {

// Network address. Replicas use their ReplicaId value, clients start at
// kClientBase, the Rendezvous is 0.
using NodeId = std::uint32_t;
inline constexpr NodeId kRendezvous = 0;
inline constexpr NodeId kClientBase = 1u << 20;

inline bool is_client(NodeId n) { return n >= kClientBase; }
inline bool is_replica(NodeId n) { return n != kRendezvous && n < kClientBase; }

// Client <-> replica
struct EventMsg {
    Event event;
};
struct UpdateMsg {
    Lambda lambda = 0;
    SenderId sender;
    SeqNo seq = 0;
    std::uint64_t digest = 0;
};
struct HandshakeMsg {
    SenderId id;
    TimeMs t_start = 0;
    std::vector<ReplicaId> replicas;
};
struct ConfigNoticeMsg {
    std::int64_t cid = 0;
    std::vector<ReplicaId> replicas;
};

// Consensus, all guarded by (epoch, cid)
struct QueryMsg {
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
    Cycle cycle = 0;
    delivery::CycleWindows windows;
    bool to_leader = true;  // requester -> leader, else leader -> members
};
struct QueryResultMsg {
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
    Cycle cycle = 0;
    std::vector<Event> entries;
};
struct DecisionMsg {
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
    Cycle cycle = 0;
    std::vector<Event> events;
    bool reply = false;  // QUERY_REPLY rather than an instance decision
};
struct GcLambdaMsg {
    Lambda lambda_c = kNoneApplied;
};

// Leader election and reconfiguration
struct LeQueryMsg {
    std::uint64_t round = 0;
};
struct LeStateMsg {
    std::uint64_t round = 0;
    membership::SyncPackage pkg;
};
struct LoadLeaderMsg {
    std::uint64_t round = 0;
    membership::SyncPackage pkg;
};
struct NackMsg {
    std::uint64_t round = 0;
};
struct AckMsg {
    std::uint64_t round = 0;
};
struct GrQueryMsg {
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
};
struct GeStateMsg {
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
    membership::SyncPackage pkg;
};
struct LoadConfigMsg {
    std::int64_t epoch = 0;
    std::int64_t cid = 0;
    membership::SyncPackage pkg;
};

// Rendezvous
struct HeartbeatMsg {};
struct MemberStateMsg {
    std::uint64_t version = 0;
    std::set<ReplicaId> live;
};

// Primary-backup baselines
struct PbForwardMsg {
    std::uint64_t batch = 0;
    std::vector<Event> events;
};
struct PbAckMsg {
    std::uint64_t batch = 0;
};
struct PbStateMsg {
    std::uint64_t digest = 0;
    Lambda applied = kNoneApplied;
    std::vector<EventKey> applied_keys;
};
struct PrimaryNoticeMsg {
    ReplicaId primary;
};

using Body = std::variant<EventMsg, UpdateMsg, HandshakeMsg, ConfigNoticeMsg, QueryMsg, QueryResultMsg, DecisionMsg,
                          GcLambdaMsg, LeQueryMsg, LeStateMsg, LoadLeaderMsg, NackMsg, AckMsg, GrQueryMsg, GeStateMsg,
                          LoadConfigMsg, HeartbeatMsg, MemberStateMsg, PbForwardMsg, PbAckMsg, PbStateMsg,
                          PrimaryNoticeMsg>;

struct Message {
    Body body;
    std::size_t size_bytes = 0;  // extra payload size for transmission delay
};

using MsgPtr = std::shared_ptr<const Message>;

template <class T>
MsgPtr make_msg(T body, std::size_t size_bytes = 0) {
    return std::make_shared<const Message>(Message{Body{std::move(body)}, size_bytes});
}

}  // namespace vnet::sim
