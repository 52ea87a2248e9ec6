#pragma once

#include <string>

#include "vnet/core/delivery_queue.hpp"
#include "vnet/delivery/senders.hpp"
#include "vnet/delivery/timing.hpp"

namespace vnet::interaction {

// Operation payload layout: one tag byte, then the argument.
enum class OpKind : std::uint8_t { Workload, Noop, AddNeighbor, RemoveNeighbor, Unknown };

struct ControlOp {
    OpKind kind = OpKind::Unknown;
    std::string subject;  // ordinal for workload ops, base id for ADD/RM
};

std::string workload_op(std::int64_t ordinal);
std::string noop_op();
std::string add_neighbor_op(const std::string& base_id);
std::string remove_neighbor_op(const std::string& base_id);
ControlOp parse_op(const std::string& bytes);

// Updates go out for everything except idle no-ops.
bool produces_update(const Event& e);

struct JoinPlan {
    TimeMs t_start = 0;
    TimeMs t_recv_first = 0;
    TimeMs t_send_first = 0;
    Cycle first_cycle = 0;
};

// t_start,k = max(t_recv,j(y), t_now) + lead_cycles * dt; first cycle from
// ceil((t_recv,k(1) - t_now) / dt) + c.
JoinPlan plan_join(TimeMs t_recv_notifier, TimeMs t_now, Cycle c, int lead_cycles,
                   const delivery::TimingParams& timing);

struct MembershipEffect {
    enum class Kind : std::uint8_t { None, Added, Removed, Duplicate, NotMember } kind = Kind::None;
    SenderId id;
    JoinPlan plan;
};

// Applies an ADD/RM operation delivered at cycle c (closing at t_now).
MembershipEffect apply_control(const DeliverySlot& slot, delivery::SenderSet& senders, TimeMs t_now,
                               int lead_cycles, const delivery::TimingParams& timing);

}  // namespace vnet::interaction
