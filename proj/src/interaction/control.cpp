#include "vnet/interaction/control.hpp"

#include <algorithm>
#include <cmath>

namespace vnet::interaction {

std::string workload_op(std::int64_t ordinal) { return "O" + std::to_string(ordinal); }
std::string noop_op() { return "N"; }
std::string add_neighbor_op(const std::string& base_id) { return "A" + base_id; }
std::string remove_neighbor_op(const std::string& base_id) { return "R" + base_id; }

ControlOp parse_op(const std::string& bytes) {
    if (bytes.empty()) return {};
    ControlOp op;
    op.subject = bytes.substr(1);
    switch (bytes[0]) {
        case 'O': op.kind = OpKind::Workload; break;
        case 'N': op.kind = OpKind::Noop; break;
        case 'A': op.kind = OpKind::AddNeighbor; break;
        case 'R': op.kind = OpKind::RemoveNeighbor; break;
        default: op.kind = OpKind::Unknown;
    }
    return op;
}

bool produces_update(const Event& e) {
    return e.is_operation() && parse_op(e.op).kind != OpKind::Noop;
}

JoinPlan plan_join(TimeMs t_recv_notifier, TimeMs t_now, Cycle c, int lead_cycles,
                   const delivery::TimingParams& timing) {
    JoinPlan p;
    p.t_start = std::max(t_recv_notifier, t_now) + lead_cycles * timing.delta_t;
    p.t_recv_first = p.t_start + timing.delta_t;
    p.t_send_first = p.t_start - timing.net_low;
    p.first_cycle = delivery::join_first_cycle(p.t_recv_first, t_now, c, timing.delta_t);
    return p;
}

MembershipEffect apply_control(const DeliverySlot& slot, delivery::SenderSet& senders, TimeMs t_now,
                               int lead_cycles, const delivery::TimingParams& timing) {
    MembershipEffect eff;
    if (!slot.event.is_operation()) return eff;
    const ControlOp op = parse_op(slot.event.op);
    if (op.kind == OpKind::AddNeighbor) {
        const delivery::SenderRecord* notifier = senders.find(slot.event.sender);
        if (!notifier) return eff;
        const auto existing = senders.find_base(op.subject);
        if (existing && !existing->last_cycle) {
            eff.kind = MembershipEffect::Kind::Duplicate;
            eff.id = existing->id;
            return eff;
        }
        const TimeMs t_recv_j = delivery::schedule(notifier->t_start, slot.event.seq + 1, timing).recv_deadline;
        eff.plan = plan_join(t_recv_j, t_now, slot.cycle, lead_cycles, timing);
        eff.id = SenderId{op.subject, static_cast<std::int64_t>(std::llround(eff.plan.t_start))};
        delivery::SenderRecord r;
        r.id = eff.id;
        r.t_start = eff.plan.t_start;
        r.first_cycle = eff.plan.first_cycle;
        eff.kind = senders.add(r) ? MembershipEffect::Kind::Added : MembershipEffect::Kind::Duplicate;
    } else if (op.kind == OpKind::RemoveNeighbor) {
        const auto* found = senders.find_base(op.subject);
        if (!found || found->last_cycle) {
            eff.kind = MembershipEffect::Kind::NotMember;
            return eff;
        }
        eff.id = found->id;
        senders.find(found->id)->last_cycle = slot.cycle;
        eff.kind = MembershipEffect::Kind::Removed;
    }
    return eff;
}

}  // namespace vnet::interaction
