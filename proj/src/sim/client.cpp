#include "vnet/sim/client.hpp"

#include <algorithm>

#include "vnet/delivery/timing.hpp"
#include "vnet/interaction/control.hpp"

namespace vnet::sim {

ClientActor::ClientActor(World& w, NodeId node, std::string base_id, int quota, double clock_offset_ms)
    : Actor(w, node), base_(std::move(base_id)), quota_(quota), offset_(clock_offset_ms) {}

void ClientActor::start(SenderId id, TimeMs t_start, const std::vector<ReplicaId>& replicas) {
    if (started_ && id == id_) return;
    // A rejoin under a new id restarts the sequence.
    started_ = true;
    ++gen_;
    next_n_ = 1;
    id_ = std::move(id);
    t_start_ = t_start;
    targets_.clear();
    for (const auto& r : replicas) targets_.push_back(r.value);
    schedule_next();
}

void ClientActor::schedule_next() {
    const auto sched = delivery::schedule(t_start_, next_n_, w_.scenario().timing);
    // The local clock reads true time + offset.
    const TimeMs t = std::max(w_.now(), sched.send - offset_);
    if (t > w_.end_time()) return;
    const std::int64_t n = next_n_++;
    w_.timer(node_, t, [this, n, g = gen_] {
        if (g == gen_) send_next(n);
    });
}

void ClientActor::send_next(std::int64_t n) {
    const SeqNo seq = n - 1;
    std::string op;
    if (!control_.empty()) {
        op = std::move(control_.front());
        control_.pop_front();
    } else if (sent_workload_ < quota_) {
        op = interaction::workload_op(sent_workload_++);
        pending_[seq] = w_.now();
        ++w_.metrics().events_sent;
    } else {
        op = interaction::noop_op();
    }
    auto msg = make_msg(EventMsg{Event::operation(id_, seq, std::move(op))});
    for (const NodeId t : targets_) w_.send(node_, t, msg);
    schedule_next();
}

void ClientActor::on_message(NodeId, const Message& m) {
    if (const auto* u = std::get_if<UpdateMsg>(&m.body)) {
        if (u->sender != id_) return;
        auto it = pending_.find(u->seq);
        if (it == pending_.end()) return;
        const double lat = w_.now() - it->second;
        pending_.erase(it);
        if (lat <= w_.scenario().update_timeout_ms) {
            w_.metrics().latencies.push_back(lat);
            ++w_.metrics().updates_delivered;
        }
    } else if (const auto* h = std::get_if<HandshakeMsg>(&m.body)) {
        start(h->id, h->t_start, h->replicas);
    } else if (const auto* c = std::get_if<ConfigNoticeMsg>(&m.body)) {
        if (c->cid <= cid_) return;
        cid_ = c->cid;
        targets_.clear();
        for (const auto& r : c->replicas) targets_.push_back(r.value);
    } else if (const auto* p = std::get_if<PrimaryNoticeMsg>(&m.body)) {
        targets_ = {p->primary.value};
    }
}

}  // namespace vnet::sim
