#include "vnet/sim/world.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "vnet/core/app_state.hpp"
#include "vnet/interaction/control.hpp"
#include "vnet/sim/client.hpp"
#include "vnet/sim/pb.hpp"
#include "vnet/sim/replica.hpp"

namespace vnet::sim {

// --- observer ------------------------------------------------------------

namespace {

std::uint64_t slot_hash(const DeliverySlot& s) {
    std::uint64_t h = fnv1a_u64(kFnvOffset, static_cast<std::uint64_t>(s.cycle));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(s.gamma));
    h = fnv1a(h, s.event.sender.base_id);
    h = fnv1a_u64(h, static_cast<std::uint64_t>(s.event.sender.join_timestamp));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(s.event.seq));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(s.event.kind));
    return fnv1a(h, s.event.op);
}

}  // namespace

void Observer::on_apply(ReplicaId, const DeliverySlot& s, std::uint64_t digest_after) {
    const auto h = slot_hash(s);
    auto [it, fresh] = log_.emplace(s.lambda, std::make_pair(h, digest_after));
    if (fresh) return;
    if (it->second.first != h) flag(&Violations::prefix, "different event at lambda " + std::to_string(s.lambda));
    else if (it->second.second != digest_after)
        flag(&Violations::app_digest, "different state after lambda " + std::to_string(s.lambda));
}

void Observer::on_windows(ReplicaId, Cycle c, std::uint64_t digest) {
    auto [it, fresh] = omega_.emplace(c, digest);
    if (!fresh && it->second != digest) flag(&Violations::omega, "different windows at cycle " + std::to_string(c));
}

void Observer::on_prune(ReplicaId r, Lambda upto, Lambda min_live_applied) {
    if (upto > min_live_applied)
        flag(&Violations::gc_unsafe, "replica " + std::to_string(r.value) + " pruned through " +
                                         std::to_string(upto) + " while a live replica applied only " +
                                         std::to_string(min_live_applied));
}

void Observer::on_load(int kind, std::int64_t epoch, std::int64_t cid, std::uint64_t digest) {
    auto [it, fresh] = loads_.emplace(std::make_tuple(kind, epoch, cid), digest);
    if (!fresh && it->second != digest)
        flag(&Violations::state_sync,
             "different state after load epoch " + std::to_string(epoch) + " cid " + std::to_string(cid));
}

void Observer::milestone(const std::string& key, Lambda l) {
    ++m_.milestone_checks;
    auto [it, fresh] = milestones_.emplace(key, l);
    if (!fresh && it->second != l) flag(&Violations::milestone, "milestone " + key + " at different lambdas");
}

void Observer::flag(std::uint64_t Violations::*field, const std::string& what) {
    ++(m_.violations.*field);
    if (m_.first_error.empty()) m_.first_error = what;
}

// --- rendezvous ----------------------------------------------------------

namespace {

class Rendezvous : public Actor {
public:
    Rendezvous(World& w, std::set<ReplicaId> initial) : Actor(w, kRendezvous), live_(std::move(initial)) {
        for (const auto& r : live_) heard_[r] = 0;
    }

    void start() { schedule_check(); }

    void on_message(NodeId from, const Message& m) override {
        if (!std::holds_alternative<HeartbeatMsg>(m.body)) return;
        const ReplicaId r{from};
        if (live_.count(r)) heard_[r] = w_.now();
    }

private:
    void schedule_check() {
        const TimeMs t = w_.now() + w_.scenario().heartbeat_ms / 2;
        if (t <= w_.end_time()) w_.timer(node_, t, [this] { check(); });
    }

    void check() {
        const auto& sc = w_.scenario();
        bool changed = false;
        for (auto it = live_.begin(); it != live_.end();) {
            if (w_.now() - heard_[*it] > sc.failure_timeout_ms) {
                // Evicted replicas are treated as crashed even if merely slow.
                w_.crash(it->value);
                heard_.erase(*it);
                it = live_.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        if (changed) {
            const auto target = static_cast<std::size_t>(sc.group_size + sc.spare_count);
            while (live_.size() < target && !w_.metrics().group_failed) {
                const ReplicaId r = w_.spawn_replica();
                live_.insert(r);
                heard_[r] = w_.now();
            }
            ++version_;
            auto msg = make_msg(MemberStateMsg{version_, live_});
            for (const auto& r : live_) w_.send(node_, r.value, msg);
        }
        schedule_check();
    }

    std::set<ReplicaId> live_;
    std::map<ReplicaId, TimeMs> heard_;
    std::uint64_t version_ = 0;
};

std::string client_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "c%02d", i);
    return buf;
}

}  // namespace

// --- world ---------------------------------------------------------------

World::World(SimScenario sc) : sc_(std::move(sc)) {
    sc_.validate();
    const bool pb = sc_.strategy == Strategy::PrimaryBackup || sc_.strategy == Strategy::ReliablePrimaryBackup;

    // Clients and their schedules.
    std::set<std::string> leavers;
    std::vector<std::string> joiners;
    std::map<int, int> controls;  // notifier -> queued control ops
    std::set<std::string> initial_names;
    for (int i = 0; i < sc_.client_count; ++i) initial_names.insert(client_name(i));
    for (const auto& ch : sc_.script) {
        if (ch.notifier < 0 || ch.notifier >= sc_.client_count)
            throw std::invalid_argument("script notifier out of range");
        ++controls[ch.notifier];
        if (ch.kind == ScriptedChange::Kind::Leave) leavers.insert(ch.base_id);
        else if (!initial_names.count(ch.base_id) &&
                 std::find(joiners.begin(), joiners.end(), ch.base_id) == joiners.end())
            joiners.push_back(ch.base_id);
        else leavers.insert(ch.base_id);  // rejoin: keep it out of the metrics too
    }

    workload_end_ = sc_.client_start_ms;
    std::vector<double> offsets;
    for (int i = 0; i < sc_.client_count; ++i) {
        const std::string name = client_name(i);
        Rng rng = make_stream(sc_.seed, "client:" + name, "clock");
        const double off = sample_offset_ms(sc_.clock, rng);
        offsets.push_back(off);
        const int quota = leavers.count(name) ? 0 : sc_.events_per_client;
        const std::int64_t last_n = quota + controls[i];
        if (quota > 0) {
            const auto sched = delivery::schedule(sc_.client_start_ms, last_n, sc_.timing);
            workload_end_ = std::max(workload_end_, sched.send - off);
        }
    }
    for (const auto& ch : sc_.script) workload_end_ = std::max(workload_end_, ch.at_ms + 25 * sc_.timing.delta_t);
    end_time_ = workload_end_ + sc_.update_timeout_ms + sc_.drain_ms;

    for (int i = 0; i < sc_.client_count; ++i) {
        const std::string name = client_name(i);
        const NodeId n = kClientBase + static_cast<NodeId>(i);
        const int quota = leavers.count(name) ? 0 : sc_.events_per_client;
        clients_.push_back(std::make_unique<ClientActor>(*this, n, name, quota, offsets[i]));
        client_by_base_[name] = n;
        client_list_.push_back(n);
    }
    for (const auto& name : joiners) {
        const NodeId n = kClientBase + static_cast<NodeId>(clients_.size());
        Rng rng = make_stream(sc_.seed, "client:" + name, "clock");
        clients_.push_back(std::make_unique<ClientActor>(*this, n, name, 0, sample_offset_ms(sc_.clock, rng)));
        client_by_base_[name] = n;
        client_list_.push_back(n);
    }

    // Initial group.
    std::set<ReplicaId> group;
    const int initial = sc_.group_size + sc_.spare_count;
    for (int i = 0; i < initial; ++i) group.insert(ReplicaId{next_replica_++});
    delivery::SenderSet senders;
    const delivery::CycleClock clock{0, sc_.timing.delta_t};
    for (int i = 0; i < sc_.client_count; ++i) {
        delivery::SenderRecord r;
        r.id = SenderId{client_name(i), 0};
        r.t_start = sc_.client_start_ms;
        r.first_cycle = clock.first_cycle_for(sc_.client_start_ms);
        senders.add(r);
    }
    for (const auto& id : group) {
        auto rep = make_replica(id);
        auto* raw = rep.get();
        replicas_[id.value] = std::move(rep);
        if (auto* fast = dynamic_cast<ReplicaActor*>(raw)) fast->bootstrap(group, senders);
        else static_cast<PbReplica*>(raw)->bootstrap(group);
        schedule_churn(id);
    }
    auto rv = std::make_unique<Rendezvous>(*this, group);
    rv->start();
    rendezvous_ = std::move(rv);

    std::vector<ReplicaId> targets(group.begin(), group.end());
    if (pb) targets = {*group.begin()};
    for (int i = 0; i < sc_.client_count; ++i)
        clients_[static_cast<std::size_t>(i)]->start(SenderId{client_name(i), 0}, sc_.client_start_ms, targets);

    for (const auto& ch : sc_.script) {
        const NodeId notifier = kClientBase + static_cast<NodeId>(ch.notifier);
        const std::string op = ch.kind == ScriptedChange::Kind::Join ? interaction::add_neighbor_op(ch.base_id)
                                                                      : interaction::remove_neighbor_op(ch.base_id);
        sim_.at(ch.at_ms, [this, notifier, op] {
            clients_[notifier - kClientBase]->queue_control(op);
        });
    }

    if (sc_.crash_leader_at_ms >= 0) {
        sim_.at(sc_.crash_leader_at_ms, [this] { try_crash_leader(sc_.crash_leader_at_ms + 30000); });
    }
    sim_.at(0, [this] { sample_queues(); });
}

World::~World() = default;

std::unique_ptr<ReplicaBase> World::make_replica(ReplicaId id) {
    switch (sc_.strategy) {
        case Strategy::PrimaryBackup: return std::make_unique<PbReplica>(*this, id, false);
        case Strategy::ReliablePrimaryBackup: return std::make_unique<PbReplica>(*this, id, true);
        default: return std::make_unique<ReplicaActor>(*this, id);
    }
}

ReplicaId World::spawn_replica() {
    const ReplicaId id{next_replica_++};
    auto rep = make_replica(id);
    auto* raw = rep.get();
    replicas_[id.value] = std::move(rep);
    ++metrics_.replicas_spawned;
    if (auto* fast = dynamic_cast<ReplicaActor*>(raw)) fast->start_fresh();
    else static_cast<PbReplica*>(raw)->start_fresh();
    schedule_churn(id);
    return id;
}

void World::schedule_churn(ReplicaId id) {
    if (!sc_.churn.enabled) return;
    Rng& rng = stream(id.value, "churn");
    const TimeMs t = now() + sample_session_ms(sc_.churn, rng);
    if (t >= workload_end_) return;
    sim_.at(t, [this, id] { crash(id.value); });
}

Rng& World::stream(NodeId n, const char* purpose) {
    const auto key = std::make_pair(n, std::string(purpose));
    auto it = streams_.find(key);
    if (it == streams_.end()) {
        const std::string actor = "replica:" + std::to_string(n);
        it = streams_.emplace(key, make_stream(sc_.seed, actor, purpose)).first;
    }
    return it->second;
}

Actor* World::actor(NodeId n) {
    if (n == kRendezvous) return rendezvous_.get();
    if (is_client(n)) {
        const std::size_t i = n - kClientBase;
        return i < clients_.size() ? clients_[i].get() : nullptr;
    }
    auto it = replicas_.find(n);
    return it == replicas_.end() ? nullptr : it->second.get();
}

bool World::is_alive(NodeId n) const {
    if (n == kRendezvous || is_client(n)) return true;
    auto it = replicas_.find(n);
    return it != replicas_.end() && it->second->alive();
}

ReplicaBase* World::replica(ReplicaId id) {
    auto it = replicas_.find(id.value);
    return it == replicas_.end() ? nullptr : it->second.get();
}

NodeId World::client_node(const std::string& base_id) const {
    auto it = client_by_base_.find(base_id);
    return it == client_by_base_.end() ? 0 : it->second;
}

std::vector<NodeId> World::client_nodes(const std::vector<std::string>& base_ids) const {
    std::vector<NodeId> out;
    for (const auto& b : base_ids)
        if (NodeId n = client_node(b)) out.push_back(n);
    return out;
}

void World::crash(NodeId n) {
    auto it = replicas_.find(n);
    if (it == replicas_.end() || !it->second->alive()) return;
    it->second->alive_ = false;
    ++metrics_.replicas_crashed;
    check_group();
}

void World::check_group() {
    for (const auto& [id, r] : replicas_)
        if (r->alive() && r->member()) return;
    metrics_.group_failed = true;
    sim_.stop();
}

Lambda World::min_live_applied() const {
    Lambda m = std::numeric_limits<Lambda>::max();
    for (const auto& [id, r] : replicas_)
        if (r->alive() && r->initialized()) m = std::min(m, r->applied());
    return m;
}

void World::note_trigger(Cycle c) {
    ++metrics_.consensus_triggers;
    if (trigger_cycles_.insert(c).second) ++metrics_.cycles_with_trigger;
}

void World::note_cycle_delivered(Cycle c, TimeMs close_time) {
    if (!delivered_cycles_.insert(c).second) return;
    ++metrics_.cycles_delivered;
    metrics_.sync_delay_sum_ms += now() - close_time;
    ++metrics_.sync_delay_samples;
}

// --- transport -----------------------------------------------------------

const NetModel* World::link_for(NodeId a, NodeId b) const {
    if (a == kRendezvous || b == kRendezvous) return nullptr;
    if (is_client(a) || is_client(b)) return &sc_.net;
    return &sc_.group_net;
}

void World::transmit(NodeId from, NodeId to, std::size_t size, std::function<void()> on_arrival) {
    ++metrics_.messages_sent;
    const NetModel* link = link_for(from, to);
    if (!link) {
        sim_.at(now() + sc_.control_delay_ms, std::move(on_arrival));
        return;
    }
    auto sit = net_streams_.find(from);
    if (sit == net_streams_.end()) {
        const std::string actor = "node:" + std::to_string(from);
        sit = net_streams_.emplace(from, Streams{make_stream(sc_.seed, actor, "delay"), make_stream(sc_.seed, actor, "drop")})
                  .first;
    }
    // Both draws always happen so p_loss never shifts the delay stream.
    double d = sample_delay(*link, sit->second.delay);
    const bool drop = std::uniform_real_distribution<double>(0.0, 1.0)(sit->second.drop) < link->p_loss;
    if (drop) {
        ++metrics_.messages_dropped;
        return;
    }
    if (link == &sc_.group_net) {
        metrics_.group_delay_sum_ms += d;
        ++metrics_.group_delay_samples;
    }
    d += static_cast<double>(size) / sc_.bandwidth_bytes_per_ms;
    sim_.at(now() + d, std::move(on_arrival));
}

void World::dispatch(NodeId from, NodeId to, const MsgPtr& m) {
    Actor* a = actor(to);
    if (!a || !a->alive()) return;
    try {
        a->on_message(from, *m);
    } catch (const std::exception& e) {
        obs_.flag(&Violations::protocol_error, "node " + std::to_string(to) + ": " + e.what());
        crash(to);
    }
}

void World::send(NodeId from, NodeId to, MsgPtr m) {
    const std::size_t size = m->size_bytes;
    transmit(from, to, size, [this, from, to, m = std::move(m)] { dispatch(from, to, m); });
}

void World::send_reliable(NodeId from, NodeId to, MsgPtr m) {
    const NetModel* link = link_for(from, to);
    if (!link || link->p_loss <= 0) {
        send(from, to, std::move(m));
        return;
    }
    const std::uint64_t id = next_reliable_++;
    const TimeMs rto = 2 * (link->d_min_ms + link->jitter_mean_ms + 3 * link->jitter_std_ms);
    reliable_[id] = Pending{from, to, std::move(m), rto, 0, false};
    reliable_attempt(id);
}

void World::reliable_attempt(std::uint64_t id) {
    auto it = reliable_.find(id);
    if (it == reliable_.end()) return;
    Pending& p = it->second;
    if (!is_alive(p.from) || !is_alive(p.to) || now() > end_time_) {
        reliable_.erase(it);
        return;
    }
    if (p.attempts++ > 0) ++metrics_.retransmissions;
    transmit(p.from, p.to, p.msg->size_bytes, [this, id] {
        auto it2 = reliable_.find(id);
        if (it2 == reliable_.end()) return;
        Pending& q = it2->second;
        if (!q.delivered) {
            q.delivered = true;
            dispatch(q.from, q.to, q.msg);
        }
        auto again = reliable_.find(id);
        if (again == reliable_.end()) return;
        transmit(again->second.to, again->second.from, 0, [this, id] { reliable_.erase(id); });
    });
    const TimeMs rto = p.rto;
    p.rto = std::min(2 * p.rto, 4000.0);
    sim_.at(now() + rto, [this, id] { reliable_attempt(id); });
}

void World::timer(NodeId owner, TimeMs t, std::function<void()> fn) {
    sim_.at(std::max(t, now()), [this, owner, fn = std::move(fn)] {
        if (!is_alive(owner)) return;
        try {
            fn();
        } catch (const std::exception& e) {
            obs_.flag(&Violations::protocol_error, "node " + std::to_string(owner) + ": " + e.what());
            crash(owner);
        }
    });
}

// --- fault injection and sampling -----------------------------------------

void World::try_crash_leader(TimeMs deadline) {
    ReplicaBase* best = nullptr;
    for (const auto& [id, r] : replicas_) {
        if (!r->alive() || !r->initialized() || r->leader_view() != r->rid()) continue;
        if (!best || r->epoch() > best->epoch()) best = r.get();
    }
    if (best && best->has_in_flight()) {
        crash(best->node());
        return;
    }
    if (now() + 5 <= deadline) sim_.at(now() + 5, [this, deadline] { try_crash_leader(deadline); });
}

void World::sample_queues() {
    std::size_t m = 0;
    for (const auto& [id, r] : replicas_)
        if (r->alive() && r->initialized()) m = std::max(m, r->queue_length());
    metrics_.qd_series.emplace_back(now(), m);
    metrics_.qd_max = std::max(metrics_.qd_max, m);
    const TimeMs t = now() + sc_.qd_sample_ms;
    if (t <= end_time_) sim_.at(t, [this] { sample_queues(); });
}

void World::finish() {
    metrics_.end_time_ms = now();
    if (metrics_.group_failed) return;
    std::optional<ReplicaId> leader;
    std::optional<std::int64_t> epoch;
    bool first = true;
    Lambda lo = std::numeric_limits<Lambda>::max(), hi = kNoneApplied;
    std::size_t qd = 0;
    for (const auto& [id, r] : replicas_) {
        if (!r->alive() || !r->initialized()) continue;
        ++metrics_.final_replicas;
        lo = std::min(lo, r->applied());
        hi = std::max(hi, r->applied());
        qd = std::max(qd, r->queue_length());
        if (first) {
            leader = r->leader_view();
            epoch = r->epoch();
            first = false;
        } else if (r->leader_view() != leader || r->epoch() != epoch) {
            obs_.flag(&Violations::leader, "leader or epoch disagreement at the end of the run");
        }
        if (r->busy()) obs_.flag(&Violations::leader, "election or reconfiguration still running at the end");
    }
    if (leader && !is_alive(leader->value))
        obs_.flag(&Violations::leader, "agreed leader is not live at the end");
    metrics_.final_min_applied = metrics_.final_replicas ? lo : kNoneApplied;
    metrics_.final_max_applied = hi;
    metrics_.qd_final = qd;
    metrics_.end_time_ms = now();
}

Metrics World::run() {
    sim_.run_until(end_time_);
    finish();
    return metrics_;
}

Metrics run(const SimScenario& sc) {
    World w(sc);
    return w.run();
}

}  // namespace vnet::sim
