#include "vnet/sim/pb.hpp"

#include <algorithm>

#include "vnet/interaction/control.hpp"

namespace vnet::sim {

PbReplica::PbReplica(World& w, ReplicaId id, bool reliable)
    : ReplicaBase(w, id), reliable_(reliable), clock_{0, w.scenario().timing.delta_t} {
    first_cycle_ = clock_.first_cycle_for(w.scenario().client_start_ms);
}

void PbReplica::bootstrap(const std::set<ReplicaId>& group) {
    initialized_ = true;
    live_ = group;
    known_ = group;
    last_primary_ = primary();
    start_timers();
}

void PbReplica::start_fresh() { start_timers(); }

std::optional<ReplicaId> PbReplica::primary() const {
    if (live_.empty()) return std::nullopt;
    return *live_.begin();
}

void PbReplica::start_timers() {
    const Cycle next = clock_.closed_by(w_.now()) + 1;
    w_.timer(node_, clock_.close_time(next), [this, next] { on_cycle_close(next); });
    auto beat = std::make_shared<std::function<void()>>();
    *beat = [this, beat] {
        w_.send(node_, kRendezvous, make_msg(HeartbeatMsg{}));
        const TimeMs t = w_.now() + w_.scenario().heartbeat_ms;
        if (t <= w_.end_time()) w_.timer(node_, t, *beat);
    };
    (*beat)();
}

void PbReplica::on_cycle_close(Cycle c) {
    if (initialized_ && is_primary()) {
        std::vector<Event> batch;
        const SeqNo upto = c - first_cycle_;
        for (auto it = received_.begin(); it != received_.end();) {
            if (it->first.seq <= upto) {
                batch.push_back(std::move(it->second));
                it = received_.erase(it);
            } else {
                ++it;
            }
        }
        std::sort(batch.begin(), batch.end(),
                  [](const Event& a, const Event& b) { return std::tie(a.seq, a.sender) < std::tie(b.seq, b.sender); });
        if (!batch.empty()) {
            std::set<ReplicaId> backups = live_;
            backups.erase(id_);
            const std::uint64_t id = next_batch_++;
            auto msg = make_msg(PbForwardMsg{id, batch}, batch.size() * 32);
            for (const auto& b : backups) {
                if (reliable_)
                    w_.send_reliable(node_, b.value, msg);
                else
                    w_.send(node_, b.value, msg);
            }
            if (reliable_) {
                outstanding_[id] = Batch{c, std::move(batch), std::move(backups)};
                commit_ready();
            } else {
                apply_events(c, batch, true);
            }
        }
    }
    const TimeMs next = clock_.close_time(c + 1);
    if (next <= w_.end_time()) w_.timer(node_, next, [this, c] { on_cycle_close(c + 1); });
}

void PbReplica::commit_ready() {
    while (!outstanding_.empty()) {
        auto& b = outstanding_.begin()->second;
        for (auto it = b.waiting.begin(); it != b.waiting.end();) it = live_.count(*it) ? std::next(it) : b.waiting.erase(it);
        if (!b.waiting.empty()) return;
        apply_events(b.cycle, b.events, true);
        outstanding_.erase(outstanding_.begin());
    }
}

void PbReplica::apply_events(Cycle c, const std::vector<Event>& events, bool reply) {
    const auto clients = w_.all_client_nodes();
    std::int64_t g = 0;
    for (const auto& e : events) {
        if (!applied_keys_.insert(e.key()).second) continue;
        DeliverySlot s{c, g++, e, app_.applied_upto() + 1};
        app_.apply(s);
        if (!reply || !interaction::produces_update(e)) continue;
        auto msg = make_msg(UpdateMsg{s.lambda, e.sender, e.seq, app_.digest()});
        for (const NodeId n : clients) w_.send(node_, n, msg);
    }
}

void PbReplica::on_member_state(const MemberStateMsg& m) {
    if (m.version <= member_version_) return;
    member_version_ = m.version;
    const auto before = primary();
    live_ = m.live;
    if (!initialized_) return;
    if (is_primary() && before != id_) {
        // Takeover: whatever the old primary applied beyond us is lost.
        if (last_primary_) {
            if (auto* old = w_.replica(*last_primary_); old && old->applied() > app_.applied_upto())
                ++w_.metrics().divergence;
        }
        outstanding_.clear();
        auto notice = make_msg(PrimaryNoticeMsg{id_});
        for (const NodeId n : w_.all_client_nodes()) w_.send_reliable(node_, n, notice);
    }
    last_primary_ = primary();
    if (is_primary()) {
        for (const auto& r : live_) {
            if (known_.count(r)) continue;
            known_.insert(r);
            PbStateMsg st{app_.digest(), app_.applied_upto(),
                          std::vector<EventKey>(applied_keys_.begin(), applied_keys_.end())};
            const auto size = st.applied_keys.size() * 16;
            w_.send_reliable(node_, r.value, make_msg(std::move(st), size));
        }
    }
    commit_ready();
}

void PbReplica::on_message(NodeId from, const Message& m) {
    if (const auto* e = std::get_if<EventMsg>(&m.body)) {
        if (initialized_ && !applied_keys_.count(e->event.key())) received_.emplace(e->event.key(), e->event);
    } else if (const auto* f = std::get_if<PbForwardMsg>(&m.body)) {
        if (initialized_) apply_events(0, f->events, false);
        if (reliable_) w_.send_reliable(node_, from, make_msg(PbAckMsg{f->batch}));
    } else if (const auto* a = std::get_if<PbAckMsg>(&m.body)) {
        if (auto it = outstanding_.find(a->batch); it != outstanding_.end()) it->second.waiting.erase(ReplicaId{from});
        commit_ready();
    } else if (const auto* st = std::get_if<PbStateMsg>(&m.body)) {
        if (initialized_) return;
        initialized_ = true;
        app_ = AppState::restore(st->digest, st->applied);
        applied_keys_.insert(st->applied_keys.begin(), st->applied_keys.end());
        known_ = live_;
        last_primary_ = primary();
    } else if (const auto* ms = std::get_if<MemberStateMsg>(&m.body)) {
        on_member_state(*ms);
    }
}

}  // namespace vnet::sim
