#include "vnet/sim/replica.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vnet/interaction/control.hpp"

namespace vnet::sim {

using delivery::DeliveryStatus;
using membership::SyncPackage;

namespace {

delivery::DeliveryMode mode_for(Strategy s) {
    return s == Strategy::ConsensusTotalOrder ? delivery::DeliveryMode::AlwaysConsensus : delivery::DeliveryMode::Fast;
}

// The consensus baseline discards late events, like the loss analysis assumes.
delivery::WindowPolicy policy_for(const SimScenario& sc) {
    return sc.strategy == Strategy::ConsensusTotalOrder ? delivery::WindowPolicy::Discard : sc.late_policy;
}

std::vector<Event> sorted_by_key(std::vector<Event> v) {
    std::sort(v.begin(), v.end(), [](const Event& a, const Event& b) { return a.key() < b.key(); });
    return v;
}

}  // namespace

ReplicaActor::ReplicaActor(World& w, ReplicaId id)
    : ReplicaBase(w, id),
      sc_(w.scenario()),
      clock_{0, w.scenario().timing.delta_t},
      eng_(policy_for(w.scenario()), mode_for(w.scenario().strategy)) {
    grp_.min_size = sc_.group_size;
    grp_.spare_count = sc_.spare_count;
    shortcut_ = sc_.strategy == Strategy::Fast;
}

void ReplicaActor::bootstrap(const std::set<ReplicaId>& group, const delivery::SenderSet& senders) {
    initialized_ = true;
    grp_.members = group;
    grp_.live = group;
    for (const auto& r : group) grp_.ages[r] = 0;
    grp_.leader = membership::select_leader(group, grp_.ages);
    grp_.epoch = 1;
    grp_.cid = 1;
    for (const auto& [id, r] : senders.records()) eng_.senders().add(r);
    start_timers();
}

void ReplicaActor::start_fresh() {
    grp_.new_replica = true;
    start_timers();
}

void ReplicaActor::start_timers() {
    const Cycle next = clock_.closed_by(w_.now()) + 1;
    w_.timer(node_, clock_.close_time(next), [this, next] { on_cycle_close(next); });
    if (sc_.gc_enabled) {
        const auto k = static_cast<std::int64_t>(std::floor(w_.now() / sc_.gc_period_ms)) + 1;
        w_.timer(node_, static_cast<double>(k) * sc_.gc_period_ms, [this, k] { on_gc_tick(k); });
    }
    auto beat = std::make_shared<std::function<void()>>();
    *beat = [this, beat] {
        w_.send(node_, kRendezvous, make_msg(HeartbeatMsg{}));
        if (w_.now() + sc_.heartbeat_ms <= w_.end_time()) w_.timer(node_, w_.now() + sc_.heartbeat_ms, *beat);
    };
    (*beat)();
}

void ReplicaActor::on_cycle_close(Cycle c) {
    if (initialized_ && c == eng_.collected_upto() + 1) {
        const std::size_t late = eng_.close_cycle(c);
        if (eng_.policy() == delivery::WindowPolicy::Dynamic)
            w_.metrics().late_staged += late;
        else
            w_.metrics().late_dropped += late;
    }
    if (clock_.close_time(c + 1) <= w_.end_time())
        w_.timer(node_, clock_.close_time(c + 1), [this, c] { on_cycle_close(c + 1); });
    pump();
}

void ReplicaActor::on_gc_tick(std::int64_t k) {
    if (initialized_) {
        const Lambda l = eng_.queue().last_applied();
        send_group(others(grp_.live), make_msg(GcLambdaMsg{l}), false);
        handle_gc(id_, l);
    }
    const double next = static_cast<double>(k + 1) * sc_.gc_period_ms;
    if (next <= w_.end_time()) w_.timer(node_, next, [this, k] { on_gc_tick(k + 1); });
}

// --- main loop ---------------------------------------------------------

void ReplicaActor::pump() {
    if (!initialized_ || !alive()) return;
    if (election_step()) return;
    if (reconfig_step()) return;
    replay_ahead();
    bool progress = true;
    while (progress) {
        deliver_loop();
        answer_deferred();
        progress = false;
        if (is_leader()) {
            leader_start_pending();
            answer_deferred();
            leader_try_decide();
            progress = eng_.decided().count(eng_.next_cycle()) != 0 && eng_.next_cycle() <= eng_.collected_upto();
        }
    }
}

void ReplicaActor::deliver_loop() {
    while (true) {
        auto out = eng_.try_deliver();
        if (out.status == DeliveryStatus::NotReady) return;
        if (out.status == DeliveryStatus::AwaitingConsensus) {
            auto it = queried_.find(out.cycle);
            if (it == queried_.end() || w_.now() - it->second >= sc_.query_retry_ms) send_query(out.cycle, out.windows);
            return;
        }
        process_delivered(out);
    }
}

void ReplicaActor::process_delivered(const delivery::DeliveryOutcome& out) {
    const Cycle c = out.cycle;
    w_.note_cycle_delivered(c, clock_.close_time(c));
    w_.observer().on_windows(id_, c, delivery::windows_digest(out.windows));
    ++w_.metrics().omega_checks;
    if (out.via_decision && (grp_.le || grp_.gr))
        w_.observer().flag(&Violations::priority, "decision delivered during election or reconfiguration");

    for (const auto& s : out.slots) {
        if (!s.event.is_operation()) continue;
        const auto kind = interaction::parse_op(s.event.op).kind;
        if (kind != interaction::OpKind::AddNeighbor && kind != interaction::OpKind::RemoveNeighbor) continue;
        const auto eff = interaction::apply_control(s, eng_.senders(), clock_.close_time(c), sc_.join_lead_cycles,
                                                    sc_.timing);
        if (eff.kind == interaction::MembershipEffect::Kind::Added) {
            auto st = stash_.find(eff.id);
            if (st != stash_.end()) {
                for (const auto& e : st->second) eng_.on_event_received(e);
                stash_.erase(st);
            }
        }
    }
    for (const auto& s : out.slots) apply_slot(s);
    for (const auto& [id, r] : eng_.senders().records()) {
        if (r.last_cycle && *r.last_cycle == c) {
            if (auto it = last_real_.find(id); it != last_real_.end())
                w_.observer().milestone("leave:" + id.str(), it->second);
        }
    }
    queried_.erase(queried_.begin(), queried_.upper_bound(c));
}

void ReplicaActor::apply_slot(const DeliverySlot& s) {
    app_.apply(s);
    eng_.queue().mark_applied(s.lambda);
    w_.observer().on_apply(id_, s, app_.digest());
    // The join is the seq 0 slot of the first cycle; a late seq 0 can be staged again later.
    if (s.event.seq == 0 && s.event.sender.join_timestamp != 0) {
        const auto* rec = eng_.senders().find(s.event.sender);
        if (rec && rec->first_cycle == s.cycle) w_.observer().milestone("join:" + s.event.sender.str(), s.lambda);
    }
    if (!s.event.is_operation()) return;
    last_real_[s.event.sender] = s.lambda;
    if (interaction::produces_update(s.event)) send_updates(s);
    const auto op = interaction::parse_op(s.event.op);
    if (op.kind == interaction::OpKind::AddNeighbor) send_handshake(op.subject);
}

void ReplicaActor::send_updates(const DeliverySlot& s) {
    auto msg = make_msg(UpdateMsg{s.lambda, s.event.sender, s.event.seq, app_.digest()});
    for (const auto& [id, r] : eng_.senders().records()) {
        const NodeId n = w_.client_node(id.base_id);
        if (n) w_.send(node_, n, msg);
    }
}

void ReplicaActor::send_handshake(const std::string& base_id) {
    const auto* rec = eng_.senders().find_base(base_id);
    const NodeId n = w_.client_node(base_id);
    if (!rec || !n) return;
    HandshakeMsg h{rec->id, rec->t_start, std::vector<ReplicaId>(grp_.members.begin(), grp_.members.end())};
    w_.send_reliable(node_, n, make_msg(std::move(h)));
}

void ReplicaActor::notify_clients() {
    auto msg = make_msg(
        ConfigNoticeMsg{grp_.cid, std::vector<ReplicaId>(grp_.members.begin(), grp_.members.end())});
    for (const auto& [id, r] : eng_.senders().records()) {
        const NodeId n = w_.client_node(id.base_id);
        if (n) w_.send_reliable(node_, n, msg);
    }
}

// --- consensus -----------------------------------------------------------

void ReplicaActor::send_query(Cycle c, const delivery::CycleWindows& w) {
    if (!queried_.count(c)) w_.note_trigger(c);
    queried_[c] = w_.now();
    if (is_leader()) {
        leader_on_query(id_, c, w);
    } else if (grp_.leader) {
        w_.send_reliable(node_, grp_.leader->value, make_msg(QueryMsg{grp_.epoch, grp_.cid, c, w, true}));
    }
}

void ReplicaActor::leader_on_query(ReplicaId from, Cycle c, const delivery::CycleWindows& w) {
    if (auto it = eng_.decided().find(c); it != eng_.decided().end()) {
        if (from != id_) {
            ++w_.metrics().query_replies;
            w_.send_reliable(node_, from.value, make_msg(DecisionMsg{grp_.epoch, grp_.cid, c, it->second, true}));
        }
        return;
    }
    if (ledger_.is_pending(c) || ledger_.is_in_flight(c)) {
        requesters_[c].insert(from);
        // A repeated QUERY from a member that never answered: its copy of the
        // instance QUERY was lost or dropped, so send it again.
        const auto* inst = ledger_.instance(c);
        if (inst && from != id_ && !inst->proposals.count(from) && grp_.members.count(from))
            w_.send_reliable(node_, from.value, make_msg(QueryMsg{grp_.epoch, grp_.cid, c, inst->windows, false}));
        return;
    }
    std::vector<Event> evs;
    if (shortcut_ && c <= eng_.collected_upto() && eng_.holds_all(c, w, &evs)) {
        // Every (s, j) is held here, so this is the only possible outcome.
        // It still goes to the whole group: a decision known only to the
        // leader and one requester would not survive both crashing.
        ++w_.metrics().query_replies;
        eng_.record_decision(c, evs);
        std::set<ReplicaId> to = grp_.live_members();
        to.insert(from);
        to.erase(id_);
        send_group(to, make_msg(DecisionMsg{grp_.epoch, grp_.cid, c, std::move(evs), true}), true);
        return;
    }
    ledger_.enqueue(c, w);
    requesters_[c].insert(from);
}

void ReplicaActor::member_answer(Cycle c, const delivery::CycleWindows& w) {
    if (c > eng_.collected_upto()) {
        deferred_[c] = w;
        return;
    }
    auto entries = eng_.proposal_for(c, w);
    if (c >= eng_.next_cycle()) eng_.mark_consensus(c);
    if (is_leader()) {
        ledger_.add_proposal(consensus::Proposal{id_, c, std::move(entries)});
    } else if (grp_.leader) {
        w_.send_reliable(node_, grp_.leader->value,
                         make_msg(QueryResultMsg{grp_.epoch, grp_.cid, c, std::move(entries)}));
    }
}

void ReplicaActor::answer_deferred() {
    while (!deferred_.empty() && deferred_.begin()->first <= eng_.collected_upto()) {
        auto [c, w] = *deferred_.begin();
        deferred_.erase(deferred_.begin());
        member_answer(c, w);
    }
}

void ReplicaActor::leader_start_pending() {
    for (const Cycle c : ledger_.start_pending()) {
        instance_start_[c] = w_.now();
        const auto* inst = ledger_.instance(c);
        send_group(others(grp_.live_members()), make_msg(QueryMsg{grp_.epoch, grp_.cid, c, inst->windows, false}),
                   true);
        member_answer(c, inst->windows);
    }
}

void ReplicaActor::leader_try_decide() {
    const auto members = grp_.live_members();
    const std::vector<Cycle> flight(ledger_.in_flight().begin(), ledger_.in_flight().end());
    for (const Cycle c : flight) {
        auto d = ledger_.try_decide(c, members);
        if (!d) continue;
        auto& m = w_.metrics();
        ++m.instances_decided;
        if (auto it = instance_start_.find(c); it != instance_start_.end()) {
            m.collect_sum_ms += w_.now() - it->second;
            ++m.collect_samples;
            instance_start_.erase(it);
        }
        if (c < eng_.next_cycle()) {
            // Already delivered here; the decision must repeat it.
            const auto& slots = eng_.queue().slots();
            std::vector<Event> mine;
            for (const auto& s : slots)
                if (s.cycle == c) mine.push_back(s.event);
            if (!mine.empty() && sorted_by_key(mine) != sorted_by_key(*d))
                w_.observer().flag(&Violations::decision, "decision differs from fast delivery at the leader");
        }
        if (!eng_.record_decision(c, *d)) w_.observer().flag(&Violations::decision, "conflicting decision");
        std::set<ReplicaId> to = members;
        if (auto it = requesters_.find(c); it != requesters_.end()) {
            to.insert(it->second.begin(), it->second.end());
            requesters_.erase(it);
        }
        to.erase(id_);
        send_group(to, make_msg(DecisionMsg{grp_.epoch, grp_.cid, c, *d, false}), true);
    }
}

bool ReplicaActor::hold_if_ahead(ReplicaId from, std::int64_t epoch, std::int64_t cid, const Body& b) {
    if (std::tie(epoch, cid) <= std::tie(grp_.epoch, grp_.cid)) return false;
    if (ahead_.size() < 256) ahead_.push_back(Held{from, epoch, cid, b});
    return true;
}

void ReplicaActor::replay_ahead() {
    if (ahead_.empty() || grp_.le || grp_.gr) return;
    std::vector<Held> keep, now;
    for (auto& h : ahead_) {
        const auto k = std::tie(h.epoch, h.cid), mine = std::tie(grp_.epoch, grp_.cid);
        if (k > mine) keep.push_back(std::move(h));
        else if (k == mine) now.push_back(std::move(h));
    }
    ahead_ = std::move(keep);
    for (const auto& h : now) on_message(h.from.value, Message{h.body, 0});
}

void ReplicaActor::handle_query(ReplicaId from, const QueryMsg& m) {
    if (!consensus_ok(m.epoch, m.cid)) {
        hold_if_ahead(from, m.epoch, m.cid, m);
        return;
    }
    if (m.to_leader) {
        if (!is_leader()) return;
        leader_on_query(from, m.cycle, m.windows);
        pump();
    } else {
        if (!grp_.leader || *grp_.leader != from) return;
        member_answer(m.cycle, m.windows);
    }
}

void ReplicaActor::handle_query_result(ReplicaId from, const QueryResultMsg& m) {
    if (!consensus_ok(m.epoch, m.cid)) {
        hold_if_ahead(from, m.epoch, m.cid, m);
        return;
    }
    if (!is_leader()) return;
    ledger_.add_proposal(consensus::Proposal{from, m.cycle, m.entries});
    pump();
}

void ReplicaActor::handle_decision(ReplicaId from, const DecisionMsg& m) {
    if (!consensus_ok(m.epoch, m.cid)) {
        hold_if_ahead(from, m.epoch, m.cid, m);
        return;
    }
    if (m.cycle < eng_.next_cycle()) {
        std::vector<Event> mine;
        for (const auto& s : eng_.queue().slots())
            if (s.cycle == m.cycle) mine.push_back(s.event);
        if (!mine.empty() && sorted_by_key(mine) != sorted_by_key(m.events))
            w_.observer().flag(&Violations::decision, "decision arrived after a different delivery");
        return;
    }
    if (!eng_.record_decision(m.cycle, m.events))
        w_.observer().flag(&Violations::decision, "conflicting decision for cycle " + std::to_string(m.cycle));
    pump();
}

// --- garbage collection --------------------------------------------------

void ReplicaActor::handle_gc(ReplicaId from, Lambda lambda_c) {
    if (!initialized_ || !sc_.gc_enabled) return;
    auto res = gc::on_lambda(gossip_, eng_.queue(), from, lambda_c, grp_.live);
    if (!res) return;
    w_.observer().on_prune(id_, res->upto, w_.min_live_applied());
    w_.metrics().pruned_slots += res->removed;
    eng_.prune_decided_before(res->last_cycle);
}

// --- membership ----------------------------------------------------------

void ReplicaActor::handle_member_state(const MemberStateMsg& m) {
    if (m.version <= member_version_) return;
    member_version_ = m.version;
    grp_.live = m.live;
    gossip_.retain(grp_.live);
    pump();
}

bool ReplicaActor::election_step() {
    const bool leader_alive = grp_.leader && grp_.live.count(*grp_.leader);
    if (!grp_.le) {
        if (leader_alive) return false;
        grp_.le = true;
        le_started_ = w_.now();
        grp_.candidate.reset();
        cand_.reset();
    }
    if (cand_ && cand_->loaded) {
        candidate_progress();
        return grp_.le;
    }
    const auto lm = grp_.live_members();
    if (lm.empty()) return true;
    const ReplicaId want = membership::select_leader(lm, grp_.ages);
    if (!grp_.candidate || *grp_.candidate != want) {
        grp_.candidate = want;
        cand_.reset();
        if (want == id_) start_candidacy();
    }
    if (cand_) candidate_progress();
    return grp_.le;
}

void ReplicaActor::start_candidacy() {
    cand_ = Candidacy{};
    cand_->round = (static_cast<std::uint64_t>(id_.value) << 32) | ++round_counter_;
    cand_->started = w_.now();
    cand_->states[id_] = package();
}

void ReplicaActor::candidate_progress() {
    if (!cand_->loaded) {
        // Replicas spawned after the candidacy started must be asked too.
        std::set<ReplicaId> fresh;
        for (const auto& r : others(grp_.live))
            if (cand_->asked.insert(r).second) fresh.insert(r);
        if (!fresh.empty()) send_group(fresh, make_msg(LeQueryMsg{cand_->round}), true);
        std::vector<SyncPackage> pkgs;
        for (const auto& r : grp_.live) {
            auto it = cand_->states.find(r);
            if (it == cand_->states.end()) return;
            pkgs.push_back(it->second);
        }
        if (!grp_.live.count(id_)) pkgs.push_back(cand_->states.at(id_));
        SyncPackage merged = membership::merge_states(pkgs, init_state());
        merged.epoch += 1;
        cand_->ack_from = others(grp_.live);
        cand_->loaded = true;
        send_group(cand_->ack_from, make_msg(LoadLeaderMsg{cand_->round, merged}, membership::encoded_size(merged)),
                   true);
        load(merged, LoadKind::Leader, id_);
    }
    for (const auto& r : cand_->ack_from)
        if (grp_.live.count(r) && !cand_->acks.count(r)) return;
    grp_.le = false;
    grp_.candidate.reset();
    cand_.reset();
    ++w_.metrics().elections;
    w_.metrics().election_time_sum_ms += w_.now() - le_started_;
}

void ReplicaActor::handle_le_query(ReplicaId from, const LeQueryMsg& m) {
    if (initialized_) {
        const bool leader_alive = grp_.leader && grp_.live.count(*grp_.leader) && *grp_.leader != from;
        const auto lm = grp_.live_members();
        if (leader_alive || lm.empty() || membership::select_leader(lm, grp_.ages) != from) {
            w_.send_reliable(node_, from.value, make_msg(NackMsg{m.round}));
            return;
        }
        if (!grp_.le) {
            grp_.le = true;
            le_started_ = w_.now();
        }
        grp_.candidate = from;
        cand_.reset();
    }
    auto pkg = package();
    const auto size = membership::encoded_size(pkg);
    w_.send_reliable(node_, from.value, make_msg(LeStateMsg{m.round, std::move(pkg)}, size));
}

void ReplicaActor::handle_le_state(ReplicaId from, const LeStateMsg& m) {
    if (!cand_ || cand_->loaded || m.round != cand_->round) return;
    cand_->states[from] = m.pkg;
    pump();
}

void ReplicaActor::handle_nack(ReplicaId, const NackMsg& m) {
    if (!cand_ || m.round != cand_->round) return;
    cand_.reset();
    grp_.candidate.reset();
    grp_.le = true;
    w_.timer(node_, w_.now() + sc_.timing.net_low, [this] { pump(); });
}

void ReplicaActor::handle_ack(ReplicaId from, const AckMsg& m) {
    if (!cand_ || m.round != cand_->round) return;
    cand_->acks.insert(from);
    pump();
}

void ReplicaActor::handle_load_leader(ReplicaId from, const LoadLeaderMsg& m) {
    if (initialized_) {
        if (m.pkg.epoch <= grp_.epoch) return;
        const auto lm = grp_.live_members();
        if (!lm.empty() && membership::select_leader(lm, grp_.ages) != from) {
            w_.send_reliable(node_, from.value, make_msg(NackMsg{m.round}));
            return;
        }
    }
    load(m.pkg, LoadKind::Leader, from);
    grp_.le = false;
    grp_.candidate.reset();
    w_.send_reliable(node_, from.value, make_msg(AckMsg{m.round}));
    pump();
}

bool ReplicaActor::reconfig_step() {
    if (grp_.gr) {
        if (reconf_ && is_leader()) reconfig_progress();
        return grp_.gr;
    }
    if (!is_leader() || !grp_.has_new_live() || grp_.live == grp_.reconfig_target) return false;
    grp_.gr = true;
    grp_.reconfig_target = grp_.live;
    grp_.cid += 1;
    reconf_ = Reconfig{grp_.cid, {}, w_.now()};
    reconf_->states[id_] = package();
    send_group(others(grp_.live), make_msg(GrQueryMsg{grp_.epoch, grp_.cid}), true);
    reconfig_progress();
    return grp_.gr;
}

void ReplicaActor::reconfig_progress() {
    std::set<ReplicaId> targets;
    for (const auto& r : grp_.reconfig_target)
        if (grp_.live.count(r)) targets.insert(r);
    targets.insert(id_);
    std::vector<SyncPackage> pkgs;
    for (const auto& r : targets) {
        auto it = reconf_->states.find(r);
        if (it == reconf_->states.end()) return;
        pkgs.push_back(it->second);
    }
    SyncPackage merged = membership::merge_states(pkgs, init_state());
    merged.cid = reconf_->cid;
    merged.epoch = grp_.epoch;
    merged.config = targets;
    const auto cid = reconf_->cid;
    send_group(others(targets), make_msg(LoadConfigMsg{grp_.epoch, cid, merged}, membership::encoded_size(merged)),
               true);
    ++w_.metrics().reconfigurations;
    w_.metrics().reconfig_time_sum_ms += w_.now() - reconf_->started;
    reconf_.reset();
    load(merged, LoadKind::Config, id_);
    notify_clients();
}

void ReplicaActor::handle_gr_query(ReplicaId from, const GrQueryMsg& m) {
    if (grp_.le) return;
    if (std::tie(m.epoch, m.cid) <= std::tie(grp_.epoch, grp_.cid)) return;
    if (initialized_ && (!grp_.leader || *grp_.leader != from)) return;
    grp_.gr = true;
    auto pkg = package();
    const auto size = membership::encoded_size(pkg);
    w_.send_reliable(node_, from.value, make_msg(GeStateMsg{m.epoch, m.cid, std::move(pkg)}, size));
}

void ReplicaActor::handle_ge_state(ReplicaId from, const GeStateMsg& m) {
    if (!reconf_ || !is_leader() || m.cid != reconf_->cid || m.epoch != grp_.epoch) return;
    reconf_->states[from] = m.pkg;
    pump();
}

void ReplicaActor::handle_load_config(ReplicaId from, const LoadConfigMsg& m) {
    if (initialized_) {
        if (std::tie(m.epoch, m.cid) <= std::tie(grp_.epoch, grp_.cid)) return;
        if (!grp_.leader || *grp_.leader != from) return;
    }
    load(m.pkg, LoadKind::Config, from);
    pump();
}

SyncPackage ReplicaActor::package() const {
    SyncPackage p;
    p.initialized = initialized_;
    p.epoch = grp_.epoch;
    p.cid = grp_.cid;
    if (initialized_) {
        p.q_d = eng_.queue();
        p.cursor = eng_.cursor();
        p.decided = eng_.decided();
        p.config = grp_.members;
    }
    return p;
}

membership::InitState ReplicaActor::init_state() const {
    return membership::InitState{clock_.t0, eng_.cursor(), eng_.queue().last_applied(), app_.digest(), grp_.ages};
}

void ReplicaActor::load(const SyncPackage& p, LoadKind kind, ReplicaId leader) {
    const bool fresh = !initialized_;
    if (fresh) {
        if (!p.init) throw std::logic_error("state load without Init on a fresh replica");
        const auto& in = *p.init;
        eng_.queue() = DeliveryQueue::restore(p.q_d.slots(), p.q_d.next_lambda(), p.q_d.pruned_upto(), in.applied,
                                              p.q_d.last_key());
        app_ = AppState::restore(in.app_digest, in.applied);
        clock_.t0 = in.t0;
        grp_.ages = in.ages;
    }
    eng_.load(p.q_d, p.cursor, p.decided);
    if (eng_.collected_upto() < p.cursor.next_cycle - 1) eng_.collector().set_last_closed(p.cursor.next_cycle - 1);
    if (fresh) {
        initialized_ = true;
        const Cycle upto = clock_.closed_by(w_.now());
        for (Cycle c = eng_.collected_upto() + 1; c <= upto; ++c) eng_.close_cycle(c);
    }
    grp_.epoch = p.epoch;
    grp_.cid = p.cid;
    grp_.members = p.config;
    grp_.leader = leader;
    grp_.gr = false;
    grp_.reconfig_target.clear();
    grp_.new_replica = false;
    if (kind == LoadKind::Config) {
        grp_.ages = p.init->ages;
        for (const auto& r : p.config) grp_.ages[r] += 1;
    }
    if (!(kind == LoadKind::Leader && leader == id_)) cand_.reset();
    if (kind == LoadKind::Leader) reconf_.reset();
    ledger_.clear();
    queried_.clear();
    deferred_.clear();
    requesters_.clear();
    instance_start_.clear();
    gossip_.retain(grp_.live);
    ++w_.metrics().state_loads;
    w_.observer().on_load(static_cast<int>(kind), p.epoch, p.cid,
                          membership::sync_digest(eng_.queue(), eng_.decided(), grp_.members));

    // Catch up on slots delivered elsewhere; S already reflects them.
    const auto last = eng_.queue().last_lambda();
    if (last) {
        for (Lambda l = eng_.queue().last_applied() + 1; l <= *last; ++l) {
            const DeliverySlot* s = eng_.queue().find(l);
            if (!s) throw std::logic_error("missing slot while catching up");
            apply_slot(*s);
        }
    }
}

// --- plumbing ------------------------------------------------------------

std::set<ReplicaId> ReplicaActor::others(const std::set<ReplicaId>& s) const {
    std::set<ReplicaId> out = s;
    out.erase(id_);
    return out;
}

void ReplicaActor::send_group(const std::set<ReplicaId>& to, const MsgPtr& m, bool reliable) {
    for (const auto& r : to) {
        if (reliable)
            w_.send_reliable(node_, r.value, m);
        else
            w_.send(node_, r.value, m);
    }
}

void ReplicaActor::handle_event(const Event& e) {
    if (!initialized_) return;
    auto& m = w_.metrics();
    switch (eng_.on_event_received(e)) {
        case delivery::Admission::UnknownSender: {
            ++m.unknown_sender;
            auto& v = stash_[e.sender];
            if (v.size() < 64) v.push_back(e);
            break;
        }
        case delivery::Admission::Stale: ++m.stale_dropped; break;
        case delivery::Admission::Late: ++m.late_dropped; break;
        case delivery::Admission::PastLeave: ++m.past_leave; break;
        default: break;
    }
}

void ReplicaActor::on_message(NodeId from, const Message& msg) {
    const ReplicaId r{from};
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, EventMsg>) handle_event(b.event);
            else if constexpr (std::is_same_v<T, MemberStateMsg>) handle_member_state(b);
            else if constexpr (std::is_same_v<T, QueryMsg>) handle_query(r, b);
            else if constexpr (std::is_same_v<T, QueryResultMsg>) handle_query_result(r, b);
            else if constexpr (std::is_same_v<T, DecisionMsg>) handle_decision(r, b);
            else if constexpr (std::is_same_v<T, GcLambdaMsg>) handle_gc(r, b.lambda_c);
            else if constexpr (std::is_same_v<T, LeQueryMsg>) handle_le_query(r, b);
            else if constexpr (std::is_same_v<T, LeStateMsg>) handle_le_state(r, b);
            else if constexpr (std::is_same_v<T, LoadLeaderMsg>) handle_load_leader(r, b);
            else if constexpr (std::is_same_v<T, NackMsg>) handle_nack(r, b);
            else if constexpr (std::is_same_v<T, AckMsg>) handle_ack(r, b);
            else if constexpr (std::is_same_v<T, GrQueryMsg>) handle_gr_query(r, b);
            else if constexpr (std::is_same_v<T, GeStateMsg>) handle_ge_state(r, b);
            else if constexpr (std::is_same_v<T, LoadConfigMsg>) handle_load_config(r, b);
        },
        msg.body);
}

}  // namespace vnet::sim
