#include "vnet/delivery/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace vnet::delivery {

bool matches_windows(const std::vector<Event>& events, const CycleWindows& windows) {
    if (events.size() != window_event_count(windows)) return false;
    std::vector<EventKey> keys;
    keys.reserve(events.size());
    for (const auto& e : events) {
        if (e.is_bottom()) return false;
        keys.push_back(e.key());
    }
    std::sort(keys.begin(), keys.end());
    std::size_t i = 0;
    for (const auto& w : windows) {
        for (SeqNo j = w.window.min_seq; j <= w.window.max_seq; ++j, ++i) {
            if (!(keys[i] == EventKey{w.sender, j})) return false;
        }
    }
    return true;
}

CycleWindows DeliveryEngine::windows_for(Cycle c) const {
    CycleWindows out;
    for (const SenderRecord* r : cursor_.senders.active_at(c)) {
        SeqWindow w = expected_window(*r, c);
        if (collector_.policy() == WindowPolicy::Discard) w.min_seq = w.max_seq;
        out.push_back(SenderWindow{r->id, w});
    }
    return out;
}

const Event* DeliveryEngine::lookup(const EventKey& k, Cycle c) const {
    if (const Event* e = collector_.held(k)) return e;
    // Delivered slots of cycle c (a replica that already moved c to Q_d).
    const auto& slots = queue_.slots();
    auto it = std::lower_bound(slots.begin(), slots.end(), c,
                               [](const DeliverySlot& s, Cycle cc) { return s.cycle < cc; });
    for (; it != slots.end() && it->cycle == c; ++it) {
        if (it->event.is_operation() && it->event.key() == k) return &it->event;
    }
    return nullptr;
}

std::vector<Event> DeliveryEngine::proposal_for(Cycle c, const CycleWindows& windows) const {
    std::vector<Event> out;
    out.reserve(window_event_count(windows));
    for (const auto& w : windows) {
        for (SeqNo j = w.window.min_seq; j <= w.window.max_seq; ++j) {
            const EventKey k{w.sender, j};
            if (const Event* e = lookup(k, c))
                out.push_back(*e);
            else
                out.push_back(Event::bottom(w.sender, j));
        }
    }
    return out;
}

bool DeliveryEngine::holds_all(Cycle c, const CycleWindows& windows, std::vector<Event>* out) const {
    std::vector<Event> evs;
    evs.reserve(window_event_count(windows));
    for (const auto& w : windows) {
        for (SeqNo j = w.window.min_seq; j <= w.window.max_seq; ++j) {
            const Event* e = lookup(EventKey{w.sender, j}, c);
            if (!e) return false;
            evs.push_back(*e);
        }
    }
    if (out) *out = std::move(evs);
    return true;
}

bool DeliveryEngine::record_decision(Cycle c, std::vector<Event> events) {
    auto it = decided_.find(c);
    if (it != decided_.end()) return it->second == events;
    decided_.emplace(c, std::move(events));
    return true;
}

DeliveryOutcome DeliveryEngine::try_deliver() {
    DeliveryOutcome out;
    const Cycle c = cursor_.next_cycle;
    out.cycle = c;
    if (c > collector_.last_closed()) return out;
    out.windows = windows_for(c);

    if (auto it = decided_.find(c); it != decided_.end()) {
        if (!matches_windows(it->second, out.windows))
            throw std::logic_error("decided events do not match the windows of cycle " + std::to_string(c));
        std::vector<Event> evs = it->second;
        out.status = DeliveryStatus::Delivered;
        out.via_decision = true;
        out.slots = deliver(c, std::move(evs));
        return out;
    }
    std::vector<Event> evs;
    if (mode_ == DeliveryMode::Fast && !consensus_marked(c) && holds_all(c, out.windows, &evs)) {
        out.status = DeliveryStatus::Delivered;
        out.slots = deliver(c, std::move(evs));
        return out;
    }
    mark_consensus(c);
    out.status = DeliveryStatus::AwaitingConsensus;
    return out;
}

std::vector<DeliverySlot> DeliveryEngine::deliver(Cycle c, std::vector<Event> events) {
    const auto active = cursor_.senders.active_at(c);
    std::vector<std::pair<std::int64_t, Event>> ordered;
    ordered.reserve(events.size());
    for (auto& e : events) {
        const auto g = gamma(e.sender, e.seq, c, active);
        ordered.emplace_back(g, std::move(e));
    }
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<DeliverySlot> appended;
    appended.reserve(ordered.size());
    for (auto& [g, e] : ordered) {
        if (e.is_operation()) {
            SenderRecord* r = cursor_.senders.find(e.sender);
            r->max_seq_delivered = std::max(r->max_seq_delivered, e.seq);
        }
        const Lambda l = queue_.append(c, g, e);
        appended.push_back(*queue_.find(l));
    }
    for (const SenderRecord* r : active) collector_.forget_upto(r->id, r->max_seq_delivered);
    collector_.drop_placeholders_through(c);
    consensus_cycles_.erase(consensus_cycles_.begin(), consensus_cycles_.upper_bound(c));
    cursor_.next_cycle = c + 1;
    for (const auto& gone : cursor_.senders.retire_before(c + 1)) collector_.forget_sender(gone);
    return appended;
}

void DeliveryEngine::load(const DeliveryQueue& q, const DeliveryCursor& cursor, const DecidedMap& decided) {
    queue_.adopt(q);
    cursor_ = cursor;
    decided_ = decided;
    consensus_cycles_.clear();
    // Drop collected events that the adopted cursor already covers or whose
    // sender is gone.
    std::vector<SenderId> stale;
    for (const auto& [k, e] : collector_.received())
        if (!cursor_.senders.contains(k.sender)) stale.push_back(k.sender);
    for (const auto& [k, e] : collector_.staged())
        if (!cursor_.senders.contains(k.sender)) stale.push_back(k.sender);
    for (const auto& s : stale) collector_.forget_sender(s);
    for (const auto& [id, r] : cursor_.senders.records()) collector_.forget_upto(id, r.max_seq_delivered);
}

void DeliveryEngine::prune_decided_before(Cycle c) {
    decided_.erase(decided_.begin(), decided_.lower_bound(c));
}

}  // namespace vnet::delivery
