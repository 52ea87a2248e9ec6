#include "vnet/delivery/collector.hpp"

#include <limits>
#include <stdexcept>

namespace vnet::delivery {

namespace {
EventKey first_key(const SenderId& s) { return EventKey{s, std::numeric_limits<SeqNo>::min()}; }
}  // namespace

Admission EventCollector::on_event_received(const Event& e, const SenderSet& senders) {
    if (e.is_bottom()) throw std::logic_error("bottom placeholder received from network");
    const SenderRecord* r = senders.find(e.sender);
    if (!r) return Admission::UnknownSender;
    if (e.seq <= r->max_seq_delivered) return Admission::Stale;
    if (r->last_cycle && e.seq > seq_of_cycle(*r, *r->last_cycle)) return Admission::PastLeave;
    // The strawman treats anything past its own cycle's timeout as lost.
    if (policy_ == WindowPolicy::Discard && last_closed_ >= r->first_cycle &&
        e.seq <= seq_of_cycle(*r, last_closed_))
        return Admission::Late;
    const EventKey k = e.key();
    if (received_.count(k)) return Admission::Duplicate;
    auto st = staged_.find(k);
    if (st != staged_.end() && !st->second.event.is_bottom()) return Admission::Duplicate;
    received_.emplace(k, e);
    return Admission::Accepted;
}

std::size_t EventCollector::on_cycle_timeout(Cycle c, const SenderSet& senders) {
    if (c != last_closed_ + 1) throw std::logic_error("cycle timeouts must be consecutive");
    last_closed_ = c;
    std::size_t late = 0;
    for (const SenderRecord* r : senders.active_at(c)) {
        const SeqNo j = seq_of_cycle(*r, c);
        const EventKey k{r->id, j};
        if (auto it = received_.find(k); it != received_.end()) {
            staged_[k] = StagedEntry{c, std::move(it->second)};
            received_.erase(it);
        } else if (!staged_.count(k)) {
            staged_.emplace(k, StagedEntry{c, Event::bottom(r->id, j)});
        }
        // Late events: received, undelivered, older than the cycle event.
        auto it = received_.lower_bound(first_key(r->id));
        while (it != received_.end() && it->first.sender == r->id && it->first.seq < j) {
            ++late;
            if (policy_ == WindowPolicy::Dynamic) staged_[it->first] = StagedEntry{c, std::move(it->second)};
            it = received_.erase(it);
        }
    }
    return late;
}

const Event* EventCollector::held(const EventKey& k) const {
    if (auto it = received_.find(k); it != received_.end()) return &it->second;
    if (auto it = staged_.find(k); it != staged_.end() && !it->second.event.is_bottom()) return &it->second.event;
    return nullptr;
}

void EventCollector::forget_upto(const SenderId& sender, SeqNo upto) {
    auto r = received_.lower_bound(first_key(sender));
    while (r != received_.end() && r->first.sender == sender && r->first.seq <= upto) r = received_.erase(r);
    auto s = staged_.lower_bound(first_key(sender));
    while (s != staged_.end() && s->first.sender == sender && s->first.seq <= upto) s = staged_.erase(s);
}

void EventCollector::forget_sender(const SenderId& sender) {
    forget_upto(sender, std::numeric_limits<SeqNo>::max());
}

void EventCollector::drop_placeholders_through(Cycle c) {
    for (auto it = staged_.begin(); it != staged_.end();) {
        if (it->second.event.is_bottom() && it->second.cycle <= c)
            it = staged_.erase(it);
        else
            ++it;
    }
}

}  // namespace vnet::delivery
