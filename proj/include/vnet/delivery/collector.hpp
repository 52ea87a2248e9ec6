#pragma once

#include <map>
#include <optional>

#include "vnet/core/types.hpp"
#include "vnet/delivery/senders.hpp"

namespace vnet::delivery {

enum class WindowPolicy : std::uint8_t {
    Dynamic,  // Omega window, late events recovered
    Discard,  // one cycle one event, late events dropped
};

enum class Admission : std::uint8_t { Accepted, Duplicate, Stale, Late, UnknownSender, PastLeave };

struct StagedEntry {
    Cycle cycle = 0;
    Event event;  // may be a Bottom placeholder
};

// Q_r and Q_p of one replica.
class EventCollector {
public:
    explicit EventCollector(WindowPolicy policy = WindowPolicy::Dynamic) : policy_(policy) {}

    Admission on_event_received(const Event& e, const SenderSet& senders);

    // Collection timeout of cycle c. Returns the number of late events
    // staged (Dynamic) or dropped (Discard).
    std::size_t on_cycle_timeout(Cycle c, const SenderSet& senders);

    // Real event with this key in Q_r or Q_p.
    const Event* held(const EventKey& k) const;

    // Drops everything of `sender` with seq <= upto.
    void forget_upto(const SenderId& sender, SeqNo upto);
    void forget_sender(const SenderId& sender);
    // Drops Bottom placeholders staged for cycles <= c.
    void drop_placeholders_through(Cycle c);

    Cycle last_closed() const { return last_closed_; }
    void set_last_closed(Cycle c) { last_closed_ = c; }
    WindowPolicy policy() const { return policy_; }

    const std::map<EventKey, Event>& received() const { return received_; }
    const std::map<EventKey, StagedEntry>& staged() const { return staged_; }

private:
    WindowPolicy policy_;
    Cycle last_closed_ = 0;
    std::map<EventKey, Event> received_;
    std::map<EventKey, StagedEntry> staged_;
};

}  // namespace vnet::delivery
