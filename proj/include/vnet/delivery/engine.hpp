#pragma once

#include <map>
#include <vector>

#include "vnet/core/delivery_queue.hpp"
#include "vnet/delivery/collector.hpp"
#include "vnet/delivery/senders.hpp"

namespace vnet::delivery {

// E: decided events per cycle.
using DecidedMap = std::map<Cycle, std::vector<Event>>;

enum class DeliveryMode : std::uint8_t {
    Fast,             // deliver directly when every window is complete
    AlwaysConsensus,  // every cycle goes through an instance
};

enum class DeliveryStatus : std::uint8_t { Delivered, AwaitingConsensus, NotReady };

struct DeliveryOutcome {
    DeliveryStatus status = DeliveryStatus::NotReady;
    Cycle cycle = 0;
    CycleWindows windows;
    bool via_decision = false;
    std::vector<DeliverySlot> slots;  // newly appended
};

// Cursor that, together with Q_d, fixes the windows of every later cycle.
struct DeliveryCursor {
    Cycle next_cycle = 1;
    SenderSet senders;
    bool operator==(const DeliveryCursor&) const = default;
};

class DeliveryEngine {
public:
    DeliveryEngine(WindowPolicy policy, DeliveryMode mode) : mode_(mode), collector_(policy) {}

    DeliveryQueue& queue() { return queue_; }
    const DeliveryQueue& queue() const { return queue_; }
    SenderSet& senders() { return cursor_.senders; }
    const SenderSet& senders() const { return cursor_.senders; }
    EventCollector& collector() { return collector_; }
    const EventCollector& collector() const { return collector_; }
    DecidedMap& decided() { return decided_; }
    const DecidedMap& decided() const { return decided_; }
    const DeliveryCursor& cursor() const { return cursor_; }
    Cycle next_cycle() const { return cursor_.next_cycle; }
    Cycle collected_upto() const { return collector_.last_closed(); }
    DeliveryMode mode() const { return mode_; }
    WindowPolicy policy() const { return collector_.policy(); }

    Admission on_event_received(const Event& e) { return collector_.on_event_received(e, cursor_.senders); }
    std::size_t close_cycle(Cycle c) { return collector_.on_cycle_timeout(c, cursor_.senders); }

    CycleWindows windows_for(Cycle c) const;

    // The replica has asked for consensus on c; it must not fast-deliver c.
    void mark_consensus(Cycle c) { consensus_cycles_[c] = true; }
    bool consensus_marked(Cycle c) const { return consensus_cycles_.count(c) != 0; }

    // One step of the deliver loop for next_cycle().
    DeliveryOutcome try_deliver();

    // Real event for key k held in Q_r/Q_p or delivered at cycle c.
    const Event* lookup(const EventKey& k, Cycle c) const;
    // Every (s, j) of the windows, Bottom where nothing is held.
    std::vector<Event> proposal_for(Cycle c, const CycleWindows& windows) const;
    // True with `out` filled when every (s, j) of the windows is held.
    bool holds_all(Cycle c, const CycleWindows& windows, std::vector<Event>* out) const;

    // Stores E(c). Returns false when a different decision is already stored.
    bool record_decision(Cycle c, std::vector<Event> events);

    // State sync: take over queue (keeping applied marker), cursor and E.
    void load(const DeliveryQueue& q, const DeliveryCursor& cursor, const DecidedMap& decided);
    void forget_consensus_marks() { consensus_cycles_.clear(); }
    void prune_decided_before(Cycle c);

private:
    std::vector<DeliverySlot> deliver(Cycle c, std::vector<Event> events);

    DeliveryMode mode_;
    DeliveryQueue queue_;
    DeliveryCursor cursor_;
    EventCollector collector_;
    DecidedMap decided_;
    std::map<Cycle, bool> consensus_cycles_;
};

// Checks that `events` covers exactly the (s, j) pairs of the windows.
bool matches_windows(const std::vector<Event>& events, const CycleWindows& windows);

}  // namespace vnet::delivery
