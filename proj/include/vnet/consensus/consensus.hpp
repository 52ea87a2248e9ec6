#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "vnet/core/types.hpp"
#include "vnet/delivery/engine.hpp"

namespace vnet::consensus {

using delivery::CycleWindows;
using delivery::DecidedMap;

struct Proposal {
    ReplicaId replica;
    Cycle cycle = 0;
    std::vector<Event> entries;  // one per (s, j) of the windows, Bottom if unknown
};

// Per (s, j): any non-Bottom proposal wins, otherwise Empty. Throws
// std::logic_error if two proposals disagree on a real event or an entry
// lies outside the windows.
std::vector<Event> decide(const CycleWindows& windows, const std::vector<Proposal>& proposals);

struct Instance {
    CycleWindows windows;
    std::map<ReplicaId, Proposal> proposals;
};

// Leader-side bookkeeping: P (pending), Z (in flight) and collected proposals.
class ConsensusLedger {
public:
    bool is_pending(Cycle c) const { return pending_.count(c) != 0; }
    bool is_in_flight(Cycle c) const { return in_flight_.count(c) != 0; }

    // Adds (c, windows) to P unless c is already in P or Z.
    bool enqueue(Cycle c, CycleWindows windows);
    // Moves every pending cycle into Z and returns them in cycle order.
    std::vector<Cycle> start_pending();
    const Instance* instance(Cycle c) const;

    // Stores a proposal for an in-flight cycle. Returns false if c is not in Z.
    bool add_proposal(Proposal p);
    // Decides c if proposals from every member of `members` are present.
    std::optional<std::vector<Event>> try_decide(Cycle c, const std::set<ReplicaId>& members);

    void clear();
    const std::set<Cycle>& in_flight() const { return in_flight_; }
    const std::map<Cycle, CycleWindows>& pending() const { return pending_; }

private:
    std::map<Cycle, CycleWindows> pending_;
    std::set<Cycle> in_flight_;
    std::map<Cycle, Instance> instances_;
};

}  // namespace vnet::consensus
