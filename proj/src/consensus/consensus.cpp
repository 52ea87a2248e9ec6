#include "vnet/consensus/consensus.hpp"

#include <stdexcept>

namespace vnet::consensus {

std::vector<Event> decide(const CycleWindows& windows, const std::vector<Proposal>& proposals) {
    std::map<EventKey, Event> chosen;
    for (const auto& w : windows)
        for (SeqNo j = w.window.min_seq; j <= w.window.max_seq; ++j)
            chosen.emplace(EventKey{w.sender, j}, Event::empty(w.sender, j));

    for (const auto& p : proposals) {
        for (const auto& e : p.entries) {
            auto it = chosen.find(e.key());
            if (it == chosen.end()) throw std::logic_error("proposal entry outside the queried windows");
            if (e.is_bottom()) continue;
            if (e.is_empty()) throw std::logic_error("Empty cannot be proposed");
            if (it->second.is_operation()) {
                if (!(it->second == e)) throw std::logic_error("conflicting proposals for " + e.sender.str());
            } else {
                it->second = e;
            }
        }
    }
    std::vector<Event> out;
    out.reserve(chosen.size());
    for (auto& [k, e] : chosen) out.push_back(std::move(e));
    return out;
}

bool ConsensusLedger::enqueue(Cycle c, CycleWindows windows) {
    if (pending_.count(c) || in_flight_.count(c)) return false;
    pending_.emplace(c, std::move(windows));
    return true;
}

std::vector<Cycle> ConsensusLedger::start_pending() {
    std::vector<Cycle> started;
    for (auto& [c, w] : pending_) {
        in_flight_.insert(c);
        instances_[c] = Instance{std::move(w), {}};
        started.push_back(c);
    }
    pending_.clear();
    return started;
}

const Instance* ConsensusLedger::instance(Cycle c) const {
    auto it = instances_.find(c);
    return it == instances_.end() ? nullptr : &it->second;
}

bool ConsensusLedger::add_proposal(Proposal p) {
    auto it = instances_.find(p.cycle);
    if (it == instances_.end()) return false;
    it->second.proposals[p.replica] = std::move(p);
    return true;
}

std::optional<std::vector<Event>> ConsensusLedger::try_decide(Cycle c, const std::set<ReplicaId>& members) {
    auto it = instances_.find(c);
    if (it == instances_.end()) return std::nullopt;
    std::vector<Proposal> props;
    for (const auto& m : members) {
        auto p = it->second.proposals.find(m);
        if (p == it->second.proposals.end()) return std::nullopt;
        props.push_back(p->second);
    }
    auto decided = decide(it->second.windows, props);
    instances_.erase(it);
    in_flight_.erase(c);
    return decided;
}

void ConsensusLedger::clear() {
    pending_.clear();
    in_flight_.clear();
    instances_.clear();
}

}  // namespace vnet::consensus
