#pragma once

#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

#include "vnet/sim/world.hpp"

namespace vnet::sim {

// A sender: one event per cycle to every replica of its group (or to the
// primary under the primary-backup baselines).
class ClientActor : public Actor {
public:
    // `quota` measured workload events are sent first; afterwards no-ops keep
    // the sender's windows filled until the run ends.
    ClientActor(World& w, NodeId node, std::string base_id, int quota, double clock_offset_ms);

    void start(SenderId id, TimeMs t_start, const std::vector<ReplicaId>& replicas);
    // Carried by the next event instead of a workload op.
    void queue_control(std::string op) { control_.push_back(std::move(op)); }

    void on_message(NodeId from, const Message& m) override;

    const std::string& base_id() const { return base_; }
    bool started() const { return started_; }
    double clock_offset_ms() const { return offset_; }

private:
    void schedule_next();
    void send_next(std::int64_t n);

    std::string base_;
    int quota_;
    double offset_;
    bool started_ = false;
    SenderId id_;
    TimeMs t_start_ = 0;
    int sent_workload_ = 0;
    std::int64_t next_n_ = 1;
    std::uint64_t gen_ = 0;
    std::int64_t cid_ = 0;
    std::vector<NodeId> targets_;
    std::deque<std::string> control_;
    std::unordered_map<SeqNo, TimeMs> pending_;  // measured seq -> true send time
};

}  // namespace vnet::sim
