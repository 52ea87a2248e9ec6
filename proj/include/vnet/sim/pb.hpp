#pragma once

#include <map>
#include <set>

#include "vnet/core/app_state.hpp"
#include "vnet/delivery/timing.hpp"
#include "vnet/sim/world.hpp"

namespace vnet::sim {

// Primary-backup baseline. The primary orders and applies events at cycle
// close; plain mode replies at once and forwards asynchronously, reliable
// mode replies only after every live backup acknowledged the batch.
class PbReplica : public ReplicaBase {
public:
    PbReplica(World& w, ReplicaId id, bool reliable);

    void bootstrap(const std::set<ReplicaId>& group);
    void start_fresh();

    void on_message(NodeId from, const Message& m) override;

    bool initialized() const override { return initialized_; }
    Lambda applied() const override { return app_.applied_upto(); }
    std::uint64_t app_digest() const override { return app_.digest(); }
    std::optional<ReplicaId> leader_view() const override { return primary(); }

private:
    struct Batch {
        Cycle cycle = 0;
        std::vector<Event> events;
        std::set<ReplicaId> waiting;
    };

    std::optional<ReplicaId> primary() const;
    bool is_primary() const { return primary() == id_; }
    void start_timers();
    void on_cycle_close(Cycle c);
    void commit_ready();
    void apply_events(Cycle c, const std::vector<Event>& events, bool reply);
    void on_member_state(const MemberStateMsg& m);

    bool reliable_;
    delivery::CycleClock clock_;
    Cycle first_cycle_ = 0;
    bool initialized_ = false;
    AppState app_;
    std::set<EventKey> applied_keys_;
    std::map<EventKey, Event> received_;
    std::set<ReplicaId> live_;
    std::set<ReplicaId> known_;  // replicas already sent state
    std::optional<ReplicaId> last_primary_;
    std::uint64_t member_version_ = 0;
    std::uint64_t next_batch_ = 0;
    std::map<std::uint64_t, Batch> outstanding_;
};

}  // namespace vnet::sim
