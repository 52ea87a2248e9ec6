#pragma once

#include <map>
#include <optional>
#include <set>

#include "vnet/consensus/consensus.hpp"
#include "vnet/core/app_state.hpp"
#include "vnet/delivery/engine.hpp"
#include "vnet/delivery/timing.hpp"
#include "vnet/gc/gossip.hpp"
#include "vnet/membership/group.hpp"
#include "vnet/sim/world.hpp"

namespace vnet::sim {

// One member of a replica group running fast delivery (or the
// consensus-for-every-cycle baseline), GC, election and reconfiguration.
class ReplicaActor : public ReplicaBase {
public:
    ReplicaActor(World& w, ReplicaId id);

    // Member of the initial group.
    void bootstrap(const std::set<ReplicaId>& group, const delivery::SenderSet& senders);
    // Fresh replica spawned by the Rendezvous; waits for a state load.
    void start_fresh();

    void on_message(NodeId from, const Message& m) override;

    bool initialized() const override { return initialized_; }
    Lambda applied() const override { return eng_.queue().last_applied(); }
    std::uint64_t app_digest() const override { return app_.digest(); }
    std::size_t queue_length() const override { return eng_.queue().size(); }
    std::optional<ReplicaId> leader_view() const override { return grp_.leader; }
    std::int64_t epoch() const override { return grp_.epoch; }
    bool busy() const override { return grp_.le || grp_.gr; }
    bool member() const override { return initialized_ && grp_.members.count(id_) > 0; }
    bool has_in_flight() const override { return !ledger_.in_flight().empty() || !ledger_.pending().empty(); }

    const delivery::DeliveryEngine& engine() const { return eng_; }
    const membership::GroupState& group() const { return grp_; }
    const consensus::ConsensusLedger& ledger() const { return ledger_; }

private:
    enum class LoadKind : int { Leader = 1, Config = 2 };

    struct Candidacy {
        std::uint64_t round = 0;
        bool loaded = false;
        std::map<ReplicaId, membership::SyncPackage> states;
        std::set<ReplicaId> asked;
        std::set<ReplicaId> ack_from;
        std::set<ReplicaId> acks;
        TimeMs started = 0;
    };
    struct Reconfig {
        std::int64_t cid = 0;
        std::map<ReplicaId, membership::SyncPackage> states;
        TimeMs started = 0;
    };

    bool is_leader() const { return grp_.leader && *grp_.leader == id_; }
    bool consensus_ok(std::int64_t epoch, std::int64_t cid) const {
        return initialized_ && !grp_.le && !grp_.gr && epoch == grp_.epoch && cid == grp_.cid;
    }

    void start_timers();
    void on_cycle_close(Cycle c);
    void on_gc_tick(std::int64_t k);

    void pump();
    bool election_step();
    void start_candidacy();
    void candidate_progress();
    bool reconfig_step();
    void reconfig_progress();
    void deliver_loop();
    void answer_deferred();
    void leader_start_pending();
    void leader_try_decide();

    void process_delivered(const delivery::DeliveryOutcome& out);
    void apply_slot(const DeliverySlot& s);
    void send_updates(const DeliverySlot& s);
    void send_handshake(const std::string& base_id);
    void send_query(Cycle c, const delivery::CycleWindows& w);
    void leader_on_query(ReplicaId from, Cycle c, const delivery::CycleWindows& w);
    void member_answer(Cycle c, const delivery::CycleWindows& w);

    void handle_event(const Event& e);
    void handle_member_state(const MemberStateMsg& m);
    void handle_query(ReplicaId from, const QueryMsg& m);
    void handle_query_result(ReplicaId from, const QueryResultMsg& m);
    void handle_decision(ReplicaId from, const DecisionMsg& m);
    void handle_gc(ReplicaId from, Lambda lambda_c);
    void handle_le_query(ReplicaId from, const LeQueryMsg& m);
    void handle_le_state(ReplicaId from, const LeStateMsg& m);
    void handle_load_leader(ReplicaId from, const LoadLeaderMsg& m);
    void handle_nack(ReplicaId from, const NackMsg& m);
    void handle_ack(ReplicaId from, const AckMsg& m);
    void handle_gr_query(ReplicaId from, const GrQueryMsg& m);
    void handle_ge_state(ReplicaId from, const GeStateMsg& m);
    void handle_load_config(ReplicaId from, const LoadConfigMsg& m);

    // Consensus traffic for a configuration this replica has not loaded yet.
    struct Held {
        ReplicaId from;
        std::int64_t epoch = 0;
        std::int64_t cid = 0;
        Body body;
    };
    bool hold_if_ahead(ReplicaId from, std::int64_t epoch, std::int64_t cid, const Body& b);
    void replay_ahead();

    membership::SyncPackage package() const;
    membership::InitState init_state() const;
    void load(const membership::SyncPackage& p, LoadKind kind, ReplicaId leader);
    void notify_clients();
    void send_group(const std::set<ReplicaId>& to, const MsgPtr& m, bool reliable);
    std::set<ReplicaId> others(const std::set<ReplicaId>& s) const;

    const SimScenario& sc_;
    delivery::CycleClock clock_;
    delivery::DeliveryEngine eng_;
    membership::GroupState grp_;
    consensus::ConsensusLedger ledger_;
    gc::GossipState gossip_;
    AppState app_;
    bool initialized_ = false;
    bool shortcut_ = true;  // leader answers a QUERY from its own holdings

    std::map<Cycle, TimeMs> queried_;
    std::map<Cycle, delivery::CycleWindows> deferred_;
    std::map<Cycle, std::set<ReplicaId>> requesters_;
    std::map<Cycle, TimeMs> instance_start_;
    std::map<SenderId, std::vector<Event>> stash_;
    std::map<SenderId, Lambda> last_real_;
    std::vector<Held> ahead_;
    std::optional<Candidacy> cand_;
    std::optional<Reconfig> reconf_;
    std::uint64_t round_counter_ = 0;
    TimeMs le_started_ = 0;
    std::uint64_t member_version_ = 0;
};

}  // namespace vnet::sim
