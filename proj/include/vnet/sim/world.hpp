#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vnet/core/delivery_queue.hpp"
#include "vnet/sim/kernel.hpp"
#include "vnet/sim/messages.hpp"
#include "vnet/sim/metrics.hpp"
#include "vnet/sim/models.hpp"
#include "vnet/sim/scenario.hpp"

namespace vnet::sim {

class World;

class Actor {
public:
    Actor(World& w, NodeId node) : w_(w), node_(node) {}
    virtual ~Actor() = default;
    Actor(const Actor&) = delete;
    Actor& operator=(const Actor&) = delete;

    NodeId node() const { return node_; }
    bool alive() const { return alive_; }
    virtual void on_message(NodeId from, const Message& m) = 0;

protected:
    World& w_;
    NodeId node_;

private:
    friend class World;
    bool alive_ = true;
};

// What the world and the observer need to see of any replica.
class ReplicaBase : public Actor {
public:
    ReplicaBase(World& w, ReplicaId id) : Actor(w, id.value), id_(id) {}
    ReplicaId rid() const { return id_; }

    virtual bool initialized() const = 0;
    virtual Lambda applied() const = 0;
    virtual std::uint64_t app_digest() const = 0;
    virtual std::size_t queue_length() const { return 0; }
    virtual std::optional<ReplicaId> leader_view() const = 0;
    virtual std::int64_t epoch() const { return 0; }
    virtual bool busy() const { return false; }  // LE or GR in progress
    virtual bool has_in_flight() const { return false; }
    // Initialized and inside its own view of G; the group survives while one exists.
    virtual bool member() const { return initialized(); }

protected:
    ReplicaId id_;
};

// Global safety checks over every replica of the run.
class Observer {
public:
    explicit Observer(Metrics& m) : m_(m) {}

    void on_apply(ReplicaId r, const DeliverySlot& s, std::uint64_t digest_after);
    void on_windows(ReplicaId r, Cycle c, std::uint64_t digest);
    void on_prune(ReplicaId r, Lambda upto, Lambda min_live_applied);
    void on_load(int kind, std::int64_t epoch, std::int64_t cid, std::uint64_t digest);
    void milestone(const std::string& key, Lambda l);
    void flag(std::uint64_t Violations::*field, const std::string& what);

private:
    Metrics& m_;
    std::unordered_map<Lambda, std::pair<std::uint64_t, std::uint64_t>> log_;
    std::unordered_map<Cycle, std::uint64_t> omega_;
    std::map<std::tuple<int, std::int64_t, std::int64_t>, std::uint64_t> loads_;
    std::unordered_map<std::string, Lambda> milestones_;
};

class ClientActor;

class World {
public:
    explicit World(SimScenario sc);
    ~World();

    Metrics run();

    Simulator& sim() { return sim_; }
    TimeMs now() const { return sim_.now(); }
    const SimScenario& scenario() const { return sc_; }
    Metrics& metrics() { return metrics_; }
    Observer& observer() { return obs_; }

    // Unreliable datagram; the link class follows from the endpoints.
    void send(NodeId from, NodeId to, MsgPtr m);
    // Ack + exponential backoff until acked or either end is dead.
    void send_reliable(NodeId from, NodeId to, MsgPtr m);
    // Runs fn at t unless `owner` has crashed by then.
    void timer(NodeId owner, TimeMs t, std::function<void()> fn);

    void crash(NodeId n);
    bool is_alive(NodeId n) const;
    ReplicaId spawn_replica();

    ReplicaBase* replica(ReplicaId id);
    NodeId client_node(const std::string& base_id) const;
    std::vector<NodeId> client_nodes(const std::vector<std::string>& base_ids) const;
    const std::vector<NodeId>& all_client_nodes() const { return client_list_; }

    Lambda min_live_applied() const;
    void note_trigger(Cycle c);
    void note_cycle_delivered(Cycle c, TimeMs close_time);
    void check_group();

    TimeMs workload_end() const { return workload_end_; }
    TimeMs end_time() const { return end_time_; }
    Rng& stream(NodeId n, const char* purpose);

private:
    void transmit(NodeId from, NodeId to, std::size_t size, std::function<void()> on_arrival);
    Actor* actor(NodeId n);
    void dispatch(NodeId from, NodeId to, const MsgPtr& m);
    void reliable_attempt(std::uint64_t id);
    const NetModel* link_for(NodeId a, NodeId b) const;
    std::unique_ptr<ReplicaBase> make_replica(ReplicaId id);
    void schedule_churn(ReplicaId id);
    void try_crash_leader(TimeMs deadline);
    void sample_queues();
    void finish();

    SimScenario sc_;
    Simulator sim_;
    Metrics metrics_;
    Observer obs_{metrics_};

    std::unique_ptr<Actor> rendezvous_;
    std::map<std::uint32_t, std::unique_ptr<ReplicaBase>> replicas_;
    std::vector<std::unique_ptr<ClientActor>> clients_;
    std::unordered_map<std::string, NodeId> client_by_base_;
    std::vector<NodeId> client_list_;
    std::uint32_t next_replica_ = 1;

    struct Streams {
        Rng delay, drop;
    };
    std::unordered_map<NodeId, Streams> net_streams_;
    std::map<std::pair<NodeId, std::string>, Rng> streams_;

    struct Pending {
        NodeId from = 0, to = 0;
        MsgPtr msg;
        TimeMs rto = 0;
        int attempts = 0;
        bool delivered = false;
    };
    std::unordered_map<std::uint64_t, Pending> reliable_;
    std::uint64_t next_reliable_ = 0;

    std::unordered_set<Cycle> trigger_cycles_;
    std::unordered_set<Cycle> delivered_cycles_;
    TimeMs workload_end_ = 0;
    TimeMs end_time_ = 0;
};

// Runs one scenario to completion.
Metrics run(const SimScenario& sc);

}  // namespace vnet::sim
