#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vnet/core/types.hpp"

namespace vnet::sim {

// Safety checks counted by the global observer. Every field must stay 0.
struct Violations {
    std::uint64_t prefix = 0;          // different event at the same lambda
    std::uint64_t app_digest = 0;      // different state after the same lambda
    std::uint64_t gc_unsafe = 0;       // pruned beyond a live replica's applied marker
    std::uint64_t omega = 0;           // different windows for the same cycle
    std::uint64_t state_sync = 0;      // different Q_d/E/G after the same load
    std::uint64_t decision = 0;        // conflicting decisions or late decision != delivered
    std::uint64_t priority = 0;        // decision applied with LE or GR set
    std::uint64_t leader = 0;          // leader/epoch disagreement at quiescence
    std::uint64_t milestone = 0;       // join/leave events at different lambdas
    std::uint64_t protocol_error = 0;  // exception inside a replica handler

    std::uint64_t total() const {
        return prefix + app_digest + gc_unsafe + omega + state_sync + decision + priority + leader + milestone +
               protocol_error;
    }
};

struct Metrics {
    // Interaction latency of measured events (send -> first UPDATE), ms.
    std::vector<double> latencies;
    std::uint64_t events_sent = 0;
    std::uint64_t updates_delivered = 0;

    std::uint64_t consensus_triggers = 0;  // (replica, cycle) pairs that sent QUERY
    std::uint64_t cycles_with_trigger = 0;
    std::uint64_t cycles_delivered = 0;
    std::uint64_t instances_decided = 0;
    std::uint64_t query_replies = 0;

    double sync_delay_sum_ms = 0;  // sum over cycles of first delivery - close
    std::uint64_t sync_delay_samples = 0;
    double group_delay_sum_ms = 0;  // one-way replica<->replica delays (d_m)
    std::uint64_t group_delay_samples = 0;
    double collect_sum_ms = 0;  // instance start -> decision at the leader
    std::uint64_t collect_samples = 0;

    // Q_d length samples (max over live replicas at each sample instant).
    std::vector<std::pair<TimeMs, std::size_t>> qd_series;
    std::size_t qd_max = 0;
    std::size_t qd_final = 0;
    std::uint64_t pruned_slots = 0;

    std::uint64_t elections = 0;
    std::uint64_t reconfigurations = 0;
    double election_time_sum_ms = 0;
    double reconfig_time_sum_ms = 0;
    std::uint64_t replicas_spawned = 0;
    std::uint64_t replicas_crashed = 0;
    bool group_failed = false;

    std::uint64_t late_staged = 0;
    std::uint64_t late_dropped = 0;
    std::uint64_t stale_dropped = 0;
    std::uint64_t unknown_sender = 0;
    std::uint64_t past_leave = 0;
    std::uint64_t divergence = 0;  // primary-backup takeovers with lost state

    std::uint64_t messages_sent = 0;
    std::uint64_t messages_dropped = 0;
    std::uint64_t retransmissions = 0;

    std::uint64_t milestone_checks = 0;
    std::uint64_t omega_checks = 0;
    std::uint64_t state_loads = 0;
    std::uint64_t final_replicas = 0;  // live initialized replicas at the end
    Lambda final_min_applied = kNoneApplied;
    Lambda final_max_applied = kNoneApplied;
    TimeMs end_time_ms = 0;

    Violations violations;
    std::string first_error;

    double delivery_rate() const {
        return events_sent ? static_cast<double>(updates_delivered) / static_cast<double>(events_sent) : 0.0;
    }
    double p_sync() const {
        return cycles_delivered ? static_cast<double>(cycles_with_trigger) / static_cast<double>(cycles_delivered)
                                : 0.0;
    }
    double mean_latency() const;
    double p95_latency() const;
    double mean_qd() const;
    double sync_delay_ms() const { return sync_delay_samples ? sync_delay_sum_ms / sync_delay_samples : 0.0; }
    double d_m() const { return group_delay_samples ? group_delay_sum_ms / group_delay_samples : 0.0; }
    double d_c() const;

    // Stable text form; equal metrics give equal strings.
    std::string serialize() const;
};

}  // namespace vnet::sim
