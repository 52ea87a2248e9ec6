#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vnet/delivery/collector.hpp"
#include "vnet/delivery/timing.hpp"
#include "vnet/sim/models.hpp"

namespace vnet::sim {

enum class Strategy : std::uint8_t { Fast, PrimaryBackup, ReliablePrimaryBackup, ConsensusTotalOrder };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

// A neighbor join or leave announced by `notifier` (index into the initial
// clients) at simulated time `at_ms`.
struct ScriptedChange {
    enum class Kind : std::uint8_t { Join, Leave } kind = Kind::Join;
    std::string base_id;
    TimeMs at_ms = 0;
    int notifier = 0;
    bool operator==(const ScriptedChange&) const = default;
};

struct SimScenario {
    std::uint64_t seed = 1;
    int client_count = 10;
    int group_size = 5;
    int spare_count = 0;
    delivery::TimingParams timing;
    int events_per_client = 1000;
    Strategy strategy = Strategy::Fast;
    delivery::WindowPolicy late_policy = delivery::WindowPolicy::Dynamic;

    NetModel net;                              // client <-> replica
    NetModel group_net{30, 10, 5, 0};          // replica <-> replica
    TimeMs control_delay_ms = 5;               // Rendezvous channel
    double bandwidth_bytes_per_ms = 1000;      // state transfer cost

    ChurnModel churn;
    ClockModel clock;

    bool gc_enabled = true;
    TimeMs gc_period_ms = 5000;
    TimeMs update_timeout_ms = 5000;
    TimeMs heartbeat_ms = 200;
    TimeMs failure_timeout_ms = 300;
    TimeMs query_retry_ms = 1000;
    TimeMs client_start_ms = 1000;
    TimeMs drain_ms = 1000;
    TimeMs qd_sample_ms = 200;
    int join_lead_cycles = 5;

    // Fault injection: crash the leader at the first instant >= this time
    // at which it has an instance in flight. Negative disables.
    TimeMs crash_leader_at_ms = -1;

    std::vector<ScriptedChange> script;

    void validate() const;
    bool operator==(const SimScenario&) const = default;
};

// key=value lines; '#' starts a comment. Unknown keys throw.
SimScenario parse_scenario(std::istream& in);
SimScenario parse_scenario_text(const std::string& text);
// Applies a single key=value assignment.
void set_scenario_key(SimScenario& s, const std::string& key, const std::string& value);
std::string format_scenario(const SimScenario& s);

}  // namespace vnet::sim
