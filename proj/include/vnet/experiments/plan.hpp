#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vnet/sim/scenario.hpp"

namespace vnet::experiments {

// The eight studies plus the property suites the acceptance run needs.
enum class ExperimentId : std::uint8_t {
    LatencyJitter,
    DeliveryDrop,
    LatencyDrop,
    LateEvents,
    GcOnOff,
    GcCycle,
    TimeSync,
    Merkle,
    Safety,       // churn + drops, observer invariants
    CrashLeader,  // leader killed mid-instance
    FastPath,     // bounded jitter, no loss
    Neighbor,     // scripted join and leave
};

std::string to_string(ExperimentId id);
ExperimentId parse_experiment(const std::string& s);
const std::vector<ExperimentId>& studies();  // the eight E-* ids
const std::vector<ExperimentId>& suites();   // the S-* ids

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct Variant {
    std::string label;
    Overrides set;
};

// One swept scenario key and its values. Several axes form a grid.
struct Axis {
    std::string key;
    std::vector<std::string> values;
};

struct MerkleParams {
    std::size_t objects = 200;
    std::size_t components_per_object = 5;
    std::size_t files_per_component = 5;
    std::vector<std::size_t> changes;  // empty means 1..50
    int equivalence_corpora = 100;
};

struct ExperimentPlan {
    ExperimentId id = ExperimentId::LatencyJitter;
    std::uint64_t seed = 1;
    int repetitions = 1;
    sim::SimScenario base;
    std::vector<Variant> variants;  // empty means the base scenario alone
    std::vector<Axis> axes;
    MerkleParams merkle;
};

struct Point {
    std::size_t index = 0;
    std::string key;    // axis keys joined by '/'
    std::string value;  // axis values joined by '/'
    Overrides set;
};

// Cartesian product of the axes in declaration order (last axis fastest).
std::vector<Point> expand_points(const ExperimentPlan& plan);

// The same seed for every variant at a (point, repetition) gives paired runs.
std::uint64_t run_seed(std::uint64_t base, std::size_t point, int repetition);

// Desk scale: 1000 events per client. `full` restores 9000.
ExperimentPlan default_plan(ExperimentId id, bool full = false);

// Plan file: key = value lines, '#' comments.
//   experiment = E-latency-jitter
//   repetitions = 5
//   seed = 7
//   variant = fast: strategy=fast
//   sweep = net.jitter_std_ms: 50 100 150
//   set = events_per_client=500
//   merkle.objects = 200
// A plan file starts from default_plan(experiment) when `defaults = 1`.
ExperimentPlan parse_plan(std::istream& in, bool full = false);
ExperimentPlan load_plan(const std::string& path, bool full = false);
std::string format_plan(const ExperimentPlan& plan);

}  // namespace vnet::experiments
