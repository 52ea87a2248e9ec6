#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vnet/content/merkle.hpp"
#include "vnet/experiments/plan.hpp"
#include "vnet/sim/metrics.hpp"

namespace vnet::experiments {

// One simulation run. Column order of the CSV is frozen; see csv_header().
struct RunRow {
    std::string experiment;
    std::string variant;
    std::string sweep_key;
    std::string sweep_value;
    int rep = 0;
    std::uint64_t seed = 0;
    std::string strategy;
    int group_size = 0;
    double p_loss = 0;

    std::uint64_t events_sent = 0;
    std::uint64_t updates_delivered = 0;
    double delivery_rate = 0;
    double mean_latency_ms = 0;
    double p95_latency_ms = 0;
    double mean_qd = 0;
    std::uint64_t max_qd = 0;
    std::uint64_t final_qd = 0;
    double consensus_rate = 0;  // p_sync estimate
    std::uint64_t consensus_triggers = 0;
    double sync_delay_ms = 0;
    double d_c_ms = 0;
    double d_m_ms = 0;
    std::uint64_t elections = 0;
    std::uint64_t reconfigurations = 0;
    std::uint64_t late_staged = 0;
    std::uint64_t late_dropped = 0;
    std::uint64_t divergence = 0;
    bool group_failed = false;

    std::uint64_t violations = 0;
    std::uint64_t viol_prefix = 0;
    std::uint64_t viol_app_digest = 0;
    std::uint64_t viol_gc = 0;
    std::uint64_t viol_omega = 0;
    std::uint64_t viol_state_sync = 0;
    std::uint64_t viol_decision = 0;
    std::uint64_t viol_leader = 0;
    std::uint64_t viol_milestone = 0;
    std::uint64_t milestone_checks = 0;
    std::uint64_t omega_checks = 0;
    std::string first_error;
};

RunRow make_row(const sim::Metrics& m);

// Figure 3 study: one row per number of changed files, plus one row per
// random corpus of the equivalence check (variant "equivalence").
struct MerkleRow {
    std::string variant;  // "sweep" or "equivalence"
    std::uint64_t corpus_seed = 0;
    std::size_t files = 0;
    std::size_t changed_files = 0;
    std::size_t merkle_comparisons = 0;
    std::size_t flat_comparisons = 0;
    std::size_t oracle_comparisons = 0;  // brute-force descent count
    std::size_t path_cost = 0;           // closed form, single change only (0 otherwise)
    bool sets_equal = false;
};

// Q_d length samples, kept for the GC studies.
struct QdSample {
    std::string variant;
    std::string sweep_value;
    int rep = 0;
    double t_ms = 0;
    std::uint64_t qd = 0;
};

struct PlanResult {
    ExperimentId id = ExperimentId::LatencyJitter;
    std::vector<RunRow> rows;
    std::vector<MerkleRow> merkle;
    std::vector<QdSample> qd;
};

using Progress = std::function<void(std::size_t done, std::size_t total)>;

// Runs every (variant, point, repetition) on `workers` threads. Rows come
// back sorted by (variant order, point, repetition) whatever the schedule.
PlanResult run_plan(const ExperimentPlan& plan, int workers = 1, const Progress& progress = {});

// Comparison count of a full top-down descent that charges a level only
// below a mismatching parent.
std::size_t descent_oracle(const content::ContentTree& a, const content::ContentTree& b);

std::string csv_header();
void write_csv(std::ostream& out, const std::vector<RunRow>& rows);
std::vector<RunRow> read_csv(std::istream& in);

std::string merkle_csv_header();
void write_merkle_csv(std::ostream& out, const std::vector<MerkleRow>& rows);
std::vector<MerkleRow> read_merkle_csv(std::istream& in);

void write_qd_csv(std::ostream& out, const std::vector<QdSample>& rows);

}  // namespace vnet::experiments
