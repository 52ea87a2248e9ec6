#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vnet/experiments/runner.hpp"

namespace vnet::experiments {

// Predicted vs simulated synchronization delay and update loss, averaged
// over the repetitions of one (experiment, variant, sweep point).
struct ClosedFormRow {
    std::string experiment;
    std::string variant;
    std::string sweep_value;
    std::string strategy;
    int n = 0;
    int runs = 0;
    double p_loss = 0;
    double d_c_ms = 0;
    double d_m_ms = 0;
    double p_sync = 0;
    double predicted_sync_delay_ms = 0;
    double simulated_sync_delay_ms = 0;
    double sync_delay_abs_err = 0;
    double predicted_loss = 0;
    double simulated_loss = 0;
    double loss_abs_err = 0;
};

std::vector<ClosedFormRow> compare_with_closed_form(const std::vector<RunRow>& rows);
void write_compare_csv(std::ostream& out, const std::vector<ClosedFormRow>& rows);

enum class Verdict { Pass, Fail, NotRun };
const char* to_string(Verdict v);

struct CriterionResult {
    int number = 0;
    std::string title;
    Verdict verdict = Verdict::NotRun;
    std::string measured;
    std::string threshold;
};

struct ResultBundle {
    std::vector<RunRow> rows;
    std::vector<MerkleRow> merkle;
    std::map<std::string, double> wall_s;  // per experiment, when known
};

// Evaluates the thirteen acceptance criteria against whatever results are
// present; criteria whose experiment is missing come back NotRun.
std::vector<CriterionResult> evaluate_criteria(const ResultBundle& results);

// One line per criterion. Returns 0 only when every criterion passed.
int emit_summary(std::ostream& out, const std::vector<CriterionResult>& results);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vnet::experiments
