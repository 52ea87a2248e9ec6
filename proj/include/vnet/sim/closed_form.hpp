#pragma once

#include "vnet/sim/scenario.hpp"

namespace vnet::sim {

struct ClosedForm {
    double sync_delay_ms = 0;
    double loss_rate = 0;
};

// Analytic synchronization delay and update loss rate of each strategy.
// d_c: collection delay, d_m: reliable multicast delay, both in ms.
ClosedForm closed_form(Strategy s, int n, double p_loss, double d_c, double d_m, double p_sync);

// p^n + (1 - p^n) p^n
double replicated_loss(double p_loss, int n);
// p + (1 - p) p
double single_path_loss(double p_loss);

struct GridReport {
    int points = 0;
    int violations = 0;  // replicated loss not strictly below the single path
    int non_monotone = 0;  // replicated loss increased with n
};

// p in {0.01 .. 0.99} step 0.01, n in [n_lo, n_hi].
GridReport check_loss_grid(int n_lo = 2, int n_hi = 10);

}  // namespace vnet::sim
