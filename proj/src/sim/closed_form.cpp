#include "vnet/sim/closed_form.hpp"

#include <cmath>
#include <stdexcept>

namespace vnet::sim {

double replicated_loss(double p, int n) {
    const double pn = std::pow(p, n);
    return pn + (1 - pn) * pn;
}

double single_path_loss(double p) { return p + (1 - p) * p; }

ClosedForm closed_form(Strategy s, int n, double p, double d_c, double d_m, double p_sync) {
    if (p < 0 || p > 1) throw std::invalid_argument("p_loss must lie in [0, 1]");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    switch (s) {
        case Strategy::PrimaryBackup: return {0.0, single_path_loss(p)};
        case Strategy::ReliablePrimaryBackup: return {d_c + d_m, single_path_loss(p)};
        case Strategy::ConsensusTotalOrder: return {d_c + 2 * d_m, replicated_loss(p, n)};
        case Strategy::Fast: return {(d_c + 2 * d_m) * p_sync, replicated_loss(p, n)};
    }
    return {};
}

GridReport check_loss_grid(int n_lo, int n_hi) {
    GridReport r;
    for (int i = 1; i <= 99; ++i) {
        const double p = i / 100.0;
        double prev = replicated_loss(p, n_lo - 1);
        for (int n = n_lo; n <= n_hi; ++n) {
            const double f = replicated_loss(p, n);
            ++r.points;
            if (!(f < single_path_loss(p))) ++r.violations;
            if (f > prev) ++r.non_monotone;
            prev = f;
        }
    }
    return r;
}

}  // namespace vnet::sim
