#include "vnet/delivery/timing.hpp"

#include <cmath>
#include <stdexcept>

namespace vnet::delivery {

namespace {
constexpr double kEps = 1e-9;
}

TimingParams TimingParams::from_bounds(TimeMs low, TimeMs high) {
    TimingParams p{high - low, low, high};
    p.validate();
    return p;
}

void TimingParams::validate() const {
    if (!(delta_t > 0)) throw std::invalid_argument("cycle length must be positive");
    if (std::abs(delta_t - (net_high - net_low)) > kEps)
        throw std::invalid_argument("cycle length must equal net_high - net_low");
}

SendSchedule schedule(TimeMs t_start, std::int64_t n, const TimingParams& p) {
    if (n < 1) throw std::invalid_argument("event ordinal starts at 1");
    const double k = static_cast<double>(n);
    return SendSchedule{t_start - p.net_low + (k - 1) * p.delta_t, t_start + k * p.delta_t};
}

Cycle CycleClock::closed_by(TimeMs now) const {
    return static_cast<Cycle>(std::floor((now - t0) / delta_t + kEps));
}

Cycle CycleClock::first_cycle_for(TimeMs t_start) const {
    return static_cast<Cycle>(std::llround((t_start + delta_t - t0) / delta_t));
}

Cycle join_first_cycle(TimeMs t_recv_k1, TimeMs t_now, Cycle c, TimeMs delta_t) {
    return static_cast<Cycle>(std::ceil((t_recv_k1 - t_now) / delta_t - kEps)) + c;
}

}  // namespace vnet::delivery
