#pragma once

#include <cstdint>

#include "vnet/core/types.hpp"

namespace vnet::delivery {

struct TimingParams {
    TimeMs delta_t = 200.0;
    TimeMs net_low = 50.0;
    TimeMs net_high = 250.0;

    // delta_t = net_high - net_low
    static TimingParams from_bounds(TimeMs low, TimeMs high);
    void validate() const;
    bool operator==(const TimingParams&) const = default;
};

struct SendSchedule {
    TimeMs send = 0;
    TimeMs recv_deadline = 0;
};

// Timing of the n-th event (n >= 1) of a sender whose first cycle starts at t_start.
SendSchedule schedule(TimeMs t_start, std::int64_t n, const TimingParams& p);

// Cycle c closes (its collection timeout fires) at t0 + c * delta_t.
struct CycleClock {
    TimeMs t0 = 0;
    TimeMs delta_t = 200.0;

    TimeMs close_time(Cycle c) const { return t0 + static_cast<double>(c) * delta_t; }
    // Highest cycle whose close time is <= now.
    Cycle closed_by(TimeMs now) const;
    // First cycle of a sender that starts at t_start: the cycle closing at t_start + delta_t.
    Cycle first_cycle_for(TimeMs t_start) const;
};

// c_k = ceil((t_recv_k1 - t_now) / delta_t) + c
Cycle join_first_cycle(TimeMs t_recv_k1, TimeMs t_now, Cycle c, TimeMs delta_t);

}  // namespace vnet::delivery
