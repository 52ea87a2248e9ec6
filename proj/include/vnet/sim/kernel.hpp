#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "vnet/core/types.hpp"

namespace vnet::sim {

// Single-threaded discrete-event kernel; same-time events run in insertion order.
class Simulator {
public:
    using Task = std::function<void()>;

    TimeMs now() const { return now_; }
    void at(TimeMs t, Task fn);
    void after(TimeMs dt, Task fn) { at(now_ + dt, std::move(fn)); }

    // Runs events with time <= t_end, then sets now to t_end.
    void run_until(TimeMs t_end);
    void stop() { stopped_ = true; }
    bool stopped() const { return stopped_; }
    std::uint64_t executed() const { return executed_; }
    std::size_t pending() const { return queue_.size(); }

private:
    struct Item {
        TimeMs t;
        std::uint64_t seq;
        Task fn;
    };
    struct Later {
        bool operator()(const Item& a, const Item& b) const { return a.t > b.t || (a.t == b.t && a.seq > b.seq); }
    };
    std::priority_queue<Item, std::vector<Item>, Later> queue_;
    TimeMs now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t executed_ = 0;
    bool stopped_ = false;
};

}  // namespace vnet::sim
