#include "vnet/sim/kernel.hpp"

#include <stdexcept>

namespace vnet::sim {

void Simulator::at(TimeMs t, Task fn) {
    if (t < now_) throw std::logic_error("cannot schedule in the past");
    queue_.push(Item{t, next_seq_++, std::move(fn)});
}

void Simulator::run_until(TimeMs t_end) {
    while (!stopped_ && !queue_.empty() && queue_.top().t <= t_end) {
        // priority_queue::top is const; move the task out before popping.
        Item it = std::move(const_cast<Item&>(queue_.top()));
        queue_.pop();
        now_ = it.t;
        ++executed_;
        it.fn();
    }
    if (!stopped_) now_ = std::max(now_, t_end);
}

}  // namespace vnet::sim
