#include "vnet/core/delivery_queue.hpp"

#include <algorithm>
#include <stdexcept>

namespace vnet {

Lambda DeliveryQueue::append(Cycle cycle, std::int64_t gamma, Event event) {
    if (event.is_bottom()) throw std::logic_error("bottom placeholder cannot enter Q_d");
    if (gamma < 0) throw std::logic_error("negative gamma");
    if (!slots_.empty() && !(order_key(slots_.back()) < OrderKey{cycle, gamma}))
        throw std::logic_error("slot key not increasing");
    if (slots_.empty() && last_key_seen_.has_value() && !(*last_key_seen_ < OrderKey{cycle, gamma}))
        throw std::logic_error("slot key not increasing");
    const Lambda l = next_lambda_++;
    slots_.push_back(DeliverySlot{cycle, gamma, std::move(event), l});
    last_key_seen_ = OrderKey{cycle, gamma};
    return l;
}

std::optional<Lambda> DeliveryQueue::lambda_of(Cycle cycle, std::int64_t gamma) const {
    const OrderKey k{cycle, gamma};
    auto it = std::lower_bound(slots_.begin(), slots_.end(), k,
                               [](const DeliverySlot& s, const OrderKey& key) { return order_key(s) < key; });
    if (it == slots_.end() || order_key(*it) != k) return std::nullopt;
    return it->lambda;
}

const DeliverySlot* DeliveryQueue::find(Lambda lambda) const {
    if (slots_.empty()) return nullptr;
    const Lambda first = slots_.front().lambda;
    if (lambda < first || lambda > slots_.back().lambda) return nullptr;
    return &slots_[static_cast<std::size_t>(lambda - first)];
}

void DeliveryQueue::mark_applied(Lambda lambda) {
    if (lambda < applied_upto_) throw std::logic_error("applied marker moved backwards");
    if (lambda >= next_lambda_) throw std::logic_error("applied beyond delivered slots");
    applied_upto_ = lambda;
}

std::size_t DeliveryQueue::prune_through(Lambda upto) {
    std::size_t removed = 0;
    while (!slots_.empty() && slots_.front().lambda <= upto) {
        slots_.pop_front();
        ++removed;
    }
    if (!pruned_upto_ || upto > *pruned_upto_) pruned_upto_ = std::min(upto, next_lambda_ - 1);
    return removed;
}

bool DeliveryQueue::consistent_with(const DeliveryQueue& other) const {
    if (slots_.empty() || other.slots_.empty()) return true;
    const Lambda lo = std::max(slots_.front().lambda, other.slots_.front().lambda);
    const Lambda hi = std::min(slots_.back().lambda, other.slots_.back().lambda);
    for (Lambda l = lo; l <= hi; ++l) {
        if (!(*find(l) == *other.find(l))) return false;
    }
    return true;
}

void DeliveryQueue::adopt(const DeliveryQueue& other) {
    if (!consistent_with(other)) throw std::logic_error("adopted queue conflicts with local queue");
    if (applied_upto_ >= other.next_lambda_) throw std::logic_error("adopted queue shorter than applied prefix");
    const Lambda applied = applied_upto_;
    *this = other;
    applied_upto_ = applied;
}

DeliveryQueue DeliveryQueue::restore(std::deque<DeliverySlot> slots, Lambda next_lambda,
                                     std::optional<Lambda> pruned_upto, Lambda applied_upto,
                                     std::optional<OrderKey> last_key) {
    DeliveryQueue q;
    q.slots_ = std::move(slots);
    q.next_lambda_ = next_lambda;
    q.pruned_upto_ = pruned_upto;
    q.applied_upto_ = applied_upto;
    q.last_key_seen_ = q.slots_.empty() ? last_key : std::optional<OrderKey>(order_key(q.slots_.back()));
    return q;
}

}  // namespace vnet
