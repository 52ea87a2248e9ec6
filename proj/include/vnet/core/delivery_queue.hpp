#pragma once

#include <deque>
#include <optional>
#include <utility>

#include "vnet/core/types.hpp"

namespace vnet {

struct DeliverySlot {
    Cycle cycle = 0;
    std::int64_t gamma = 0;
    Event event;
    Lambda lambda = 0;

    bool operator==(const DeliverySlot&) const = default;
};

using OrderKey = std::pair<Cycle, std::int64_t>;

inline OrderKey order_key(const DeliverySlot& s) { return {s.cycle, s.gamma}; }

// Replicated log. Slots are kept in (cycle, gamma) order, lambda is
// assigned from a counter at insertion and survives pruning.
class DeliveryQueue {
public:
    // Throws std::logic_error if (cycle, gamma) does not follow the last key
    // or the event is a Bottom placeholder.
    Lambda append(Cycle cycle, std::int64_t gamma, Event event);

    std::optional<Lambda> lambda_of(Cycle cycle, std::int64_t gamma) const;
    const DeliverySlot* find(Lambda lambda) const;

    Lambda last_applied() const { return applied_upto_; }
    void mark_applied(Lambda lambda);

    // Removes every slot with lambda <= upto. Returns how many were removed.
    std::size_t prune_through(Lambda upto);
    std::optional<Lambda> pruned_upto() const { return pruned_upto_; }

    // Lambda the next appended slot will receive; also the total count of
    // slots ever inserted.
    Lambda next_lambda() const { return next_lambda_; }
    std::optional<Lambda> last_lambda() const {
        if (next_lambda_ == 0) return std::nullopt;
        return next_lambda_ - 1;
    }
    std::size_t size() const { return slots_.size(); }
    bool empty() const { return slots_.empty(); }
    const std::deque<DeliverySlot>& slots() const { return slots_; }

    // Slots present in both queues (same lambda) hold identical content.
    bool consistent_with(const DeliveryQueue& other) const;

    // Replaces slots and counters with those of `other`, keeping the local
    // applied marker. Throws if the local applied prefix disagrees.
    void adopt(const DeliveryQueue& other);

    // Full overwrite including the applied marker (used for snapshots).
    static DeliveryQueue restore(std::deque<DeliverySlot> slots, Lambda next_lambda,
                                 std::optional<Lambda> pruned_upto, Lambda applied_upto,
                                 std::optional<OrderKey> last_key = std::nullopt);
    std::optional<OrderKey> last_key() const { return last_key_seen_; }

    bool operator==(const DeliveryQueue&) const = default;

private:
    std::deque<DeliverySlot> slots_;
    Lambda next_lambda_ = 0;
    std::optional<Lambda> pruned_upto_;
    Lambda applied_upto_ = kNoneApplied;
    std::optional<OrderKey> last_key_seen_;
};

}  // namespace vnet
