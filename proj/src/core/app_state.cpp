#include "vnet/core/app_state.hpp"

#include <stdexcept>

namespace vnet {

bool AppState::apply(const DeliverySlot& slot) {
    if (slot.lambda != applied_upto_ + 1) throw std::logic_error("application skipped a slot");
    applied_upto_ = slot.lambda;
    const Event& e = slot.event;
    if (!e.is_operation()) return false;
    std::uint64_t h = fnv1a_u64(digest_, static_cast<std::uint64_t>(slot.lambda));
    h = fnv1a(h, e.sender.base_id);
    h = fnv1a_u64(h, static_cast<std::uint64_t>(e.sender.join_timestamp));
    h = fnv1a_u64(h, static_cast<std::uint64_t>(e.seq));
    h = fnv1a(h, e.op);
    digest_ = h;
    return true;
}

}  // namespace vnet
