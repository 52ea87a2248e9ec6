#pragma once

#include <cstdint>
#include <string_view>

#include "vnet/core/delivery_queue.hpp"

namespace vnet {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
    return h;
}

// Deterministic stand-in for the application: a running hash over every
// applied operation. Empty slots leave the digest untouched.
class AppState {
public:
    std::uint64_t digest() const { return digest_; }
    Lambda applied_upto() const { return applied_upto_; }

    // Returns true when the slot changed the state.
    bool apply(const DeliverySlot& slot);

    static AppState restore(std::uint64_t digest, Lambda applied_upto) {
        AppState a;
        a.digest_ = digest;
        a.applied_upto_ = applied_upto;
        return a;
    }

    bool operator==(const AppState&) const = default;

private:
    std::uint64_t digest_ = kFnvOffset;
    Lambda applied_upto_ = kNoneApplied;
};

}  // namespace vnet
