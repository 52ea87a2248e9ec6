#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <tuple>

namespace vnet {

using Cycle = std::int64_t;
using SeqNo = std::int64_t;
using Lambda = std::int64_t;
using TimeMs = double;

// Precedes lambda 0 in every comparison.
inline constexpr Lambda kNoneApplied = -1;

struct SenderId {
    std::string base_id;
    std::int64_t join_timestamp = 0;

    // std::string compares bytes as unsigned char, so this is byte order.
    auto operator<=>(const SenderId&) const = default;
    bool operator==(const SenderId&) const = default;

    std::string str() const { return base_id + "@" + std::to_string(join_timestamp); }
};

struct ReplicaId {
    std::uint32_t value = 0;

    auto operator<=>(const ReplicaId&) const = default;
    bool operator==(const ReplicaId&) const = default;
};

enum class PayloadKind : std::uint8_t { Operation = 0, Empty = 1, Bottom = 2 };

struct EventKey {
    SenderId sender;
    SeqNo seq = 0;

    auto operator<=>(const EventKey&) const = default;
    bool operator==(const EventKey&) const = default;
};

struct Event {
    SenderId sender;
    SeqNo seq = 0;
    PayloadKind kind = PayloadKind::Operation;
    std::string op;  // opaque bytes, only meaningful for Operation

    static Event operation(SenderId s, SeqNo seq, std::string bytes) {
        return Event{std::move(s), seq, PayloadKind::Operation, std::move(bytes)};
    }
    static Event empty(SenderId s, SeqNo seq) { return Event{std::move(s), seq, PayloadKind::Empty, {}}; }
    static Event bottom(SenderId s, SeqNo seq) { return Event{std::move(s), seq, PayloadKind::Bottom, {}}; }

    bool is_operation() const { return kind == PayloadKind::Operation; }
    bool is_empty() const { return kind == PayloadKind::Empty; }
    bool is_bottom() const { return kind == PayloadKind::Bottom; }
    EventKey key() const { return EventKey{sender, seq}; }

    bool operator==(const Event&) const = default;
};

}  // namespace vnet
