#include "vnet/core/codec.hpp"

#include <bit>
#include <cstring>

namespace vnet {

namespace {
constexpr std::uint32_t kQueueVersion = 1;
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::bytes(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s.data(), s.size());
}

std::uint8_t ByteReader::u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<std::uint8_t>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::bytes() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
}

void encode(ByteWriter& w, const SenderId& s) {
    w.bytes(s.base_id);
    w.i64(s.join_timestamp);
}

void encode(ByteWriter& w, const Event& e) {
    encode(w, e.sender);
    w.i64(e.seq);
    w.u8(static_cast<std::uint8_t>(e.kind));
    if (e.is_operation()) w.bytes(e.op);
}

void encode(ByteWriter& w, const DeliverySlot& s) {
    w.i64(s.cycle);
    w.i64(s.gamma);
    w.i64(s.lambda);
    encode(w, s.event);
}

void encode(ByteWriter& w, const DeliveryQueue& q) {
    w.u32(kQueueVersion);
    w.i64(q.next_lambda());
    w.i64(q.pruned_upto().value_or(kNoneApplied));
    w.i64(q.last_applied());
    const auto lk = q.last_key();
    w.u8(lk ? 1 : 0);
    if (lk) {
        w.i64(lk->first);
        w.i64(lk->second);
    }
    w.u64(q.size());
    for (const auto& s : q.slots()) encode(w, s);
}

SenderId decode_sender(ByteReader& r) {
    SenderId s;
    s.base_id = r.bytes();
    s.join_timestamp = r.i64();
    return s;
}

Event decode_event(ByteReader& r) {
    Event e;
    e.sender = decode_sender(r);
    e.seq = r.i64();
    const auto k = r.u8();
    if (k > 2) throw DecodeError("bad payload kind");
    e.kind = static_cast<PayloadKind>(k);
    if (e.is_operation()) e.op = r.bytes();
    return e;
}

DeliverySlot decode_slot(ByteReader& r) {
    DeliverySlot s;
    s.cycle = r.i64();
    s.gamma = r.i64();
    s.lambda = r.i64();
    s.event = decode_event(r);
    return s;
}

DeliveryQueue decode_queue(ByteReader& r) {
    if (r.u32() != kQueueVersion) throw DecodeError("unsupported queue version");
    const Lambda next = r.i64();
    const Lambda pruned = r.i64();
    const Lambda applied = r.i64();
    std::optional<OrderKey> lk;
    if (r.u8()) {
        const auto c = r.i64();
        const auto g = r.i64();
        lk = OrderKey{c, g};
    }
    const auto n = r.u64();
    std::deque<DeliverySlot> slots;
    for (std::uint64_t i = 0; i < n; ++i) slots.push_back(decode_slot(r));
    return DeliveryQueue::restore(std::move(slots), next,
                                  pruned == kNoneApplied ? std::nullopt : std::optional<Lambda>(pruned),
                                  applied, lk);
}

}  // namespace vnet
