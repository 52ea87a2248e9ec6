#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vnet/core/delivery_queue.hpp"
#include "vnet/core/types.hpp"

namespace vnet {

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Little-endian fixed-width integers, strings as u32 length + bytes.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v);
    void bytes(std::string_view s);

    const std::string& data() const { return buf_; }
    std::string take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    std::string buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    std::string bytes();

    bool done() const { return pos_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw DecodeError("trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n) throw DecodeError("truncated input");
    }
    std::string_view data_;
    std::size_t pos_ = 0;
};

void encode(ByteWriter& w, const SenderId& s);
void encode(ByteWriter& w, const Event& e);
void encode(ByteWriter& w, const DeliverySlot& s);
void encode(ByteWriter& w, const DeliveryQueue& q);

SenderId decode_sender(ByteReader& r);
Event decode_event(ByteReader& r);
DeliverySlot decode_slot(ByteReader& r);
DeliveryQueue decode_queue(ByteReader& r);

template <typename T>
std::string to_bytes(const T& v) {
    ByteWriter w;
    encode(w, v);
    return w.take();
}

}  // namespace vnet
