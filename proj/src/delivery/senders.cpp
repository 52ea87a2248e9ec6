#include "vnet/delivery/senders.hpp"

#include <limits>
#include <stdexcept>

#include "vnet/core/app_state.hpp"

namespace vnet::delivery {

SeqNo seq_of_cycle(const SenderRecord& s, Cycle c) {
    if (c < s.first_cycle) throw std::out_of_range("cycle precedes sender's first cycle");
    return c - s.first_cycle;
}

SeqWindow expected_window(const SenderRecord& s, Cycle c) {
    SeqWindow w{s.max_seq_delivered + 1, seq_of_cycle(s, c)};
    if (w.min_seq > w.max_seq) throw std::logic_error("empty expected window for " + s.id.str());
    return w;
}

std::uint64_t windows_digest(const CycleWindows& ws) {
    std::uint64_t h = kFnvOffset;
    for (const auto& w : ws) {
        h = fnv1a(h, w.sender.base_id);
        h = fnv1a_u64(h, static_cast<std::uint64_t>(w.sender.join_timestamp));
        h = fnv1a_u64(h, static_cast<std::uint64_t>(w.window.min_seq));
        h = fnv1a_u64(h, static_cast<std::uint64_t>(w.window.max_seq));
    }
    return h;
}

std::size_t window_event_count(const CycleWindows& ws) {
    std::size_t n = 0;
    for (const auto& w : ws) n += static_cast<std::size_t>(w.window.size());
    return n;
}

bool SenderSet::add(SenderRecord r) {
    auto id = r.id;
    return records_.emplace(std::move(id), std::move(r)).second;
}

SenderRecord* SenderSet::find(const SenderId& id) {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

const SenderRecord* SenderSet::find(const SenderId& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

const SenderRecord* SenderSet::find_base(const std::string& base_id) const {
    const SenderRecord* best = nullptr;
    for (auto it = records_.lower_bound(SenderId{base_id, std::numeric_limits<std::int64_t>::min()});
         it != records_.end() && it->first.base_id == base_id; ++it)
        best = &it->second;
    return best;
}

std::vector<const SenderRecord*> SenderSet::active_at(Cycle c) const {
    std::vector<const SenderRecord*> out;
    out.reserve(records_.size());
    for (const auto& [id, r] : records_)
        if (r.active_at(c)) out.push_back(&r);
    return out;
}

std::optional<int> SenderSet::index_of(const SenderId& id, Cycle c) const {
    int i = 0;
    for (const auto& [sid, r] : records_) {
        if (!r.active_at(c)) continue;
        ++i;
        if (sid == id) return i;
    }
    return std::nullopt;
}

std::vector<SenderId> SenderSet::retire_before(Cycle c) {
    std::vector<SenderId> gone;
    for (auto it = records_.begin(); it != records_.end();) {
        if (it->second.last_cycle && *it->second.last_cycle < c) {
            gone.push_back(it->first);
            it = records_.erase(it);
        } else {
            ++it;
        }
    }
    return gone;
}

std::int64_t gamma(const SenderId& sender, SeqNo seq, Cycle c, const std::vector<const SenderRecord*>& active) {
    std::int64_t offset = 0;
    for (const SenderRecord* r : active) {
        if (r->id == sender) return seq + offset;
        offset += seq_of_cycle(*r, c) + 1;
    }
    throw std::logic_error("gamma: sender not active at cycle");
}

}  // namespace vnet::delivery
