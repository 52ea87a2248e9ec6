#pragma once

#include <map>
#include <string>
#include <optional>
#include <vector>

#include "vnet/core/types.hpp"

namespace vnet::delivery {

struct SenderRecord {
    SenderId id;
    TimeMs t_start = 0;
    Cycle first_cycle = 0;
    SeqNo max_seq_delivered = -1;
    // Last cycle the sender contributes to, set when it leaves.
    std::optional<Cycle> last_cycle;

    bool active_at(Cycle c) const { return c >= first_cycle && (!last_cycle || c <= *last_cycle); }
    bool operator==(const SenderRecord&) const = default;
};

// Seq(s, c) = c - c0. Throws std::out_of_range before the first cycle.
SeqNo seq_of_cycle(const SenderRecord& s, Cycle c);

struct SeqWindow {
    SeqNo min_seq = 0;
    SeqNo max_seq = 0;

    bool contains(SeqNo j) const { return j >= min_seq && j <= max_seq; }
    std::int64_t size() const { return max_seq - min_seq + 1; }
    bool operator==(const SeqWindow&) const = default;
};

// Omega(s, c) = [MaxSeq + 1, Seq(s, c)]. Throws std::logic_error when empty.
SeqWindow expected_window(const SenderRecord& s, Cycle c);

struct SenderWindow {
    SenderId sender;
    SeqWindow window;
    bool operator==(const SenderWindow&) const = default;
};

// Per-sender windows of one cycle, sorted by sender.
using CycleWindows = std::vector<SenderWindow>;

std::uint64_t windows_digest(const CycleWindows& w);
std::size_t window_event_count(const CycleWindows& w);

class SenderSet {
public:
    // Returns false if the id is already present.
    bool add(SenderRecord r);
    bool contains(const SenderId& id) const { return records_.count(id) != 0; }
    SenderRecord* find(const SenderId& id);
    const SenderRecord* find(const SenderId& id) const;
    // Most recent join of a base id still present.
    const SenderRecord* find_base(const std::string& base_id) const;

    // Senders active at c in SenderId order; position + 1 is Index(s).
    std::vector<const SenderRecord*> active_at(Cycle c) const;
    std::optional<int> index_of(const SenderId& id, Cycle c) const;

    // Drops records whose last cycle is before c. Returns the dropped ids.
    std::vector<SenderId> retire_before(Cycle c);

    const std::map<SenderId, SenderRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool operator==(const SenderSet&) const = default;

private:
    std::map<SenderId, SenderRecord> records_;
};

// gamma = Seq(e) + sum over senders k before Sender(e) of (Seq(k, c) + 1).
// `active` must be the sorted active set at c. Throws if the sender is absent.
std::int64_t gamma(const SenderId& sender, SeqNo seq, Cycle c, const std::vector<const SenderRecord*>& active);

}  // namespace vnet::delivery
