#include "vnet/sim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace vnet::sim {

double Metrics::mean_latency() const {
    if (latencies.empty()) return 0.0;
    return std::accumulate(latencies.begin(), latencies.end(), 0.0) / static_cast<double>(latencies.size());
}

double Metrics::p95_latency() const {
    if (latencies.empty()) return 0.0;
    std::vector<double> v = latencies;
    const std::size_t k = static_cast<std::size_t>(0.95 * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

double Metrics::mean_qd() const {
    if (qd_series.empty()) return 0.0;
    double s = 0;
    for (const auto& [t, n] : qd_series) s += static_cast<double>(n);
    return s / static_cast<double>(qd_series.size());
}

double Metrics::d_c() const { return collect_samples ? collect_sum_ms / collect_samples : 0.0; }

std::string Metrics::serialize() const {
    std::string out;
    char buf[96];
    auto kv = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%s=%a\n", k, v);
        out += buf;
    };
    auto ku = [&](const char* k, std::uint64_t v) {
        std::snprintf(buf, sizeof buf, "%s=%llu\n", k, static_cast<unsigned long long>(v));
        out += buf;
    };
    ku("latency_count", latencies.size());
    double lsum = 0;
    for (double l : latencies) lsum += l;
    kv("latency_sum", lsum);
    ku("events_sent", events_sent);
    ku("updates_delivered", updates_delivered);
    ku("consensus_triggers", consensus_triggers);
    ku("cycles_with_trigger", cycles_with_trigger);
    ku("cycles_delivered", cycles_delivered);
    ku("instances_decided", instances_decided);
    ku("query_replies", query_replies);
    kv("sync_delay_sum_ms", sync_delay_sum_ms);
    kv("group_delay_sum_ms", group_delay_sum_ms);
    kv("collect_sum_ms", collect_sum_ms);
    ku("qd_samples", qd_series.size());
    ku("qd_max", qd_max);
    ku("qd_final", qd_final);
    ku("pruned_slots", pruned_slots);
    ku("elections", elections);
    ku("reconfigurations", reconfigurations);
    ku("replicas_spawned", replicas_spawned);
    ku("replicas_crashed", replicas_crashed);
    ku("group_failed", group_failed);
    ku("late_staged", late_staged);
    ku("late_dropped", late_dropped);
    ku("stale_dropped", stale_dropped);
    ku("unknown_sender", unknown_sender);
    ku("past_leave", past_leave);
    ku("divergence", divergence);
    ku("messages_sent", messages_sent);
    ku("messages_dropped", messages_dropped);
    ku("retransmissions", retransmissions);
    ku("violations", violations.total());
    ku("final_replicas", final_replicas);
    kv("final_min_applied", static_cast<double>(final_min_applied));
    kv("end_time_ms", end_time_ms);
    for (const auto& [t, n] : qd_series) {
        std::snprintf(buf, sizeof buf, "qd@%a=%zu\n", t, n);
        out += buf;
    }
    return out;
}

}  // namespace vnet::sim
