#include "vnet/sim/models.hpp"

#include <cmath>

#include "vnet/core/app_state.hpp"

namespace vnet::sim {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

Rng make_stream(std::uint64_t seed, std::string_view actor, std::string_view purpose) {
    const std::uint64_t a = fnv1a(kFnvOffset, actor);
    const std::uint64_t p = fnv1a(kFnvOffset, purpose);
    const std::uint64_t s = mix_seed(seed, a, p);
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Rng(seq);
}

double sample_delay(const NetModel& net, Rng& rng) {
    if (net.jitter_std_ms <= 0) return net.d_min_ms + std::max(0.0, net.jitter_mean_ms);
    std::normal_distribution<double> n(net.jitter_mean_ms, net.jitter_std_ms);
    double j = n(rng);
    while (j < 0) j = n(rng);
    return net.d_min_ms + j;
}

bool sample_drop(const NetModel& net, Rng& rng) {
    if (net.p_loss <= 0) return false;
    if (net.p_loss >= 1) return true;
    return std::bernoulli_distribution(net.p_loss)(rng);
}

double truncated_normal_mean(double mean, double std) {
    if (std <= 0) return std::max(0.0, mean);
    const double a = -mean / std;
    const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2 * M_PI);
    const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));  // P(Z > a)
    return mean + std * pdf / tail;
}

double ChurnModel::scale_s() const { return session_mean_s / std::tgamma(1.0 + 1.0 / shape); }

double sample_session_ms(const ChurnModel& m, Rng& rng) {
    std::weibull_distribution<double> w(m.shape, m.scale_s());
    return w(rng) * 1000.0;
}

double sample_offset_ms(const ClockModel& m, Rng& rng) {
    // Draw even when synchronized so the stream position does not depend on the flag.
    const double x = m.offset_std_ms > 0 ? std::normal_distribution<double>(0, m.offset_std_ms)(rng) : 0.0;
    return m.sync_enabled ? 0.0 : x;
}

}  // namespace vnet::sim
