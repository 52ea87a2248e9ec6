#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "vnet/core/types.hpp"

namespace vnet::sim {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
// Independent stream per (seed, actor, purpose).
Rng make_stream(std::uint64_t seed, std::string_view actor, std::string_view purpose);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

struct NetModel {
    double d_min_ms = 50;
    double jitter_mean_ms = 50;
    double jitter_std_ms = 50;
    double p_loss = 0;
    bool operator==(const NetModel&) const = default;
};

// d_min + Normal(mean, std) resampled until non-negative.
double sample_delay(const NetModel& net, Rng& rng);
bool sample_drop(const NetModel& net, Rng& rng);
// Mean of Normal(mean, std) truncated to [0, inf).
double truncated_normal_mean(double mean, double std);

struct ChurnModel {
    bool enabled = false;
    double session_mean_s = 1800;
    double shape = 0.5;

    double scale_s() const;  // mean = scale * Gamma(1 + 1/shape)
    bool operator==(const ChurnModel&) const = default;
};

double sample_session_ms(const ChurnModel& m, Rng& rng);

struct ClockModel {
    double offset_std_ms = 0;
    bool sync_enabled = false;
    bool operator==(const ClockModel&) const = default;
};

double sample_offset_ms(const ClockModel& m, Rng& rng);

}  // namespace vnet::sim
