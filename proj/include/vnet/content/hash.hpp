#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace vnet::content {

using Digest = std::array<std::uint8_t, 32>;

class HashProvider {
public:
    virtual ~HashProvider() = default;
    virtual Digest hash(std::string_view bytes) const = 0;
    virtual const char* name() const = 0;
};

// SHA-256 through OpenSSL EVP.
class Sha256Provider final : public HashProvider {
public:
    Digest hash(std::string_view bytes) const override;
    const char* name() const override { return "sha256"; }
};

const HashProvider& default_provider();

std::string to_hex(const Digest& d);

}  // namespace vnet::content
