#include "vnet/content/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace vnet::content {

Digest Sha256Provider::hash(std::string_view bytes) const {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
        throw std::runtime_error("EVP_Digest failed");
    return out;
}

const HashProvider& default_provider() {
    static const Sha256Provider p;
    return p;
}

std::string to_hex(const Digest& d) {
    static const char* hex = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto b : d) {
        s.push_back(hex[b >> 4]);
        s.push_back(hex[b & 0xf]);
    }
    return s;
}

}  // namespace vnet::content
