#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace pepa {

/// FNV-1a, 64-bit.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string digest_hex(std::string_view s) { return hex64(fnv1a64(s)); }

}  // namespace pepa
