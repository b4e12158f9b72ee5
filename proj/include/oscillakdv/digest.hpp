#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace oscillakdv {

// FNV-1a, used for config/coefficient digests in file headers and reports.
struct Digest {
    uint64_t state = 1469598103934665603ull;

    void bytes(const void* data, size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < len; ++i) {
            state ^= p[i];
            state *= 1099511628211ull;
        }
    }
    void add(double v) { bytes(&v, sizeof v); }
    void add(int v) { bytes(&v, sizeof v); }
    void add(uint64_t v) { bytes(&v, sizeof v); }
    void add(const std::string& s) { bytes(s.data(), s.size()); }
    void add(const std::vector<double>& v) {
        for (double x : v) add(x);
    }

    uint64_t value() const { return state; }

    std::string hex() const {
        static const char* d = "0123456789abcdef";
        std::string out(16, '0');
        uint64_t v = state;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<size_t>(i)] = d[v & 0xf];
            v >>= 4;
        }
        return out;
    }
};

} // namespace oscillakdv
