#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nkma {

/// Fixed-length binary vector; the search-space point.
struct Genome {
    std::vector<std::uint8_t> bits;  // each element is 0 or 1

    Genome() = default;
    explicit Genome(std::size_t n) : bits(n, 0) {}

    std::size_t size() const { return bits.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits[i]; }
    std::uint8_t& operator[](std::size_t i) { return bits[i]; }

    void flip(std::size_t i) { bits[i] ^= 1u; }

    bool operator==(const Genome& other) const = default;

    /// Lexicographic order on the bit string (bit 0 most significant).
    bool operator<(const Genome& other) const { return bits < other.bits; }

    std::string to_string() const {
        std::string s(bits.size(), '0');
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) s[i] = '1';
        }
        return s;
    }

    static Genome from_string(const std::string& s);
};

struct GenomeHash {
    std::size_t operator()(const Genome& g) const {
        // FNV-1a over the bit bytes
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::uint8_t b : g.bits) {
            h ^= b;
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace nkma
