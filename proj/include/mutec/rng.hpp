#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace mutec {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Order-independent stream derivation: every consumer of randomness seeds
// its own engine from mix(...) of the run seed plus its identity, so two
// structurally identical computations draw identical numbers regardless of
// what else ran before them.
inline uint64_t mix_seed(uint64_t a) { return splitmix64(a); }
inline uint64_t mix_seed(uint64_t a, uint64_t b) { return splitmix64(splitmix64(a) ^ b); }
inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
    return splitmix64(mix_seed(a, b) ^ c);
}
inline uint64_t mix_seed(uint64_t a, std::string_view s) { return mix_seed(a, fnv1a64(s)); }
inline uint64_t mix_seed(uint64_t a, std::string_view s, uint64_t c) {
    return mix_seed(mix_seed(a, fnv1a64(s)), c);
}

inline std::mt19937_64 make_engine(uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace mutec
