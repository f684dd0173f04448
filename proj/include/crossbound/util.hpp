#ifndef CROSSBOUND_UTIL_HPP
#define CROSSBOUND_UTIL_HPP

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace crossbound {

namespace detail {

// shortest decimal that round-trips through double
inline std::string render_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw std::runtime_error("float render failed");
    return std::string(buf, res.ptr);
}

}  // namespace detail

// Worker count: CROSSBOUND_THREADS env var wins, otherwise hardware.
inline unsigned thread_count() {
    if (const char* env = std::getenv("CROSSBOUND_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Static partition of [0, n) over worker threads; body(i) must be
// safe to run concurrently for distinct i.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = thread_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// FNV-1a, used for basis/certificate fingerprints.
struct fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void feed(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    }
    void feed_u64(std::uint64_t v) { feed(&v, sizeof v); }
    void feed_i64(std::int64_t v) { feed(&v, sizeof v); }
    void feed_str(const std::string& s) { feed(s.data(), s.size()); }
    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(16, '0');
        std::uint64_t v = h;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[v & 0xf];
            v >>= 4;
        }
        return out;
    }
};

// xorshift128+; deterministic across platforms, used by the property tests
// and the simplex sampling.
struct splitmix_rng {
    std::uint64_t s0, s1;
    explicit splitmix_rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed
        auto next = [&seed]() {
            seed += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            return z ^ (z >> 31);
        };
        s0 = next();
        s1 = next();
    }
    std::uint64_t next_u64() {
        std::uint64_t x = s0, y = s1;
        s0 = y;
        x ^= x << 23;
        s1 = x ^ y ^ (x >> 17) ^ (y >> 26);
        return s1 + y;
    }
    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * (1.0 / 9007199254740992.0);
    }
    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }
};

}  // namespace crossbound

#endif
