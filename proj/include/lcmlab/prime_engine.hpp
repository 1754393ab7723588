#pragma once

// Smallest-prime-factor sieve, factorization, and prime partial sums.
//
// Every downstream module factors through SpfTable: membership tests need
// squarefreeness and omega(n), the defect needs phi(d), and all prime sums
// walk the ascending prime list kept alongside the table.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "lcmlab/error.hpp"
#include "lcmlab/summation.hpp"

namespace lcmlab {

inline constexpr std::uint64_t kDefaultSieveLimit = 10'000'000;
inline constexpr std::uint64_t kMaxSieveLimit = 100'000'000;

/// Immutable smallest-prime-factor lookup for n in [2, limit].
class SpfTable {
public:
    SpfTable() = default;

    std::uint64_t limit() const noexcept { return limit_; }

    /// Smallest prime factor of n; requires 2 <= n <= limit().
    std::uint32_t spf(std::uint64_t n) const noexcept { return spf_[n]; }

    bool is_prime(std::uint64_t n) const noexcept {
        return n >= 2 && n <= limit_ && spf_[n] == n;
    }

    /// All primes <= limit(), ascending.
    std::span<const std::uint32_t> primes() const noexcept { return primes_; }

    /// spf values for n = 2..limit in order (the cache payload).
    std::span<const std::uint32_t> values() const noexcept {
        return std::span<const std::uint32_t>(spf_).subspan(2);
    }

    friend bool operator==(const SpfTable& a, const SpfTable& b) {
        return a.limit_ == b.limit_ && a.spf_ == b.spf_;
    }

    /// Adopts spf values indexed by n (entries 0 and 1 ignored) and derives
    /// the prime list. Callers are responsible for validity.
    static SpfTable adopt(std::uint64_t limit, std::vector<std::uint32_t> spf) {
        SpfTable t;
        t.limit_ = limit;
        t.spf_ = std::move(spf);
        t.spf_[0] = 0;
        t.spf_[1] = 0;
        for (std::uint64_t n = 2; n <= limit; ++n) {
            if (t.spf_[n] == n) t.primes_.push_back(static_cast<std::uint32_t>(n));
        }
        return t;
    }

private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

inline void check_sieve_limit(std::uint64_t limit, std::uint64_t max_limit = kMaxSieveLimit) {
    if (limit < 2 || limit > max_limit) {
        throw CapacityError("sieve limit " + std::to_string(limit) + " outside [2, " +
                            std::to_string(max_limit) + "]");
    }
}

/// Linear sieve; every composite is crossed off exactly once by its
/// smallest prime factor.
inline SpfTable build_spf(std::uint64_t limit, std::uint64_t max_limit = kMaxSieveLimit) {
    check_sieve_limit(limit, std::min(max_limit, kMaxSieveLimit));
    std::vector<std::uint32_t> spf(limit + 1, 0);
    std::vector<std::uint32_t> primes;
    primes.reserve(limit < 100 ? 32 : static_cast<std::size_t>(1.26 * limit / std::log(double(limit))));
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t lp = spf[i];
        for (std::uint32_t p : primes) {
            if (p > lp || i * p > limit) break;
            spf[i * p] = p;
        }
    }
    return SpfTable::adopt(limit, std::move(spf));
}

struct PrimePower {
    std::uint64_t prime = 0;
    std::uint32_t exponent = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization with strictly increasing primes. Fixed capacity:
/// no 64-bit integer has more than 15 distinct prime factors.
class Factorization {
public:
    static constexpr std::size_t kCapacity = 15;

    Factorization() = default;

    std::uint64_t n() const noexcept { return n_; }
    std::size_t omega() const noexcept { return size_; }
    std::span<const PrimePower> factors() const noexcept { return {factors_.data(), size_}; }

    /// Appends p^e; p must exceed every prime already present.
    void push(std::uint64_t p, std::uint32_t e) {
        if (size_ == kCapacity) throw DomainError("too many distinct prime factors");
        factors_[size_++] = {p, e};
        for (std::uint32_t i = 0; i < e; ++i) n_ *= p;
    }

    /// Squarefree product of the given ascending distinct primes.
    static Factorization from_primes(std::span<const std::uint64_t> primes) {
        Factorization f;
        for (auto p : primes) f.push(p, 1);
        return f;
    }

    friend bool operator==(const Factorization& a, const Factorization& b) {
        return a.n_ == b.n_ && std::ranges::equal(a.factors(), b.factors());
    }

private:
    std::uint64_t n_ = 1;
    std::size_t size_ = 0;
    std::array<PrimePower, kCapacity> factors_{};
};

/// n = 1 gives the empty factorization; n = 0 is a domain error.
inline Factorization factorize(std::uint64_t n, const SpfTable& table) {
    if (n == 0) throw DomainError("cannot factorize 0");
    if (n > table.limit()) {
        throw CapacityError("factorize: " + std::to_string(n) + " exceeds sieve limit " +
                            std::to_string(table.limit()));
    }
    Factorization f;
    while (n > 1) {
        const std::uint32_t p = table.spf(n);
        std::uint32_t e = 0;
        do {
            n /= p;
            ++e;
        } while (n % p == 0);
        f.push(p, e);
    }
    return f;
}

inline std::uint64_t euler_phi(const Factorization& f) noexcept {
    std::uint64_t phi = 1;
    for (const auto& [p, e] : f.factors()) {
        phi *= p - 1;
        for (std::uint32_t i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

inline bool is_squarefree(const Factorization& f) noexcept {
    return std::ranges::all_of(f.factors(), [](const PrimePower& pp) { return pp.exponent == 1; });
}

namespace detail {

inline std::uint64_t checked_bound(double y, const SpfTable& table, const char* what) {
    if (std::isnan(y)) throw DomainError(std::string(what) + ": NaN bound");
    if (y > static_cast<double>(table.limit())) {
        throw CapacityError(std::string(what) + ": bound exceeds sieve limit " +
                            std::to_string(table.limit()));
    }
    if (y < 0) return 0;
    return static_cast<std::uint64_t>(std::floor(y));
}

/// Index range into table.primes() for lo < p <= hi.
inline std::span<const std::uint32_t> prime_range(double lo, double hi, const SpfTable& table,
                                                  const char* what) {
    const std::uint64_t top = checked_bound(hi, table, what);
    auto ps = table.primes();
    auto end = std::ranges::upper_bound(ps, top, {}, [](std::uint32_t p) { return std::uint64_t{p}; });
    auto begin = std::ranges::upper_bound(ps.begin(), end, lo, {},
                                          [](std::uint32_t p) { return static_cast<double>(p); });
    return {begin, end};
}

}  // namespace detail

/// Compensated sum of 1/p over primes p <= y, ascending.
inline double mertens_sum(double y, const SpfTable& table) {
    CompensatedSum acc;
    for (std::uint32_t p : detail::prime_range(0.0, y, table, "mertens_sum")) acc.add(1.0 / p);
    return acc.value();
}

/// Primes p with lo < p <= hi, ascending.
inline std::vector<std::uint64_t> primes_in(double lo, double hi, const SpfTable& table) {
    auto r = detail::prime_range(lo, hi, table, "primes_in");
    return {r.begin(), r.end()};
}

// ---------------------------------------------------------------------------
// Cache file: "LCMSPF1\0", u32 version, u64 limit, u32 spf[2..limit], u32 CRC-32
// of everything before it. All integers little-endian.

inline constexpr std::array<char, 8> kCacheMagic = {'L', 'C', 'M', 'S', 'P', 'F', '1', '\0'};
inline constexpr std::uint32_t kCacheVersion = 1;
inline constexpr std::size_t kCacheHeaderSize = 8 + 4 + 8;

inline std::uint64_t cache_file_size(std::uint64_t limit) {
    return kCacheHeaderSize + 4 * (limit - 1) + 4;
}

namespace detail {

template <class T>
void put_le(unsigned char* out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

template <class T>
T get_le(const unsigned char* in) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[i]) << (8 * i);
    return v;
}

inline std::array<unsigned char, kCacheHeaderSize> cache_header(std::uint64_t limit) {
    std::array<unsigned char, kCacheHeaderSize> h{};
    std::memcpy(h.data(), kCacheMagic.data(), 8);
    put_le<std::uint32_t>(h.data() + 8, kCacheVersion);
    put_le<std::uint64_t>(h.data() + 12, limit);
    return h;
}

inline std::uint32_t crc_update(std::uint32_t crc, const unsigned char* data, std::size_t len) {
    constexpr std::size_t kChunk = 1u << 30;
    uLong c = crc;
    while (len > 0) {
        const std::size_t n = std::min(len, kChunk);
        c = ::crc32(c, data, static_cast<uInt>(n));
        data += n;
        len -= n;
    }
    return static_cast<std::uint32_t>(c);
}

/// Visits the payload as little-endian bytes in bounded chunks.
template <class F>
void for_each_payload_chunk(std::span<const std::uint32_t> values, F&& f) {
    if constexpr (std::endian::native == std::endian::little) {
        f(reinterpret_cast<const unsigned char*>(values.data()), values.size_bytes());
    } else {
        std::vector<unsigned char> buf;
        constexpr std::size_t kBlock = 1 << 16;
        for (std::size_t i = 0; i < values.size(); i += kBlock) {
            const std::size_t n = std::min(kBlock, values.size() - i);
            buf.resize(4 * n);
            for (std::size_t j = 0; j < n; ++j) put_le<std::uint32_t>(buf.data() + 4 * j, values[i + j]);
            f(buf.data(), buf.size());
        }
    }
}

}  // namespace detail

/// CRC-32 of the serialized header and payload, i.e. the trailer value a
/// cache file for this table carries.
inline std::uint32_t table_checksum(const SpfTable& table) {
    const auto header = detail::cache_header(table.limit());
    std::uint32_t crc = detail::crc_update(0, header.data(), header.size());
    detail::for_each_payload_chunk(table.values(), [&](const unsigned char* p, std::size_t n) {
        crc = detail::crc_update(crc, p, n);
    });
    return crc;
}

inline void save_cache(const SpfTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    const auto header = detail::cache_header(table.limit());
    out.write(reinterpret_cast<const char*>(header.data()), header.size());
    std::uint32_t crc = detail::crc_update(0, header.data(), header.size());
    detail::for_each_payload_chunk(table.values(), [&](const unsigned char* p, std::size_t n) {
        out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
        crc = detail::crc_update(crc, p, n);
    });
    std::array<unsigned char, 4> trailer{};
    detail::put_le<std::uint32_t>(trailer.data(), crc);
    out.write(reinterpret_cast<const char*>(trailer.data()), 4);
    if (!out.flush()) throw Error("write failed for " + path.string());
}

/// Loads and fully validates a cache file. Wrong magic or an impossible
/// header is a FormatError, a foreign version a VersionError, and any
/// length or CRC mismatch a ChecksumError.
inline SpfTable load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);

    std::array<unsigned char, kCacheHeaderSize> header{};
    in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(std::min<std::uint64_t>(size, header.size())));
    if (size < 8 || std::memcmp(header.data(), kCacheMagic.data(), 8) != 0) {
        throw FormatError(path.string() + ": not a sieve cache (bad magic)");
    }
    if (size < kCacheHeaderSize + 4) throw ChecksumError(path.string() + ": truncated header");
    const auto version = detail::get_le<std::uint32_t>(header.data() + 8);
    if (version != kCacheVersion) {
        throw VersionError(path.string() + ": unsupported cache version " + std::to_string(version));
    }
    const auto limit = detail::get_le<std::uint64_t>(header.data() + 12);
    if (limit < 2 || limit > kMaxSieveLimit) {
        throw FormatError(path.string() + ": corrupt header (limit " + std::to_string(limit) + ")");
    }
    if (size != cache_file_size(limit)) {
        throw ChecksumError(path.string() + ": length " + std::to_string(size) + " does not match limit " +
                            std::to_string(limit));
    }

    std::vector<std::uint32_t> spf(limit + 1, 0);
    auto payload = std::span<std::uint32_t>(spf).subspan(2);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size_bytes()));
    std::array<unsigned char, 4> trailer{};
    in.read(reinterpret_cast<char*>(trailer.data()), 4);
    if (!in) throw ChecksumError(path.string() + ": short read");
    if constexpr (std::endian::native != std::endian::little) {
        for (auto& v : payload) v = detail::get_le<std::uint32_t>(reinterpret_cast<const unsigned char*>(&v));
    }

    std::uint32_t crc = detail::crc_update(0, header.data(), header.size());
    detail::for_each_payload_chunk(payload, [&](const unsigned char* p, std::size_t n) {
        crc = detail::crc_update(crc, p, n);
    });
    if (crc != detail::get_le<std::uint32_t>(trailer.data())) {
        throw ChecksumError(path.string() + ": CRC-32 mismatch");
    }

    for (std::uint64_t n = 2; n <= limit; ++n) {
        const std::uint32_t p = spf[n];
        if (p < 2 || p > n || n % p != 0 || spf[p] != p) {
            throw FormatError(path.string() + ": invalid spf entry at n=" + std::to_string(n));
        }
    }
    return SpfTable::adopt(limit, std::move(spf));
}

}  // namespace lcmlab
