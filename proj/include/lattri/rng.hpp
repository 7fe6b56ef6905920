#pragma once

// Counter-based randomness: each chain step s of stream r under seed z reads
// one Philox4x32-10 block at counter (s, r) with key z. Random access means
// checkpoint/resume and coupled chains need no generator state beyond
// (seed, stream, step).

#include <array>
#include <cstdint>

namespace lattri {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{M0} * c[0];
    const std::uint64_t p1 = std::uint64_t{M1} * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += W0;
    k[1] += W1;
  }
  return c;
}

// The two per-step draws, in the fixed order (midpoint pick, acceptance
// uniform), as a pure function of (seed, stream, step).
struct StepDraws {
  std::uint64_t pick_bits;
  double unif;  // in [0, 1)
};

inline StepDraws draws_at(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t step) {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(step),
                          static_cast<std::uint32_t>(step >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
  const PhiloxKey key{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32)};
  const PhiloxCounter b = philox4x32(ctr, key);
  const std::uint64_t pick = std::uint64_t{b[0]} | (std::uint64_t{b[1]} << 32);
  const std::uint64_t mant = (std::uint64_t{b[2]} | (std::uint64_t{b[3]} << 32)) >> 11;
  return {pick, static_cast<double>(mant) * 0x1.0p-53};
}

// Map 64 random bits onto [0, bound) by fixed-point multiply. The residual
// bias is bound/2^64, far below anything observable here.
inline std::uint32_t uniform_index(std::uint64_t bits, std::uint32_t bound) {
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(bits) * bound) >> 64);
}

}  // namespace lattri
