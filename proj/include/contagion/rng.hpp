#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string_view>

namespace contagion {

struct philox_ctr {
  uint32_t v[4];
};

// Philox4x32-10 counter-based block cipher. One block = 128 random bits as a
// pure function of (key, counter).
inline philox_ctr philox4x32(philox_ctr c, uint32_t k0, uint32_t k1) {
  constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    uint64_t p0 = uint64_t(M0) * c.v[0];
    uint64_t p1 = uint64_t(M1) * c.v[2];
    philox_ctr n;
    n.v[0] = uint32_t(p1 >> 32) ^ c.v[1] ^ k0;
    n.v[1] = uint32_t(p1);
    n.v[2] = uint32_t(p0 >> 32) ^ c.v[3] ^ k1;
    n.v[3] = uint32_t(p0);
    c = n;
    k0 += W0;
    k1 += W1;
  }
  return c;
}

// Entity-indexed 64-bit word. Layout: index gets 48 bits, entity 64, cls 16.
// Distinct (cls, entity, index) triples never collide by construction.
inline uint64_t cbrng64(uint64_t seed, uint16_t cls, uint64_t entity, uint64_t index) {
  philox_ctr c;
  c.v[0] = uint32_t(index);
  c.v[1] = uint32_t(index >> 32) & 0xFFFFu;
  c.v[1] |= uint32_t(cls) << 16;
  c.v[2] = uint32_t(entity);
  c.v[3] = uint32_t(entity >> 32);
  philox_ctr r = philox4x32(c, uint32_t(seed), uint32_t(seed >> 32));
  return (uint64_t(r.v[1]) << 32) | r.v[0];
}

// uniform in the open interval (0,1); safe as log() argument. 52 bits so the
// endpoints 2^-53 and 1-2^-53 are exact.
inline double u01_open(uint64_t word) {
  return (double(word >> 12) + 0.5) * 0x1.0p-52;
}

// uniform in [0,1)
inline double u01(uint64_t word) { return double(word >> 11) * 0x1.0p-53; }

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Deterministic sub-seed derivation: independent streams for ("graph", rep),
// ("clocks", rep), etc., all reproducible from one master seed.
inline uint64_t derive_stream(uint64_t master, std::string_view tag, uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ fnv1a64(tag)) + index);
}

// Event-clock classes. Recovery clocks are keyed by vertex, infection clocks by
// directed half-edge (source side), thinning uniforms ride on the same entity.
enum ClockClass : uint16_t {
  kRecovery = 0,
  kInfection = 1,
  kThinning = 2,
  kSampling = 3,
  kHeights = 4,
};

// Absolute event streams for one dynamics realization. The i-th inter-event
// gap of every entity is a pure function of (seed, entity, i), so two runs
// that consult the streams in different orders still see identical times.
class ClockStream {
 public:
  ClockStream(uint64_t seed, double lambda) : seed_(seed), lambda_(lambda) {}

  double recovery_gap(uint64_t v, uint64_t i) const {
    return -std::log(u01_open(cbrng64(seed_, kRecovery, v, i)));
  }
  double infection_gap(uint64_t half_edge, uint64_t i) const {
    return -std::log(u01_open(cbrng64(seed_, kInfection, half_edge, i))) / lambda_;
  }
  double thinning_u(uint64_t half_edge, uint64_t i) const {
    return u01(cbrng64(seed_, kThinning, half_edge, i));
  }

  uint64_t seed() const { return seed_; }
  double lambda() const { return lambda_; }

  // same seed, different rate: the coupled pair for thinning arguments
  ClockStream with_lambda(double lambda) const { return ClockStream(seed_, lambda); }

 private:
  uint64_t seed_;
  double lambda_;
};

// Sequential draws for sampling tasks (degree sequences, matchings, subset
// picks). Counter-based underneath, so copies are cheap and state is one int.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : seed_(seed), idx_(0) {}

  uint64_t u64() { return cbrng64(seed_, kSampling, 0, idx_++); }
  double uniform() { return u01(u64()); }
  double uniform_open() { return u01_open(u64()); }

  // unbiased via rejection on the top of the range
  uint64_t uniform_int(uint64_t n) {
    uint64_t lim = ~uint64_t(0) - ~uint64_t(0) % n;
    uint64_t x;
    do {
      x = u64();
    } while (x >= lim);
    return x % n;
  }

  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  uint64_t seed() const { return seed_; }
  uint64_t position() const { return idx_; }

 private:
  uint64_t seed_;
  uint64_t idx_;
};

}  // namespace contagion
