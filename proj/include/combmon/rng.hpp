#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Counter-based RNG (Philox 4x32-10). Streams are indexed by
// (seed, stream, counter), so trajectory ensembles draw identical numbers
// regardless of worker count or scheduling order.
namespace combmon {

class Philox {
 public:
  Philox(uint64_t seed, uint64_t stream)
      : key_{uint32_t(seed), uint32_t(seed >> 32)},
        stream_lo_(uint32_t(stream)), stream_hi_(uint32_t(stream >> 32)) {}

  // raw 32-bit draw at position idx of the stream
  uint32_t at(uint64_t idx) const {
    std::array<uint32_t, 4> ctr = {uint32_t(idx >> 2), uint32_t(idx >> 34),
                                   stream_lo_, stream_hi_};
    std::array<uint32_t, 4> out = block(ctr);
    return out[idx & 3];
  }

  // sequential interface
  uint32_t next_u32() { return at(pos_++); }

  double next_uniform() {  // (0, 1], never 0
    return (double(next_u32()) + 1.0) / 4294967296.0;
  }

  // Box-Muller; consumes two draws per pair, caches the second
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * M_PI * u2;
    cached_ = r * std::sin(phi);
    have_cached_ = true;
    return r * std::cos(phi);
  }

  void reset(uint64_t pos = 0) {
    pos_ = pos;
    have_cached_ = false;
  }

 private:
  static uint32_t mulhi(uint32_t a, uint32_t b) {
    return uint32_t((uint64_t(a) * b) >> 32);
  }

  std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr) const {
    uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      uint32_t lo0 = 0xD2511F53u * ctr[0];
      uint32_t hi0 = mulhi(0xD2511F53u, ctr[0]);
      uint32_t lo1 = 0xCD9E8D57u * ctr[2];
      uint32_t hi1 = mulhi(0xCD9E8D57u, ctr[2]);
      ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return ctr;
  }

  std::array<uint32_t, 2> key_;
  uint32_t stream_lo_, stream_hi_;
  uint64_t pos_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace combmon
