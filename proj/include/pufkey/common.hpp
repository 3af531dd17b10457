#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pufkey {

inline constexpr const char* kVersion = "0.1.0";

// Bad user-supplied data: schema violations, invalid distributions,
// out-of-range parameters. Maps to CLI exit code 2.
class invalid_input : public std::runtime_error {
 public:
  explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// A computation would exceed a configured resource cap (enumeration or
// memory). Maps to CLI exit code 3. Carries required vs allowed so the
// caller can report an actionable message.
class resource_limit : public std::runtime_error {
 public:
  resource_limit(const std::string& what, std::uint64_t required,
                 std::uint64_t allowed)
      : std::runtime_error(what + " (required " + std::to_string(required) +
                           ", allowed " + std::to_string(allowed) + ")"),
        required_(required),
        allowed_(allowed) {}
  std::uint64_t required() const { return required_; }
  std::uint64_t allowed() const { return allowed_; }

 private:
  std::uint64_t required_;
  std::uint64_t allowed_;
};

// --- deterministic random streams -----------------------------------------
//
// Every randomized computation draws from a stream derived as
// stream(master_seed, purpose, counter). Work items (trials, restarts,
// codeword draws) get their own counter, so results do not depend on
// thread count or scheduling. Purposes are fixed small integers.

namespace stream_purpose {
inline constexpr std::uint64_t codebook_v = 1;
inline constexpr std::uint64_t codebook_u = 2;
inline constexpr std::uint64_t trial = 3;
inline constexpr std::uint64_t search_restart = 4;
inline constexpr std::uint64_t direction = 5;
}  // namespace stream_purpose

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256** — small, fast, and identical output on every platform
// (std::uniform_* distributions are implementation-defined, so we avoid
// them entirely).
class RngStream {
 public:
  RngStream(std::uint64_t master, std::uint64_t purpose, std::uint64_t counter) {
    std::uint64_t sm = master ^ (purpose * 0xd2b74407b1ce6e93ULL) ^
                       (counter * 0xca5a826395121157ULL);
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0,1) with 53 random bits
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // unbiased integer in [0, n) by rejection
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::logic_error("RngStream::below(0)");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % n;
  }

  // sample an index from a probability vector by inverse CDF
  std::size_t sample(const std::vector<double>& probs) {
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace pufkey
