#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcsim {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// Exact rate in words per cycle. Kept as a fraction so cycle counts stay
// integer and runs are reproducible across platforms.
struct Rational {
  u64 num{1};
  u64 den{1};

  double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

inline u64 ceil_div(u64 a, u64 b) { return (a + b - 1) / b; }

// cycles = ceil(words / rate)
inline u64 cycles_for_words(u64 words, const Rational& rate) {
  return ceil_div(words * rate.den, rate.num);
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProgramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mcsim
