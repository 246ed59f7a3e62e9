#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flexduplex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation's precondition does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

enum class Direction { kDownlink, kUplink };
enum class CellId { kMeNB, kSeNB };

std::string_view to_string(Direction d);
std::string_view to_string(CellId c);
Direction parse_direction(std::string_view s);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Bearing of `to` as seen from `from`, degrees in (-180, 180].
inline double bearing_deg(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  return std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
}

/// Wraps an angle difference into [0, 180].
inline double angle_diff_deg(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Deterministic 64-bit mixer used to derive sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

constexpr double kSubframeSeconds = 1e-3;
constexpr double kRbBandwidthHz = 180e3;
constexpr int kSubframesPerFrame = 10;

}  // namespace flexduplex
