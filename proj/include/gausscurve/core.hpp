#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gausscurve {

/// Failure categories raised by the library. The message always starts with
/// the category text so callers can match on it.
enum class ErrorKind {
  DegenerateCloud,
  IncompleteStencil,
  DegenerateStencil,
  StalledStep,
  Divergence,
  MaxIterations,
  NotAStrictPair,
  InvalidArgument,
  Parse,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateCloud: return "degenerate cloud";
    case ErrorKind::IncompleteStencil: return "incomplete stencil";
    case ErrorKind::DegenerateStencil: return "degenerate stencil";
    case ErrorKind::StalledStep: return "stalled step";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::MaxIterations: return "max iterations exceeded";
    case ErrorKind::NotAStrictPair: return "not a strict pair";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail.empty()
                               ? std::string(to_string(kind))
                               : std::string(to_string(kind)) + ": " + detail),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

using PointId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm_sq(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise rotation by a quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit_from_angle(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline constexpr double kPi = std::numbers::pi;

template <class T>
constexpr T sqr(T v) {
  return v * v;
}

}  // namespace gausscurve
