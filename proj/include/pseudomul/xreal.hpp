#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pseudomul {

/// An element of the extended nonnegative reals [0, inf].
///
/// Infinity is a tagged state, not a floating-point sentinel: callers can
/// never observe a raw double standing in for the infinite element. Finite
/// magnitudes are >= 0 and never NaN; violating constructions are rejected.
/// The total order puts infinity above every finite value.
class XReal {
 public:
  constexpr XReal() : inf_(false), mag_(0.0) {}

  static XReal finite(double magnitude) {
    if (!(magnitude >= 0.0) || std::isinf(magnitude)) {
      throw std::invalid_argument(
          "XReal::finite: magnitude must be a nonnegative finite real");
    }
    return XReal(false, magnitude);
  }

  static constexpr XReal infinity() { return XReal(true, 0.0); }
  static constexpr XReal zero() { return XReal(false, 0.0); }

  /// Admits IEEE +inf (mapped to the infinite element); rejects NaN and
  /// negatives. Used where a computation may legitimately saturate.
  static XReal from_double(double v) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("XReal::from_double: negative or NaN");
    }
    return std::isinf(v) ? infinity() : XReal(false, v);
  }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  constexpr bool is_zero() const { return !inf_ && mag_ == 0.0; }

  /// Finite magnitude; calling this on the infinite element is a logic error.
  double magnitude() const {
    if (inf_) throw std::logic_error("XReal::magnitude on infinity");
    return mag_;
  }

  /// Lossy numeric view: IEEE +inf for the infinite element.
  constexpr double as_double() const {
    return inf_ ? std::numeric_limits<double>::infinity() : mag_;
  }

  friend constexpr bool operator==(XReal a, XReal b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.mag_ == b.mag_;
  }

  friend constexpr std::strong_ordering operator<=>(XReal a, XReal b) {
    if (a.inf_ || b.inf_) {
      return (a.inf_ ? 1 : 0) <=> (b.inf_ ? 1 : 0);
    }
    // No NaN by invariant, so the double order is total here.
    if (a.mag_ < b.mag_) return std::strong_ordering::less;
    if (a.mag_ > b.mag_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  constexpr XReal(bool inf, double mag) : inf_(inf), mag_(mag) {}

  bool inf_;
  double mag_;
};

/// The idempotent addition: pointwise maximum under the total order.
inline XReal join(XReal a, XReal b) { return a < b ? b : a; }

/// Order-preserving homeomorphism [0, inf] -> [0, 1], t -> t/(1+t).
/// Evaluated as 1 - 1/(1+t) above 1 so huge magnitudes keep distinct images.
inline double compactify(XReal t) {
  if (t.is_infinite()) return 1.0;
  double m = t.magnitude();
  return m <= 1.0 ? m / (1.0 + m) : 1.0 - 1.0 / (1.0 + m);
}

/// Exact inverse of compactify on [0, 1]; rejects arguments outside.
inline XReal decompactify(double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::invalid_argument("decompactify: argument outside [0, 1]");
  }
  if (u == 1.0) return XReal::infinity();
  return XReal::finite(u / (1.0 - u));
}

/// Approximate equality, chosen deliberately where tests want slack:
/// comparisons where either side is exactly 0 or infinite stay exact, and
/// the tolerance is absolute up to magnitude 1, relative above.
inline bool near_equal(XReal a, XReal b, double tol) {
  if (a.is_infinite() || b.is_infinite()) return a == b;
  if (a.is_zero() || b.is_zero()) return a == b;
  double x = a.magnitude(), y = b.magnitude();
  double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
  return std::fabs(x - y) <= tol * scale;
}

/// Textual form used in files and CLI output: decimal literal or `inf`.
inline std::string format_xreal(XReal v) {
  if (v.is_infinite()) return "inf";
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v.magnitude());
  return std::string(buf, p);
}

inline XReal parse_xreal(std::string_view text) {
  if (text == "inf") return XReal::infinity();
  double m = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), m);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw std::invalid_argument("not an extended-real literal: '" +
                                std::string(text) + "'");
  }
  return XReal::finite(m);
}

}  // namespace pseudomul
