#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dtq {

/// Arbitrary-precision nonnegative integer used for tree counts.
using BigCount = mpz_class;

/// Exact dyadic rational numerator / 2^exponent.
///
/// Always canonical: the numerator is odd, or the value is zero with
/// exponent 0. Two Dyadics are equal iff their fields are equal.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value);  // NOLINT(google-explicit-constructor)
  Dyadic(mpz_class numerator, std::uint64_t exponent);

  /// 2^power for any signed power.
  static Dyadic pow2(std::int64_t power);
  /// Exact value of a finite double (every finite double is dyadic).
  static Dyadic from_double(double value);
  /// Accepts "a/2^k" or a plain integer "a".
  static Dyadic parse(std::string_view text);

  const mpz_class& numerator() const noexcept { return numerator_; }
  std::uint64_t exponent() const noexcept { return exponent_; }
  bool is_zero() const noexcept { return numerator_ == 0; }
  int sign() const noexcept { return sgn(numerator_); }

  /// value * 2^shift
  Dyadic scaled(std::int64_t shift) const;
  Dyadic half() const { return scaled(-1); }
  Dyadic abs() const;

  Dyadic& operator+=(const Dyadic& rhs);
  Dyadic& operator-=(const Dyadic& rhs);
  Dyadic& operator*=(const Dyadic& rhs);

  friend Dyadic operator+(Dyadic lhs, const Dyadic& rhs) { return lhs += rhs; }
  friend Dyadic operator-(Dyadic lhs, const Dyadic& rhs) { return lhs -= rhs; }
  friend Dyadic operator*(Dyadic lhs, const Dyadic& rhs) { return lhs *= rhs; }
  Dyadic operator-() const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept {
    return a.exponent_ == b.exponent_ && a.numerator_ == b.numerator_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  /// Nearest double; correct for exponents far beyond the double range.
  double to_double() const;
  /// "a/2^k", e.g. "3/2^2"; integers print as "a/2^0".
  std::string to_string() const;

 private:
  void canonicalize();

  mpz_class numerator_{0};
  std::uint64_t exponent_{0};
};

/// Nearest double to q, ties to even. mpq_get_d truncates instead.
double nearest_double(const mpq_class& q);

}  // namespace dtq
