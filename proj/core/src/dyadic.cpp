#include "dtq/dyadic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "dtq/errors.hpp"

namespace dtq {

Dyadic::Dyadic(long value) : numerator_(value), exponent_(0) {}

Dyadic::Dyadic(mpz_class numerator, std::uint64_t exponent)
    : numerator_(std::move(numerator)), exponent_(exponent) {
  canonicalize();
}

void Dyadic::canonicalize() {
  if (numerator_ == 0) {
    exponent_ = 0;
    return;
  }
  const std::uint64_t zeros = mpz_scan1(numerator_.get_mpz_t(), 0);
  const std::uint64_t shift = std::min(zeros, exponent_);
  if (shift > 0) {
    mpz_tdiv_q_2exp(numerator_.get_mpz_t(), numerator_.get_mpz_t(), shift);
    exponent_ -= shift;
  }
}

Dyadic Dyadic::pow2(std::int64_t power) {
  if (power >= 0) {
    mpz_class n;
    mpz_setbit(n.get_mpz_t(), static_cast<mp_bitcnt_t>(power));
    return {n, 0};
  }
  return {mpz_class(1), static_cast<std::uint64_t>(-power)};
}

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) {
    throw UsageError("Dyadic::from_double: non-finite value");
  }
  if (value == 0.0) return {};
  int e = 0;
  const double m = std::frexp(value, &e);
  // m * 2^53 is an exact integer for every finite double.
  const auto mantissa = static_cast<long>(std::ldexp(m, 53));
  return Dyadic(mantissa).scaled(static_cast<std::int64_t>(e) - 53);
}

Dyadic Dyadic::parse(std::string_view text) {
  const auto slash = text.find('/');
  const std::string head(text.substr(0, slash));
  mpz_class numerator;
  if (head.empty() || numerator.set_str(head, 10) != 0) {
    throw ParseError("bad dyadic numerator '" + head + "'", "0");
  }
  if (slash == std::string_view::npos) return {numerator, 0};

  const auto tail = text.substr(slash + 1);
  if (tail.size() < 3 || tail.substr(0, 2) != "2^") {
    throw ParseError("expected '2^k' denominator", std::to_string(slash + 1));
  }
  std::uint64_t exponent = 0;
  const auto digits = tail.substr(2);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), exponent);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw ParseError("bad dyadic exponent", std::to_string(slash + 3));
  }
  return {numerator, exponent};
}

Dyadic Dyadic::scaled(std::int64_t shift) const {
  if (is_zero() || shift == 0) return *this;
  if (shift < 0) {
    return {numerator_, exponent_ + static_cast<std::uint64_t>(-shift)};
  }
  const auto up = static_cast<std::uint64_t>(shift);
  if (up <= exponent_) return {numerator_, exponent_ - up};
  mpz_class n;
  mpz_mul_2exp(n.get_mpz_t(), numerator_.get_mpz_t(), up - exponent_);
  return {n, 0};
}

Dyadic Dyadic::abs() const {
  Dyadic r = *this;
  mpz_abs(r.numerator_.get_mpz_t(), r.numerator_.get_mpz_t());
  return r;
}

Dyadic Dyadic::operator-() const {
  Dyadic r = *this;
  r.numerator_ = -r.numerator_;
  return r;
}

namespace {

// Both numerators brought to the common exponent max(ea, eb).
std::pair<mpz_class, mpz_class> aligned(const Dyadic& a, const Dyadic& b) {
  mpz_class x = a.numerator();
  mpz_class y = b.numerator();
  if (a.exponent() < b.exponent()) {
    mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), b.exponent() - a.exponent());
  } else if (b.exponent() < a.exponent()) {
    mpz_mul_2exp(y.get_mpz_t(), y.get_mpz_t(), a.exponent() - b.exponent());
  }
  return {std::move(x), std::move(y)};
}

}  // namespace

Dyadic& Dyadic::operator+=(const Dyadic& rhs) {
  auto [x, y] = aligned(*this, rhs);
  *this = Dyadic(x + y, std::max(exponent_, rhs.exponent_));
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& rhs) {
  auto [x, y] = aligned(*this, rhs);
  *this = Dyadic(x - y, std::max(exponent_, rhs.exponent_));
  return *this;
}

Dyadic& Dyadic::operator*=(const Dyadic& rhs) {
  *this = Dyadic(numerator_ * rhs.numerator_, exponent_ + rhs.exponent_);
  return *this;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  if (a.sign() != b.sign()) return a.sign() <=> b.sign();
  const auto [x, y] = aligned(a, b);
  const int c = cmp(x, y);
  return c <=> 0;
}

double Dyadic::to_double() const {
  if (is_zero()) return 0.0;
  mpz_class mag = numerator_;
  mpz_abs(mag.get_mpz_t(), mag.get_mpz_t());
  const std::size_t bits = mpz_sizeinbase(mag.get_mpz_t(), 2);

  std::int64_t shift = 0;
  if (bits > 53) {
    // Round the magnitude to 53 significant bits, ties to even.
    shift = static_cast<std::int64_t>(bits - 53);
    mpz_class q, rem;
    mpz_fdiv_q_2exp(q.get_mpz_t(), mag.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    mpz_fdiv_r_2exp(rem.get_mpz_t(), mag.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    mpz_class half;
    mpz_setbit(half.get_mpz_t(), static_cast<mp_bitcnt_t>(shift - 1));
    const int c = cmp(rem, half);
    if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) ++q;
    mag = q;
  }
  const std::int64_t e = shift - static_cast<std::int64_t>(std::min<std::uint64_t>(
                                     exponent_, std::numeric_limits<std::int64_t>::max() / 2));
  const double m = mag.get_d();
  double result;
  if (e < -4000) {
    result = 0.0;
  } else if (e > 4000) {
    result = std::numeric_limits<double>::infinity();
  } else {
    result = std::ldexp(m, static_cast<int>(e));
  }
  return sign() < 0 ? -result : result;
}

double nearest_double(const mpq_class& q) {
  const double lo = q.get_d();
  if (mpq_class(lo) == q || !std::isfinite(lo)) return lo;
  const double hi = std::nextafter(lo, q > 0 ? std::numeric_limits<double>::infinity()
                                             : -std::numeric_limits<double>::infinity());
  const mpq_class below = abs(q - mpq_class(lo));
  const mpq_class above = abs(mpq_class(hi) - q);
  if (below < above) return lo;
  if (above < below) return hi;
  std::int64_t bits;
  std::memcpy(&bits, &lo, sizeof bits);
  return (bits & 1) == 0 ? lo : hi;
}

std::string Dyadic::to_string() const {
  return numerator_.get_str() + "/2^" + std::to_string(exponent_);
}

}  // namespace dtq
