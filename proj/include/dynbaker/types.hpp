#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dynbaker {

using VertexId = std::uint32_t;
using EdgeLabel = std::uint64_t;
using Weight = std::int64_t;
using Value = std::uint32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WidthExceeded : Error {
  int width;
  explicit WidthExceeded(int w)
      : Error("tree decomposition width " + std::to_string(w) + " exceeds cap"), width(w) {}
};
struct PrefixViolation : Error {
  PrefixViolation() : Error("vertex set is not ancestor-closed in the elimination forest") {}
};
struct InvalidDecomposition : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct NoCombination : Error {
  using Error::Error;
};
struct ParameterOverflow : Error {
  using Error::Error;
};
struct InvalidEpsilon : Error {
  using Error::Error;
};
// Degree promise of the dominating-set structure broken by an update.
struct DegreeBoundExceeded : Error {
  using Error::Error;
};

// Nonnegative cost with an absorbing +infinity.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr Cost(Weight v) : v_(v) {}  // NOLINT: implicit from finite weights
  static constexpr Cost inf() {
    Cost c;
    c.v_ = kInf;
    return c;
  }
  constexpr bool finite() const { return v_ != kInf; }
  constexpr bool is_inf() const { return v_ == kInf; }
  constexpr Weight value() const { return v_; }

  friend constexpr Cost operator+(Cost a, Cost b) {
    if (a.is_inf() || b.is_inf()) return inf();
    return Cost(a.v_ + b.v_);
  }
  Cost& operator+=(Cost o) { return *this = *this + o; }
  // Exact subtraction of a finite amount; +inf stays +inf.
  friend constexpr Cost operator-(Cost a, Cost b) {
    if (a.is_inf()) return a;
    if (b.is_inf()) throw Error("subtracting infinite cost");
    return Cost(a.v_ - b.v_);
  }
  friend constexpr auto operator<=>(Cost a, Cost b) = default;
  friend constexpr bool operator==(Cost a, Cost b) = default;

  friend std::ostream& operator<<(std::ostream& os, Cost c) {
    if (c.is_inf()) return os << "inf";
    return os << c.v_;
  }

 private:
  static constexpr Weight kInf = std::numeric_limits<Weight>::max();
  Weight v_ = 0;
};

// Exact rational with positive denominator, always reduced.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw Error("zero denominator");
    normalize();
  }
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error("division by zero");
    return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.num_ << '/' << r.den_;
  }
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  // Smallest integer >= this.
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

 private:
  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw Error("zero denominator");
    if (d < 0) n = -n, d = -d;
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) n /= a, d /= a;
    constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
    if (n > lim || -n > lim || d > lim) throw ParameterOverflow("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }
  void normalize() { *this = make(num_, den_); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// Parses "p/q" or a decimal like "0.25".
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(s));
    std::string frac = s.substr(dot + 1);
    if (frac.size() > 17) throw Error("too many decimals");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t whole = dot == 0 ? 0 : std::stoll(s.substr(0, dot));
    std::int64_t part = frac.empty() ? 0 : std::stoll(frac);
    return Rational(whole * den + part, den);
  } catch (const std::logic_error&) {
    throw Error("bad rational: " + s);
  }
}

}  // namespace dynbaker
