#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sigc::compliance {

// Exact fraction num/den with den > 0, always reduced. Latencies mix
// milliseconds and samples at 48 kHz; keeping them rational means 15
// samples is exactly 5/16 ms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  // "20", "-3", "31.25", "1/48".
  static Rational parse(std::string_view text);
  // Exact for values printed with at most 12 significant digits.
  static Rational from_double(double value);

  // Reduced fraction, or integer when den == 1.
  std::string str() const;

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  Rational& operator+=(Rational o) { return *this = *this + o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational max(Rational a, Rational b);

}  // namespace sigc::compliance
