/*
  Copyright (c) 2026 The coag authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef COAG_CORE_RATIONAL_HPP
#define COAG_CORE_RATIONAL_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace coag {

// Exact rational on 128-bit integers. Arithmetic throws std::overflow_error when a
// result does not fit; callers fall back to floating point.
class Rational {
 public:
  __extension__ using int_t = __int128;

  Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(int_t n, int_t d) : num_(n), den_(d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    normalize();
  }

  // Smallest-denominator rational (denominator <= max_den) that rounds to v exactly.
  static std::optional<Rational> from_double(double v, std::int64_t max_den = 1000000) {
    if (!std::isfinite(v)) return std::nullopt;
    for (std::int64_t d = 1; d <= max_den; d = (d < 1024 ? d + 1 : d * 2)) {
      double n = std::round(v * static_cast<double>(d));
      if (std::fabs(n) > 9.0e15) return std::nullopt;
      Rational q(static_cast<int_t>(n), static_cast<int_t>(d));
      if (q.to_double() == v) return q;
    }
    // Continued-fraction convergents catch denominators skipped above.
    int_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double x = v;
    for (int it = 0; it < 64; ++it) {
      double a = std::floor(x);
      if (std::fabs(a) > 9.0e15) break;
      int_t ai = static_cast<int_t>(a);
      int_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
      if (k2 > max_den) break;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      Rational q(h1, k1);
      if (q.to_double() == v) return q;
      if (x == a) break;
      x = 1.0 / (x - a);
    }
    return std::nullopt;
  }

  int_t num() const { return num_; }
  int_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    int_t g = gcd(a.den_, b.den_);
    int_t da = a.den_ / g;
    return Rational(add(mul(a.num_, b.den_ / g), mul(b.num_, da)), mul(da, b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    int_t g1 = gcd(abs(a.num_), b.den_), g2 = gcd(abs(b.num_), a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Rational(mul(a.num_ / g1, b.num_ / g2), mul(a.den_ / g2, b.den_ / g1));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return a * Rational(b.den_, b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(const Rational& a, const Rational& b) { return mul(a.num_, b.den_) < mul(b.num_, a.den_); }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

  // Smallest integer >= this.
  int_t ceil() const {
    int_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  std::string str() const {
    std::string s = to_string(num_);
    if (den_ != 1) s += "/" + to_string(den_);
    return s;
  }

 private:
  static int_t abs(int_t v) { return v < 0 ? -v : v; }
  static int_t gcd(int_t a, int_t b) {
    a = abs(a);
    b = abs(b);
    while (b != 0) {
      int_t t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static int_t mul(int_t a, int_t b) {
    int_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }
  static int_t add(int_t a, int_t b) {
    int_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
    return r;
  }
  static std::string to_string(int_t v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    std::string s;
    while (v != 0) {
      int d = static_cast<int>(v % 10);
      s.insert(s.begin(), static_cast<char>('0' + (d < 0 ? -d : d)));
      v /= 10;
    }
    return neg ? "-" + s : s;
  }
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    int_t g = gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  int_t num_ = 0;
  int_t den_ = 1;
};

}  // namespace coag

#endif
