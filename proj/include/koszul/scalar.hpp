#pragma once

// Exact scalar types: arbitrary-precision rationals and integers
// (boost::multiprecision), and prime fields with runtime modulus.
// The scalar type is fixed per computation session; prime-field
// elements with different moduli refuse to combine.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace koszul {

using Integer = boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

struct scalar_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- Rational

class Rational {
public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}
  Rational(const Integer& n) : v_(n) {}
  Rational(const Integer& num, const Integer& den) : v_(num, den) {
    if (den == 0) throw scalar_error("rational with zero denominator");
  }
  explicit Rational(const cpp_rational& v) : v_(v) {}

  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Integer(s));
    return Rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
  }

  Integer numerator() const { return boost::multiprecision::numerator(v_); }
  Integer denominator() const { return boost::multiprecision::denominator(v_); }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  Rational operator-() const { return Rational(cpp_rational(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw scalar_error("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }

  Rational inverse() const {
    if (is_zero()) throw scalar_error("inverse of zero");
    return Rational(cpp_rational(1) / v_);
  }

  std::string str() const {
    if (denominator() == 1) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

private:
  cpp_rational v_;
};

// ---------------------------------------------------------------- prime field

inline bool is_prime_u64(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Element of F_p, p prime, value stored in [0, p).  p travels with the
// element; a default-constructed zero has p = 0 and adopts the modulus of
// its partner, so that Fp() is a usable additive zero.
class Fp {
public:
  Fp() : v_(0), p_(0) {}
  Fp(long n, std::uint64_t p) : p_(p) {
    check_modulus(p);
    long long r = n % static_cast<long long>(p);
    if (r < 0) r += static_cast<long long>(p);
    v_ = static_cast<std::uint64_t>(r);
  }
  static Fp from_integer(const Integer& n, std::uint64_t p) {
    check_modulus(p);
    Integer r = n % Integer(p);
    if (r < 0) r += Integer(p);
    return Fp(static_cast<long>(r.convert_to<std::uint64_t>()), p);
  }

  std::uint64_t value() const { return v_; }
  std::uint64_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  Fp operator-() const {
    Fp r = *this;
    if (r.v_ != 0) r.v_ = r.p_ - r.v_;
    return r;
  }
  Fp& operator+=(const Fp& o) {
    std::uint64_t p = merge(o);
    v_ = (v_ + o.v_) % p;
    return *this;
  }
  Fp& operator-=(const Fp& o) {
    std::uint64_t p = merge(o);
    v_ = (v_ + p - o.v_) % p;
    return *this;
  }
  Fp& operator*=(const Fp& o) {
    std::uint64_t p = merge(o);
    v_ = mulmod(v_, o.v_, p);
    return *this;
  }
  Fp& operator/=(const Fp& o) { return *this *= o.inverse(); }
  friend Fp operator+(Fp a, const Fp& b) { return a += b; }
  friend Fp operator-(Fp a, const Fp& b) { return a -= b; }
  friend Fp operator*(Fp a, const Fp& b) { return a *= b; }
  friend Fp operator/(Fp a, const Fp& b) { return a /= b; }
  friend bool operator==(const Fp& a, const Fp& b) {
    if (a.p_ && b.p_ && a.p_ != b.p_) throw scalar_error("mixed prime moduli");
    return a.v_ == b.v_;
  }
  friend bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

  Fp inverse() const {
    if (v_ == 0) throw scalar_error("inverse of zero");
    // extended Euclid
    long long t = 0, nt = 1;
    long long r = static_cast<long long>(p_), nr = static_cast<long long>(v_);
    while (nr != 0) {
      long long q = r / nr;
      t -= q * nt; std::swap(t, nt);
      r -= q * nr; std::swap(r, nr);
    }
    if (t < 0) t += static_cast<long long>(p_);
    return Fp(t, p_);
  }

  std::string str() const { return std::to_string(v_); }

private:
  static void check_modulus(std::uint64_t p) {
    if (!is_prime_u64(p)) throw scalar_error("modulus is not prime");
  }
  std::uint64_t merge(const Fp& o) {
    if (p_ == 0) p_ = o.p_;
    if (o.p_ != 0 && p_ != o.p_) throw scalar_error("mixed prime moduli");
    if (p_ == 0) throw scalar_error("prime-field element without modulus");
    return p_;
  }
  static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((__uint128_t)a * b % p);
  }

  std::uint64_t v_;
  std::uint64_t p_;
};

// ---------------------------------------------------------------- traits

template <class K> struct scalar_traits;

template <> struct scalar_traits<Rational> {
  static constexpr bool is_field = true;
  static Rational zero() { return Rational(); }
  static Rational one() { return Rational(1); }
  static Rational from_int(long n) { return Rational(n); }
  static std::string name() { return "Q"; }
};

template <> struct scalar_traits<Integer> {
  static constexpr bool is_field = false;
  static Integer zero() { return Integer(0); }
  static Integer one() { return Integer(1); }
  static Integer from_int(long n) { return Integer(n); }
  static std::string name() { return "Z"; }
};

// Fp scalars need a session modulus for zero()/one(); kept in a
// per-thread slot set by fp_session.
struct fp_session {
  explicit fp_session(std::uint64_t p) : prev_(current()) { current() = p; }
  ~fp_session() { current() = prev_; }
  static std::uint64_t& current() {
    thread_local std::uint64_t p = 0;
    return p;
  }
private:
  std::uint64_t prev_;
};

template <> struct scalar_traits<Fp> {
  static constexpr bool is_field = true;
  static Fp zero() { return Fp(); }
  static Fp one() { return Fp(1, fp_session::current()); }
  static Fp from_int(long n) { return Fp(n, fp_session::current()); }
  static std::string name() { return "F" + std::to_string(fp_session::current()); }
};

template <class K> bool is_zero(const K& x) { return x.is_zero(); }
inline bool is_zero(const Integer& x) { return x == 0; }

template <class K> std::string scalar_str(const K& x) { return x.str(); }
inline std::string scalar_str(const Integer& x) { return x.str(); }

} // namespace koszul
