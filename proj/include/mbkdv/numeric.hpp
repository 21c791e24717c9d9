#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mbkdv {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
// 80 decimal digits, a little over 256 bits.
using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<80>,
                                               boost::multiprecision::et_off>;
using cplx = std::complex<double>;

inline constexpr int kWorkingPrecisionBits = 265;

enum class ErrorKind {
  Usage,
  Domain,
  Unsupported,
  Degenerate,
  OutOfScope,
  Admissibility,
  Cutoff,
  Fit,
  BlowUp,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  // 1 usage, 2 precondition, 3 numerical failure.
  int exit_code() const noexcept;
  static const char* kind_name(ErrorKind k) noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// "p/q", "p", "-p/q"; whitespace tolerated. Decimals are rejected.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);
BigFloat to_bigfloat(const Rational& q);

bool is_integer(const Rational& q);
BigInt floor_q(const Rational& q);
BigInt ceil_q(const Rational& q);
std::optional<Rational> exact_sqrt(const Rational& q);

// Nearest integer; half-integers go to the even neighbour.
BigInt round_half_even(const Rational& q);
BigInt round_half_even(const BigFloat& x);

// A real given either exactly (rational) or as a 265-bit approximation.
struct RealNumber {
  std::optional<Rational> exact;
  BigFloat value;
  std::string text;

  RealNumber() = default;
  RealNumber(const Rational& q);  // NOLINT(google-explicit-constructor)
  static RealNumber approx(const BigFloat& x, std::string text = {});

  bool is_exact() const { return exact.has_value(); }
  double to_double() const;
  std::string describe() const;
};

// Expression grammar: numbers, p/q, decimals, + - * / ( ), sqrt(.), pi.
// Integers and their rational combinations stay exact, sqrt of a rational
// square stays exact, anything involving a decimal literal or an irrational
// sqrt becomes an approximation.
RealNumber parse_real(std::string_view text);

std::string format_g17(double x);

// Worker count: MBKDV_THREADS if set, else hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned n);
// Calls fn(lo, hi) on disjoint chunks of [begin, end).
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace mbkdv
