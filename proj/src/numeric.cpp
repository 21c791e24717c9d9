#include "mbkdv/numeric.hpp"

#include <boost/math/constants/constants.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mbkdv {

int Error::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::Usage:
      return 1;
    case ErrorKind::Fit:
    case ErrorKind::BlowUp:
      return 3;
    default:
      return 2;
  }
}

const char* Error::kind_name(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::OutOfScope: return "out-of-scope";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Cutoff: return "cutoff";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::BlowUp: return "blow-up";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

BigInt parse_int(std::string_view s, std::string_view whole) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) fail(ErrorKind::Usage, fmt::format("not an exact rational: '{}'", whole));
  BigInt z{std::string(s)};
  return neg ? BigInt(-z) : z;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(s, text));
  BigInt num = parse_int(trim(s.substr(0, slash)), text);
  BigInt den = parse_int(trim(s.substr(slash + 1)), text);
  if (den == 0) fail(ErrorKind::Domain, fmt::format("zero denominator in '{}'", text));
  return Rational(num, den);
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

BigFloat to_bigfloat(const Rational& q) {
  BigFloat n, d;
  mpfr_set_z(n.backend().data(), numerator(q).backend().data(), MPFR_RNDN);
  mpfr_set_z(d.backend().data(), denominator(q).backend().data(), MPFR_RNDN);
  return n / d;
}

bool is_integer(const Rational& q) { return denominator(q) == 1; }

BigInt floor_q(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q), r;
  mpz_fdiv_q(r.backend().data(), n.backend().data(), d.backend().data());
  return r;
}

BigInt ceil_q(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q), r;
  mpz_cdiv_q(r.backend().data(), n.backend().data(), d.backend().data());
  return r;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  BigInt n = numerator(q), d = denominator(q);
  if (!mpz_perfect_square_p(n.backend().data()) || !mpz_perfect_square_p(d.backend().data()))
    return std::nullopt;
  return Rational(sqrt(n), sqrt(d));
}

BigInt round_half_even(const Rational& q) {
  BigInt f = floor_q(q);
  Rational frac = q - Rational(f);
  Rational half(1, 2);
  if (frac > half) return f + 1;
  if (frac < half) return f;
  return (f % 2 == 0) ? f : BigInt(f + 1);
}

BigInt round_half_even(const BigFloat& x) {
  BigFloat fl = floor(x);
  BigInt f;
  mpfr_get_z(f.backend().data(), fl.backend().data(), MPFR_RNDD);
  BigFloat frac = x - fl;
  if (frac > 0.5) return f + 1;
  if (frac < 0.5) return f;
  return (f % 2 == 0) ? f : BigInt(f + 1);
}

RealNumber::RealNumber(const Rational& q) : exact(q), value(to_bigfloat(q)), text(to_string(q)) {}

RealNumber RealNumber::approx(const BigFloat& x, std::string text) {
  RealNumber r;
  r.value = x;
  r.text = text.empty() ? x.str(40) : std::move(text);
  return r;
}

double RealNumber::to_double() const {
  return exact ? mbkdv::to_double(*exact) : value.convert_to<double>();
}

std::string RealNumber::describe() const { return exact ? to_string(*exact) : text; }

namespace {

struct Value {
  std::optional<Rational> q;
  BigFloat f;
  static Value of(const Rational& r) { return {r, to_bigfloat(r)}; }
  static Value inexact(const BigFloat& x) { return {std::nullopt, x}; }
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  Value parse() {
    Value v = expr();
    skip();
    if (pos_ != s_.size()) error("trailing input");
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const char* why) const {
    fail(ErrorKind::Usage, fmt::format("cannot parse real '{}': {} at offset {}", s_, why, pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool eat_word(std::string_view w) {
    skip();
    if (s_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  Value expr() {
    Value v = term();
    for (;;) {
      if (eat('+')) {
        Value r = term();
        v = combine(v, r, '+');
      } else if (eat('-')) {
        Value r = term();
        v = combine(v, r, '-');
      } else {
        return v;
      }
    }
  }
  Value term() {
    Value v = factor();
    for (;;) {
      if (eat('*')) {
        Value r = factor();
        v = combine(v, r, '*');
      } else if (eat('/')) {
        Value r = factor();
        v = combine(v, r, '/');
      } else {
        return v;
      }
    }
  }
  Value factor() {
    if (eat('-')) {
      Value v = factor();
      return v.q ? Value::of(-*v.q) : Value::inexact(-v.f);
    }
    if (eat('+')) return factor();
    if (eat('(')) {
      Value v = expr();
      if (!eat(')')) error("expected ')'");
      return v;
    }
    if (eat_word("sqrt")) {
      if (!eat('(')) error("expected '(' after sqrt");
      Value v = expr();
      if (!eat(')')) error("expected ')'");
      if (v.f < 0 || (v.q && *v.q < 0)) fail(ErrorKind::Domain, "sqrt of a negative number");
      if (v.q) {
        if (auto r = exact_sqrt(*v.q)) return Value::of(*r);
      }
      return Value::inexact(sqrt(v.f));
    }
    if (eat_word("pi")) return Value::inexact(boost::math::constants::pi<BigFloat>());
    return number();
  }
  Value number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    bool decimal = false;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      decimal = true;
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      decimal = true;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ == start) error("expected a number");
    std::string tok(s_.substr(start, pos_ - start));
    if (!decimal) return Value::of(Rational(BigInt(tok)));
    return Value::inexact(BigFloat(tok));
  }
  Value combine(const Value& a, const Value& b, char op) {
    if (a.q && b.q) {
      switch (op) {
        case '+': return Value::of(*a.q + *b.q);
        case '-': return Value::of(*a.q - *b.q);
        case '*': return Value::of(*a.q * *b.q);
        default:
          if (*b.q == 0) fail(ErrorKind::Domain, "division by zero");
          return Value::of(*a.q / *b.q);
      }
    }
    switch (op) {
      case '+': return Value::inexact(a.f + b.f);
      case '-': return Value::inexact(a.f - b.f);
      case '*': return Value::inexact(a.f * b.f);
      default:
        if (b.f == 0) fail(ErrorKind::Domain, "division by zero");
        return Value::inexact(a.f / b.f);
    }
  }
};

}  // namespace

RealNumber parse_real(std::string_view text) {
  Value v = ExprParser(text).parse();
  if (v.q) return RealNumber(*v.q);
  return RealNumber::approx(v.f, std::string(trim(text)));
}

std::string format_g17(double x) { return fmt::format("{:.17g}", x); }

namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned thread_count() {
  unsigned n = g_threads.load();
  if (n) return n;
  if (const char* env = std::getenv("MBKDV_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(unsigned n) { g_threads.store(n); }

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (end <= begin) return;
  std::int64_t total = end - begin;
  std::int64_t workers = std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(1, total / 64));
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  std::int64_t chunk = (total + workers - 1) / workers;
  for (std::int64_t w = 0; w < workers; ++w) {
    std::int64_t lo = begin + w * chunk, hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mbkdv
