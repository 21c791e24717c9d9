#pragma once

#include "mbkdv/numeric.hpp"

#include <map>
#include <utility>

namespace mbkdv {

// Finite sum  sum_j c_j t^{k_j} e^{i w_j t}  with exact rational frequencies.
class ExponentialSum {
 public:
  using Key = std::pair<int, Rational>;  // (power k, frequency w)

  ExponentialSum() = default;
  static ExponentialSum constant(cplx c);
  static ExponentialSum term(cplx c, int k, const Rational& w);

  void add_term(cplx c, int k, const Rational& w);
  const std::map<Key, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  ExponentialSum& operator+=(const ExponentialSum& o);
  ExponentialSum& operator-=(const ExponentialSum& o);
  ExponentialSum& operator*=(cplx s);
  friend ExponentialSum operator+(ExponentialSum a, const ExponentialSum& b) { return a += b; }
  friend ExponentialSum operator-(ExponentialSum a, const ExponentialSum& b) { return a -= b; }
  friend ExponentialSum operator*(ExponentialSum a, cplx s) { return a *= s; }
  friend ExponentialSum operator*(cplx s, ExponentialSum a) { return a *= s; }
  friend ExponentialSum operator*(const ExponentialSum& a, const ExponentialSum& b);

  // Multiply by e^{i P t}.
  ExponentialSum shifted(const Rational& P) const;
  ExponentialSum conj() const;
  cplx operator()(double t) const;
  int max_power() const;
  // True when some term has w = 0 and k >= 1 (secular growth).
  bool has_secular() const;

 private:
  std::map<Key, cplx> terms_;
};

// F(t) = integral_0^t f.
ExponentialSum exp_sum_integrate(const ExponentialSum& f);

// integral_0^t e^{i P (t - t')} forcing(t') dt'.
ExponentialSum duhamel(const Rational& P, const ExponentialSum& forcing);

}  // namespace mbkdv
