#include "mbkdv/exp_sum.hpp"

#include <cmath>

namespace mbkdv {

ExponentialSum ExponentialSum::constant(cplx c) { return term(c, 0, Rational(0)); }

ExponentialSum ExponentialSum::term(cplx c, int k, const Rational& w) {
  ExponentialSum s;
  s.add_term(c, k, w);
  return s;
}

void ExponentialSum::add_term(cplx c, int k, const Rational& w) {
  if (c == cplx(0.0, 0.0)) return;
  Key key{k, w};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(std::move(key), c);
    return;
  }
  it->second += c;
  if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
}

ExponentialSum& ExponentialSum::operator+=(const ExponentialSum& o) {
  for (const auto& [key, c] : o.terms_) add_term(c, key.first, key.second);
  return *this;
}

ExponentialSum& ExponentialSum::operator-=(const ExponentialSum& o) {
  for (const auto& [key, c] : o.terms_) add_term(-c, key.first, key.second);
  return *this;
}

ExponentialSum& ExponentialSum::operator*=(cplx s) {
  if (s == cplx(0.0, 0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, c] : terms_) c *= s;
  return *this;
}

ExponentialSum operator*(const ExponentialSum& a, const ExponentialSum& b) {
  ExponentialSum out;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) out.add_term(ca * cb, ka.first + kb.first, ka.second + kb.second);
  return out;
}

ExponentialSum ExponentialSum::shifted(const Rational& P) const {
  if (P == 0) return *this;
  ExponentialSum out;
  for (const auto& [key, c] : terms_) out.terms_.emplace(Key{key.first, key.second + P}, c);
  return out;
}

ExponentialSum ExponentialSum::conj() const {
  ExponentialSum out;
  for (const auto& [key, c] : terms_) out.terms_.emplace(Key{key.first, Rational(-key.second)}, std::conj(c));
  return out;
}

cplx ExponentialSum::operator()(double t) const {
  cplx acc(0.0, 0.0);
  for (const auto& [key, c] : terms_) {
    double w = to_double(key.second);
    acc += c * std::pow(t, key.first) * std::polar(1.0, w * t);
  }
  return acc;
}

int ExponentialSum::max_power() const {
  int k = 0;
  for (const auto& [key, c] : terms_) k = std::max(k, key.first);
  return k;
}

bool ExponentialSum::has_secular() const {
  for (const auto& [key, c] : terms_)
    if (key.second == 0 && key.first >= 1) return true;
  return false;
}

ExponentialSum exp_sum_integrate(const ExponentialSum& f) {
  ExponentialSum out;
  for (const auto& [key, c] : f.terms()) {
    const int k = key.first;
    const Rational& w = key.second;
    if (w == 0) {
      out.add_term(c / static_cast<double>(k + 1), k + 1, w);
      continue;
    }
    // Antiderivative e^{iwt} sum_j (-1)^j k!/(k-j)! t^{k-j} / (iw)^{j+1}, minus its value at 0.
    const cplx iw(0.0, to_double(w));
    cplx coef = c / iw;
    for (int j = 0; j <= k; ++j) {
      out.add_term(coef, k - j, w);
      if (j == k) out.add_term(-coef, 0, Rational(0));
      coef *= -static_cast<double>(k - j) / iw;
    }
  }
  return out;
}

ExponentialSum duhamel(const Rational& P, const ExponentialSum& forcing) {
  return exp_sum_integrate(forcing.shifted(-P)).shifted(P);
}

}  // namespace mbkdv
