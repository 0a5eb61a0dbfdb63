#include "disct/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace disct {

double LatticePoint::norm() const {
  double s = 0.0;
  for (int c : coords) s += static_cast<double>(c) * c;
  return std::sqrt(s);
}

int LatticePoint::max_norm() const {
  int m = 0;
  for (int c : coords) m = std::max(m, std::abs(c));
  return m;
}

bool LatticePoint::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](int c) { return c == 0; });
}

LatticePoint operator+(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("LatticePoint: dimension mismatch");
  LatticePoint r = a;
  for (int i = 0; i < a.dim(); ++i) r[i] += b[i];
  return r;
}

LatticePoint operator-(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("LatticePoint: dimension mismatch");
  LatticePoint r = a;
  for (int i = 0; i < a.dim(); ++i) r[i] -= b[i];
  return r;
}

LatticePoint operator-(const LatticePoint& a) {
  LatticePoint r = a;
  for (auto& c : r.coords) c = -c;
  return r;
}

double Sequence::operator()(const LatticePoint& n) const {
  auto it = support_.find(n);
  return it == support_.end() ? 0.0 : it->second;
}

void Sequence::set(const LatticePoint& n, double v) {
  if (n.dim() != d_) throw std::invalid_argument("Sequence: dimension mismatch");
  if (v == 0.0)
    support_.erase(n);
  else
    support_[n] = v;
}

void Sequence::add(const LatticePoint& n, double v) { set(n, (*this)(n) + v); }

Sequence Sequence::shifted(const LatticePoint& by) const {
  Sequence s(d_);
  for (const auto& [n, v] : support_) s.set(n + by, v);
  return s;
}

Sequence Sequence::scaled(double a) const {
  Sequence s(d_);
  for (const auto& [n, v] : support_) s.set(n, a * v);
  return s;
}

Sequence Sequence::delta(const LatticePoint& n, double v) {
  Sequence s(n.dim());
  s.set(n, v);
  return s;
}

}  // namespace disct
