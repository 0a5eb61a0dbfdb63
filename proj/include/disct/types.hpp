#pragma once

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace disct {

/// Integer vector n in Z^d.
struct LatticePoint {
  std::vector<int> coords;

  LatticePoint() = default;
  explicit LatticePoint(std::vector<int> c) : coords(std::move(c)) {}
  LatticePoint(std::initializer_list<int> c) : coords(c) {}

  int dim() const { return static_cast<int>(coords.size()); }
  int operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return coords[static_cast<std::size_t>(i)]; }
  double norm() const;
  int max_norm() const;
  bool is_zero() const;
  static LatticePoint zero(int d) { return LatticePoint(std::vector<int>(static_cast<std::size_t>(d), 0)); }

  friend LatticePoint operator+(const LatticePoint& a, const LatticePoint& b);
  friend LatticePoint operator-(const LatticePoint& a, const LatticePoint& b);
  friend LatticePoint operator-(const LatticePoint& a);
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

/// (x, y) with x in R^d and y > 0.
struct HalfSpacePoint {
  std::vector<double> x;
  double y = 1.0;
  int dim() const { return static_cast<int>(x.size()); }
};

/// Finitely supported real function on Z^d. Zeros are never stored.
class Sequence {
 public:
  explicit Sequence(int d = 1) : d_(d) {}

  int dim() const { return d_; }
  double operator()(const LatticePoint& n) const;
  void set(const LatticePoint& n, double v);
  void add(const LatticePoint& n, double v);
  const std::map<LatticePoint, double>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }

  Sequence shifted(const LatticePoint& by) const;
  Sequence scaled(double a) const;

  static Sequence delta(const LatticePoint& n, double v = 1.0);

 private:
  int d_;
  std::map<LatticePoint, double> support_;
};

/// Domain violations of the mathematical preconditions (poles, bad p, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its target (quadrature, inversion, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace disct
