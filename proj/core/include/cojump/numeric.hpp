#pragma once

// Error-free transformations for the long reductions in the estimators.
// Terms are formed and accumulated in double-double, then rounded once.

#include <cmath>

namespace cojump::numeric {

struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  [[nodiscard]] double value() const { return hi + lo; }
};

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bv = s - a;
  const double err = (a - (s - bv)) + (b - bv);
  return {s, err};
}

inline DoubleDouble fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DoubleDouble mul(const DoubleDouble& x, double y) {
  DoubleDouble p = two_prod(x.hi, y);
  p.lo += x.lo * y;
  return fast_two_sum(p.hi, p.lo);
}

inline DoubleDouble div(const DoubleDouble& x, double y) {
  const double q1 = x.hi / y;
  const DoubleDouble p = two_prod(q1, y);
  const DoubleDouble r = two_sum(x.hi, -p.hi);
  const double q2 = (r.hi + (r.lo - p.lo + x.lo)) / y;
  return fast_two_sum(q1, q2);
}

inline DoubleDouble add(const DoubleDouble& x, const DoubleDouble& y) {
  DoubleDouble s = two_sum(x.hi, y.hi);
  const DoubleDouble t = two_sum(x.lo, y.lo);
  s.lo += t.hi;
  s = fast_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return fast_two_sum(s.hi, s.lo);
}

/// Compensated accumulator; summation order is the call order.
class Accumulator {
 public:
  void add(double x) { sum_ = cojump::numeric::add(sum_, DoubleDouble{x, 0.0}); }
  void add(const DoubleDouble& x) { sum_ = cojump::numeric::add(sum_, x); }

  [[nodiscard]] DoubleDouble exact() const { return sum_; }
  [[nodiscard]] double value() const { return sum_.value(); }

 private:
  DoubleDouble sum_;
};

}  // namespace cojump::numeric
