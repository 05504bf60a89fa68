#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

namespace poik {

// Neumaier variant of compensated summation. Keeps the accumulated error of
// long cdf/moment sums below ~1e-13 per 1e6 terms regardless of term ordering.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  void scale(double f) {
    sum *= f;
    comp *= f;
  }

  double value() const { return sum + comp; }
};

// Nonnegative double with a separate power-of-two exponent, for products and
// sums whose magnitude leaves the double range. Rescaling by 2^n is exact.
struct Scaled {
  double mant = 0.0;
  int64_t exp2 = 0;

  static Scaled from(double v) {
    Scaled s{v, 0};
    s.normalize();
    return s;
  }

  void normalize() {
    if (mant == 0.0) {
      exp2 = 0;
      return;
    }
    int e = 0;
    mant = std::frexp(mant, &e); // |mant| in [0.5, 1)
    exp2 += e;
  }

  Scaled& mul(double f) {
    mant *= f;
    normalize();
    return *this;
  }

  Scaled& mul(const Scaled& o) {
    mant *= o.mant;
    exp2 += o.exp2;
    normalize();
    return *this;
  }

  // Accumulate; both operands are re-expressed in the larger binary scale.
  Scaled& add(const Scaled& o) {
    if (o.mant == 0.0) return *this;
    if (mant == 0.0) {
      *this = o;
      return *this;
    }
    if (o.exp2 > exp2) {
      mant = std::ldexp(mant, static_cast<int>(exp2 - o.exp2)) + o.mant;
      exp2 = o.exp2;
    } else {
      const int64_t d = o.exp2 - exp2;
      mant += (d < -1100) ? 0.0 : std::ldexp(o.mant, static_cast<int>(d));
    }
    normalize();
    return *this;
  }

  double ln() const { return std::log(std::abs(mant)) + static_cast<double>(exp2) * M_LN2; }

  double to_double() const {
    if (mant == 0.0) return 0.0;
    if (exp2 > 1024) return mant > 0 ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
    if (exp2 < -1100) return 0.0;
    return std::ldexp(mant, static_cast<int>(exp2));
  }
};

// Double-double kernels (Dekker/Knuth). Used where a single subtraction
// cancels more digits than one double carries, e.g. the alternating block
// correction of the combinatorial pmf.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) { // requires |a| >= |b| or a == 0
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  const DD s = two_sum(a.hi, b.hi);
  return quick_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD dd_mul(DD a, double b) {
  const DD p = two_prod(a.hi, b);
  return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline DD dd_mul(DD a, DD b) {
  const DD p = two_prod(a.hi, b.hi);
  return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline DD dd_div(DD a, double b) {
  const double q0 = a.hi / b;
  const double r = std::fma(-q0, b, a.hi); // exact
  const double q1 = (r + a.lo) / b;
  return quick_two_sum(q0, q1);
}

// Double-double mantissa with a power-of-two exponent; the workhorse for the
// alternating sums, which both overflow double range and cancel deeply.
struct ScaledDD {
  DD v;
  int64_t e2 = 0;

  static ScaledDD from(double x) {
    ScaledDD s;
    s.v = {x, 0.0};
    s.normalize();
    return s;
  }

  void normalize() {
    if (v.hi == 0.0) {
      v.lo = 0.0;
      e2 = 0;
      return;
    }
    int e = 0;
    std::frexp(v.hi, &e);
    if (e > 512 || e < -512) {
      v.hi = std::ldexp(v.hi, -e);
      v.lo = std::ldexp(v.lo, -e);
      e2 += e;
    }
  }

  ScaledDD& mul(double f) {
    v = dd_mul(v, f);
    normalize();
    return *this;
  }

  ScaledDD& div(double f) {
    v = dd_div(v, f);
    normalize();
    return *this;
  }

  ScaledDD& mul(const ScaledDD& o) {
    v = dd_mul(v, o.v);
    e2 += o.e2;
    normalize();
    return *this;
  }

  ScaledDD& add(const ScaledDD& o) {
    if (o.v.hi == 0.0) return *this;
    if (v.hi == 0.0) {
      *this = o;
      return *this;
    }
    const int64_t d = o.e2 - e2;
    if (d > 1060) {
      *this = o;
      return *this;
    }
    if (d < -1060) return *this;
    DD ov = o.v;
    if (d >= 0) {
      v.hi = std::ldexp(v.hi, static_cast<int>(-d));
      v.lo = std::ldexp(v.lo, static_cast<int>(-d));
      e2 = o.e2;
    } else {
      ov.hi = std::ldexp(ov.hi, static_cast<int>(d));
      ov.lo = std::ldexp(ov.lo, static_cast<int>(d));
    }
    v = dd_add(v, ov);
    normalize();
    return *this;
  }
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
// Stops when |f| <= ftol or the interval collapses to xtol_rel * |x|.
inline RootResult brent(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double ftol, double xtol_rel, int max_iter = 200) {
  RootResult res;
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                        0.5 * xtol_rel * std::abs(b);
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= ftol) {
      res.x = b;
      res.fx = fb;
      return res;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::abs(d) > tol1) {
      b += d;
    } else {
      b += (xm > 0 ? tol1 : -tol1);
    }
    fb = f(b);
  }
  res.x = b;
  res.fx = fb;
  return res;
}

} // namespace poik
