#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ringforge::elliptic {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Complete elliptic integral of the first kind, modulus convention
/// (argument is q, not the parameter m = q^2). Evaluated by the
/// arithmetic-geometric mean, accurate to a few ulp.
///
/// Throws std::domain_error outside (0,1); the degenerate modulus q = 1
/// (infinite quarter period) is handled by EllipticContext, never here.
inline double complete_K(double q) {
  if (!(q > 0.0) || !(q < 1.0))
    throw std::domain_error("complete_K: modulus must lie in (0,1)");
  double a = 1.0;
  double b = std::sqrt((1.0 - q) * (1.0 + q));
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-17 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

struct JacobiTriple {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

namespace detail {

/// 32-point Gauss-Legendre rule on [-1,1], nodes computed once by Newton
/// iteration on the Legendre polynomial.
struct GaussLegendre32 {
  std::array<double, 32> node{};
  std::array<double, 32> weight{};

  GaussLegendre32() {
    constexpr int n = 32;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double p2 = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        const double dp = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          p2 = dp;
          break;
        }
        p2 = dp;
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * p2 * p2);
      weight[i] = w;
      weight[n - 1 - i] = w;
    }
  }
};

inline const GaussLegendre32& gl32() {
  static const GaussLegendre32 rule;
  return rule;
}

/// Integrate a smooth callable over [a,b] with a single 32-point panel.
template <class Fn>
double gl32_panel(const Fn& f, double a, double b) {
  const auto& r = gl32();
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < 32; ++i) s += r.weight[i] * f(c + h * r.node[i]);
  return s * h;
}

/// Chebyshev interpolant on [a,b]; Clenshaw evaluation.
class Chebyshev {
 public:
  Chebyshev() = default;

  template <class Fn>
  static Chebyshev fit(const Fn& f, double a, double b, int n) {
    Chebyshev c;
    c.a_ = a;
    c.b_ = b;
    std::vector<double> fv(n + 1);
    for (int j = 0; j <= n; ++j) {
      const double t = std::cos(kPi * j / n);
      fv[j] = f(0.5 * (a + b) + 0.5 * (b - a) * t);
    }
    c.coef_.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double s = 0.5 * (fv[0] + (k % 2 == 0 ? fv[n] : -fv[n]));
      for (int j = 1; j < n; ++j) s += fv[j] * std::cos(kPi * j * k / n);
      c.coef_[k] = 2.0 * s / n;
    }
    c.coef_[0] *= 0.5;
    c.coef_[n] *= 0.5;
    return c;
  }

  bool empty() const { return coef_.empty(); }

  double operator()(double x) const {
    const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) {
      const double tmp = 2.0 * t * b1 - b2 + coef_[k];
      b2 = b1;
      b1 = tmp;
    }
    return t * b1 - b2 + coef_[0];
  }

 private:
  double a_ = -1.0, b_ = 1.0;
  std::vector<double> coef_;
};

}  // namespace detail

/// Carlson symmetric integral R_F(x,y,z) by the standard duplication
/// scheme with the fifth-order tail expansion.
inline double carlson_rf(double x, double y, double z) {
  if (x < 0 || y < 0 || z < 0)
    throw std::domain_error("carlson_rf: negative argument");
  double a = (x + y + z) / 3.0;
  const double q =
      std::pow(3e-16, -1.0 / 8.0) *
      std::max({std::abs(a - x), std::abs(a - y), std::abs(a - z)});
  double mul = 1.0;
  while (q >= mul * std::abs(a)) {
    const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const double lam = sx * sy + sy * sz + sz * sx;
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    a = 0.25 * (a + lam);
    mul *= 4.0;
  }
  // the iterated arguments already carry the 4^-n contraction
  const double dx = (a - x) / a;
  const double dy = (a - y) / a;
  const double dz = -(dx + dy);
  const double e2 = dx * dy - dz * dz;
  const double e3 = dx * dy * dz;
  return (1.0 + e2 * (e2 / 24.0 - 3.0 * e3 / 44.0 - 0.1) + e3 / 14.0) /
         std::sqrt(a);
}

/// Incomplete elliptic integral of the first kind F(phi, q) for
/// |phi| <= pi/2, modulus convention.
inline double incomplete_F(double phi, double q) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  return s * carlson_rf(c * c, (1.0 - q * s) * (1.0 + q * s), 1.0);
}

/// Self-contained evaluation context for the Jacobi functions of a fixed
/// modulus q in (0,1], the monotone angle function g with g(0) = 0,
/// g(-x) = -g(x), g(x+4K) = g(x) + pi, its derivative
/// g'(x) = (dn x + q cn x)/2, and the even convex antiderivative
/// F(x) = \int_0^x g.
///
/// For q within q1_threshold of 1 the context switches to the closed
/// degenerate forms (sn = tanh, cn = dn = sech, g = arctan sinh,
/// K' = pi/2 exactly, K infinite); this keeps the near-circle regime
/// free of K -> infinity overflow.
///
/// Immutable after construction and safe for concurrent reads.
class EllipticContext {
 public:
  struct Options {
    /// Build Chebyshev caches for g and F (skipped by throwaway contexts
    /// used in finite differencing across the modulus).
    bool build_interpolants = true;
    /// Force the Landen-ladder path even above the q=1 switch; used by
    /// tests that compare the two branches. Requires q < 1.
    bool force_elliptic = false;
  };

  static constexpr double q1_threshold = 1e-12;

  explicit EllipticContext(double q) : EllipticContext(q, Options{}) {}

  EllipticContext(double q, Options opt) : q_(q) {
    if (!(q > 0.0) || q > 1.0)
      throw std::domain_error("EllipticContext: modulus must lie in (0,1]");
    q1_ = (q > 1.0 - q1_threshold) && !opt.force_elliptic;
    if (q1_) {
      K_ = std::numeric_limits<double>::infinity();
      Kprime_ = kPi / 2.0;  // exact in the degenerate branch
      return;
    }
    if (q >= 1.0)
      throw std::domain_error(
          "EllipticContext: q = 1 requires the degenerate branch");
    K_ = complete_K(q);
    Kprime_ = complete_K(std::sqrt((1.0 - q) * (1.0 + q)));
    // Descending Landen ladder; each step roughly squares the distance
    // from the degenerate modulus, so the ladder is short.
    double k = q;
    while (k > 1e-8) {
      const double kp = std::sqrt((1.0 - k) * (1.0 + k));
      k = (1.0 - kp) / (1.0 + kp);
      ladder_.push_back(k);
      if (ladder_.size() > 64)
        throw std::runtime_error("EllipticContext: Landen ladder diverged");
    }
    arg_scale_ = 1.0;
    for (double ki : ladder_) arg_scale_ *= 1.0 + ki;

    build_panels();
    if (opt.build_interpolants) build_interpolants();
  }

  double q() const { return q_; }
  double K() const { return K_; }
  double Kprime() const { return Kprime_; }
  bool q1_mode() const { return q1_; }

  /// sn, cn, dn at a real argument. In the degenerate branch these are
  /// (tanh, sech, sech).
  JacobiTriple jacobi(double x) const {
    if (q1_) {
      const double c = 1.0 / std::cosh(x);
      return {std::tanh(x), c, c};
    }
    // Reduce by the real period 4K; the ladder keeps full accuracy for
    // arguments within one period.
    const double x0 = x - 4.0 * K_ * std::nearbyint(x / (4.0 * K_));
    double z = x0 / arg_scale_;
    const double m = ladder_.empty() ? q_ * q_
                                     : ladder_.back() * ladder_.back();
    const double sz = std::sin(z), cz = std::cos(z);
    JacobiTriple j;
    j.sn = sz - 0.25 * m * (z - sz * cz) * cz;
    j.cn = cz + 0.25 * m * (z - sz * cz) * sz;
    j.dn = 1.0 - 0.5 * m * sz * sz;
    for (std::size_t i = ladder_.size(); i-- > 0;) {
      const double k = ladder_[i];
      const double s = k * j.sn * j.sn;
      const double den = 1.0 / (1.0 + s);
      j = {(1.0 + k) * j.sn * den, j.cn * j.dn * den, (1.0 - s) * den};
    }
    return j;
  }

  /// Monotone angle function; strictly increasing odd function with
  /// g(2K) = pi/2 and quasi-period g(x+4K) = g(x) + pi.
  double g(double x) const {
    if (q1_) return g1(x);
    const double n = std::nearbyint(x / (4.0 * K_));
    const double y = x - 4.0 * K_ * n;
    const JacobiTriple j = jacobi(0.5 * y);
    return n * kPi + std::atan2((1.0 + q_) * j.sn, j.cn * j.dn);
  }

  /// g'(x) = (dn x + q cn x)/2, positive for every real x.
  double g_prime(double x) const {
    if (q1_) return 1.0 / std::cosh(x);
    const JacobiTriple j = jacobi(x);
    return 0.5 * (j.dn + q_ * j.cn);
  }

  /// Antiderivative of g with F(0) = 0; even and strictly convex.
  double F(double x) const {
    if (x == 0.0) return 0.0;
    if (q1_) return F1(x);
    double y = std::abs(x);
    double extra = 0.0;
    if (y > 4.0 * K_) {
      // quasi-periodic extension: F(y + 4Kn) = F(y) + n pi y + 2 pi K n^2
      const double n = std::floor(y / (4.0 * K_));
      y -= 4.0 * K_ * n;
      extra = n * kPi * y + 2.0 * kPi * K_ * n * n;
    }
    if (!F_interp_.empty()) return F_interp_(y) + extra;
    return F_panels(y) + extra;
  }

  /// Cache lookups; empty caches fall back to direct evaluation. The
  /// caches agree with the direct routes to ~1e-13 (tested).
  double g_from_interpolant(double x) const {
    return g_interp_.empty() ? g(x) : g_interp_(x);
  }
  double F_from_panels(double x) const {
    if (q1_) return F1(x);
    return F_panels(std::abs(x));
  }
  bool has_interpolants() const { return !F_interp_.empty(); }

 private:
  static double g1(double x) {
    if (std::abs(x) > 350.0) return std::copysign(kPi / 2.0, x);
    return std::atan(std::sinh(x));
  }

  /// Degenerate-branch antiderivative; for large arguments switch to the
  /// asymptote (pi/2)|x| - 2*Catalan (the tail integral is below 1e-25
  /// past |x| = 30).
  static double F1(double x) {
    const double y = std::abs(x);
    constexpr double two_catalan = 1.8319311883544380301;
    if (y > 30.0) return kPi / 2.0 * y - two_catalan;
    const int np = static_cast<int>(std::ceil(y));
    double acc = 0.0;
    const double w = np > 0 ? y / np : 0.0;
    for (int i = 0; i < np; ++i)
      acc += detail::gl32_panel([](double u) { return g1(u); }, i * w,
                                (i + 1) * w);
    return acc;
  }

  void build_panels() {
    // 16 panels of width K/4 spanning [0, 4K]; prefix sums let F do a
    // single partial panel per call.
    n_panels_ = 16;
    panel_w_ = 4.0 * K_ / n_panels_;
    panel_prefix_.assign(n_panels_ + 1, 0.0);
    for (int i = 0; i < n_panels_; ++i)
      panel_prefix_[i + 1] =
          panel_prefix_[i] +
          detail::gl32_panel([this](double u) { return g(u); }, i * panel_w_,
                             (i + 1) * panel_w_);
  }

  double F_panels(double y) const {
    int i = std::min(static_cast<int>(y / panel_w_), n_panels_ - 1);
    return panel_prefix_[i] +
           detail::gl32_panel([this](double u) { return g(u); }, i * panel_w_,
                              y);
  }

  void build_interpolants() {
    const double L = 4.0 * K_;
    g_interp_ = fit_adaptive([this](double x) { return g(x); }, -L, L);
    F_interp_ = fit_adaptive([this](double x) { return F_panels(x); }, 0.0, L);
  }

  /// Extremely skewed period ratios (q within ~1e-10 of 1) may exhaust the
  /// node cap; the caches then stay empty and evaluation falls back to the
  /// direct routes.
  template <class Fn>
  detail::Chebyshev fit_adaptive(const Fn& f, double a, double b) const {
    for (int n = 128; n <= 8192; n *= 2) {
      auto c = detail::Chebyshev::fit(f, a, b, n);
      double err = 0.0;
      for (int i = 0; i <= 97; ++i) {
        const double x = a + (b - a) * (i + 0.34) / 98.0;
        err = std::max(err, std::abs(c(x) - f(x)));
      }
      if (err < 5e-13) return c;
    }
    return {};
  }

  double q_ = 0.0;
  double K_ = 0.0;
  double Kprime_ = 0.0;
  bool q1_ = false;
  std::vector<double> ladder_;
  double arg_scale_ = 1.0;
  std::vector<double> panel_prefix_;
  double panel_w_ = 0.0;
  int n_panels_ = 0;
  detail::Chebyshev g_interp_;
  detail::Chebyshev F_interp_;
};

}  // namespace ringforge::elliptic
