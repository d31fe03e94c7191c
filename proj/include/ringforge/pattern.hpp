#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ringforge/elliptic.hpp"
#include "ringforge/grid.hpp"

namespace ringforge::pattern {

using elliptic::EllipticContext;
using elliptic::kPi;

enum class Geometry { Sphere, Hyperbolic };

inline const char* name(Geometry g) {
  return g == Geometry::Sphere ? "sphere" : "hyperbolic";
}

/// Signed inner radius and positive outer radius of one ring
/// (spherical radians or hyperbolic distance).
struct RingRadii {
  double r = 0.0;
  double R = 0.0;
};

/// Solver unknown: one uniformizing variable per vertex, plus the global
/// modulus and the geometry tag. Indexing follows QuadComplex.
struct RingState {
  Geometry geometry = Geometry::Hyperbolic;
  double q = 1.0;
  std::vector<double> u;
};

/// Ring orientation: positive for u < K, negative for u > K; the
/// degenerate point-inner-circle ring at u = K counts as positive, which
/// matches the continuous branch of the opening angles from r > 0.
inline int orientation(double u, const EllipticContext& ctx) {
  return u <= ctx.K() ? +1 : -1;
}

/// Radii of the ring with uniformizing variable u.
///
/// Sphere (u in [0,2K]): cos r = sn u, sin r = cn u, sin R = dn u with
/// cos R = q cos r >= 0. Hyperbolic (u in (0,2K)): cosh R = 1/(q sn u),
/// sinh r = cn u / sn u. Degenerate modulus: r = R with e^u = cot(R/2)
/// resp. e^u = coth(R/2).
inline RingRadii radii_from_u(double u, Geometry geom,
                              const EllipticContext& ctx) {
  if (ctx.q1_mode()) {
    if (geom == Geometry::Sphere) {
      const double R = 2.0 * std::atan(std::exp(-u));
      return {R, R};
    }
    if (u <= 0.0)
      throw std::domain_error("radii_from_u: infinite hyperbolic radius");
    const double R = std::log((std::exp(u) + 1.0) / (std::exp(u) - 1.0));
    return {R, R};
  }
  const double K2 = 2.0 * ctx.K();
  if (u < -1e-9 || u > K2 + 1e-9)
    throw std::domain_error("radii_from_u: u outside [0, 2K]");
  const auto j = ctx.jacobi(u);
  if (geom == Geometry::Sphere) {
    const double r = std::atan2(j.cn, j.sn);
    const double R = std::atan2(j.dn, ctx.q() * j.sn);
    return {r, R};
  }
  if (j.sn < 1e-14)
    throw std::domain_error("radii_from_u: infinite hyperbolic radius");
  return {std::asinh(j.cn / j.sn), std::acosh(1.0 / (ctx.q() * j.sn))};
}

/// Inverse of radii_from_u on the admissible outer-radius interval,
/// selecting the branch by the requested inner-circle orientation.
inline double u_from_outer_radius(double R, int orient, Geometry geom,
                                  const EllipticContext& ctx) {
  if (ctx.q1_mode()) {
    if (orient < 0)
      throw std::domain_error(
          "u_from_outer_radius: degenerate-modulus rings are positively "
          "oriented");
    if (geom == Geometry::Sphere) {
      if (R <= 0.0 || R >= kPi)
        throw std::domain_error("u_from_outer_radius: R out of range");
      return std::log(1.0 / std::tan(0.5 * R));
    }
    if (R <= 0.0)
      throw std::domain_error("u_from_outer_radius: R out of range");
    return std::log(1.0 / std::tanh(0.5 * R));
  }
  const double q = ctx.q();
  double snu = 0.0;
  if (geom == Geometry::Sphere) {
    const double R0 = std::acos(q);
    if (R < R0 - 1e-12 || R > kPi / 2.0 + 1e-12)
      throw std::domain_error("u_from_outer_radius: R out of range");
    snu = std::cos(R) / q;  // = cos r
  } else {
    if (std::cosh(R) < 1.0 / q - 1e-12)
      throw std::domain_error("u_from_outer_radius: R out of range");
    snu = 1.0 / (q * std::cosh(R));
  }
  const double phi = std::asin(std::clamp(snu, 0.0, 1.0));
  const double u = elliptic::incomplete_F(phi, q);
  return orient >= 0 ? u : 2.0 * ctx.K() - u;
}

/// Opening angle of the kite spanned by the rings u (at the vertex) and
/// u_k (the neighbor), always in (-pi, pi).
inline double theta(double u, double u_k, Geometry geom,
                    const EllipticContext& ctx) {
  const double d = ctx.g(u - u_k);
  const double s = ctx.g(u + u_k);
  if (geom == Geometry::Sphere) return d - s + (u <= ctx.K() ? kPi : 0.0);
  return d + s - (u <= ctx.K() ? 0.0 : kPi);
}

/// The two half angles of the kite at the vertex, split by the center
/// line: phi on the inner-circle side, psi on the outer-circle side.
/// Empty at r = 0, where the split degenerates; theta stays valid there.
inline std::optional<std::pair<double, double>> kite_angles(
    double u, double u_k, Geometry geom, const EllipticContext& ctx) {
  const RingRadii a = radii_from_u(u, geom, ctx);
  const RingRadii b = radii_from_u(u_k, geom, ctx);
  if (std::abs(a.r) < 1e-12) return std::nullopt;
  double phi, psi;
  if (geom == Geometry::Sphere) {
    phi = std::atan(std::tan(b.R) / std::sin(a.r));
    psi = std::atan(std::tan(b.r) / std::sin(a.R));
  } else {
    phi = std::atan(std::tanh(b.R) / std::sinh(a.r));
    psi = std::atan(std::tanh(b.r) / std::sinh(a.R));
  }
  return std::make_pair(phi, psi);
}

/// Geodesic distance between the centers of two orthogonally intersecting
/// rings (Pythagoras across the right angle at the crossing point).
inline double center_distance(double u, double u_k, Geometry geom,
                              const EllipticContext& ctx) {
  const RingRadii a = radii_from_u(u, geom, ctx);
  const RingRadii b = radii_from_u(u_k, geom, ctx);
  if (geom == Geometry::Sphere)
    return std::acos(
        std::clamp(std::cos(a.R) * std::cos(b.r), -1.0, 1.0));
  return std::acosh(std::max(1.0, std::cosh(a.R) * std::cosh(b.r)));
}

/// Angle defect of the flower around an interior vertex: the kite angles
/// of the four incident edges minus the full turn (+2pi for positive,
/// -2pi for negative rings). Vanishes exactly at solutions and is smooth
/// across the orientation flip.
inline double flower_residual(const RingState& state,
                              const grid::QuadComplex& complex, int vi,
                              const EllipticContext& ctx) {
  if (!complex.is_interior(vi))
    throw std::invalid_argument("flower_residual: vertex is not interior");
  const double u = state.u[vi];
  double sum = 0.0;
  for (int wi : complex.neighbor_list(vi))
    sum += theta(u, state.u[wi], state.geometry, ctx);
  return sum - (orientation(u, ctx) > 0 ? 2.0 * kPi : -2.0 * kPi);
}

struct LaplaceResidual {
  double modulus = 0.0;  // |product - 1|
  double phase = 0.0;    // argument of the product, in (-pi, pi]
};

/// Multiplicative lattice residual at an interior vertex: the product of
/// the four edge factors sn((u -+ u_k + iK')/2) ratios, reduced to real
/// arithmetic through the factorization sn((x+iK')/2) = (i/sqrt q) e^{-i g(x)}.
/// The product equals 1 exactly when the flower closes (mod 2pi).
inline LaplaceResidual q4_laplace_residual(const RingState& state,
                                           const grid::QuadComplex& complex,
                                           int vi,
                                           const EllipticContext& ctx) {
  if (!complex.is_interior(vi))
    throw std::invalid_argument("q4_laplace_residual: vertex is not interior");
  const double u = state.u[vi];
  std::complex<double> prod(1.0, 0.0);
  for (int wi : complex.neighbor_list(vi)) {
    const double uk = state.u[wi];
    double arg = ctx.g(u + uk) - ctx.g(u - uk);
    if (state.geometry == Geometry::Hyperbolic)
      arg = -(ctx.g(u + uk) + ctx.g(u - uk));
    prod *= std::polar(1.0, arg);
  }
  return {std::abs(prod - 1.0), std::arg(prod)};
}

}  // namespace ringforge::pattern
