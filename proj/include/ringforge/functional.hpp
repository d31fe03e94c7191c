#pragma once

#include <Eigen/Sparse>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringforge/pattern.hpp"

namespace ringforge::functional {

using elliptic::EllipticContext;
using elliptic::kPi;
using grid::QuadComplex;
using pattern::Geometry;
using pattern::RingState;

/// Edge sign of the pair term: the spherical energy subtracts F(u_j+u_k),
/// the hyperbolic one adds it.
inline double pair_sign(Geometry g) {
  return g == Geometry::Sphere ? -1.0 : 1.0;
}

/// Boundary data of a boundary value problem. Dirichlet prescribes the
/// uniformizing variable on boundary vertices; Neumann prescribes cone
/// angles, with a per-vertex orientation flag selecting the branch of the
/// linear coefficients.
struct BoundaryConditions {
  enum class Kind { Dirichlet, Neumann };
  Kind kind = Kind::Neumann;
  std::map<int, double> dirichlet_u;    // boundary vertex index -> u
  std::map<int, double> neumann_theta;  // boundary vertex index -> cone angle
  std::map<int, int> orientation;       // boundary vertex index -> +1 / -1

  /// Orientation flag of a boundary ring. Defaults to the sign of the
  /// prescribed cone angle (a negative nominal angle means a negatively
  /// oriented ring); explicit flags override.
  int flag(int vi) const {
    auto it = orientation.find(vi);
    if (it != orientation.end()) return it->second;
    auto th = neumann_theta.find(vi);
    if (th != neumann_theta.end() && th->second < 0.0) return -1;
    return +1;
  }

  void validate(const QuadComplex& complex, Geometry geom,
                const EllipticContext& ctx) const {
    for (const auto& [vi, s] : orientation)
      if (s != 1 && s != -1)
        throw std::invalid_argument(
            "boundary orientation flags must be +1 or -1");
    if (kind == Kind::Neumann) {
      for (int vi : complex.boundary_vertices()) {
        auto it = neumann_theta.find(vi);
        if (it == neumann_theta.end())
          throw std::invalid_argument(
              "Neumann data missing at boundary vertex " + vertex_name(complex, vi));
        const double th = it->second;
        if (!(th > -2.0 * kPi) || !(th < 2.0 * kPi))
          throw std::invalid_argument(
              "cone angle out of the admissible range (-2pi, 2pi) at vertex " +
              vertex_name(complex, vi));
        if (complex.valence(vi) == 1 && !(std::abs(th) < kPi))
          throw std::invalid_argument(
              "|Theta| < pi is required at valence-1 boundary vertices; "
              "violated at vertex " +
              vertex_name(complex, vi));
      }
      for (const auto& [vi, th] : neumann_theta)
        if (!complex.is_boundary(vi))
          throw std::invalid_argument("cone angle prescribed at non-boundary vertex " +
                                      vertex_name(complex, vi));
    } else {
      for (int vi : complex.boundary_vertices()) {
        auto it = dirichlet_u.find(vi);
        if (it == dirichlet_u.end())
          throw std::invalid_argument(
              "Dirichlet data missing at boundary vertex " +
              vertex_name(complex, vi));
        const double u = it->second;
        if (ctx.q1_mode()) {
          if (geom == Geometry::Hyperbolic && !(u > 0.0))
            throw std::invalid_argument(
                "Dirichlet value must be positive for degenerate-modulus "
                "hyperbolic rings, vertex " +
                vertex_name(complex, vi));
        } else if (u < 0.0 || u > 2.0 * ctx.K()) {
          throw std::invalid_argument(
              "Dirichlet value outside [0, 2K] at vertex " +
              vertex_name(complex, vi));
        }
      }
    }
  }

 private:
  static std::string vertex_name(const QuadComplex& c, int vi) {
    const auto v = c.vertex(vi);
    return "(" + std::to_string(v.m) + "," + std::to_string(v.n) + ")";
  }
};

/// Linear-term coefficients of the energy. Interior entries are the full
/// turn (+2pi spherical, -2pi hyperbolic); Neumann boundary entries fold
/// in the prescribed cone angle and the orientation flag; Dirichlet
/// boundary entries are zero (those variables are fixed, not varied).
using PhiVector = std::vector<double>;

inline PhiVector compile_phi(const BoundaryConditions& bc,
                             const QuadComplex& complex, Geometry geom) {
  PhiVector phi(complex.vertex_count(), 0.0);
  const bool sphere = geom == Geometry::Sphere;
  for (int vi : complex.interior_vertices())
    phi[vi] = sphere ? 2.0 * kPi : -2.0 * kPi;
  if (bc.kind == BoundaryConditions::Kind::Neumann) {
    for (int vi : complex.boundary_vertices()) {
      const double theta = bc.neumann_theta.at(vi);
      const double piV = kPi * complex.valence(vi);
      if (sphere)
        phi[vi] = bc.flag(vi) > 0 ? piV - theta : -theta;
      else
        phi[vi] = bc.flag(vi) > 0 ? -theta : -piV - theta;
    }
  }
  return phi;
}

/// Energy value: sum over edges of F(u_j - u_k) + sigma F(u_j + u_k)
/// plus the linear term.
inline double S_value(const RingState& state, const PhiVector& phi,
                      const QuadComplex& complex, const EllipticContext& ctx) {
  const double sigma = pair_sign(state.geometry);
  double s = 0.0;
  for (const auto& e : complex.edges())
    s += ctx.F(state.u[e[0]] - state.u[e[1]]) +
         sigma * ctx.F(state.u[e[0]] + state.u[e[1]]);
  for (int vi = 0; vi < complex.vertex_count(); ++vi)
    s += phi[vi] * state.u[vi];
  return s;
}

/// Analytic gradient. At an interior vertex the entry is exactly the
/// flower residual of the state, so a vanishing gradient is the pattern
/// equation.
inline std::vector<double> S_gradient(const RingState& state,
                                      const PhiVector& phi,
                                      const QuadComplex& complex,
                                      const EllipticContext& ctx) {
  const double sigma = pair_sign(state.geometry);
  std::vector<double> grad(phi.begin(), phi.end());
  for (const auto& e : complex.edges()) {
    const double d = ctx.g(state.u[e[0]] - state.u[e[1]]);
    const double s = ctx.g(state.u[e[0]] + state.u[e[1]]);
    grad[e[0]] += d + sigma * s;
    grad[e[1]] += -d + sigma * s;
  }
  return grad;
}

/// Sparse symmetric Hessian. Per edge, with a = F''(u_j - u_k) and
/// b = F''(u_j + u_k): both diagonals gain a + sigma b, the off-diagonal
/// pair gains -a + sigma b.
inline Eigen::SparseMatrix<double> S_hessian(const RingState& state,
                                             const QuadComplex& complex,
                                             const EllipticContext& ctx) {
  const double sigma = pair_sign(state.geometry);
  const int n = complex.vertex_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(complex.edge_count() * 4);
  for (const auto& e : complex.edges()) {
    const double a = ctx.g_prime(state.u[e[0]] - state.u[e[1]]);
    const double b = ctx.g_prime(state.u[e[0]] + state.u[e[1]]);
    trip.emplace_back(e[0], e[0], a + sigma * b);
    trip.emplace_back(e[1], e[1], a + sigma * b);
    trip.emplace_back(e[0], e[1], -a + sigma * b);
    trip.emplace_back(e[1], e[0], -a + sigma * b);
  }
  Eigen::SparseMatrix<double> h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

/// Quadratic form of the Hessian on the all-ones direction; the
/// difference terms drop out, leaving -4 sum_e F''(u_j + u_k) on the
/// sphere (always negative) and its positive mirror hyperbolically.
inline double hessian_quadform_ones(const RingState& state,
                                    const QuadComplex& complex,
                                    const EllipticContext& ctx) {
  const double sigma = pair_sign(state.geometry);
  double s = 0.0;
  for (const auto& e : complex.edges())
    s += 4.0 * sigma * ctx.g_prime(state.u[e[0]] + state.u[e[1]]);
  return s;
}

}  // namespace ringforge::functional
