#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ringforge/functional.hpp"

namespace ringforge::solver {

using elliptic::EllipticContext;
using elliptic::kPi;
using functional::BoundaryConditions;
using functional::PhiVector;
using grid::QuadComplex;
using pattern::Geometry;
using pattern::RingState;

struct SolveOptions {
  double grad_tol = 1e-10;
  int max_iter = 200;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  /// Optional full-length initial state; empty means the uniform default
  /// (u = K, or u = 1 in the degenerate-modulus branch).
  std::vector<double> init_u;
};

struct SolveReport {
  int iterations = 0;
  double grad_norm = std::numeric_limits<double>::infinity();
  double max_flower_residual = 0.0;
  double max_q4_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  RingState state;
  SolveReport report;
};

namespace detail {

/// A boundary value problem reduced to its free unknowns (all vertices
/// for Neumann, interior ones for Dirichlet).
struct System {
  const QuadComplex& complex;
  const EllipticContext& ctx;
  Geometry geom;
  PhiVector phi;
  std::vector<int> free;
  std::vector<int> pos;  // full index -> free position, -1 when fixed

  System(const QuadComplex& c, const EllipticContext& e, Geometry g,
         const BoundaryConditions& bc)
      : complex(c), ctx(e), geom(g) {
    bc.validate(c, g, e);
    phi = functional::compile_phi(bc, c, g);
    pos.assign(c.vertex_count(), -1);
    const bool dirichlet = bc.kind == BoundaryConditions::Kind::Dirichlet;
    for (int vi = 0; vi < c.vertex_count(); ++vi) {
      if (dirichlet && c.is_boundary(vi)) continue;
      pos[vi] = static_cast<int>(free.size());
      free.push_back(vi);
    }
    if (free.empty())
      throw std::invalid_argument("problem has no free unknowns");
    if (c.edge_count() == 0)
      throw std::invalid_argument("problem has no edges");
  }

  int nfree() const { return static_cast<int>(free.size()); }

  RingState initial_state(const BoundaryConditions& bc,
                          const SolveOptions& opts) const {
    RingState s{geom, ctx.q(),
                std::vector<double>(complex.vertex_count(),
                                    ctx.q1_mode() ? 1.0 : ctx.K())};
    if (!opts.init_u.empty()) {
      if (static_cast<int>(opts.init_u.size()) != complex.vertex_count())
        throw std::invalid_argument("initial state has the wrong length");
      s.u = opts.init_u;
    }
    if (bc.kind == BoundaryConditions::Kind::Dirichlet)
      for (const auto& [vi, u] : bc.dirichlet_u) s.u[vi] = u;
    return s;
  }

  double value(const RingState& s) const {
    return functional::S_value(s, phi, complex, ctx);
  }

  Eigen::VectorXd gradient(const RingState& s) const {
    const auto g = functional::S_gradient(s, phi, complex, ctx);
    Eigen::VectorXd out(nfree());
    for (int i = 0; i < nfree(); ++i) out[i] = g[free[i]];
    return out;
  }

  Eigen::SparseMatrix<double> hessian(const RingState& s) const {
    const double sigma = functional::pair_sign(geom);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(complex.edge_count() * 4);
    for (const auto& e : complex.edges()) {
      const int i = pos[e[0]], j = pos[e[1]];
      if (i < 0 && j < 0) continue;
      const double a = ctx.g_prime(s.u[e[0]] - s.u[e[1]]);
      const double b = ctx.g_prime(s.u[e[0]] + s.u[e[1]]);
      if (i >= 0) trip.emplace_back(i, i, a + sigma * b);
      if (j >= 0) trip.emplace_back(j, j, a + sigma * b);
      if (i >= 0 && j >= 0) {
        trip.emplace_back(i, j, -a + sigma * b);
        trip.emplace_back(j, i, -a + sigma * b);
      }
    }
    Eigen::SparseMatrix<double> h(nfree(), nfree());
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
  }

  void apply_step(RingState& s, const Eigen::VectorXd& d, double alpha) const {
    for (int i = 0; i < nfree(); ++i) s.u[free[i]] += alpha * d[i];
  }

  /// Mild trust cap on the step length; the energies are smooth and
  /// convex/saddle-structured on all of R^V, so this only guards the very
  /// first iterations against wild overshoots.
  double step_cap(const Eigen::VectorXd& d) const {
    const double span = 10.0 * std::max(1.0, ctx.q1_mode() ? 5.0 : ctx.K());
    const double dmax = d.lpNorm<Eigen::Infinity>();
    return dmax > span ? span / dmax : 1.0;
  }

  void fill_report(const RingState& s, SolveReport& rep) const {
    rep.max_flower_residual = 0.0;
    rep.max_q4_residual = 0.0;
    for (int vi : complex.interior_vertices()) {
      rep.max_flower_residual =
          std::max(rep.max_flower_residual,
                   std::abs(pattern::flower_residual(s, complex, vi, ctx)));
      rep.max_q4_residual =
          std::max(rep.max_q4_residual,
                   pattern::q4_laplace_residual(s, complex, vi, ctx).modulus);
    }
  }
};

/// Damped Newton descent on the convex hyperbolic energy, minimized over
/// all of R^V; admissibility of the minimizer (every variable in [0,2K])
/// is a consequence of the data bounds, not an iteration constraint. Also
/// serves the degenerate-modulus circle problem.
inline SolveResult minimize_convex(const System& sys,
                                   const BoundaryConditions& bc,
                                   const SolveOptions& opts) {
  RingState s = sys.initial_state(bc, opts);
  SolveReport rep;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  double fcur = sys.value(s);
  for (rep.iterations = 0; rep.iterations < opts.max_iter; ++rep.iterations) {
    const Eigen::VectorXd g = sys.gradient(s);
    rep.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (rep.grad_norm <= opts.grad_tol) {
      rep.converged = true;
      break;
    }
    ldlt.compute(sys.hessian(s));
    Eigen::VectorXd d;
    if (ldlt.info() == Eigen::Success)
      d = ldlt.solve(-g);
    else
      d = -g;
    if (!d.allFinite() || g.dot(d) >= 0.0) d = -g;
    double alpha = sys.step_cap(d);
    // local phase: once energy differences drown in roundoff, accept the
    // Newton step on gradient decrease instead of the Armijo test
    if (rep.grad_norm < 1e-6) {
      RingState trial = s;
      sys.apply_step(trial, d, alpha);
      if (sys.gradient(trial).lpNorm<Eigen::Infinity>() < rep.grad_norm) {
        s = trial;
        fcur = sys.value(s);
        continue;
      }
    }
    const double slope = g.dot(d);
    RingState trial = s;
    for (int ls = 0; ls < 60; ++ls) {
      trial = s;
      sys.apply_step(trial, d, alpha);
      const double fnew = sys.value(trial);
      if (fnew <= fcur + opts.armijo_c * alpha * slope) {
        fcur = fnew;
        break;
      }
      alpha *= opts.armijo_shrink;
    }
    s = trial;
  }
  sys.fill_report(s, rep);
  return {std::move(s), rep};
}

/// One-dimensional concave maximization of t -> S(u + t v) over the
/// all-free-ones direction v: safeguarded Newton with bracketed bisection.
/// Returns the maximizer; the derivative at it is below dtol.
inline double maximize_along_ones(const System& sys, const RingState& base,
                                  double t_hint, double dtol = 1e-12) {
  auto shifted = [&](double t) {
    RingState s = base;
    for (int vi : sys.free) s.u[vi] += t;
    return s;
  };
  auto dphi = [&](double t) { return sys.gradient(shifted(t)).sum(); };
  auto d2phi = [&](double t) {
    const RingState s = shifted(t);
    const Eigen::SparseMatrix<double> h = sys.hessian(s);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.nfree());
    return ones.dot(h * ones);
  };

  // bracket the zero of the decreasing derivative
  double lo = t_hint, hi = t_hint;
  double dlo = dphi(lo), dhi = dlo;
  double w = 0.25 * std::max(1.0, std::abs(t_hint));
  for (int i = 0; i < 200 && dlo < 0.0; ++i, w *= 2.0) {
    lo -= w;
    dlo = dphi(lo);
  }
  w = 0.25 * std::max(1.0, std::abs(t_hint));
  for (int i = 0; i < 200 && dhi > 0.0; ++i, w *= 2.0) {
    hi += w;
    dhi = dphi(hi);
  }
  if (!(dlo >= 0.0) || !(dhi <= 0.0))
    throw std::runtime_error("inner maximization failed to bracket");

  double t = std::clamp(t_hint, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double d1 = dphi(t);
    if (std::abs(d1) < dtol) return t;
    (d1 > 0.0 ? lo : hi) = t;
    const double d2 = d2phi(t);
    if (!(d2 < 0.0))
      throw std::runtime_error(
          "reduced spherical functional: direction is not concave");
    double tn = t - d1 / d2;
    if (!(tn > lo) || !(tn < hi)) tn = 0.5 * (lo + hi);
    t = tn;
  }
  return t;
}

/// Saddle elimination for the spherical energy: Newton on the reduced
/// (maximized) functional restricted to the sum-constraint hyperplane,
/// with a projected-gradient fallback when the reduced Hessian is not
/// positive definite.
inline SolveResult minimize_spherical_reduced(const System& sys,
                                              const BoundaryConditions& bc,
                                              const SolveOptions& opts) {
  RingState s = sys.initial_state(bc, opts);
  SolveReport rep;
  const int n = sys.nfree();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  double t_hint = 0.0;

  auto reduced_value = [&](const RingState& base, double& t_io) {
    t_io = maximize_along_ones(sys, base, t_io);
    RingState z = base;
    for (int vi : sys.free) z.u[vi] += t_io;
    return sys.value(z);
  };

  double fcur = reduced_value(s, t_hint);
  for (rep.iterations = 0; rep.iterations < opts.max_iter; ++rep.iterations) {
    RingState z = s;
    for (int vi : sys.free) z.u[vi] += t_hint;
    const Eigen::VectorXd g = sys.gradient(z);
    rep.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (rep.grad_norm <= opts.grad_tol) {
      rep.converged = true;
      s = z;
      break;
    }

    Eigen::MatrixXd H = Eigen::MatrixXd(sys.hessian(z));
    const Eigen::VectorXd hv = H * ones;
    const double c = ones.dot(hv);
    if (!(c < 0.0))
      throw std::runtime_error(
          "reduced spherical functional: direction is not concave");
    const double mu = std::max(1.0, H.diagonal().sum() / n);
    Eigen::MatrixXd A =
        H - (hv * hv.transpose()) / c + (mu / n) * (ones * ones.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    Eigen::VectorXd d;
    if (llt.info() == Eigen::Success)
      d = llt.solve(-g);
    else
      d = -g;  // reduced Hessian not positive definite: steepest descent
    d.array() -= d.mean();  // stay on the sum-constraint hyperplane

    // local phase: accept on gradient decrease once the reduced-value
    // differences are below roundoff
    if (rep.grad_norm < 1e-6) {
      RingState trial = s;
      sys.apply_step(trial, d, 1.0);
      double t_trial = t_hint;
      t_trial = maximize_along_ones(sys, trial, t_trial);
      RingState zt = trial;
      for (int vi : sys.free) zt.u[vi] += t_trial;
      if (sys.gradient(zt).lpNorm<Eigen::Infinity>() < rep.grad_norm) {
        s = trial;
        t_hint = t_trial;
        fcur = sys.value(zt);
        continue;
      }
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      d.array() -= d.mean();
      slope = g.dot(d);
      if (!(slope < 0.0)) break;  // stationary on the hyperplane
    }

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      RingState trial = s;
      sys.apply_step(trial, d, alpha);
      double t_trial = t_hint;
      const double fnew = reduced_value(trial, t_trial);
      if (fnew <= fcur + opts.armijo_c * alpha * slope) {
        s = trial;
        t_hint = t_trial;
        fcur = fnew;
        accepted = true;
        break;
      }
      alpha *= opts.armijo_shrink;
    }
    if (!accepted) break;  // line search stalled; report best state
  }
  if (!rep.converged) {
    // hand back the best inner-maximized state
    for (int vi : sys.free) s.u[vi] += t_hint;
    rep.grad_norm = sys.gradient(s).lpNorm<Eigen::Infinity>();
  }
  sys.fill_report(s, rep);
  return {std::move(s), rep};
}

}  // namespace detail

/// Unique hyperbolic pattern for admissible Dirichlet or Neumann data:
/// damped Newton on the convex energy, iterates held strictly inside the
/// admissible box by a fraction-to-the-boundary rule.
inline SolveResult solve_hyperbolic(const QuadComplex& complex, double q,
                                    const BoundaryConditions& bc,
                                    const SolveOptions& opts = {}) {
  EllipticContext ctx(q);
  detail::System sys(complex, ctx, Geometry::Hyperbolic, bc);
  return detail::minimize_convex(sys, bc, opts);
}

/// Reduced spherical energy at a state: the value after maximizing along
/// the all-ones direction, and the inner maximizer.
inline std::pair<double, double> reduced_spherical(
    const RingState& state, const PhiVector& phi, const QuadComplex& complex,
    const EllipticContext& ctx) {
  BoundaryConditions all_free;
  all_free.kind = BoundaryConditions::Kind::Neumann;
  for (int vi : complex.boundary_vertices()) all_free.neumann_theta[vi] = 0.0;
  detail::System sys(complex, ctx, Geometry::Sphere, all_free);
  sys.phi = phi;
  const double t = detail::maximize_along_ones(sys, state, 0.0);
  RingState z = state;
  for (int vi : sys.free) z.u[vi] += t;
  return {sys.value(z), t};
}

/// Spherical boundary value problem through the min-max principle.
inline SolveResult solve_spherical_minmax(const QuadComplex& complex, double q,
                                          const BoundaryConditions& bc,
                                          const SolveOptions& opts = {}) {
  EllipticContext ctx(q);
  detail::System sys(complex, ctx, Geometry::Sphere, bc);
  return detail::minimize_spherical_reduced(sys, bc, opts);
}

/// Degenerate-modulus (circle) solve, either geometry.
inline SolveResult solve_circle_pattern(const QuadComplex& complex,
                                        Geometry geom,
                                        const BoundaryConditions& bc,
                                        const SolveOptions& opts = {}) {
  EllipticContext ctx(1.0);
  detail::System sys(complex, ctx, geom, bc);
  if (geom == Geometry::Hyperbolic)
    return detail::minimize_convex(sys, bc, opts);
  return detail::minimize_spherical_reduced(sys, bc, opts);
}

/// General entry point used by the command-line driver.
inline SolveResult solve(const QuadComplex& complex, Geometry geom, double q,
                         const BoundaryConditions& bc,
                         const SolveOptions& opts = {}) {
  if (q > 1.0 - EllipticContext::q1_threshold)
    return solve_circle_pattern(complex, geom, bc, opts);
  if (geom == Geometry::Hyperbolic)
    return solve_hyperbolic(complex, q, bc, opts);
  return solve_spherical_minmax(complex, q, bc, opts);
}

}  // namespace ringforge::solver
