#pragma once

#include <functional>

#include "ringforge/solver.hpp"

namespace ringforge::solver {

/// Raised when the critical point stops being rigid along the deformation
/// path (singular Hessian or a corrector that no longer contracts).
struct ContinuationFailure : std::runtime_error {
  double q_at_failure;
  ContinuationFailure(const std::string& what, double q)
      : std::runtime_error(what + " at q = " + std::to_string(q)),
        q_at_failure(q) {}
};

struct ContinuationOptions {
  int steps = 0;           // 0 selects the default schedule
  double q_fd_step = 1e-6; // finite-difference step across the modulus
  double grad_tol = 1e-10;
  int corrector_max_iter = 30;
};

inline int default_continuation_steps(double from_q, double to_q) {
  return std::max(10,
                  static_cast<int>(std::ceil(std::abs(from_q - to_q) / 0.002)));
}

/// Per accepted step: (step index, q, corrected state, corrector report).
using ContinuationObserver =
    std::function<void(int, double, const RingState&, const SolveReport&)>;

namespace detail {

/// d(grad)/dq at frozen state, by finite differences across the modulus;
/// one-sided from below when q sits against the degenerate end.
inline Eigen::VectorXd grad_dq(const System& sys_template,
                               const RingState& s, double q, double h) {
  auto grad_at = [&](double qq) {
    EllipticContext::Options o;
    o.build_interpolants = false;
    o.force_elliptic = false;
    EllipticContext cq(qq, o);
    RingState sq = s;
    sq.q = qq;
    const auto full =
        functional::S_gradient(sq, sys_template.phi, sys_template.complex, cq);
    Eigen::VectorXd out(sys_template.nfree());
    for (int i = 0; i < sys_template.nfree(); ++i)
      out[i] = full[sys_template.free[i]];
    return out;
  };
  if (q + h >= 1.0 - 1e-9) {
    // second-order backward difference
    return (3.0 * grad_at(q) - 4.0 * grad_at(q - h) + grad_at(q - 2.0 * h)) /
           (2.0 * h);
  }
  return (grad_at(q + h) - grad_at(q - h)) / (2.0 * h);
}

/// Solve H x = b at the current state; raises ContinuationFailure when the
/// factorization degenerates.
inline Eigen::VectorXd rigid_solve(const System& sys, const RingState& s,
                                   const Eigen::VectorXd& b, double q) {
  if (sys.geom == Geometry::Hyperbolic) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.hessian(s));
    if (ldlt.info() != Eigen::Success)
      throw ContinuationFailure("continuation: Hessian factorization failed",
                                q);
    Eigen::VectorXd x = ldlt.solve(b);
    if (!x.allFinite())
      throw ContinuationFailure("continuation: singular Hessian", q);
    return x;
  }
  const Eigen::MatrixXd H = Eigen::MatrixXd(sys.hessian(s));
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(H);
  Eigen::VectorXd x = lu.solve(b);
  const double resid = (H * x - b).lpNorm<Eigen::Infinity>();
  const double scale = b.lpNorm<Eigen::Infinity>() + 1e-30;
  if (!x.allFinite() || resid > 1e-6 * std::max(1.0, scale))
    throw ContinuationFailure("continuation: singular Hessian", q);
  return x;
}

}  // namespace detail

/// Deformation flow in the modulus: starting from a critical point of the
/// energy at start.q, march eps = 1 - q to the target with an RK4
/// predictor on d(state)/d(eps) = H^{-1} d(grad)/dq and a Newton corrector
/// on the critical-point equations after every step.
inline SolveResult continue_in_modulus(const QuadComplex& complex,
                                       const BoundaryConditions& bc,
                                       const RingState& start, double target_q,
                                       ContinuationOptions copts = {},
                                       const ContinuationObserver& observe = {}) {
  const Geometry geom = start.geometry;
  const double q0 = start.q;
  if (!(target_q > 0.0) || target_q > 1.0)
    throw std::invalid_argument("continuation: target modulus out of (0,1]");
  const int steps = copts.steps > 0 ? copts.steps
                                    : default_continuation_steps(q0, target_q);

  auto make_ctx = [](double q) {
    EllipticContext::Options o;
    o.build_interpolants = false;
    return EllipticContext(q, o);
  };

  RingState s = start;
  const double eps0 = 1.0 - q0, eps1 = 1.0 - target_q;

  auto corrector = [&](RingState& state, double q) {
    EllipticContext cq = make_ctx(q);
    detail::System sys(complex, cq, geom, bc);
    state.q = q;
    SolveReport rep;
    for (int it = 0; it < copts.corrector_max_iter; ++it) {
      const Eigen::VectorXd g = sys.gradient(state);
      rep.grad_norm = g.lpNorm<Eigen::Infinity>();
      if (rep.grad_norm <= copts.grad_tol) {
        rep.converged = true;
        rep.iterations = it;
        sys.fill_report(state, rep);
        return rep;
      }
      const Eigen::VectorXd d = detail::rigid_solve(sys, state, -g, q);
      // halve the step while the residual refuses to shrink
      double alpha = 1.0;
      for (int ls = 0; ls < 12; ++ls) {
        RingState trial = state;
        sys.apply_step(trial, d, alpha);
        if (sys.gradient(trial).lpNorm<Eigen::Infinity>() <
            rep.grad_norm * (1.0 - 0.25 * alpha)) {
          state = trial;
          break;
        }
        alpha *= 0.5;
        if (ls == 11)
          throw ContinuationFailure("continuation: corrector stalled", q);
      }
    }
    throw ContinuationFailure("continuation: corrector did not converge", q);
  };

  if (steps == 0 || std::abs(eps1 - eps0) < 1e-15) {
    SolveReport rep = corrector(s, q0);
    return {std::move(s), rep};
  }

  const double h = (eps1 - eps0) / steps;
  SolveReport last;
  for (int step = 0; step < steps; ++step) {
    const double ea = eps0 + step * h;
    const double eb = ea + h;

    auto rhs = [&](const RingState& u, double eps) {
      const double q = 1.0 - eps;
      EllipticContext cq = make_ctx(q);
      detail::System sys(complex, cq, geom, bc);
      RingState uq = u;
      uq.q = q;
      const Eigen::VectorXd b =
          detail::grad_dq(sys, uq, q, copts.q_fd_step);
      return detail::rigid_solve(sys, uq, b, q);
    };
    auto advance = [&](const RingState& u, const Eigen::VectorXd& k,
                       double dt) {
      RingState out = u;
      EllipticContext cq = make_ctx(1.0 - ea);
      detail::System sys(complex, cq, geom, bc);
      sys.apply_step(out, k, dt);
      return out;
    };

    const Eigen::VectorXd k1 = rhs(s, ea);
    const Eigen::VectorXd k2 = rhs(advance(s, k1, 0.5 * h), ea + 0.5 * h);
    const Eigen::VectorXd k3 = rhs(advance(s, k2, 0.5 * h), ea + 0.5 * h);
    const Eigen::VectorXd k4 = rhs(advance(s, k3, h), eb);
    s = advance(s, k1 + 2.0 * k2 + 2.0 * k3 + k4, h / 6.0);

    last = corrector(s, 1.0 - eb);
    if (observe) observe(step + 1, 1.0 - eb, s, last);
  }
  return {std::move(s), last};
}

}  // namespace ringforge::solver
