#pragma once

#include <functional>

#include "ringforge/solver.hpp"

namespace ringforge::solver {

/// Smooth-limit probe: tiny rings sampled from a smooth field u(x,y) on a
/// five-point stencil of spacing eps, with modulus q' = eps. The flower
/// defect at the center, divided by the calibration constant 2(1-q)
/// (matched to the linearization of the constant-field defect), tends to
/// Delta u + sinh 2u on the sphere and Delta u - sinh 2u hyperbolically.
struct LimitCheckRow {
  double eps = 0.0;
  double q = 0.0;
  double normalized = 0.0;
};

struct LimitCheckResult {
  std::vector<LimitCheckRow> rows;

  /// Richardson orders from three consecutive rows (assumes a halving
  /// eps schedule); empty until three rows exist.
  std::vector<double> richardson_orders() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 2 < rows.size(); ++i) {
      const double d1 = rows[i].normalized - rows[i + 1].normalized;
      const double d2 = rows[i + 1].normalized - rows[i + 2].normalized;
      out.push_back(std::log2(std::abs(d1) / std::abs(d2)));
    }
    return out;
  }

  /// Convergence orders against a known limit value.
  std::vector<double> orders_against(double exact) const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double e1 = std::abs(rows[i].normalized - exact);
      const double e2 = std::abs(rows[i + 1].normalized - exact);
      out.push_back(std::log2(e1 / e2));
    }
    return out;
  }
};

using ScalarField = std::function<double(double, double)>;

inline double sinh_gordon_normalized_residual(const ScalarField& u,
                                              Geometry geom, double eps,
                                              double x0, double y0) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw std::invalid_argument("sinh_gordon: eps must lie in (0,1)");
  const double q = std::sqrt((1.0 - eps) * (1.0 + eps));
  EllipticContext::Options o;
  o.build_interpolants = false;
  EllipticContext ctx(q, o);

  // the five-ring stencil is the smallest diamond
  static const auto stencil = QuadComplex::diamond(3, 3);
  const int center = stencil.interior_vertices().at(0);
  const auto& nb = stencil.neighbors(center);

  RingState s{geom, q, std::vector<double>(stencil.vertex_count(), 0.0)};
  const double K = ctx.K();
  s.u[center] = K - u(x0, y0);
  s.u[*nb[grid::East]] = K - u(x0 + eps, y0);
  s.u[*nb[grid::North]] = K - u(x0, y0 + eps);
  s.u[*nb[grid::West]] = K - u(x0 - eps, y0);
  s.u[*nb[grid::South]] = K - u(x0, y0 - eps);

  const double defect = pattern::flower_residual(s, stencil, center, ctx);
  const double kappa = 2.0 * (1.0 - q);
  return defect / kappa;
}

inline LimitCheckResult sinh_gordon_order_check(const ScalarField& u,
                                                Geometry geom,
                                                const std::vector<double>& eps_list,
                                                double x0, double y0) {
  LimitCheckResult out;
  for (double eps : eps_list)
    out.rows.push_back({eps, std::sqrt((1.0 - eps) * (1.0 + eps)),
                        sinh_gordon_normalized_residual(u, geom, eps, x0, y0)});
  return out;
}

}  // namespace ringforge::solver
