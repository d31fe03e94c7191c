#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "ringforge/functional.hpp"

using namespace ringforge;
using namespace ringforge::functional;
using elliptic::EllipticContext;
using elliptic::kPi;
using grid::QuadComplex;
using pattern::Geometry;
using pattern::RingState;

namespace {

RingState random_state(Geometry geom, double q, const EllipticContext& ctx,
                       int n, double lo = 0.15, double hi = 1.85) {
  RingState s{geom, q, std::vector<double>(n)};
  for (auto& u : s.u) u = oracles::uniform(lo, hi) * ctx.K();
  return s;
}

}  // namespace

TEST_CASE("phi compilation") {
  // valence-1 corners exist on the diamond
  auto d = QuadComplex::diamond(5, 5);
  BoundaryConditions bc;
  bc.kind = BoundaryConditions::Kind::Neumann;
  for (int vi : d.boundary_vertices()) bc.neumann_theta[vi] = kPi / 2.0;
  auto phi_h = compile_phi(bc, d, Geometry::Hyperbolic);
  auto phi_s = compile_phi(bc, d, Geometry::Sphere);
  for (int vi : d.interior_vertices()) {
    CHECK(phi_h[vi] == -2.0 * kPi);
    CHECK(phi_s[vi] == 2.0 * kPi);
  }
  for (int vi : d.boundary_vertices()) {
    if (d.valence(vi) == 1) CHECK(phi_h[vi] == -kPi / 2.0);
    CHECK(phi_s[vi] == kPi * d.valence(vi) - kPi / 2.0);
  }
  // negative orientation branch
  const int corner = d.boundary_vertices()[0];
  bc.orientation[corner] = -1;
  auto phi_h2 = compile_phi(bc, d, Geometry::Hyperbolic);
  auto phi_s2 = compile_phi(bc, d, Geometry::Sphere);
  CHECK(phi_h2[corner] == -kPi * d.valence(corner) - kPi / 2.0);
  CHECK(phi_s2[corner] == -kPi / 2.0);

  // a rectangle boundary vertex of valence 2 with theta = pi
  auto r = QuadComplex::rectangle(3, 3);
  BoundaryConditions bcr;
  for (int vi : r.boundary_vertices()) bcr.neumann_theta[vi] = kPi;
  auto phi_r = compile_phi(bcr, r, Geometry::Sphere);
  const int c = r.index_of({1, 1});
  REQUIRE(r.valence(c) == 2);
  CHECK(phi_r[c] == 2.0 * kPi - kPi);
}

TEST_CASE("boundary validation") {
  auto d = QuadComplex::diamond(5, 5);
  EllipticContext ctx(0.9);
  BoundaryConditions bc;
  for (int vi : d.boundary_vertices()) bc.neumann_theta[vi] = kPi / 3.0;
  CHECK_NOTHROW(bc.validate(d, Geometry::Hyperbolic, ctx));

  // a full turn of 3 pi at a valence-1 vertex violates the angle bound
  int corner = -1;
  for (int vi : d.boundary_vertices())
    if (d.valence(vi) == 1) corner = vi;
  REQUIRE(corner >= 0);
  bc.neumann_theta[corner] = 3.0 * kPi;
  CHECK_THROWS_WITH(bc.validate(d, Geometry::Hyperbolic, ctx),
                    Catch::Matchers::ContainsSubstring("(-2pi, 2pi)"));
  bc.neumann_theta[corner] = 1.5 * kPi;
  CHECK_THROWS_WITH(bc.validate(d, Geometry::Hyperbolic, ctx),
                    Catch::Matchers::ContainsSubstring("|Theta| < pi"));
  bc.neumann_theta[corner] = kPi / 3.0;

  BoundaryConditions dir;
  dir.kind = BoundaryConditions::Kind::Dirichlet;
  for (int vi : d.boundary_vertices()) dir.dirichlet_u[vi] = 0.8 * ctx.K();
  CHECK_NOTHROW(dir.validate(d, Geometry::Hyperbolic, ctx));
  dir.dirichlet_u[corner] = 2.5 * ctx.K();
  CHECK_THROWS_WITH(dir.validate(d, Geometry::Hyperbolic, ctx),
                    Catch::Matchers::ContainsSubstring("[0, 2K]"));
}

TEST_CASE("energy values") {
  EllipticContext ctx(0.8);
  const double K = ctx.K();

  // no edges: only the linear term, zero phi gives zero
  auto p1 = QuadComplex::rectangle(1, 1);
  RingState s1{Geometry::Sphere, 0.8, {1.234}};
  CHECK(S_value(s1, {0.0}, p1, ctx) == 0.0);

  // single edge with equal endpoints
  auto p2 = QuadComplex::rectangle(2, 1);
  const double u0 = 0.7 * K;
  RingState s2s{Geometry::Sphere, 0.8, {u0, u0}};
  RingState s2h{Geometry::Hyperbolic, 0.8, {u0, u0}};
  PhiVector zero2(2, 0.0);
  CHECK(S_value(s2s, zero2, p2, ctx) ==
        Catch::Approx(-ctx.F(2.0 * u0)).epsilon(1e-13));
  CHECK(S_value(s2h, zero2, p2, ctx) ==
        Catch::Approx(ctx.F(2.0 * u0)).epsilon(1e-13));

  // uniform state on the 3x3 against a direct re-summation
  auto p3 = QuadComplex::rectangle(3, 3);
  BoundaryConditions bc;
  for (int vi : p3.boundary_vertices())
    bc.neumann_theta[vi] = kPi / 2.0 * p3.valence(vi);
  for (Geometry geom : {Geometry::Sphere, Geometry::Hyperbolic}) {
    auto phi = compile_phi(bc, p3, geom);
    RingState st{geom, 0.8, std::vector<double>(p3.vertex_count(), K)};
    double brute = 0.0;
    const double sigma = pair_sign(geom);
    for (const auto& e : p3.edges())
      brute += ctx.F(st.u[e[0]] - st.u[e[1]]) +
               sigma * ctx.F(st.u[e[0]] + st.u[e[1]]);
    for (int vi = 0; vi < p3.vertex_count(); ++vi) brute += phi[vi] * st.u[vi];
    CHECK(S_value(st, phi, p3, ctx) == Catch::Approx(brute).margin(1e-12));
  }
}

TEST_CASE("gradient: critical uniform state and finite differences") {
  EllipticContext ctx(0.8);
  auto c = QuadComplex::rectangle(4, 4);
  BoundaryConditions bc;
  for (int vi : c.boundary_vertices())
    bc.neumann_theta[vi] = kPi / 2.0 * c.valence(vi);

  for (Geometry geom : {Geometry::Sphere, Geometry::Hyperbolic}) {
    auto phi = compile_phi(bc, c, geom);
    RingState uniform{geom, 0.8,
                      std::vector<double>(c.vertex_count(), ctx.K())};
    auto grad = S_gradient(uniform, phi, c, ctx);
    for (double gi : grad) CHECK(std::abs(gi) < 1e-12);

    // gradient entries at interior vertices are the flower residuals
    auto st = random_state(geom, 0.8, ctx, c.vertex_count());
    auto g2 = S_gradient(st, phi, c, ctx);
    for (int vi : c.interior_vertices())
      CHECK(g2[vi] ==
            Catch::Approx(pattern::flower_residual(st, c, vi, ctx))
                .margin(1e-12));
  }
}

TEST_CASE("gradient/Hessian finite-difference consistency") {
  for (double q : {0.8, 0.99}) {
    EllipticContext ctx(q);
    auto c = QuadComplex::rectangle(4, 3);
    const int n = c.vertex_count();
    BoundaryConditions bc;
    for (int vi : c.boundary_vertices())
      bc.neumann_theta[vi] = oracles::uniform(0.3, 1.2);
    for (Geometry geom : {Geometry::Sphere, Geometry::Hyperbolic}) {
      auto phi = compile_phi(bc, c, geom);
      auto st = random_state(geom, q, ctx, n, 0.3, 1.7);

      // directional FD of the value matches the analytic gradient at
      // second order
      auto grad = S_gradient(st, phi, c, ctx);
      Eigen::VectorXd dir(n);
      for (int i = 0; i < n; ++i) dir[i] = oracles::uniform(-1.0, 1.0);
      dir.normalize();
      const double gdotd =
          std::inner_product(grad.begin(), grad.end(), dir.data(), 0.0);
      auto value_along = [&](double t) {
        RingState s2 = st;
        for (int i = 0; i < n; ++i) s2.u[i] += t * dir[i];
        return S_value(s2, phi, c, ctx);
      };
      CHECK(oracles::fd_order(value_along, 0.0, gdotd, 1e-3) >= 1.9);

      // Hessian times the direction matches FD of the gradient
      Eigen::SparseMatrix<double> H = S_hessian(st, c, ctx);
      Eigen::VectorXd Hd = H * dir;
      auto grad_along = [&](double t, int comp) {
        RingState s2 = st;
        for (int i = 0; i < n; ++i) s2.u[i] += t * dir[i];
        return S_gradient(s2, phi, c, ctx)[comp];
      };
      for (int comp : {0, n / 2, n - 1}) {
        const double ord = oracles::fd_order(
            [&](double t) { return grad_along(t, comp); }, 0.0, Hd[comp],
            1e-3);
        CHECK(ord >= 1.9);
      }

      // second-order Taylor remainder decays at third order
      const double s0 = S_value(st, phi, c, ctx);
      const double quad = 0.5 * dir.dot(Hd);
      auto remainder = [&](double h) {
        return std::abs(value_along(h) - s0 - h * gdotd - h * h * quad);
      };
      const double r1 = remainder(1e-2), r2 = remainder(5e-3);
      CHECK(std::log2(r1 / r2) >= 2.7);
    }
  }
}

TEST_CASE("Hessian structure") {
  const double q = 0.8;
  EllipticContext ctx(q);
  auto p2 = QuadComplex::rectangle(2, 1);
  RingState st{Geometry::Hyperbolic, q, {ctx.K(), ctx.K()}};
  Eigen::MatrixXd H = Eigen::MatrixXd(S_hessian(st, p2, ctx));
  const double a = (1.0 + q) / 2.0, b = (1.0 - q) / 2.0;
  CHECK(H(0, 0) == Catch::Approx(a + b).epsilon(1e-12));
  CHECK(H(0, 1) == Catch::Approx(-a + b).epsilon(1e-12));
  CHECK(H(1, 0) == H(0, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  CHECK(es.eigenvalues()[0] == Catch::Approx(2.0 * b).epsilon(1e-10));
  CHECK(es.eigenvalues()[1] == Catch::Approx(2.0 * a).epsilon(1e-10));

  // hyperbolic Hessians are positive definite on the admissible box
  auto c = QuadComplex::rectangle(5, 4);
  for (int trial = 0; trial < 5; ++trial) {
    auto st2 = random_state(Geometry::Hyperbolic, q, ctx, c.vertex_count(),
                            0.02, 1.98);
    Eigen::MatrixXd Hh = Eigen::MatrixXd(S_hessian(st2, c, ctx));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(Hh);
    CHECK(eh.eigenvalues()[0] > 0.0);
  }

  // spherical saddle direction: the all-ones quadratic form at the
  // uniform state is -4 F''(2K) per edge
  RingState su{Geometry::Sphere, q,
               std::vector<double>(c.vertex_count(), ctx.K())};
  const double expect = -4.0 * b * c.edge_count();
  CHECK(hessian_quadform_ones(su, c, ctx) ==
        Catch::Approx(expect).epsilon(1e-12));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(c.vertex_count());
  Eigen::MatrixXd Hs = Eigen::MatrixXd(S_hessian(su, c, ctx));
  CHECK(ones.dot(Hs * ones) == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("quadratic growth of the hyperbolic energy") {
  const double q = 0.8;
  EllipticContext ctx(q);
  auto c = QuadComplex::rectangle(4, 4);
  BoundaryConditions bc;
  for (int vi : c.boundary_vertices())
    bc.neumann_theta[vi] = oracles::uniform(-1.0, 1.0);
  auto phi = compile_phi(bc, c, Geometry::Hyperbolic);
  for (int trial = 0; trial < 20; ++trial) {
    RingState st{Geometry::Hyperbolic, q,
                 std::vector<double>(c.vertex_count())};
    for (auto& u : st.u) u = oracles::uniform(0.0, 6.0);
    double bound = 0.0;
    for (int vi = 0; vi < c.vertex_count(); ++vi)
      bound += c.valence(vi) * kPi * st.u[vi] * st.u[vi] / (8.0 * ctx.K()) +
               phi[vi] * st.u[vi];
    CHECK(S_value(st, phi, c, ctx) >= bound - 1e-10);
  }
}

TEST_CASE("degenerate-modulus gradient matches the closed angle forms") {
  EllipticContext one(1.0);
  auto c = QuadComplex::rectangle(3, 3);
  BoundaryConditions bc;
  for (int vi : c.boundary_vertices()) bc.neumann_theta[vi] = 1.0;
  auto phi = compile_phi(bc, c, Geometry::Sphere);
  RingState st{Geometry::Sphere, 1.0, std::vector<double>(9)};
  for (auto& u : st.u) u = oracles::uniform(0.5, 2.0);
  auto grad = S_gradient(st, phi, c, one);
  for (int vi : c.interior_vertices()) {
    double theta_sum = 0.0;
    for (int wi : c.neighbor_list(vi))
      theta_sum += 2.0 * std::atan(std::exp(st.u[vi] - st.u[wi])) +
                   2.0 * std::atan(std::exp(-st.u[vi] - st.u[wi]));
    CHECK(grad[vi] == Catch::Approx(theta_sum - 2.0 * kPi).margin(1e-6));
  }
}
