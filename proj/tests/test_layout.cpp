#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "ringforge/layout.hpp"
#include "ringforge/solver.hpp"

using namespace ringforge;
using namespace ringforge::layout;
using elliptic::EllipticContext;
using elliptic::kPi;
using functional::BoundaryConditions;
using grid::QuadComplex;
using pattern::Geometry;
using pattern::RingState;

namespace {

solver::SolveResult quad_solution(Geometry geom, double q,
                                  const std::array<double, 4>& corners,
                                  int size = 9) {
  auto d = QuadComplex::diamond(size, size);
  BoundaryConditions bc;
  int k = 0;
  for (int vi : d.boundary_vertices())
    bc.neumann_theta[vi] = d.valence(vi) == 1 ? corners[k++] : kPi;
  if (geom == Geometry::Hyperbolic) return solver::solve_hyperbolic(d, q, bc);
  return solver::solve_spherical_minmax(d, q, bc);
}

}  // namespace

TEST_CASE("single edge realization") {
  EllipticContext ctx(0.8);
  auto c = QuadComplex::rectangle(2, 1);
  for (Geometry geom : {Geometry::Sphere, Geometry::Hyperbolic}) {
    RingState st{geom, 0.8, {0.8 * ctx.K(), 1.3 * ctx.K()}};
    auto lay = realize(st, c, ctx);
    const double want =
        pattern::center_distance(st.u[0], st.u[1], geom, ctx);
    CHECK(layout::detail::distance(geom, lay.centers[0], lay.centers[1]) ==
          Catch::Approx(want).margin(1e-12));
    // the root frame: first center at the pole/apex
    CHECK(lay.centers[0].z() == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("uniform state on the 3x3") {
  const double q = 0.9;
  EllipticContext ctx(q);
  auto c = QuadComplex::rectangle(3, 3);
  RingState st{Geometry::Hyperbolic, q,
               std::vector<double>(c.vertex_count(), ctx.K())};
  auto lay = realize(st, c, ctx);
  const double R = std::acosh(1.0 / q);
  for (const auto& e : c.edges())
    CHECK(layout::detail::distance(Geometry::Hyperbolic, lay.centers[e[0]],
                                   lay.centers[e[1]]) ==
          Catch::Approx(R).margin(1e-11));
  CHECK(lay.reports.max_closure_gap < 1e-10);
  CHECK(lay.reports.max_distance_error < 1e-11);
  // every kite angle of the degenerate flower is a quarter turn
  const int mid = c.index_of({2, 2});
  for (int wi : c.neighbor_list(mid))
    CHECK(pattern::theta(st.u[mid], st.u[wi], Geometry::Hyperbolic, ctx) ==
          Catch::Approx(kPi / 2.0).epsilon(1e-12));
  // touching points coincide with the degenerate inner circles
  for (const auto& tp : lay.touching) CHECK(tp.mismatch < 1e-10);
}

TEST_CASE("solved hyperbolic quadrilateral realizes consistently") {
  auto sol = quad_solution(Geometry::Hyperbolic, 0.99,
                           {kPi / 2.0, kPi / 10.0, 2.0 * kPi / 5.0, kPi / 5.0});
  REQUIRE(sol.report.converged);
  auto d = QuadComplex::diamond(9, 9);
  EllipticContext ctx(0.99);
  auto lay = realize(sol.state, d, ctx);

  CHECK(lay.reports.max_closure_gap < 1e-8);
  CHECK(lay.reports.max_distance_error < 1e-9);
  CHECK(lay.reports.max_orthogonality_error < 1e-8);
  CHECK(lay.reports.max_touch_mismatch < 1e-8);

  // touching incidences: the point lies on the four relevant circles
  for (const auto& tp : lay.touching) {
    for (int vi : tp.inner_pair)
      CHECK(std::abs(layout::detail::distance(Geometry::Hyperbolic,
                                              lay.centers[vi], tp.point) -
                     std::abs(lay.radii[vi].r)) < 1e-9);
    for (int vi : tp.outer_pair)
      CHECK(std::abs(layout::detail::distance(Geometry::Hyperbolic,
                                              lay.centers[vi], tp.point) -
                     lay.radii[vi].R) < 1e-9);
    // tangency of the inner pair: the touching point splits the geodesic
    const auto [a, b] = std::pair(tp.inner_pair[0], tp.inner_pair[1]);
    const double dab = layout::detail::distance(Geometry::Hyperbolic,
                                                lay.centers[a], lay.centers[b]);
    if (lay.orientation[a] == lay.orientation[b])
      CHECK(std::abs(dab - (std::abs(lay.radii[a].r) +
                            std::abs(lay.radii[b].r))) < 1e-8);
  }

  // an embedded positive pattern has matching cyclic orientation
  for (int vi : d.interior_vertices())
    if (lay.orientation[vi] > 0) CHECK(lay.reports.orientation_ok[vi] == 1);
}

TEST_CASE("solved spherical quadrilateral realizes consistently") {
  auto sol = quad_solution(Geometry::Sphere, 0.98,
                           {0.55 * kPi, 0.55 * kPi, 0.55 * kPi, 0.55 * kPi});
  REQUIRE(sol.report.converged);
  auto d = QuadComplex::diamond(9, 9);
  EllipticContext ctx(0.98);
  auto lay = realize(sol.state, d, ctx);
  CHECK(lay.reports.max_closure_gap < 1e-8);
  CHECK(lay.reports.max_distance_error < 1e-9);
  CHECK(lay.reports.max_orthogonality_error < 1e-8);
  CHECK(lay.reports.max_touch_mismatch < 1e-8);
  // centers are honest unit vectors
  for (const auto& c : lay.centers)
    CHECK(c.norm() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("layout serialization round trip") {
  auto sol = quad_solution(Geometry::Hyperbolic, 0.95,
                           {0.4 * kPi, 0.4 * kPi, 0.3 * kPi, 0.5 * kPi}, 7);
  REQUIRE(sol.report.converged);
  auto d = QuadComplex::diamond(7, 7);
  EllipticContext ctx(0.95);
  auto lay = realize(sol.state, d, ctx);

  const nlohmann::json j = export_json(lay, sol.state, d);
  // serialize to text and back: binary64 round trip is exact
  const auto parsed = nlohmann::json::parse(j.dump());
  const auto imp = import_json(parsed);
  REQUIRE(static_cast<int>(imp.u.size()) == d.vertex_count());
  for (int vi = 0; vi < d.vertex_count(); ++vi) {
    CHECK(imp.u[vi] == sol.state.u[vi]);
    CHECK(imp.r[vi] == lay.radii[vi].r);
    CHECK(imp.R[vi] == lay.radii[vi].R);
    CHECK(imp.centers[vi] == lay.centers[vi]);
    CHECK(imp.orientation[vi] == lay.orientation[vi]);
  }
  REQUIRE(imp.touching.size() == 2 * lay.touching.size());
  CHECK(imp.max_closure_gap == lay.reports.max_closure_gap);

  // inner and outer entries of one face carry the same point
  for (std::size_t i = 0; i + 1 < imp.touching.size(); i += 2) {
    CHECK(imp.touching[i].cls == "inner");
    CHECK(imp.touching[i + 1].cls == "outer");
    CHECK(imp.touching[i].point == imp.touching[i + 1].point);
  }
}

TEST_CASE("vector rendering") {
  auto sol = quad_solution(Geometry::Sphere, 0.98,
                           {0.55 * kPi, 0.55 * kPi, 0.55 * kPi, 0.55 * kPi}, 7);
  REQUIRE(sol.report.converged);
  auto d = QuadComplex::diamond(7, 7);
  EllipticContext ctx(0.98);
  auto lay = realize(sol.state, d, ctx);

  const std::string svg = export_svg(lay, Projection::Stereographic);
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) {
    ++count;
    pos += 7;
  }
  CHECK(count == 2 * static_cast<std::size_t>(d.vertex_count()));
  CHECK(svg.find("#cc0000") == std::string::npos);  // all-positive pattern

  CHECK_THROWS_AS(export_svg(lay, Projection::Poincare),
                  std::invalid_argument);
  CHECK_THROWS_AS(projection_from_name("mercator"), std::invalid_argument);

  auto hyp = quad_solution(Geometry::Hyperbolic, 0.95,
                           {0.4 * kPi, 0.4 * kPi, 0.4 * kPi, 0.4 * kPi}, 7);
  EllipticContext ctx2(0.95);
  auto lay2 = realize(hyp.state, d, ctx2);
  const std::string svg2 = export_svg(lay2, Projection::Poincare);
  // unit boundary circle plus two circles per ring
  count = 0;
  pos = 0;
  while ((pos = svg2.find("<circle", pos)) != std::string::npos) {
    ++count;
    pos += 7;
  }
  CHECK(count == 1 + 2 * static_cast<std::size_t>(d.vertex_count()));
  const std::string svg3 = export_svg(lay, Projection::Orthographic);
  CHECK(svg3.find("<path") != std::string::npos);
}
