#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "ringforge/pattern.hpp"

namespace ringforge::layout {

using elliptic::EllipticContext;
using elliptic::kPi;
using grid::QuadComplex;
using pattern::Geometry;
using pattern::RingRadii;
using pattern::RingState;
using Vec3 = Eigen::Vector3d;

namespace detail {

// Point/tangent kinematics on the unit sphere and on the hyperboloid
// sheet <P,P> = -1 (signature +,+,-), which projects to the Poincare disk
// only at export time.

inline double bilinear(Geometry g, const Vec3& a, const Vec3& b) {
  if (g == Geometry::Sphere) return a.dot(b);
  return a.x() * b.x() + a.y() * b.y() - a.z() * b.z();
}

inline double distance(Geometry g, const Vec3& a, const Vec3& b) {
  if (g == Geometry::Sphere)
    return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  return std::acosh(std::max(1.0, -bilinear(g, a, b)));
}

inline Vec3 step(Geometry g, const Vec3& p, const Vec3& t, double d) {
  if (g == Geometry::Sphere) return std::cos(d) * p + std::sin(d) * t;
  return std::cosh(d) * p + std::sinh(d) * t;
}

/// Unit tangent at step(p,t,d) pointing further along the geodesic.
inline Vec3 transport(Geometry g, const Vec3& p, const Vec3& t, double d) {
  if (g == Geometry::Sphere) return -std::sin(d) * p + std::cos(d) * t;
  return std::sinh(d) * p + std::cosh(d) * t;
}

/// Tangent rotated by alpha about the surface normal at p,
/// counterclockwise as seen in the standard chart.
inline Vec3 rotate(Geometry g, const Vec3& p, const Vec3& t, double alpha) {
  Vec3 s;
  if (g == Geometry::Sphere) {
    s = p.cross(t);
  } else {
    // Lorentz cross product: orthogonal to p and t in the Minkowski form
    s = Vec3(p.y() * t.z() - p.z() * t.y(), p.z() * t.x() - p.x() * t.z(),
             -(p.x() * t.y() - p.y() * t.x()));
  }
  return std::cos(alpha) * t + std::sin(alpha) * s;
}

/// Re-normalize a drifting point back to the surface.
inline Vec3 renormalize(Geometry g, const Vec3& p) {
  if (g == Geometry::Sphere) return p.normalized();
  const double n = std::sqrt(std::max(1e-300, -bilinear(g, p, p)));
  Vec3 q = p / n;
  if (q.z() < 0) q = -q;
  return q;
}

}  // namespace detail

struct TouchingPoint {
  int face = -1;
  std::array<int, 2> inner_pair{};  // tangent inner circles (NW-SE diagonal)
  std::array<int, 2> outer_pair{};  // tangent outer circles (NE-SW diagonal)
  Vec3 point = Vec3::Zero();
  double mismatch = 0.0;  // spread of the per-corner determinations
};

struct LayoutReports {
  double max_closure_gap = 0.0;
  double max_orthogonality_error = 0.0;
  double max_distance_error = 0.0;
  double max_touch_mismatch = 0.0;
  std::vector<double> face_gap;
  std::vector<int> orientation_ok;  // per vertex: 1 ok, 0 violated, -1 n/a
};

struct LayoutResult {
  Geometry geometry = Geometry::Hyperbolic;
  double q = 1.0;
  std::vector<Vec3> centers;
  std::vector<RingRadii> radii;
  std::vector<int> orientation;
  // tangent direction toward each neighbor slot, where determined
  std::vector<std::array<std::optional<Vec3>, 4>> slot_dir;
  std::vector<TouchingPoint> touching;
  LayoutReports reports;
};

namespace detail {

/// Half opening angle of the kite of edge (v,k) on the side of the given
/// corner slot. Corners NE and SW expose the outer circle of v (the psi
/// triangle), NW and SE its inner circle (the phi triangle, which tends
/// to a quarter turn as the inner circle degenerates).
inline double half_angle(const RingState& st, const EllipticContext& ctx,
                         int corner, const RingRadii& rv,
                         const RingRadii& rk) {
  const bool outer_side = corner == 0 || corner == 2;
  if (st.geometry == Geometry::Sphere) {
    if (outer_side) return std::atan(std::tan(rk.r) / std::sin(rv.R));
    if (std::abs(rv.r) < 1e-13) return kPi / 2.0;  // positive-branch limit
    return std::atan(std::tan(rk.R) / std::sin(rv.r));
  }
  if (outer_side) return std::atan(std::tanh(rk.r) / std::sinh(rv.R));
  if (std::abs(rv.r) < 1e-13) return kPi / 2.0;
  return std::atan(std::tanh(rk.R) / std::sinh(rv.r));
}

}  // namespace detail

/// Realize a state as centers on the surface by breadth-first kite
/// transport from a root ring. The root sits at the north pole of the
/// sphere (the hyperboloid apex), its first present edge pointing along
/// +x; the pattern is defined up to isometry, so this fixes the frame.
///
/// Directions between consecutive edges around a vertex accumulate the
/// signed kite half angles across each corner; a corner is crossable as
/// soon as both of its edges exist. Slots whose direction is not pinned
/// down by any kite chain (free hinges of degenerate complexes, e.g. 1-wide
/// strips) fall back to right-angle spacing from the nearest known slot.
inline LayoutResult realize(const RingState& state, const QuadComplex& complex,
                            const EllipticContext& ctx, int root = 0) {
  const Geometry geom = state.geometry;
  const int n = complex.vertex_count();
  LayoutResult out;
  out.geometry = geom;
  out.q = state.q;
  out.centers.assign(n, Vec3::Zero());
  out.radii.resize(n);
  out.orientation.resize(n);
  out.slot_dir.assign(n, {});
  for (int vi = 0; vi < n; ++vi) {
    out.radii[vi] = pattern::radii_from_u(state.u[vi], geom, ctx);
    out.orientation[vi] = pattern::orientation(state.u[vi], ctx);
  }

  auto half = [&](int vi, int corner, int ki) {
    return detail::half_angle(state, ctx, corner, out.radii[vi],
                              out.radii[ki]);
  };

  // fill every slot direction reachable from one known slot by walking
  // the corner fan in both senses
  auto derive_slots = [&](int vi) {
    const auto& nb = complex.neighbors(vi);
    auto& dirs = out.slot_dir[vi];
    const Vec3 p = out.centers[vi];
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int s0 = 0; s0 < 4; ++s0) {
        if (!dirs[s0] || !nb[s0]) continue;
        // counterclockwise: crossing corner s0 from slot s0 to s0+1
        const int s1 = (s0 + 1) % 4;
        if (nb[s1] && !dirs[s1]) {
          const double a = half(vi, s0, *nb[s0]) + half(vi, s0, *nb[s1]);
          dirs[s1] = detail::rotate(geom, p, *dirs[s0], a);
        }
        // clockwise: crossing corner s0-1 from slot s0 to s0-1
        const int sm = (s0 + 3) % 4;
        if (nb[sm] && !dirs[sm]) {
          const double a = half(vi, sm, *nb[s0]) + half(vi, sm, *nb[sm]);
          dirs[sm] = detail::rotate(geom, p, *dirs[s0], -a);
        }
      }
    }
    // free hinges: canonical right-angle spacing from the nearest set slot
    for (int s = 0; s < 4; ++s) {
      if (!nb[s] || dirs[s]) continue;
      for (int d = 1; d < 4; ++d) {
        const int s2 = (s + d) % 4;
        if (nb[s2] && dirs[s2]) {
          dirs[s] = detail::rotate(geom, p, *dirs[s2],
                                   -d * kPi / 2.0 * out.orientation[vi]);
          break;
        }
      }
    }
  };

  std::vector<char> placed(n, 0);
  std::vector<double> edge_gap(complex.edge_count(), 0.0);
  if (root < 0 || root >= n) root = 0;
  out.centers[root] = Vec3(0.0, 0.0, 1.0);
  for (int s = 0; s < 4; ++s)
    if (complex.neighbors(root)[s]) {
      out.slot_dir[root][s] = Vec3(1.0, 0.0, 0.0);
      break;
    }
  derive_slots(root);
  placed[root] = 1;
  std::deque<int> queue{root};

  while (!queue.empty()) {
    const int vi = queue.front();
    queue.pop_front();
    const auto& nb = complex.neighbors(vi);
    for (int s = 0; s < 4; ++s) {
      if (!nb[s] || !out.slot_dir[vi][s]) continue;
      const int ki = *nb[s];
      const double d =
          pattern::center_distance(state.u[vi], state.u[ki], geom, ctx);
      const Vec3 t = *out.slot_dir[vi][s];
      const Vec3 q =
          detail::renormalize(geom, detail::step(geom, out.centers[vi], t, d));
      if (!placed[ki]) {
        out.centers[ki] = q;
        placed[ki] = 1;
        const Vec3 back = -detail::transport(geom, out.centers[vi], t, d);
        out.slot_dir[ki][(s + 2) % 4] = back;
        derive_slots(ki);
        queue.push_back(ki);
      } else if (auto ei = complex.edge_between(vi, ki)) {
        edge_gap[*ei] = std::max(edge_gap[*ei],
                                 detail::distance(geom, q, out.centers[ki]));
      }
    }
  }
  for (int vi = 0; vi < n; ++vi)
    if (!placed[vi])
      throw std::runtime_error("realize: complex is not chain-connected");

  // per-face closure gap: worst edge mismatch around the face
  out.reports.face_gap.assign(complex.face_count(), 0.0);
  for (int fi = 0; fi < complex.face_count(); ++fi) {
    const auto& f = complex.faces()[fi];
    const std::array<std::array<int, 2>, 4> es{{{f[0], f[1]},
                                                {f[0], f[2]},
                                                {f[1], f[3]},
                                                {f[2], f[3]}}};
    double g = 0.0;
    for (const auto& e : es)
      if (auto ei = complex.edge_between(e[0], e[1]))
        g = std::max(g, edge_gap[*ei]);
    out.reports.face_gap[fi] = g;
    out.reports.max_closure_gap = std::max(out.reports.max_closure_gap, g);
  }

  // distance and orthogonality checks on realized positions
  for (const auto& e : complex.edges()) {
    const double want =
        pattern::center_distance(state.u[e[0]], state.u[e[1]], geom, ctx);
    const double got =
        detail::distance(geom, out.centers[e[0]], out.centers[e[1]]);
    out.reports.max_distance_error =
        std::max(out.reports.max_distance_error, std::abs(got - want));
    for (int dir = 0; dir < 2; ++dir) {
      const int a = e[dir], b = e[1 - dir];
      const double Rv = out.radii[a].R, rk = std::abs(out.radii[b].r);
      double err;
      if (rk < 1e-9) {
        // point inner circle: the partner's outer circle passes through it
        err = std::abs(got - Rv);
      } else {
        double ca;
        if (geom == Geometry::Sphere)
          ca = (std::cos(Rv) * std::cos(rk) - std::cos(got)) /
               (std::sin(Rv) * std::sin(rk));
        else
          ca = (std::cosh(Rv) * std::cosh(rk) - std::cosh(got)) /
               (std::sinh(Rv) * std::sinh(rk));
        err = std::abs(std::acos(std::clamp(ca, -1.0, 1.0)) - kPi / 2.0);
      }
      out.reports.max_orthogonality_error =
          std::max(out.reports.max_orthogonality_error, err);
    }
  }

  // touching points, one per face, determined from each corner
  for (int fi = 0; fi < complex.face_count(); ++fi) {
    const auto& f = complex.faces()[fi];  // ll, lr, ul, ur
    TouchingPoint tp;
    tp.face = fi;
    tp.inner_pair = {f[2], f[1]};  // NW-SE diagonal carries the inner circles
    tp.outer_pair = {f[0], f[3]};
    // (corner vertex, corner slot, slot whose direction starts the wedge)
    struct CornerRef {
      int vertex;
      int corner;
      int from_slot;
    };
    const std::array<CornerRef, 4> refs{{{f[0], 0, grid::East},
                                         {f[1], 1, grid::North},
                                         {f[3], 2, grid::West},
                                         {f[2], 3, grid::South}}};
    std::vector<Vec3> candidates;
    for (const auto& ref : refs) {
      const auto& nb = complex.neighbors(ref.vertex);
      if (!nb[ref.from_slot] || !out.slot_dir[ref.vertex][ref.from_slot])
        continue;
      const double a = half(ref.vertex, ref.corner, *nb[ref.from_slot]);
      const Vec3 ray = detail::rotate(geom, out.centers[ref.vertex],
                                      *out.slot_dir[ref.vertex][ref.from_slot],
                                      a);
      const bool outer_side = ref.corner == 0 || ref.corner == 2;
      const double rho = outer_side ? out.radii[ref.vertex].R
                                    : std::abs(out.radii[ref.vertex].r);
      candidates.push_back(detail::renormalize(
          geom, detail::step(geom, out.centers[ref.vertex], ray, rho)));
    }
    if (candidates.empty()) continue;
    tp.point = candidates.front();
    for (std::size_t i = 0; i < candidates.size(); ++i)
      for (std::size_t j = i + 1; j < candidates.size(); ++j)
        tp.mismatch = std::max(
            tp.mismatch, detail::distance(geom, candidates[i], candidates[j]));
    out.reports.max_touch_mismatch =
        std::max(out.reports.max_touch_mismatch, tp.mismatch);
    out.touching.push_back(tp);
  }

  // cyclic order of the four touching directions around each interior
  // vertex against the ring orientation; reported, not asserted
  out.reports.orientation_ok.assign(n, -1);
  for (int vi : complex.interior_vertices()) {
    const auto& dirs = out.slot_dir[vi];
    if (!dirs[0] || !dirs[1] || !dirs[2] || !dirs[3]) continue;
    const Vec3 p = out.centers[vi];
    const Vec3 e0 = *dirs[0];
    const Vec3 e1 = detail::rotate(geom, p, e0, kPi / 2.0);
    std::array<double, 4> ang{};
    for (int c = 0; c < 4; ++c) {
      const auto& nb = complex.neighbors(vi);
      const Vec3 ray =
          detail::rotate(geom, p, *dirs[c], half(vi, c, *nb[c]));
      ang[c] = std::atan2(detail::bilinear(geom, ray, e1),
                          detail::bilinear(geom, ray, e0));
    }
    double winding = 0.0;
    for (int c = 0; c < 4; ++c) {
      double dlt = ang[(c + 1) % 4] - ang[c];
      while (dlt <= -kPi) dlt += 2.0 * kPi;
      while (dlt > kPi) dlt -= 2.0 * kPi;
      winding += dlt;
    }
    const int sense = winding > 0 ? 1 : -1;
    out.reports.orientation_ok[vi] = (sense == out.orientation[vi]) ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json export_json(const LayoutResult& lay,
                                  const RingState& state,
                                  const QuadComplex& complex) {
  nlohmann::json j;
  j["geometry"] = pattern::name(lay.geometry);
  j["q"] = lay.q;
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (int vi = 0; vi < complex.vertex_count(); ++vi) {
    const auto v = complex.vertex(vi);
    verts.push_back({{"mn", {v.m, v.n}},
                     {"u", state.u[vi]},
                     {"r", lay.radii[vi].r},
                     {"R", lay.radii[vi].R},
                     {"center",
                      {lay.centers[vi].x(), lay.centers[vi].y(),
                       lay.centers[vi].z()}},
                     {"orientation", lay.orientation[vi]}});
  }
  auto& tps = j["touching_points"] = nlohmann::json::array();
  auto mn = [&](int vi) {
    const auto v = complex.vertex(vi);
    return nlohmann::json::array({v.m, v.n});
  };
  for (const auto& tp : lay.touching) {
    const nlohmann::json pt{tp.point.x(), tp.point.y(), tp.point.z()};
    tps.push_back({{"edge", {mn(tp.inner_pair[0]), mn(tp.inner_pair[1])}},
                   {"point", pt},
                   {"class", "inner"}});
    tps.push_back({{"edge", {mn(tp.outer_pair[0]), mn(tp.outer_pair[1])}},
                   {"point", pt},
                   {"class", "outer"}});
  }
  j["reports"] = {{"max_closure_gap", lay.reports.max_closure_gap},
                  {"max_orthogonality_error",
                   lay.reports.max_orthogonality_error}};
  return j;
}

/// Parsed counterpart of export_json, used for round-trip checks and by
/// downstream consumers of layout files.
struct ImportedLayout {
  std::string geometry;
  double q = 0.0;
  std::vector<std::array<int, 2>> mn;
  std::vector<double> u;
  std::vector<double> r, R;
  std::vector<Vec3> centers;
  std::vector<int> orientation;
  struct Touch {
    std::array<std::array<int, 2>, 2> edge;
    Vec3 point;
    std::string cls;
  };
  std::vector<Touch> touching;
  double max_closure_gap = 0.0;
  double max_orthogonality_error = 0.0;
};

inline ImportedLayout import_json(const nlohmann::json& j) {
  ImportedLayout out;
  out.geometry = j.at("geometry").get<std::string>();
  out.q = j.at("q").get<double>();
  for (const auto& v : j.at("vertices")) {
    out.mn.push_back({v.at("mn")[0].get<int>(), v.at("mn")[1].get<int>()});
    out.u.push_back(v.at("u").get<double>());
    out.r.push_back(v.at("r").get<double>());
    out.R.push_back(v.at("R").get<double>());
    const auto& c = v.at("center");
    out.centers.emplace_back(c[0].get<double>(), c[1].get<double>(),
                             c[2].get<double>());
    out.orientation.push_back(v.at("orientation").get<int>());
  }
  for (const auto& t : j.at("touching_points")) {
    ImportedLayout::Touch touch;
    touch.edge = {{{t.at("edge")[0][0].get<int>(), t.at("edge")[0][1].get<int>()},
                   {t.at("edge")[1][0].get<int>(), t.at("edge")[1][1].get<int>()}}};
    const auto& p = t.at("point");
    touch.point =
        Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    touch.cls = t.at("class").get<std::string>();
    out.touching.push_back(touch);
  }
  out.max_closure_gap = j.at("reports").at("max_closure_gap").get<double>();
  out.max_orthogonality_error =
      j.at("reports").at("max_orthogonality_error").get<double>();
  return out;
}

enum class Projection { Stereographic, Orthographic, Poincare };

inline Projection projection_from_name(const std::string& s) {
  if (s == "stereographic") return Projection::Stereographic;
  if (s == "orthographic") return Projection::Orthographic;
  if (s == "poincare") return Projection::Poincare;
  throw std::invalid_argument("unknown projection '" + s + "'");
}

namespace detail {

inline Eigen::Vector2d project(Projection pr, const Vec3& p) {
  switch (pr) {
    case Projection::Stereographic:
      return {p.x() / (1.0 + p.z()), p.y() / (1.0 + p.z())};
    case Projection::Orthographic:
      return {p.x(), p.y()};
    case Projection::Poincare:
      return {p.x() / (1.0 + p.z()), p.y() / (1.0 + p.z())};
  }
  return {0.0, 0.0};
}

/// Three points of the metric circle of radius rho around a center.
inline std::array<Vec3, 3> circle_points(Geometry g, const Vec3& c,
                                         double rho) {
  Vec3 t = Vec3(1, 0, 0);
  if (std::abs(c.x()) > 0.9) t = Vec3(0, 1, 0);
  // Gram-Schmidt in the relevant bilinear form
  const double pp = bilinear(g, c, c);
  t = t - (bilinear(g, t, c) / pp) * c;
  t /= std::sqrt(std::abs(bilinear(g, t, t)));
  std::array<Vec3, 3> out;
  for (int i = 0; i < 3; ++i) {
    const Vec3 ti = rotate(g, c, t, 2.0 * kPi * i / 3.0);
    out[i] = step(g, c, ti, rho);
  }
  return out;
}

struct PlanarCircle {
  bool ok = false;
  double cx = 0, cy = 0, r = 0;
};

inline PlanarCircle circumcircle(const Eigen::Vector2d& a,
                                 const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c) {
  const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) +
                          c.x() * (a.y() - b.y()));
  const double scale =
      std::max({a.norm(), b.norm(), c.norm(), 1.0});
  if (std::abs(d) < 1e-12 * scale * scale) return {};
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  PlanarCircle out;
  out.ok = true;
  out.cx = (a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d;
  out.cy = (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d;
  out.r = std::hypot(a.x() - out.cx, a.y() - out.cy);
  return out;
}

inline std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.8g", x);
  return buf;
}

inline std::vector<Eigen::Vector2d> sample_circle(Geometry g, Projection pr,
                                                  const Vec3& c, double rho,
                                                  int nseg) {
  std::vector<Eigen::Vector2d> out;
  Vec3 t = Vec3(1, 0, 0);
  if (std::abs(c.x()) > 0.9) t = Vec3(0, 1, 0);
  const double pp = bilinear(g, c, c);
  t = t - (bilinear(g, t, c) / pp) * c;
  t /= std::sqrt(std::abs(bilinear(g, t, t)));
  for (int k = 0; k <= nseg; ++k) {
    const Vec3 tk = rotate(g, c, t, 2.0 * kPi * k / nseg);
    out.push_back(project(pr, step(g, c, tk, rho)));
  }
  return out;
}

}  // namespace detail

/// Scalable vector rendering: one group per ring holding its two circles,
/// negative-orientation inner circles stroked red. Circles stay exact
/// circle elements under the circular projections; the orthographic view
/// falls back to sampled paths.
inline std::string export_svg(const LayoutResult& lay, Projection pr) {
  const Geometry geom = lay.geometry;
  if (geom == Geometry::Hyperbolic && pr != Projection::Poincare)
    throw std::invalid_argument(
        "hyperbolic layouts render in the poincare projection");
  if (geom == Geometry::Sphere && pr == Projection::Poincare)
    throw std::invalid_argument(
        "spherical layouts render in stereographic or orthographic "
        "projection");

  struct Shape {
    detail::PlanarCircle circle;
    std::vector<Eigen::Vector2d> path;
    bool inner = false;
    bool negative = false;
  };
  std::vector<Shape> shapes;
  double extent = 1e-9;
  for (std::size_t vi = 0; vi < lay.centers.size(); ++vi) {
    for (int which = 0; which < 2; ++which) {
      const bool inner = which == 1;
      const double rho =
          inner ? std::abs(lay.radii[vi].r) : lay.radii[vi].R;
      Shape sh;
      sh.inner = inner;
      sh.negative = lay.orientation[vi] < 0;
      if (pr == Projection::Orthographic) {
        sh.path = detail::sample_circle(geom, pr, lay.centers[vi], rho, 64);
        for (const auto& p : sh.path)
          extent = std::max(extent, p.lpNorm<Eigen::Infinity>());
      } else {
        const auto pts = detail::circle_points(geom, lay.centers[vi], rho);
        sh.circle = detail::circumcircle(detail::project(pr, pts[0]),
                                         detail::project(pr, pts[1]),
                                         detail::project(pr, pts[2]));
        if (!sh.circle.ok) {
          // circle through the projection pole: draw a sampled outline
          sh.path = detail::sample_circle(geom, pr, lay.centers[vi], rho, 64);
        } else {
          extent = std::max(extent, std::abs(sh.circle.cx) + sh.circle.r);
          extent = std::max(extent, std::abs(sh.circle.cy) + sh.circle.r);
        }
      }
      shapes.push_back(std::move(sh));
    }
  }

  // normalize content into the unit square / keep the unit disk fixed
  const double scale = pr == Projection::Poincare ? 1.0 : 1.0 / extent;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.1 -1.1 2.2 "
         "2.2\">\n";
  svg << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.004\">\n";
  if (pr == Projection::Poincare)
    svg << "<circle cx=\"0\" cy=\"0\" r=\"1\" stroke=\"#bbbbbb\"/>\n";
  for (const auto& sh : shapes) {
    const char* stroke =
        sh.inner ? (sh.negative ? "#cc0000" : "#2266aa") : "#111111";
    if (!sh.path.empty()) {
      svg << "<path stroke=\"" << stroke << "\" d=\"";
      for (std::size_t k = 0; k < sh.path.size(); ++k)
        svg << (k == 0 ? 'M' : 'L') << detail::fmt(scale * sh.path[k].x())
            << ' ' << detail::fmt(scale * sh.path[k].y());
      svg << "\"/>\n";
    } else {
      svg << "<circle stroke=\"" << stroke << "\" cx=\""
          << detail::fmt(scale * sh.circle.cx) << "\" cy=\""
          << detail::fmt(scale * sh.circle.cy) << "\" r=\""
          << detail::fmt(scale * sh.circle.r) << "\"/>\n";
    }
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace ringforge::layout
