#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringforge::grid {

/// Lattice site of the ring complex.
struct Vertex {
  int m = 0;
  int n = 0;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// Neighbor slots in the fixed traversal order.
enum Slot : int { East = 0, North = 1, West = 2, South = 3 };

inline constexpr std::array<std::array<int, 2>, 4> kSlotStep{
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

/// A simply connected set of lattice sites with 4-neighbor adjacency,
/// boundary/valence classification and unit-square faces. Edges may dangle
/// (carry no face); that happens at the degree-1 corners of the diamond
/// builder and in degenerate 1-wide rectangles.
///
/// Vertices are indexed in row-major order (rows by n, then m), which
/// fixes every iteration order downstream. Immutable after construction.
class QuadComplex {
 public:
  /// Combinatorial rectangle with vertices (m,n), 1 <= m <= M, 1 <= n <= N,
  /// all adjacent pairs as edges, all unit squares as faces.
  static QuadComplex rectangle(int M, int N) {
    if (M < 1 || N < 1)
      throw std::invalid_argument("rectangle: M and N must be at least 1");
    std::set<Vertex> vs;
    for (int n = 1; n <= N; ++n)
      for (int m = 1; m <= M; ++m) vs.insert({m, n});
    std::set<std::array<Vertex, 2>> es;
    for (const auto& v : vs) {
      if (v.m < M) es.insert({v, {v.m + 1, v.n}});
      if (v.n < N) es.insert({v, {v.m, v.n + 1}});
    }
    std::set<Vertex> fs;
    for (int n = 1; n < N; ++n)
      for (int m = 1; m < M; ++m) fs.insert({m, n});
    QuadComplex c;
    c.init(vs, es, fs);
    return c;
  }

  /// Complex induced by a set of unit faces, each given by its lower-left
  /// corner: vertices and edges are the corners and sides of the faces.
  /// The face set must be edge-connected and simply connected; violations
  /// are rejected with a diagnostic naming an offending cell.
  static QuadComplex from_mask(const std::vector<std::array<int, 2>>& cells) {
    if (cells.empty()) throw std::invalid_argument("from_mask: empty mask");
    std::set<Vertex> fs;
    for (const auto& c : cells) fs.insert({c[0], c[1]});
    check_edge_connected(fs);
    std::set<Vertex> vs;
    std::set<std::array<Vertex, 2>> es;
    for (const auto& f : fs) {
      const Vertex ll{f.m, f.n}, lr{f.m + 1, f.n}, ul{f.m, f.n + 1},
          ur{f.m + 1, f.n + 1};
      for (const auto& v : {ll, lr, ul, ur}) vs.insert(v);
      for (const auto& e :
           {std::array<Vertex, 2>{ll, lr}, std::array<Vertex, 2>{ul, ur},
            std::array<Vertex, 2>{ll, ul}, std::array<Vertex, 2>{lr, ur}})
        es.insert(e);
    }
    QuadComplex c;
    c.init(vs, es, fs);
    if (c.vertex_count() - c.edge_count() + c.face_count() != 1) {
      // point a finger at a missing cell that is fully surrounded
      for (const auto& f : fs) {
        for (const auto& d : kSlotStep) {
          const Vertex h{f.m + d[0], f.n + d[1]};
          if (fs.count(h)) continue;
          if (vs.count({h.m, h.n}) && vs.count({h.m + 1, h.n}) &&
              vs.count({h.m, h.n + 1}) && vs.count({h.m + 1, h.n + 1}))
            throw std::invalid_argument(
                "from_mask: not simply connected (hole at cell (" +
                std::to_string(h.m) + "," + std::to_string(h.n) + "))");
        }
      }
      throw std::invalid_argument(
          "from_mask: not simply connected (Euler characteristic " +
          std::to_string(c.vertex_count() - c.edge_count() + c.face_count()) +
          ")");
    }
    return c;
  }

  /// Ring sublattice of a combinatorial M x N rectangle: the even-parity
  /// sites (m+n even) with diagonal adjacency, relabeled to unit spacing
  /// via x = (m+n)/2, y = (n-m)/2. Every unit square of the rectangle
  /// becomes one edge, every fully surrounded odd site one face. For odd
  /// M, N this produces the quadrilateral-boundary diamond with four
  /// degree-1 corners and degree-2 boundary sites.
  static QuadComplex diamond(int M, int N) {
    if (M < 2 || N < 2)
      throw std::invalid_argument("diamond: M and N must be at least 2");
    auto relabel = [](int m, int n) {
      return Vertex{(m + n) / 2, (n - m) / 2};
    };
    std::set<Vertex> vs;
    for (int m = 1; m <= M; ++m)
      for (int n = 1; n <= N; ++n)
        if ((m + n) % 2 == 0) vs.insert(relabel(m, n));
    std::set<std::array<Vertex, 2>> es;
    for (int m = 1; m < M; ++m)
      for (int n = 1; n < N; ++n) {
        // even-parity diagonal of the unit square [m,m+1]x[n,n+1]
        if ((m + n) % 2 == 0)
          es.insert({relabel(m, n), relabel(m + 1, n + 1)});
        else
          es.insert({relabel(m + 1, n), relabel(m, n + 1)});
      }
    std::set<Vertex> fs;
    for (int m = 2; m < M; ++m)
      for (int n = 1; n + 2 <= N; ++n)
        if ((m + n) % 2 == 0) fs.insert(relabel(m, n));
    QuadComplex c;
    c.init(vs, es, fs);
    return c;
  }

  int vertex_count() const { return static_cast<int>(verts_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }

  const std::vector<Vertex>& vertices() const { return verts_; }

  /// Undirected edges as index pairs (i, j) with i < j, sorted.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }

  /// Faces as corner index quadruples (ll, lr, ul, ur), sorted by their
  /// lower-left vertex.
  const std::vector<std::array<int, 4>>& faces() const { return faces_; }

  std::optional<int> find(Vertex v) const {
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int index_of(Vertex v) const {
    auto idx = find(v);
    if (!idx)
      throw std::out_of_range("unknown vertex (" + std::to_string(v.m) + "," +
                              std::to_string(v.n) + ")");
    return *idx;
  }

  Vertex vertex(int vi) const { return verts_.at(vi); }

  /// Neighbor indices in E,N,W,S order; absent slots are nullopt.
  const std::array<std::optional<int>, 4>& neighbors(int vi) const {
    return nbrs_.at(vi);
  }

  /// Present neighbors only, still in E,N,W,S order.
  std::vector<int> neighbor_list(int vi) const {
    std::vector<int> out;
    for (const auto& s : nbrs_.at(vi))
      if (s) out.push_back(*s);
    return out;
  }

  int valence(int vi) const { return valence_.at(vi); }
  bool is_interior(int vi) const { return valence_.at(vi) == 4; }
  bool is_boundary(int vi) const { return !is_interior(vi); }

  const std::vector<int>& interior_vertices() const { return interior_; }
  const std::vector<int>& boundary_vertices() const { return boundary_; }

  /// Face in the corner between neighbor slots `slot` and `slot+1` of
  /// vertex vi (0:NE, 1:NW, 2:SW, 3:SE), if present.
  std::optional<int> face_at(int vi, int slot) const {
    static constexpr std::array<std::array<int, 2>, 4> corner{
        {{0, 0}, {-1, 0}, {-1, -1}, {0, -1}}};
    const Vertex v = verts_[vi];
    auto it =
        face_index_.find({v.m + corner[slot][0], v.n + corner[slot][1]});
    if (it == face_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Edge index for an adjacent pair, if present.
  std::optional<int> edge_between(int a, int b) const {
    auto it = edge_index_.find(a < b ? std::array<int, 2>{a, b}
                                     : std::array<int, 2>{b, a});
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  static void check_edge_connected(const std::set<Vertex>& cells) {
    std::set<Vertex> seen{*cells.begin()};
    std::vector<Vertex> stack{*cells.begin()};
    while (!stack.empty()) {
      const Vertex c = stack.back();
      stack.pop_back();
      for (const auto& d : kSlotStep) {
        const Vertex nb{c.m + d[0], c.n + d[1]};
        if (cells.count(nb) && !seen.count(nb)) {
          seen.insert(nb);
          stack.push_back(nb);
        }
      }
    }
    if (seen.size() != cells.size()) {
      Vertex stranded = *cells.begin();
      for (const auto& c : cells)
        if (!seen.count(c)) {
          stranded = c;
          break;
        }
      throw std::invalid_argument(
          "from_mask: mask is not edge-connected (cell (" +
          std::to_string(stranded.m) + "," + std::to_string(stranded.n) +
          ") is in a separate component)");
    }
  }

  void init(const std::set<Vertex>& vs,
            const std::set<std::array<Vertex, 2>>& es,
            const std::set<Vertex>& face_ll) {
    verts_.assign(vs.begin(), vs.end());
    std::sort(verts_.begin(), verts_.end(),
              [](const Vertex& a, const Vertex& b) {
                return a.n != b.n ? a.n < b.n : a.m < b.m;
              });
    for (int i = 0; i < static_cast<int>(verts_.size()); ++i)
      index_[verts_[i]] = i;

    std::set<std::array<int, 2>> eidx;
    for (const auto& e : es) {
      const int i = index_.at(e[0]), j = index_.at(e[1]);
      eidx.insert(i < j ? std::array<int, 2>{i, j}
                        : std::array<int, 2>{j, i});
    }
    edges_.assign(eidx.begin(), eidx.end());
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i)
      edge_index_[edges_[i]] = i;

    for (const auto& f : face_ll) {
      faces_.push_back({index_.at({f.m, f.n}), index_.at({f.m + 1, f.n}),
                        index_.at({f.m, f.n + 1}),
                        index_.at({f.m + 1, f.n + 1})});
    }
    std::sort(faces_.begin(), faces_.end());
    for (int i = 0; i < static_cast<int>(faces_.size()); ++i) {
      const Vertex ll = verts_[faces_[i][0]];
      face_index_[{ll.m, ll.n}] = i;
    }

    nbrs_.assign(verts_.size(), {});
    valence_.assign(verts_.size(), 0);
    for (int vi = 0; vi < static_cast<int>(verts_.size()); ++vi) {
      const Vertex v = verts_[vi];
      for (int s = 0; s < 4; ++s) {
        const Vertex w{v.m + kSlotStep[s][0], v.n + kSlotStep[s][1]};
        auto wi = find(w);
        if (wi && edge_between(vi, *wi)) {
          nbrs_[vi][s] = *wi;
          ++valence_[vi];
        }
      }
      (is_interior(vi) ? interior_ : boundary_).push_back(vi);
    }
  }

  std::vector<Vertex> verts_;
  std::map<Vertex, int> index_;
  std::vector<std::array<int, 2>> edges_;
  std::map<std::array<int, 2>, int> edge_index_;
  std::vector<std::array<int, 4>> faces_;
  std::map<std::array<int, 2>, int> face_index_;
  std::vector<std::array<std::optional<int>, 4>> nbrs_;
  std::vector<int> valence_;
  std::vector<int> interior_;
  std::vector<int> boundary_;
};

}  // namespace ringforge::grid
