#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "constrained.hpp"
#include "lattice.hpp"
#include "union_find.hpp"

namespace cperc {

// Vertex (a,b) of L1 sits at (-1/2, 1/2) + (2a, 2b). The L1 face with lower-left vertex (i,j) is centred
// on the L2 vertex (i,j), so the same pair indexes dual sites.
struct L1Vertex {
  int a = 0;
  int b = 0;
  auto operator<=>(const L1Vertex&) const = default;
};

inline L1Vertex operator+(L1Vertex u, L1Vertex v) { return {u.a + v.a, u.b + v.b}; }
inline L1Vertex operator-(L1Vertex u, L1Vertex v) { return {u.a - v.a, u.b - v.b}; }
using DualSite = L1Vertex;

// Black face carrying the L1 edge from u to its right or upper neighbour.
inline SiteCoord l1_edge_face(L1Vertex u, bool horizontal) {
  return horizontal ? SiteCoord{2 * u.a, 2 * u.b} : SiteCoord{2 * u.a - 1, 2 * u.b + 1};
}

inline ContourEdgeId l1_edge_id(L1Vertex u, bool horizontal) {
  return ContourEdgeId(FaceId(l1_edge_face(u, horizontal)), horizontal ? Orientation::Horizontal : Orientation::Vertical);
}

// Primal contour configuration on a rectangular window of L1 vertices.
class PrimalContours {
 public:
  PrimalContours() = default;
  PrimalContours(L1Vertex lo, L1Vertex hi) : lo_(lo), hi_(hi) {
    if (hi.a < lo.a || hi.b < lo.b) throw InvalidInput("empty window");
    w_ = hi.a - lo.a + 1;
    h_ = hi.b - lo.b + 1;
    horiz_.assign(std::size_t(w_) * std::size_t(h_), 0);
    vert_.assign(std::size_t(w_) * std::size_t(h_), 0);
  }

  L1Vertex lo() const { return lo_; }
  L1Vertex hi() const { return hi_; }
  bool contains(L1Vertex v) const { return v.a >= lo_.a && v.a <= hi_.a && v.b >= lo_.b && v.b <= hi_.b; }
  bool has_edge(L1Vertex u, L1Vertex v) const { return adjacent(u, v) && contains(u) && contains(v); }

  bool edge(L1Vertex u, L1Vertex v) const { return slot_of(u, v) != 0; }
  void set_edge(L1Vertex u, L1Vertex v, bool on) { slot_of(u, v) = on ? 1 : 0; }
  void toggle_edge(L1Vertex u, L1Vertex v) { slot_of(u, v) ^= 1; }
  bool edge_or_absent(L1Vertex u, L1Vertex v) const { return has_edge(u, v) && edge(u, v); }

  int degree(L1Vertex v) const {
    int d = 0;
    for (L1Vertex s : {L1Vertex{1, 0}, L1Vertex{-1, 0}, L1Vertex{0, 1}, L1Vertex{0, -1}}) d += edge_or_absent(v, v + s);
    return d;
  }

  // Present edges as (lower vertex, horizontal) pairs.
  std::vector<std::pair<L1Vertex, bool>> present_edges() const {
    std::vector<std::pair<L1Vertex, bool>> out;
    for (int b = lo_.b; b <= hi_.b; ++b)
      for (int a = lo_.a; a <= hi_.a; ++a) {
        L1Vertex u{a, b};
        if (a < hi_.a && edge(u, u + L1Vertex{1, 0})) out.push_back({u, true});
        if (b < hi_.b && edge(u, u + L1Vertex{0, 1})) out.push_back({u, false});
      }
    return out;
  }

  void toggle_face(DualSite f) {
    L1Vertex u = f;
    toggle_edge(u, u + L1Vertex{1, 0});
    toggle_edge(u + L1Vertex{0, 1}, u + L1Vertex{1, 1});
    toggle_edge(u, u + L1Vertex{0, 1});
    toggle_edge(u + L1Vertex{1, 0}, u + L1Vertex{1, 1});
  }

  bool operator==(const PrimalContours& o) const = default;

 private:
  static bool adjacent(L1Vertex u, L1Vertex v) { return std::abs(u.a - v.a) + std::abs(u.b - v.b) == 1; }
  std::uint8_t& slot_of(L1Vertex u, L1Vertex v) { return const_cast<std::uint8_t&>(std::as_const(*this).cslot(u, v)); }
  const std::uint8_t& cslot(L1Vertex u, L1Vertex v) const {
    if (!has_edge(u, v)) throw InvalidEdge("L1 edge outside window");
    if (v < u) std::swap(u, v);
    std::size_t i = std::size_t(u.b - lo_.b) * std::size_t(w_) + std::size_t(u.a - lo_.a);
    return u.b == v.b ? horiz_[i] : vert_[i];
  }
  std::uint8_t slot_of(L1Vertex u, L1Vertex v) const { return cslot(u, v); }

  L1Vertex lo_{}, hi_{};
  int w_ = 0, h_ = 0;
  std::vector<std::uint8_t> horiz_, vert_;
};

// Window of all L1 vertices touching faces of a box; edges whose black face lies outside stay absent.
inline PrimalContours primal_from_contours(const ContourConfig& cc) {
  const Domain& d = cc.domain();
  if (d.is_torus()) throw TorusUnsupported();
  int ax = d.anchor().x, ay = d.anchor().y;
  // Vertex (a,b) is the white face with lower-left corner (2a-1, 2b).
  L1Vertex lo{floor_div(ax + 1, 2), floor_div(ay, 2)};
  L1Vertex hi{floor_div(ax + d.width(), 2), floor_div(ay + d.height() - 1, 2)};
  PrimalContours pc(lo, hi);
  for (const auto& e : cc.present_edges()) {
    if (e.grid() != Grid::L1) continue;
    SiteCoord f = e.black_face().lower_left;
    L1Vertex u = e.horizontal() ? L1Vertex{f.x / 2, f.y / 2} : L1Vertex{(f.x + 1) / 2, (f.y - 1) / 2};
    L1Vertex v = u + (e.horizontal() ? L1Vertex{1, 0} : L1Vertex{0, 1});
    pc.set_edge(u, v, true);
  }
  return pc;
}

inline ContourConfig contours_from_primal(const PrimalContours& pc, const Domain& d) {
  ContourConfig cc(d);
  for (auto [u, h] : pc.present_edges()) cc.set(l1_edge_id(u, h), true);
  return cc;
}

// The box B*_{M,N}: M rows and N columns of L2 faces grown around the origin.
class SurgeryBox {
 public:
  SurgeryBox(int rows, int cols) : m_(rows), n_(cols) {
    if (rows < 3 || cols < 3) throw BoxTooSmall("surgery boxes need at least 3x3 faces");
    cmin_ = -1 - (cols - 1) / 2;
    cmax_ = -1 + cols / 2;
    rmin_ = -1 - rows / 2;
    rmax_ = -1 + (rows - 1) / 2;
  }

  int rows() const { return m_; }
  int cols() const { return n_; }
  // L2 faces, by lower-left dual site.
  int face_col_min() const { return cmin_; }
  int face_col_max() const { return cmax_; }
  int face_row_min() const { return rmin_; }
  int face_row_max() const { return rmax_; }

  L1Vertex interior_lo() const { return {cmin_ + 1, rmin_ + 1}; }
  L1Vertex interior_hi() const { return {cmax_ + 1, rmax_ + 1}; }
  bool interior(L1Vertex v) const {
    return v.a >= cmin_ + 1 && v.a <= cmax_ + 1 && v.b >= rmin_ + 1 && v.b <= rmax_ + 1;
  }
  // Window holding the interior plus the outer ends of the crossing edges.
  L1Vertex window_lo() const { return {cmin_, rmin_}; }
  L1Vertex window_hi() const { return {cmax_ + 2, rmax_ + 2}; }
  PrimalContours empty_contours() const { return PrimalContours(window_lo(), window_hi()); }

  bool in_u(DualSite s) const { return s.a >= cmin_ && s.a <= cmax_ + 1 && s.b >= rmin_ && s.b <= rmax_ + 1; }
  bool in_v(DualSite s) const { return s.a > cmin_ && s.a <= cmax_ && s.b > rmin_ && s.b <= rmax_; }

  std::vector<DualSite> dual_sites() const {
    std::vector<DualSite> out;
    for (int j = rmin_; j <= rmax_ + 1; ++j)
      for (int i = cmin_; i <= cmax_ + 1; ++i) out.push_back({i, j});
    return out;
  }
  std::vector<DualSite> inner_sites() const {
    std::vector<DualSite> out;
    for (auto s : dual_sites())
      if (in_v(s)) out.push_back(s);
    return out;
  }
  // U minus V walked counter-clockwise from the lower-left corner.
  std::vector<DualSite> ring() const {
    std::vector<DualSite> out;
    int i0 = cmin_, i1 = cmax_ + 1, j0 = rmin_, j1 = rmax_ + 1;
    for (int i = i0; i < i1; ++i) out.push_back({i, j0});
    for (int j = j0; j < j1; ++j) out.push_back({i1, j});
    for (int i = i1; i > i0; --i) out.push_back({i, j1});
    for (int j = j1; j > j0; --j) out.push_back({i0, j});
    return out;
  }

  using Edge = std::pair<L1Vertex, L1Vertex>;
  std::vector<Edge> crossing_edges() const {
    std::vector<Edge> out;
    for (int b = rmin_ + 1; b <= rmax_ + 1; ++b)
      for (int a = cmin_ + 1; a <= cmax_ + 1; ++a) {
        L1Vertex u{a, b};
        for (L1Vertex s : {L1Vertex{1, 0}, L1Vertex{-1, 0}, L1Vertex{0, 1}, L1Vertex{0, -1}})
          if (!interior(u + s)) out.push_back({u, u + s});
      }
    return out;
  }
  std::vector<Edge> inner_edges() const {
    std::vector<Edge> out;
    for (int b = rmin_ + 1; b <= rmax_ + 1; ++b)
      for (int a = cmin_ + 1; a <= cmax_ + 1; ++a) {
        L1Vertex u{a, b};
        if (interior(u + L1Vertex{1, 0})) out.push_back({u, u + L1Vertex{1, 0}});
        if (interior(u + L1Vertex{0, 1})) out.push_back({u, u + L1Vertex{0, 1}});
      }
    return out;
  }

  // Primal edge separating two adjacent dual sites.
  static Edge separating_edge(DualSite s, DualSite t) {
    if (t < s) std::swap(s, t);
    if (s.b == t.b) return {L1Vertex{t.a, t.b}, L1Vertex{t.a, t.b + 1}};
    return {L1Vertex{t.a, t.b}, L1Vertex{t.a + 1, t.b}};
  }

 private:
  int m_, n_;
  int cmin_, cmax_, rmin_, rmax_;
};

struct CrossingCount {
  std::size_t count = 0;
  bool odd = false;
};

inline CrossingCount boundary_crossing_parity(const PrimalContours& pc, const SurgeryBox& box) {
  CrossingCount r;
  for (auto& [u, v] : box.crossing_edges()) r.count += pc.edge_or_absent(u, v);
  r.odd = r.count & 1;
  return r;
}

// ---------------------------------------------------------------- B*_{3,3}

enum class CornerKind { Double, Single, Neither };

struct CornerAnalysis {
  std::array<CornerKind, 4> kind{};
  std::array<int, 4> parity{};  // (i + rho(u_i)) mod 2 for double corners, else -1
  int k = 0;
};

struct B33 {
  // Corners v_i, inner sites w_i, outer corner sites u_i and side midpoints s_i, for i = 1..4.
  static constexpr std::array<L1Vertex, 4> v{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  static constexpr std::array<DualSite, 4> w{{{0, 0}, {-1, 0}, {-1, -1}, {0, -1}}};
  static constexpr std::array<DualSite, 4> u{{{1, 1}, {-2, 1}, {-2, -2}, {1, -2}}};
  static constexpr std::array<L1Vertex, 4> s{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  static const SurgeryBox& box() {
    static const SurgeryBox b(3, 3);
    return b;
  }
};

using Ring12 = std::array<std::uint8_t, 12>;
using Inner4 = std::array<std::uint8_t, 4>;  // rho' on w_1..w_4

namespace detail {

inline int ring_position(DualSite s) {
  auto r = B33::box().ring();
  for (std::size_t k = 0; k < r.size(); ++k)
    if (r[k] == s) return int(k);
  return -1;
}

}  // namespace detail

inline CornerAnalysis analyze_corners(const Ring12& rho) {
  CornerAnalysis ca;
  auto ring = B33::box().ring();
  for (int i = 0; i < 4; ++i) {
    int p = detail::ring_position(B33::u[std::size_t(i)]);
    int prev = (p + 11) % 12, next = (p + 1) % 12;
    int present = (rho[std::size_t(p)] != rho[std::size_t(prev)]) + (rho[std::size_t(p)] != rho[std::size_t(next)]);
    ca.kind[std::size_t(i)] = present == 2 ? CornerKind::Double : present == 1 ? CornerKind::Single : CornerKind::Neither;
    ca.parity[std::size_t(i)] = present == 2 ? ((i + 1) + rho[std::size_t(p)]) % 2 : -1;
    ca.k += present == 2;
  }
  return ca;
}

struct ExtendOptions {
  bool enforce_opposite = true;  // turning this off is a deliberate fault for negative tests
};

inline Inner4 extend_b33(const Ring12& rho, ExtendOptions opt = {}) {
  auto ca = analyze_corners(rho);
  Inner4 out{};
  std::array<bool, 4> fixed{};
  if (opt.enforce_opposite)
    for (int i = 0; i < 4; ++i)
      if (ca.kind[std::size_t(i)] == CornerKind::Double) {
        out[std::size_t(i)] = rho[std::size_t(detail::ring_position(B33::u[std::size_t(i)]))];
        fixed[std::size_t(i)] = true;
      }
  int par = -1;
  bool mixed = false;
  for (int p : ca.parity) {
    if (p < 0) continue;
    if (par < 0)
      par = p;
    else if (p != par)
      mixed = true;
  }
  if (!mixed) {
    int c = (par < 0 || !opt.enforce_opposite) ? 0 : par;
    for (int i = 0; i < 4; ++i) out[std::size_t(i)] = std::uint8_t(c ^ ((i + 1) & 1));
    return out;
  }
  // Free sites in the order w4, w1, w2, w3 (w4 is the inner site nearest the origin).
  const int order[4] = {3, 0, 1, 2};
  std::vector<int> freeidx;
  for (int i : order)
    if (!fixed[std::size_t(i)]) freeidx.push_back(i);
  if (ca.k == 2 && freeidx.size() == 2) {
    out[std::size_t(freeidx[0])] = 0;
    out[std::size_t(freeidx[1])] = 1;
  } else {
    for (int i : freeidx) out[std::size_t(i)] = 0;
  }
  return out;
}

// Full dual-site assignment on U for B*_{3,3} from ring and inner values.
inline std::array<std::array<std::uint8_t, 4>, 4> b33_sites(const Ring12& rho, const Inner4& inner) {
  std::array<std::array<std::uint8_t, 4>, 4> g{};  // g[i+2][j+2]
  auto ring = B33::box().ring();
  for (std::size_t k = 0; k < 12; ++k) g[std::size_t(ring[k].a + 2)][std::size_t(ring[k].b + 2)] = rho[k];
  for (std::size_t i = 0; i < 4; ++i) g[std::size_t(B33::w[i].a + 2)][std::size_t(B33::w[i].b + 2)] = inner[i];
  return g;
}

inline PrimalContours b33_contours(const Ring12& rho, const Inner4& inner) {
  const auto& box = B33::box();
  auto g = b33_sites(rho, inner);
  auto val = [&](DualSite s) { return g[std::size_t(s.a + 2)][std::size_t(s.b + 2)]; };
  PrimalContours pc = box.empty_contours();
  for (auto s : box.dual_sites())
    for (DualSite t : {s + DualSite{1, 0}, s + DualSite{0, 1}}) {
      if (!box.in_u(t)) continue;
      auto [p, q] = SurgeryBox::separating_edge(s, t);
      pc.set_edge(p, q, val(s) != val(t));
    }
  return pc;
}

// Post-conditions of the completion; returns human-readable failures.
inline std::vector<std::string> check_b33(const Ring12& rho, const Inner4& inner) {
  std::vector<std::string> fails;
  const auto& box = B33::box();
  auto pc = b33_contours(rho, inner);
  for (int b = -1; b <= 1; ++b)
    for (int a = -1; a <= 1; ++a)
      if (pc.degree({a, b}) & 1) fails.push_back("odd degree at inner vertex");
  auto id = [&](L1Vertex v) { return std::uint32_t((v.b + 2) * 5 + (v.a + 2)); };
  UnionFind uf(25);
  for (auto [u, h] : pc.present_edges()) uf.unite(id(u), id(u + (h ? L1Vertex{1, 0} : L1Vertex{0, 1})));
  std::optional<std::uint32_t> root;
  bool split = false;
  for (auto& [u, v] : box.crossing_edges())
    if (pc.edge(u, v)) {
      auto r = uf.find(id(u));
      if (root && *root != r) split = true;
      root = r;
    }
  if (split) fails.push_back("crossing edges in different contours");
  auto s0 = uf.find(id(B33::s[0]));
  bool s_ok = pc.degree(B33::s[0]) > 0;
  for (auto sv : B33::s) s_ok = s_ok && pc.degree(sv) > 0 && uf.find(id(sv)) == s0;
  if (root) s_ok = s_ok && *root == s0;
  if (!s_ok) fails.push_back("property (S) fails");
  auto ca = analyze_corners(rho);
  for (std::size_t i = 0; i < 4; ++i)
    if (ca.kind[i] == CornerKind::Double && inner[i] != rho[std::size_t(detail::ring_position(B33::u[i]))])
      fails.push_back("opposite-state rule fails at corner " + std::to_string(i + 1));
  return fails;
}

// Ring values read off the crossing edges, starting from 0 at the lower-left corner.
inline Ring12 ring_from_crossings(const PrimalContours& pc) {
  auto ring = B33::box().ring();
  Ring12 rho{};
  for (std::size_t k = 1; k <= 12; ++k) {
    auto [p, q] = SurgeryBox::separating_edge(ring[k - 1], ring[k % 12]);
    bool cross = pc.edge(p, q);
    if (k < 12)
      rho[k] = std::uint8_t(rho[k - 1] ^ cross);
    else if ((rho[11] ^ cross) != rho[0])
      throw OddBoundaryParity();
  }
  return rho;
}

// Rewrites the inner edges of B*_{3,3} in place.
inline void extend_b33(PrimalContours& pc, ExtendOptions opt = {}) {
  Ring12 rho = ring_from_crossings(pc);
  auto full = b33_contours(rho, extend_b33(rho, opt));
  for (auto& [u, v] : B33::box().inner_edges()) pc.set_edge(u, v, full.edge(u, v));
}

// ---------------------------------------------------------------- box merge

namespace detail {

inline void check_window(const PrimalContours& pc, const SurgeryBox& box) {
  if (!pc.contains(box.window_lo()) || !pc.contains(box.window_hi()))
    throw InvalidInput("contour window does not cover the surgery box");
}

// One peeling step: edits around the last-added strip, then returns the smaller box.
inline SurgeryBox merge_strip(PrimalContours& pc, const SurgeryBox& big) {
  bool drop_column = big.cols() > 3;
  SurgeryBox small = drop_column ? SurgeryBox(big.rows(), big.cols() - 1) : SurgeryBox(big.rows() - 1, big.cols());
  L1Vertex lo = big.interior_lo(), hi = big.interior_hi();
  L1Vertex outward, along;
  std::vector<L1Vertex> strip;
  if (drop_column) {
    bool right = (big.cols() - 1) % 2 == 1;
    int a = right ? hi.a : lo.a;
    outward = {right ? 1 : -1, 0};
    along = {0, 1};
    for (int b = lo.b; b <= hi.b; ++b) strip.push_back({a, b});
  } else {
    bool bottom = (big.rows() - 1) % 2 == 1;
    int b = bottom ? lo.b : hi.b;
    outward = {0, bottom ? -1 : 1};
    along = {1, 0};
    for (int a = lo.a; a <= hi.a; ++a) strip.push_back({a, b});
  }
  L1Vertex inward{-outward.a, -outward.b};
  L1Vertex q = strip.front(), p = strip.back();

  // I. clear the inside of the big box.
  for (auto& [u, v] : big.inner_edges()) pc.set_edge(u, v, false);
  // II. carry every outward crossing one step inward.
  bool any_outward = false;
  for (auto s : strip)
    if (pc.edge(s, s + outward)) {
      pc.set_edge(s, s + inward, true);
      any_outward = true;
    }
  bool p_odd = pc.degree(p) & 1, q_odd = pc.degree(q) & 1;
  if (p_odd && q_odd) {
    // III. join the two ends along the strip. With no outward crossing the strip would form a
    // closed-off contour, so the ends are sent inward instead.
    if (any_outward) {
      for (std::size_t k = 0; k + 1 < strip.size(); ++k) pc.set_edge(strip[k], strip[k + 1], true);
    } else {
      pc.set_edge(p, p + inward, true);
      pc.set_edge(q, q + inward, true);
    }
  } else if (p_odd || q_odd) {
    // IV.
    L1Vertex x = p_odd ? p : q;
    L1Vertex u = p_odd ? p - along : q + along;
    if (!pc.edge(x, x + outward)) {
      pc.set_edge(x, x + inward, true);
    } else {
      pc.set_edge(x, u, true);
      pc.set_edge(u, u + inward, !pc.edge(u, u + outward));
    }
  }
  return small;
}

}  // namespace detail

inline PrimalContours merge_box(PrimalContours pc, const SurgeryBox& box, ExtendOptions opt = {}) {
  detail::check_window(pc, box);
  if (boundary_crossing_parity(pc, box).odd) throw OddBoundaryParity();
  SurgeryBox cur = box;
  while (cur.rows() > 3 || cur.cols() > 3) {
    cur = detail::merge_strip(pc, cur);
    if (boundary_crossing_parity(pc, cur).odd) throw std::logic_error("strip edit broke boundary parity");
  }
  for (auto& [u, v] : cur.inner_edges()) pc.set_edge(u, v, false);
  extend_b33(pc, opt);
  return pc;
}

// Post-conditions of a merge; returns human-readable failures.
inline std::vector<std::string> check_merge(const PrimalContours& before, const PrimalContours& after,
                                            const SurgeryBox& box) {
  std::vector<std::string> fails;
  L1Vertex lo = before.lo(), hi = before.hi();
  std::size_t moved = 0;
  for (int b = lo.b; b <= hi.b; ++b)
    for (int a = lo.a; a <= hi.a; ++a) {
      L1Vertex u{a, b};
      for (L1Vertex v : {u + L1Vertex{1, 0}, u + L1Vertex{0, 1}}) {
        if (!before.has_edge(u, v)) continue;
        if (box.interior(u) && box.interior(v)) continue;
        if (before.edge(u, v) != after.edge(u, v)) ++moved;
      }
    }
  if (moved) fails.push_back("edges outside the box changed: " + std::to_string(moved));
  for (int b = box.interior_lo().b; b <= box.interior_hi().b; ++b)
    for (int a = box.interior_lo().a; a <= box.interior_hi().a; ++a)
      if (after.degree({a, b}) & 1) fails.push_back("odd degree inside the box");
  int w = hi.a - lo.a + 1;
  auto id = [&](L1Vertex v) { return std::uint32_t((v.b - lo.b) * w + (v.a - lo.a)); };
  UnionFind uf(std::size_t(w) * std::size_t(hi.b - lo.b + 1));
  for (auto [u, h] : after.present_edges()) uf.unite(id(u), id(u + (h ? L1Vertex{1, 0} : L1Vertex{0, 1})));
  std::optional<std::uint32_t> root;
  for (auto& [u, v] : box.crossing_edges())
    if (after.edge(u, v)) {
      auto r = uf.find(id(u));
      if (root && *root != r) {
        fails.push_back("crossing edges in different contours");
        break;
      }
      root = r;
    }
  return fails;
}

// ---------------------------------------------------------------- face flips

namespace detail {

// Dual-site states on U with the first ring site at 0, or nothing when inner degrees are odd.
inline std::optional<std::vector<std::uint8_t>> dual_states(const PrimalContours& pc, const SurgeryBox& box) {
  auto sites = box.dual_sites();
  int w = box.face_col_max() + 2 - box.face_col_min();
  auto idx = [&](DualSite s) { return std::size_t((s.b - box.face_row_min()) * w + (s.a - box.face_col_min())); };
  std::vector<std::uint8_t> val(sites.size(), 0), seen(sites.size(), 0);
  std::deque<DualSite> q;
  DualSite start = box.ring().front();
  seen[idx(start)] = 1;
  q.push_back(start);
  while (!q.empty()) {
    DualSite s = q.front();
    q.pop_front();
    for (DualSite t : {s + DualSite{1, 0}, s - DualSite{1, 0}, s + DualSite{0, 1}, s - DualSite{0, 1}}) {
      if (!box.in_u(t)) continue;
      auto [p, r] = SurgeryBox::separating_edge(s, t);
      std::uint8_t want = val[idx(s)] ^ std::uint8_t(pc.edge(p, r));
      if (seen[idx(t)]) {
        if (val[idx(t)] != want) return std::nullopt;
        continue;
      }
      seen[idx(t)] = 1;
      val[idx(t)] = want;
      q.push_back(t);
    }
  }
  return val;
}

}  // namespace detail

// Inner L1 faces to toggle to turn a into b; nothing when either side has odd inner degrees.
inline std::optional<std::vector<DualSite>> face_flip_reachability(const PrimalContours& a, const PrimalContours& b,
                                                                   const SurgeryBox& box) {
  detail::check_window(a, box);
  if (a.lo() != b.lo() || a.hi() != b.hi()) throw PreconditionViolated("different windows");
  for (auto [u, h] : a.present_edges()) {
    L1Vertex v = u + (h ? L1Vertex{1, 0} : L1Vertex{0, 1});
    if (!(box.interior(u) && box.interior(v)) && !b.edge(u, v)) throw PreconditionViolated("configs differ outside the box");
  }
  for (auto [u, h] : b.present_edges()) {
    L1Vertex v = u + (h ? L1Vertex{1, 0} : L1Vertex{0, 1});
    if (!(box.interior(u) && box.interior(v)) && !a.edge(u, v)) throw PreconditionViolated("configs differ outside the box");
  }
  auto ra = detail::dual_states(a, box), rb = detail::dual_states(b, box);
  if (!ra || !rb) return std::nullopt;
  std::vector<DualSite> flips;
  auto sites = box.dual_sites();
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if ((*ra)[k] == (*rb)[k]) continue;
    if (!box.in_v(sites[k])) throw std::logic_error("ring states disagree despite equal crossings");
    flips.push_back(sites[k]);
  }
  return flips;
}

inline PrimalContours apply_face_flips(PrimalContours pc, const std::vector<DualSite>& flips) {
  for (auto f : flips) pc.toggle_face(f);
  return pc;
}

}  // namespace cperc
