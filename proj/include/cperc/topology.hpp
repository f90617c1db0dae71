#pragma once

#include <algorithm>
#include <climits>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "constrained.hpp"
#include "lattice.hpp"
#include "union_find.hpp"

namespace cperc {

struct ClusterSummary {
  bool state = false;
  std::size_t size = 0;
  bool touches_boundary = false;
  bool wraps = false;
};

struct ClusterLabeling {
  Domain domain;
  std::vector<int> labels;
  std::vector<ClusterSummary> clusters;

  int label(SiteCoord s) const { return labels[domain.index(s)]; }
  std::size_t count() const { return clusters.size(); }
  std::size_t largest_size() const {
    std::size_t m = 0;
    for (const auto& c : clusters) m = std::max(m, c.size);
    return m;
  }
};

namespace detail {

// Marks components that reach an image of themselves across the torus seams.
template <class Neighbours>
std::vector<bool> wrapping_components(std::size_t nverts, const std::vector<int>& label, std::size_t ncomp,
                                      Neighbours&& neighbours) {
  std::vector<bool> wraps(ncomp, false);
  std::vector<std::uint8_t> seen(nverts, 0);
  std::vector<std::pair<int, int>> pos(nverts);
  std::deque<std::size_t> q;
  for (std::size_t s = 0; s < nverts; ++s) {
    if (seen[s] || label[s] < 0) continue;
    seen[s] = 1;
    pos[s] = {0, 0};
    q.push_back(s);
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop_front();
      neighbours(v, [&](std::size_t t, int dx, int dy) {
        std::pair<int, int> p{pos[v].first + dx, pos[v].second + dy};
        if (!seen[t]) {
          seen[t] = 1;
          pos[t] = p;
          q.push_back(t);
        } else if (pos[t] != p) {
          wraps[std::size_t(label[v])] = true;
        }
      });
    }
  }
  return wraps;
}

}  // namespace detail

inline ClusterLabeling label_clusters(const SiteConfig& c) {
  const Domain& d = c.domain();
  const std::size_t n = d.site_count();
  UnionFind uf(n);
  const int w = d.width(), h = d.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::size_t i = std::size_t(y) * std::size_t(w) + std::size_t(x);
      bool s = c.at(i);
      if (x + 1 < w || d.is_torus()) {
        std::size_t r = std::size_t(y) * std::size_t(w) + std::size_t((x + 1) % w);
        if (c.at(r) == s) uf.unite(std::uint32_t(i), std::uint32_t(r));
      }
      if (y + 1 < h || d.is_torus()) {
        std::size_t u = std::size_t((y + 1) % h) * std::size_t(w) + std::size_t(x);
        if (c.at(u) == s) uf.unite(std::uint32_t(i), std::uint32_t(u));
      }
    }
  ClusterLabeling out;
  out.domain = d;
  out.labels = uf.labels();
  out.clusters.assign(uf.set_count(), {});
  for (std::size_t i = 0; i < n; ++i) {
    auto& cs = out.clusters[std::size_t(out.labels[i])];
    cs.state = c.at(i);
    ++cs.size;
    if (d.on_boundary(d.site(i))) cs.touches_boundary = true;
  }
  if (d.is_torus()) {
    auto wr = detail::wrapping_components(
        n, out.labels, out.clusters.size(), [&](std::size_t v, auto&& visit) {
          int x = int(v % std::size_t(w)), y = int(v / std::size_t(w));
          const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
          for (int k = 0; k < 4; ++k) {
            std::size_t t = std::size_t(floor_mod(y + dy[k], h)) * std::size_t(w) + std::size_t(floor_mod(x + dx[k], w));
            if (out.labels[t] == out.labels[v]) visit(t, dx[k], dy[k]);
          }
        });
    for (std::size_t k = 0; k < wr.size(); ++k) out.clusters[k].wraps = wr[k];
  }
  return out;
}

// Plain flood fill, used as an independent cross-check of the union-find labelling.
inline std::size_t flood_fill_cluster_count(const SiteConfig& c) {
  const Domain& d = c.domain();
  std::vector<std::uint8_t> seen(d.site_count(), 0);
  std::size_t count = 0;
  std::vector<SiteCoord> stack;
  for (std::size_t i = 0; i < d.site_count(); ++i) {
    if (seen[i]) continue;
    ++count;
    seen[i] = 1;
    stack.push_back(d.site(i));
    while (!stack.empty()) {
      SiteCoord s = stack.back();
      stack.pop_back();
      for (SiteCoord t : {SiteCoord{s.x + 1, s.y}, SiteCoord{s.x - 1, s.y}, SiteCoord{s.x, s.y + 1}, SiteCoord{s.x, s.y - 1}}) {
        if (!d.contains(t)) continue;
        std::size_t ti = d.index(t);
        if (seen[ti] || c.at(ti) != c.get(s)) continue;
        seen[ti] = 1;
        stack.push_back(d.wrap(t));
      }
    }
  }
  return count;
}

inline double mean_cluster_size_estimate(const std::vector<SiteConfig>& samples, SiteCoord origin) {
  if (samples.empty()) throw InvalidInput("need at least one sample");
  double total = 0;
  for (const auto& s : samples) {
    auto lab = label_clusters(s);
    total += double(lab.clusters[std::size_t(lab.label(origin))].size);
  }
  return total / double(samples.size());
}

// ---------------------------------------------------------------- contours

struct Contour {
  Grid grid = Grid::L1;
  std::vector<ContourEdgeId> edges;
  std::size_t length = 0;
  bool touches_boundary = false;
  bool wraps = false;
};

struct ContourSet {
  Domain domain;
  std::vector<Contour> contours;
  std::vector<int> face_contour;  // per face index, -1 when no edge is present

  int contour_of(const ContourEdgeId& e) const { return face_contour[domain.face_index(e.black_face().lower_left)]; }
};

namespace detail {

// White faces (L-vertices) indexed on the face grid, padded by one ring for boxes.
struct LVertexGrid {
  Domain d;
  int ox = 0, oy = 0, w = 0, h = 0;

  explicit LVertexGrid(const Domain& dom) : d(dom) {
    if (d.is_torus()) {
      ox = d.anchor().x;
      oy = d.anchor().y;
      w = d.width();
      h = d.height();
    } else {
      ox = d.anchor().x - 1;
      oy = d.anchor().y - 1;
      w = d.width() + 1;
      h = d.height() + 1;
    }
  }
  std::size_t size() const { return std::size_t(w) * std::size_t(h); }
  std::size_t index(SiteCoord f) const {
    int x = f.x - ox, y = f.y - oy;
    if (d.is_torus()) {
      x = floor_mod(x, w);
      y = floor_mod(y, h);
    }
    return std::size_t(y) * std::size_t(w) + std::size_t(x);
  }
};

}  // namespace detail

inline ContourSet extract_contours(const ContourConfig& cc) {
  const Domain& d = cc.domain();
  ContourSet out;
  out.domain = d;
  out.face_contour.assign(d.face_count(), -1);
  auto edges = cc.present_edges();
  detail::LVertexGrid lv(d);
  std::vector<int> first(lv.size(), -1);
  UnionFind uf(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k)
    for (auto v : edges[k].endpoint_faces()) {
      auto vi = lv.index(v);
      if (first[vi] < 0)
        first[vi] = int(k);
      else
        uf.unite(std::uint32_t(k), std::uint32_t(first[vi]));
    }
  auto lab = uf.labels();
  std::size_t ncont = uf.set_count();
  out.contours.resize(ncont);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto& c = out.contours[std::size_t(lab[k])];
    c.grid = edges[k].grid();
    c.edges.push_back(edges[k]);
    out.face_contour[d.face_index(edges[k].black_face().lower_left)] = lab[k];
    if (!d.is_torus())
      for (auto v : edges[k].endpoint_faces())
        if (!d.interior_lvertex(v)) c.touches_boundary = true;
  }
  for (auto& c : out.contours) c.length = c.edges.size();
  if (d.is_torus() && ncont > 0) {
    // Walk each contour with unwrapped L-vertex positions.
    std::vector<int> vlabel(lv.size(), -1);
    std::vector<std::vector<std::pair<std::size_t, std::pair<int, int>>>> adj(lv.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      auto ep = edges[k].endpoint_faces();
      auto a = lv.index(ep[0]), b = lv.index(ep[1]);
      int dx = ep[1].x - ep[0].x, dy = ep[1].y - ep[0].y;
      vlabel[a] = vlabel[b] = lab[k];
      adj[a].push_back({b, {dx, dy}});
      adj[b].push_back({a, {-dx, -dy}});
    }
    auto wr = detail::wrapping_components(lv.size(), vlabel, ncont, [&](std::size_t v, auto&& visit) {
      for (auto& [t, dd] : adj[v]) visit(t, dd.first, dd.second);
    });
    for (std::size_t k = 0; k < ncont; ++k) out.contours[k].wraps = wr[k];
  }
  return out;
}

// ---------------------------------------------------------------- interfaces

enum class InterfaceKind { Cycle, Path };

struct InterfaceComponent {
  InterfaceKind kind = InterfaceKind::Cycle;
  std::vector<QuarterEdgeId> edges;
};

struct Interface {
  std::vector<InterfaceComponent> components;
  std::size_t degree_violations = 0;  // refined-dual vertices met by more than two interface edges
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.edges.size();
    return n;
  }
};

namespace detail {

// Cells of A(Z^2) sit at even scaled coordinates, corners of [AZ^2]* at odd ones.
class QuarterGrid {
 public:
  explicit QuarterGrid(const Domain& d) : d_(d) {
    if (d.is_torus()) {
      ox_ = 4 * d.anchor().x;
      oy_ = 4 * d.anchor().y;
      nx_ = 2 * d.width();
      ny_ = 2 * d.height();
    } else {
      ox_ = 4 * d.anchor().x - 4;
      oy_ = 4 * d.anchor().y - 4;
      nx_ = 2 * d.width() + 4;
      ny_ = 2 * d.height() + 4;
    }
  }
  const Domain& domain() const { return d_; }
  bool torus() const { return d_.is_torus(); }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return std::size_t(nx_) * std::size_t(ny_); }
  int period_x() const { return 2 * nx_; }
  int period_y() const { return 2 * ny_; }

  // Index of the cell centred at an even point, or -1 outside a box.
  long cell(QPoint p) const { return slot(p.x - ox_, p.y - oy_); }
  // Index of the corner at an odd point.
  long corner(QPoint p) const { return slot(p.x - ox_ - 1, p.y - oy_ - 1); }
  QPoint cell_point(std::size_t i) const { return {ox_ + 2 * int(i % std::size_t(nx_)), oy_ + 2 * int(i / std::size_t(nx_))}; }
  QPoint wrap(QPoint p) const {
    if (!torus()) return p;
    return {ox_ + floor_mod(p.x - ox_, period_x()), oy_ + floor_mod(p.y - oy_, period_y())};
  }
  // Box clip region: closed black faces of the box and white faces whose four black neighbours are in it.
  bool in_region(QPoint odd) const {
    if (torus()) return true;
    SiteCoord ll{floor_div(odd.x, 4), floor_div(odd.y, 4)};
    return face_color(ll) == FaceColor::Black ? d_.contains_face(ll) : d_.interior_lvertex(ll);
  }
  QuarterEdgeId edge(QPoint a, QPoint b) const {
    if (b < a) std::swap(a, b);
    QPoint wa = wrap(a);
    return QuarterEdgeId(wa, QPoint{wa.x + (b.x - a.x), wa.y + (b.y - a.y)});
  }

 private:
  long slot(int rx, int ry) const {
    if (torus()) {
      rx = floor_mod(rx, period_x());
      ry = floor_mod(ry, period_y());
    } else if (rx < 0 || ry < 0 || rx >= 2 * nx_ || ry >= 2 * ny_) {
      return -1;
    }
    return long(ry / 2) * nx_ + rx / 2;
  }
  Domain d_;
  int ox_ = 0, oy_ = 0, nx_ = 0, ny_ = 0;
};

inline std::array<QPoint, 5> edge_cells(const ContourEdgeId& e) {
  QPoint c = e.black_face().center();
  std::array<QPoint, 5> out;
  for (int k = -2; k <= 2; ++k) out[std::size_t(k + 2)] = e.horizontal() ? QPoint{c.x + 2 * k, c.y} : QPoint{c.x, c.y + 2 * k};
  return out;
}

// Splits a set of interface edges into maximal walks.
inline Interface trace_interface(const QuarterGrid& g, const std::vector<std::pair<QPoint, QPoint>>& segs) {
  Interface out;
  if (segs.empty()) return out;
  // Corner incidence via sorted (corner, edge) pairs; cheap for the small edge sets of one contour.
  std::vector<std::pair<long, std::uint32_t>> inc;
  inc.reserve(2 * segs.size());
  for (std::uint32_t k = 0; k < segs.size(); ++k) {
    inc.push_back({g.corner(segs[k].first), k});
    inc.push_back({g.corner(segs[k].second), k});
  }
  std::sort(inc.begin(), inc.end());
  auto incident = [&](long corner) {
    auto lo = std::lower_bound(inc.begin(), inc.end(), std::pair<long, std::uint32_t>{corner, 0});
    auto hi = lo;
    while (hi != inc.end() && hi->first == corner) ++hi;
    return std::make_pair(lo, hi);
  };
  for (std::size_t i = 0; i < inc.size();) {
    std::size_t j = i;
    while (j < inc.size() && inc[j].first == inc[i].first) ++j;
    if (j - i > 2) ++out.degree_violations;
    i = j;
  }
  std::vector<std::uint8_t> used(segs.size(), 0);
  auto walk = [&](std::uint32_t start, long from_corner, InterfaceKind kind) {
    InterfaceComponent comp;
    comp.kind = kind;
    std::uint32_t e = start;
    long at = from_corner;
    while (true) {
      used[e] = 1;
      comp.edges.push_back(g.edge(segs[e].first, segs[e].second));
      long ca = g.corner(segs[e].first), cb = g.corner(segs[e].second);
      at = (ca == at) ? cb : ca;
      auto [lo, hi] = incident(at);
      std::uint32_t next = UINT32_MAX;
      for (auto it = lo; it != hi; ++it)
        if (!used[it->second]) {
          next = it->second;
          break;
        }
      if (next == UINT32_MAX) break;
      e = next;
    }
    out.components.push_back(std::move(comp));
  };
  // Open walks start at degree-one corners.
  for (std::size_t i = 0; i < inc.size();) {
    std::size_t j = i;
    while (j < inc.size() && inc[j].first == inc[i].first) ++j;
    if (j - i == 1 && !used[inc[i].second]) walk(inc[i].second, inc[i].first, InterfaceKind::Path);
    i = j;
  }
  for (std::uint32_t k = 0; k < segs.size(); ++k)
    if (!used[k]) walk(k, g.corner(segs[k].first), InterfaceKind::Cycle);
  return out;
}

inline void boundary_segments(const QuarterGrid& g, QPoint c, auto&& uncovered, std::vector<std::pair<QPoint, QPoint>>& segs) {
  const int dx[4] = {2, -2, 0, 0}, dy[4] = {0, 0, 2, -2};
  for (int k = 0; k < 4; ++k) {
    QPoint n{c.x + dx[k], c.y + dy[k]};
    if (!uncovered(n)) continue;
    QPoint a, b;
    if (dx[k] != 0) {
      int x = c.x + dx[k] / 2;
      a = {x, c.y - 1};
      b = {x, c.y + 1};
    } else {
      int y = c.y + dy[k] / 2;
      a = {c.x - 1, y};
      b = {c.x + 1, y};
    }
    if (g.in_region(a) && g.in_region(b)) segs.push_back({a, b});
  }
}

}  // namespace detail

// Boundary of the union of the thickened edges R(e) of one contour.
inline Interface extract_interface(const Domain& d, const std::vector<ContourEdgeId>& contour) {
  detail::QuarterGrid g(d);
  std::set<long> covered;
  for (const auto& e : contour)
    for (auto p : detail::edge_cells(e)) covered.insert(g.cell(p));
  std::vector<std::pair<QPoint, QPoint>> segs;
  std::set<long> done;
  for (const auto& e : contour)
    for (auto p : detail::edge_cells(e)) {
      long ci = g.cell(p);
      if (!done.insert(ci).second) continue;
      detail::boundary_segments(g, p, [&](QPoint n) {
        long ni = g.cell(n);
        return ni < 0 || !covered.count(ni);
      }, segs);
    }
  return detail::trace_interface(g, segs);
}

// Interfaces of every contour at once, aligned with cs.contours.
inline std::vector<Interface> extract_interfaces(const ContourSet& cs) {
  const Domain& d = cs.domain;
  detail::QuarterGrid g(d);
  std::vector<int> owner(g.size(), -1);
  for (std::size_t k = 0; k < cs.contours.size(); ++k)
    for (const auto& e : cs.contours[k].edges)
      for (auto p : detail::edge_cells(e)) owner[std::size_t(g.cell(p))] = int(k);
  std::vector<std::vector<std::pair<QPoint, QPoint>>> segs(cs.contours.size());
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] < 0) continue;
    int k = owner[i];
    detail::boundary_segments(g, g.cell_point(i), [&](QPoint n) {
      long ni = g.cell(n);
      return ni < 0 || owner[std::size_t(ni)] != k;
    }, segs[std::size_t(k)]);
  }
  std::vector<Interface> out;
  out.reserve(cs.contours.size());
  for (auto& s : segs) out.push_back(detail::trace_interface(g, s));
  return out;
}

// Number of interface edges meeting a present contour edge of the configuration.
inline std::size_t interface_contour_intersections(const ContourConfig& cc, const Interface& itf) {
  std::size_t hits = 0;
  for (const auto& comp : itf.components)
    for (const auto& q : comp.edges) {
      QPoint a = q.a();
      bool horiz = q.horizontal();
      int across = horiz ? a.x + 1 : a.y + 1;  // the only even coordinate on the segment
      int along = horiz ? a.y : a.x;
      if (floor_mod(across, 4) != 2) continue;
      int fline = floor_div(across - 2, 4);
      for (int f = floor_div(along - 6 + 3, 4); f <= floor_div(along + 2, 4); ++f) {
        int lo = 4 * f - 2, hi = 4 * f + 6;
        if (along < lo || along > hi) continue;
        SiteCoord ll = horiz ? SiteCoord{fline, f} : SiteCoord{f, fline};
        if (face_color(ll) != FaceColor::Black) continue;
        if (!cc.domain().contains_face(ll)) continue;
        EdgeState want = horiz ? EdgeState::Vertical : EdgeState::Horizontal;
        if (cc.state(ll) == want) ++hits;
      }
    }
  return hits;
}

// ---------------------------------------------------------------- fringe

// F_I: sites at Linf distance 1/4 from the component. E_I: G-edges all of whose points are at Linf
// distance exactly 1/4 from it.
struct Fringe {
  std::vector<SiteCoord> sites;
  std::vector<GEdge> edges;
};

inline Fringe interface_fringe(const Domain& d, const InterfaceComponent& comp) {
  auto mult4 = [](int lo, int hi) {
    std::vector<int> out;
    for (int v = 4 * floor_div(lo + 3, 4); v <= hi; v += 4) out.push_back(v);
    return out;
  };
  std::set<SiteCoord> sites;
  for (const auto& q : comp.edges) {
    QPoint a = q.a(), b = q.b();
    for (int sx : mult4(std::min(a.x, b.x) - 1, std::max(a.x, b.x) + 1))
      for (int sy : mult4(std::min(a.y, b.y) - 1, std::max(a.y, b.y) + 1)) {
        SiteCoord s{sx / 4, sy / 4};
        if (d.contains(s)) sites.insert(d.wrap(s));
      }
  }
  // Buckets of interface edges keyed by the unit cell holding their midpoint.
  const int pw = d.width(), ph = d.height();
  auto bucket_key = [&](int cx, int cy) -> long long {
    if (d.is_torus()) {
      cx = floor_mod(cx, pw);
      cy = floor_mod(cy, ph);
    }
    return (long long)cx * 1000003LL + cy;
  };
  std::unordered_map<long long, std::vector<std::uint32_t>> buckets;
  for (std::uint32_t k = 0; k < comp.edges.size(); ++k) {
    QPoint a = comp.edges[k].a(), b = comp.edges[k].b();
    buckets[bucket_key(floor_div(a.x + b.x, 8), floor_div(a.y + b.y, 8))].push_back(k);
  }
  // Linf distance from a point given in half scaled units, also in half units.
  auto dist2x = [&](int px, int py) {
    int best = INT32_MAX;
    int cx = floor_div(px, 8), cy = floor_div(py, 8);
    for (int ix = cx - 1; ix <= cx + 1; ++ix)
      for (int iy = cy - 1; iy <= cy + 1; ++iy) {
        auto it = buckets.find(bucket_key(ix, iy));
        if (it == buckets.end()) continue;
        for (auto k : it->second) {
          QPoint a = comp.edges[k].a(), b = comp.edges[k].b();
          int ax = 2 * a.x, ay = 2 * a.y, bx = 2 * b.x, by = 2 * b.y;
          if (d.is_torus()) {
            int sx = 8 * pw * floor_div(px - ax + 4 * pw, 8 * pw), sy = 8 * ph * floor_div(py - ay + 4 * ph, 8 * ph);
            ax += sx;
            bx += sx;
            ay += sy;
            by += sy;
          }
          best = std::min(best, linf_segment_distance({px, py}, {px, py}, {ax, ay}, {bx, by}));
        }
      }
    return best;
  };
  Fringe f;
  f.sites.assign(sites.begin(), sites.end());
  std::set<GEdge> edges;
  for (auto s : f.sites)
    for (bool h : {true, false}) {
      GEdge g{s, h};
      if (!d.contains_edge(g) || !sites.count(d.wrap(g.other()))) continue;
      QPoint p0 = scaled(g.site);
      bool all_one = true;
      for (int t = 0; t <= 8 && all_one; ++t) {
        int px = 2 * p0.x + (h ? t : 0), py = 2 * p0.y + (h ? 0 : t);
        all_one = dist2x(px, py) == 2;
      }
      if (all_one) edges.insert(d.wrap(g));
    }
  f.edges.assign(edges.begin(), edges.end());
  return f;
}

enum class FringeShape { Cycle, Path, Other };

inline FringeShape fringe_shape(const Domain& d, const Fringe& f) {
  if (f.edges.empty()) return f.sites.size() == 1 ? FringeShape::Path : FringeShape::Other;
  std::map<SiteCoord, int> deg;
  std::map<SiteCoord, std::uint32_t> id;
  for (const auto& e : f.edges)
    for (auto s : {d.wrap(e.site), d.wrap(e.other())}) {
      ++deg[s];
      id.emplace(s, std::uint32_t(id.size()));
    }
  UnionFind uf(id.size());
  for (const auto& e : f.edges) uf.unite(id[d.wrap(e.site)], id[d.wrap(e.other())]);
  if (uf.set_count() != 1) return FringeShape::Other;
  int ones = 0;
  for (auto& [s, k] : deg) {
    if (k > 2) return FringeShape::Other;
    if (k == 1) ++ones;
  }
  if (ones == 0 && f.edges.size() == id.size()) return FringeShape::Cycle;
  if (ones == 2 && f.edges.size() + 1 == id.size()) return FringeShape::Path;
  return FringeShape::Other;
}

struct FringeCheck {
  bool single_cluster = true;
  bool vertices_match = true;  // V(E_I) = F_I
  bool shape_ok = true;
  bool ok() const { return single_cluster && vertices_match && shape_ok; }
};

inline FringeCheck check_fringe(const Domain& d, const InterfaceComponent& comp, const Fringe& f,
                                const ClusterLabeling& lab) {
  FringeCheck r;
  for (auto s : f.sites)
    if (lab.label(s) != lab.label(f.sites.front())) r.single_cluster = false;
  std::set<SiteCoord> ends;
  for (const auto& e : f.edges) {
    ends.insert(d.wrap(e.site));
    ends.insert(d.wrap(e.other()));
  }
  if (!f.edges.empty() || f.sites.size() != 1)
    r.vertices_match = std::vector<SiteCoord>(ends.begin(), ends.end()) == f.sites;
  auto shape = fringe_shape(d, f);
  r.shape_ok = comp.kind == InterfaceKind::Cycle ? shape == FringeShape::Cycle : shape != FringeShape::Other;
  return r;
}

// ---------------------------------------------------------------- crossing parity

struct CrossingParity {
  std::size_t count = 0;
  bool parity = false;        // endpoint states differ
  bool fully_covered = true;  // every step is a side of a black face in the box
};

inline CrossingParity crossing_parity(const SiteConfig& c, const ContourConfig& cc, const std::vector<SiteCoord>& path) {
  const Domain& d = c.domain();
  if (d.is_torus()) throw TorusUnsupported();
  if (path.empty()) throw NotAPath("empty path");
  CrossingParity r;
  for (auto s : path)
    if (!d.contains(s)) throw NotAPath("site outside the box");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    SiteCoord a = path[i], b = path[i + 1];
    int dx = b.x - a.x, dy = b.y - a.y;
    if (std::abs(dx) + std::abs(dy) != 1) throw NotAPath("consecutive sites not adjacent");
    GEdge g = dx + dy > 0 ? GEdge{a, dx != 0} : GEdge{b, dx != 0};
    auto e = crossing_contour_edge(d, g);
    if (!e) {
      r.fully_covered = false;
      continue;
    }
    if (cc.present(*e)) ++r.count;
  }
  r.parity = c.get(path.front()) != c.get(path.back());
  return r;
}

inline CrossingParity crossing_parity(const SiteConfig& c, const std::vector<SiteCoord>& path) {
  if (c.domain().is_torus()) throw TorusUnsupported();
  return crossing_parity(c, phi(c), path);
}

// ---------------------------------------------------------------- planar separation

// Compares the partition of sites by the thinned plane (A(Z^2) minus the selected contour edges)
// against components of G minus the G-edges those edges cross. Returns the number of sites whose
// classes disagree.
inline std::size_t separation_mismatches(const ContourConfig& cc, const std::vector<ContourEdgeId>& selected) {
  const Domain& d = cc.domain();
  // Even points of the site rectangle (box) or of the torus.
  const int nx = d.is_torus() ? 2 * d.width() : 2 * d.width() - 1;
  const int ny = d.is_torus() ? 2 * d.height() : 2 * d.height() - 1;
  const int ox = 4 * d.anchor().x, oy = 4 * d.anchor().y;
  auto pidx = [&](int px, int py) -> long {
    int rx = px - ox, ry = py - oy;
    if (d.is_torus()) {
      rx = floor_mod(rx, 2 * nx);
      ry = floor_mod(ry, 2 * ny);
    } else if (rx < 0 || ry < 0 || rx > 2 * (nx - 1) || ry > 2 * (ny - 1)) {
      return -1;
    }
    return long(ry / 2) * nx + rx / 2;
  };
  std::vector<std::uint8_t> blocked(std::size_t(nx) * std::size_t(ny), 0);
  for (const auto& e : selected)
    for (auto p : detail::edge_cells(e)) {
      long i = pidx(p.x, p.y);
      if (i >= 0) blocked[std::size_t(i)] = 1;
    }
  UnionFind plane(blocked.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      std::size_t a = std::size_t(j) * std::size_t(nx) + std::size_t(i);
      if (blocked[a]) continue;
      if (i + 1 < nx || d.is_torus()) {
        std::size_t b = std::size_t(j) * std::size_t(nx) + std::size_t((i + 1) % nx);
        if (!blocked[b]) plane.unite(std::uint32_t(a), std::uint32_t(b));
      }
      if (j + 1 < ny || d.is_torus()) {
        std::size_t b = std::size_t((j + 1) % ny) * std::size_t(nx) + std::size_t(i);
        if (!blocked[b]) plane.unite(std::uint32_t(a), std::uint32_t(b));
      }
    }
  std::set<std::pair<int, int>> cut;
  for (const auto& e : selected)
    for (const auto& g : gedge_crossed_by(d, e)) cut.insert({int(d.index(g.site)), g.horizontal ? 0 : 1});
  UnionFind graph(d.site_count());
  for (const auto& g : enumerate_gedges(d)) {
    if (cut.count({int(d.index(g.site)), g.horizontal ? 0 : 1})) continue;
    graph.unite(std::uint32_t(d.index(g.site)), std::uint32_t(d.index(g.other())));
  }
  std::map<std::uint32_t, std::uint32_t> g2p, p2g;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < d.site_count(); ++i) {
    SiteCoord s = d.site(i);
    auto pr = plane.find(std::uint32_t(pidx(4 * s.x, 4 * s.y)));
    auto gr = graph.find(std::uint32_t(i));
    auto [it1, n1] = g2p.emplace(gr, pr);
    auto [it2, n2] = p2g.emplace(pr, gr);
    if (it1->second != pr || it2->second != gr) ++bad;
  }
  return bad;
}

// Two-point connectivity: probability that sites r apart along an axis share a cluster.
inline std::vector<double> two_point_connectivity(const ClusterLabeling& lab, int rmax) {
  const Domain& d = lab.domain;
  std::vector<double> tau(std::size_t(rmax) + 1, 0.0);
  for (int r = 0; r <= rmax; ++r) {
    std::size_t same = 0, total = 0;
    for (std::size_t i = 0; i < d.site_count(); ++i) {
      SiteCoord s = d.site(i);
      for (SiteCoord t : {SiteCoord{s.x + r, s.y}, SiteCoord{s.x, s.y + r}}) {
        if (!d.contains(t)) continue;
        ++total;
        if (lab.labels[i] == lab.label(t)) ++same;
      }
    }
    tau[std::size_t(r)] = total ? double(same) / double(total) : 0.0;
  }
  return tau;
}

}  // namespace cperc
