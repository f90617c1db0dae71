#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace cperc {

inline constexpr int floor_mod(int a, int m) {
  int r = a % m;
  return r < 0 ? r + m : r;
}

inline constexpr int floor_div(int a, int m) {
  return (a - floor_mod(a, m)) / m;
}

struct SiteCoord {
  int x = 0;
  int y = 0;
  auto operator<=>(const SiteCoord&) const = default;
};

inline SiteCoord operator+(SiteCoord a, SiteCoord b) { return {a.x + b.x, a.y + b.y}; }
inline SiteCoord operator-(SiteCoord a, SiteCoord b) { return {a.x - b.x, a.y - b.y}; }

// Point of the refined grids, coordinates multiplied by 4.
struct QPoint {
  int x = 0;
  int y = 0;
  auto operator<=>(const QPoint&) const = default;
};

inline QPoint scaled(SiteCoord s) { return {4 * s.x, 4 * s.y}; }

enum class DomainKind { PlanarBox, Torus };
enum class FaceColor { Black, White };
enum class Orientation { Horizontal, Vertical };
enum class Grid { L1, L2 };

inline constexpr FaceColor face_color(SiteCoord ll) {
  return ((ll.x + ll.y) & 1) == 0 ? FaceColor::Black : FaceColor::White;
}

struct FaceId {
  SiteCoord lower_left;
  FaceColor color = FaceColor::Black;

  FaceId() = default;
  explicit FaceId(SiteCoord ll) : lower_left(ll), color(face_color(ll)) {}
  FaceId(int x, int y) : FaceId(SiteCoord{x, y}) {}

  bool black() const { return color == FaceColor::Black; }
  SiteCoord center_times2() const { return {2 * lower_left.x + 1, 2 * lower_left.y + 1}; }
  QPoint center() const { return {4 * lower_left.x + 2, 4 * lower_left.y + 2}; }
  bool operator==(const FaceId& o) const { return lower_left == o.lower_left; }
  auto operator<=>(const FaceId& o) const { return lower_left <=> o.lower_left; }
};

// Unit edge of G from `site` to site+(1,0) or site+(0,1).
struct GEdge {
  SiteCoord site;
  bool horizontal = true;

  SiteCoord other() const { return horizontal ? SiteCoord{site.x + 1, site.y} : SiteCoord{site.x, site.y + 1}; }
  QPoint midpoint() const {
    return horizontal ? QPoint{4 * site.x + 2, 4 * site.y} : QPoint{4 * site.x, 4 * site.y + 2};
  }
  auto operator<=>(const GEdge&) const = default;
};

inline Grid grid_of(SiteCoord black_ll, Orientation o) {
  bool even_x = floor_mod(black_ll.x, 2) == 0;
  bool l1 = (o == Orientation::Horizontal) == even_x;
  return l1 ? Grid::L1 : Grid::L2;
}

class ContourEdgeId {
 public:
  ContourEdgeId() = default;
  ContourEdgeId(FaceId black, Orientation o) : face_(black), orient_(o) {
    if (!black.black()) throw InvalidEdge("contour edge needs a black face");
    grid_ = grid_of(black.lower_left, o);
  }
  ContourEdgeId(Grid g, FaceId black, Orientation o) : ContourEdgeId(black, o) {
    if (g != grid_) throw InvalidEdge("grid inconsistent with face parity and orientation");
  }

  Grid grid() const { return grid_; }
  const FaceId& black_face() const { return face_; }
  Orientation orientation() const { return orient_; }
  bool horizontal() const { return orient_ == Orientation::Horizontal; }

  // The two white faces (L-vertices) joined by this edge.
  std::array<SiteCoord, 2> endpoint_faces() const {
    SiteCoord f = face_.lower_left;
    if (horizontal()) return {SiteCoord{f.x - 1, f.y}, SiteCoord{f.x + 1, f.y}};
    return {SiteCoord{f.x, f.y - 1}, SiteCoord{f.x, f.y + 1}};
  }
  std::array<QPoint, 2> endpoints() const {
    QPoint c = face_.center();
    if (horizontal()) return {QPoint{c.x - 4, c.y}, QPoint{c.x + 4, c.y}};
    return {QPoint{c.x, c.y - 4}, QPoint{c.x, c.y + 4}};
  }

  bool operator==(const ContourEdgeId& o) const { return face_ == o.face_ && orient_ == o.orient_; }
  auto operator<=>(const ContourEdgeId& o) const {
    if (auto c = face_ <=> o.face_; c != 0) return c;
    return orient_ <=> o.orient_;
  }

 private:
  Grid grid_ = Grid::L1;
  FaceId face_;
  Orientation orient_ = Orientation::Horizontal;
};

class QuarterEdgeId {
 public:
  QuarterEdgeId() = default;
  QuarterEdgeId(QPoint a, QPoint b) : a_(a), b_(b) {
    if (b_ < a_) std::swap(a_, b_);
    bool odd = (a_.x & 1) && (a_.y & 1) && (b_.x & 1) && (b_.y & 1);
    int dx = b_.x - a_.x, dy = b_.y - a_.y;
    bool step = (dx == 2 && dy == 0) || (dx == 0 && dy == 2);
    if (!odd || !step) throw InvalidEdge("not an edge of the quarter-shifted grid");
  }
  QPoint a() const { return a_; }
  QPoint b() const { return b_; }
  bool horizontal() const { return a_.y == b_.y; }
  auto operator<=>(const QuarterEdgeId&) const = default;

 private:
  QPoint a_, b_;
};

class Domain {
 public:
  Domain() = default;

  static Domain planar_box(int w, int h, SiteCoord anchor = {}) {
    if (w < 1 || h < 1) throw InvalidDomain("box sides must be positive");
    return Domain(DomainKind::PlanarBox, w, h, anchor);
  }
  static Domain torus(int w, int h, SiteCoord anchor = {}) {
    if (w < 2 || h < 2 || (w & 1) || (h & 1)) throw InvalidDomain("torus sides must be even and >= 2");
    return Domain(DomainKind::Torus, w, h, anchor);
  }

  DomainKind kind() const { return kind_; }
  bool is_torus() const { return kind_ == DomainKind::Torus; }
  int width() const { return w_; }
  int height() const { return h_; }
  SiteCoord anchor() const { return anchor_; }
  std::size_t site_count() const { return std::size_t(w_) * std::size_t(h_); }

  bool contains(SiteCoord s) const {
    if (is_torus()) return true;
    return s.x >= anchor_.x && s.x < anchor_.x + w_ && s.y >= anchor_.y && s.y < anchor_.y + h_;
  }
  SiteCoord wrap(SiteCoord s) const {
    if (!is_torus()) return s;
    return {anchor_.x + floor_mod(s.x - anchor_.x, w_), anchor_.y + floor_mod(s.y - anchor_.y, h_)};
  }
  std::size_t index(SiteCoord s) const {
    s = wrap(s);
    return std::size_t(s.y - anchor_.y) * std::size_t(w_) + std::size_t(s.x - anchor_.x);
  }
  SiteCoord site(std::size_t i) const {
    return {anchor_.x + int(i % std::size_t(w_)), anchor_.y + int(i / std::size_t(w_))};
  }
  bool on_boundary(SiteCoord s) const {
    if (is_torus()) return false;
    return s.x == anchor_.x || s.y == anchor_.y || s.x == anchor_.x + w_ - 1 || s.y == anchor_.y + h_ - 1;
  }

  // Faces are addressed by lower-left corner; a box holds only fully contained ones.
  int face_width() const { return is_torus() ? w_ : w_ - 1; }
  int face_height() const { return is_torus() ? h_ : h_ - 1; }
  std::size_t face_count() const { return std::size_t(face_width()) * std::size_t(face_height()); }
  bool contains_face(SiteCoord ll) const {
    if (is_torus()) return true;
    return ll.x >= anchor_.x && ll.x < anchor_.x + w_ - 1 && ll.y >= anchor_.y && ll.y < anchor_.y + h_ - 1;
  }
  std::size_t face_index(SiteCoord ll) const {
    ll = wrap(ll);
    return std::size_t(ll.y - anchor_.y) * std::size_t(face_width()) + std::size_t(ll.x - anchor_.x);
  }
  SiteCoord face_at(std::size_t i) const {
    return {anchor_.x + int(i % std::size_t(face_width())), anchor_.y + int(i / std::size_t(face_width()))};
  }

  bool contains_edge(const GEdge& e) const { return contains(e.site) && contains(e.other()); }
  GEdge wrap(const GEdge& e) const { return {wrap(e.site), e.horizontal}; }
  std::size_t edge_index(const GEdge& e) const { return 2 * index(e.site) + (e.horizontal ? 0 : 1); }

  // White faces whose four black neighbours all lie in the domain.
  bool interior_lvertex(SiteCoord white_ll) const {
    if (is_torus()) return true;
    return white_ll.x > anchor_.x && white_ll.x < anchor_.x + w_ - 2 && white_ll.y > anchor_.y &&
           white_ll.y < anchor_.y + h_ - 2;
  }

  std::string describe() const {
    return std::string(is_torus() ? "torus " : "box ") + std::to_string(w_) + "x" + std::to_string(h_);
  }

  bool operator==(const Domain&) const = default;

 private:
  Domain(DomainKind k, int w, int h, SiteCoord a) : kind_(k), w_(w), h_(h), anchor_(a) {}
  DomainKind kind_ = DomainKind::PlanarBox;
  int w_ = 1;
  int h_ = 1;
  SiteCoord anchor_{};
};

inline std::vector<FaceId> enumerate_black_faces(const Domain& d) {
  std::vector<FaceId> out;
  for (int j = 0; j < d.face_height(); ++j)
    for (int i = 0; i < d.face_width(); ++i) {
      SiteCoord ll{d.anchor().x + i, d.anchor().y + j};
      if (face_color(ll) == FaceColor::Black) out.emplace_back(ll);
    }
  return out;
}

// Sides of the black face perpendicular to the contour edge.
inline std::array<GEdge, 2> gedge_crossed_by(const ContourEdgeId& e) {
  SiteCoord f = e.black_face().lower_left;
  if (e.horizontal()) return {GEdge{f, false}, GEdge{{f.x + 1, f.y}, false}};
  return {GEdge{f, true}, GEdge{{f.x, f.y + 1}, true}};
}

inline std::array<GEdge, 2> gedge_crossed_by(const Domain& d, const ContourEdgeId& e) {
  auto g = gedge_crossed_by(e);
  return {d.wrap(g[0]), d.wrap(g[1])};
}

// The unique black face having this G-edge as a side, and the contour edge crossing it.
inline ContourEdgeId crossing_contour_edge(const GEdge& g) {
  SiteCoord s = g.site;
  bool even = floor_mod(s.x + s.y, 2) == 0;
  if (g.horizontal) return {FaceId(even ? s : SiteCoord{s.x, s.y - 1}), Orientation::Vertical};
  return {FaceId(even ? s : SiteCoord{s.x - 1, s.y}), Orientation::Horizontal};
}

inline std::optional<ContourEdgeId> crossing_contour_edge(const Domain& d, const GEdge& g) {
  auto e = crossing_contour_edge(g);
  if (!d.contains_face(e.black_face().lower_left)) return std::nullopt;
  if (d.is_torus()) return ContourEdgeId(FaceId(d.wrap(e.black_face().lower_left)), e.orientation());
  return e;
}

// Squared Euclidean distance between a point and an axis-parallel segment, all in scaled units.
inline long long dist2_point_segment(QPoint p, QPoint a, QPoint b) {
  auto clamp = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
  int cx = clamp(p.x, std::min(a.x, b.x), std::max(a.x, b.x));
  int cy = clamp(p.y, std::min(a.y, b.y), std::max(a.y, b.y));
  long long dx = p.x - cx, dy = p.y - cy;
  return dx * dx + dy * dy;
}

// Per-axis gaps between two axis-parallel segments, scaled units.
inline std::pair<int, int> segment_gaps(QPoint a0, QPoint a1, QPoint b0, QPoint b1) {
  auto gap = [](int lo1, int hi1, int lo2, int hi2) {
    if (hi1 < lo2) return lo2 - hi1;
    if (hi2 < lo1) return lo1 - hi2;
    return 0;
  };
  return {gap(std::min(a0.x, a1.x), std::max(a0.x, a1.x), std::min(b0.x, b1.x), std::max(b0.x, b1.x)),
          gap(std::min(a0.y, a1.y), std::max(a0.y, a1.y), std::min(b0.y, b1.y), std::max(b0.y, b1.y))};
}

inline int linf_segment_distance(QPoint a0, QPoint a1, QPoint b0, QPoint b1) {
  auto [gx, gy] = segment_gaps(a0, a1, b0, b1);
  return std::max(gx, gy);
}

inline long long dist2_segment_segment(QPoint a0, QPoint a1, QPoint b0, QPoint b1) {
  auto [gx, gy] = segment_gaps(a0, a1, b0, b1);
  return (long long)gx * gx + (long long)gy * gy;
}

// Distance 1/2 between the site and the edge segment: the four corners of its black face.
inline bool incidence(const ContourEdgeId& e, SiteCoord s) {
  auto ep = e.endpoints();
  return dist2_point_segment(scaled(s), ep[0], ep[1]) == 4;
}

inline bool incidence(const Domain& d, const ContourEdgeId& e, SiteCoord s) {
  if (!d.is_torus()) return incidence(e, s);
  SiteCoord f = e.black_face().lower_left;
  int dx = floor_mod(s.x - f.x, d.width());
  int dy = floor_mod(s.y - f.y, d.height());
  return dx <= 1 && dy <= 1;
}

inline std::vector<ContourEdgeId> enumerate_contour_edges(const Domain& d) {
  std::vector<ContourEdgeId> out;
  for (const auto& f : enumerate_black_faces(d)) {
    out.emplace_back(f, Orientation::Horizontal);
    out.emplace_back(f, Orientation::Vertical);
  }
  return out;
}

inline std::vector<GEdge> enumerate_gedges(const Domain& d) {
  std::vector<GEdge> out;
  for (std::size_t i = 0; i < d.site_count(); ++i) {
    SiteCoord s = d.site(i);
    for (bool h : {true, false}) {
      GEdge e{s, h};
      if (d.contains_edge(e)) out.push_back(e);
    }
  }
  return out;
}

inline const char* to_string(Grid g) { return g == Grid::L1 ? "primal" : "dual"; }
inline const char* to_string(DomainKind k) { return k == DomainKind::Torus ? "torus" : "box"; }

}  // namespace cperc
