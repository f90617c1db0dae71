#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"
#include "union_find.hpp"

namespace cperc {

class SiteConfig {
 public:
  SiteConfig() = default;
  explicit SiteConfig(const Domain& d, bool fill = false) : domain_(d), bits_(d.site_count(), fill ? 1 : 0) {}

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return bits_.size(); }

  bool operator[](SiteCoord s) const { return bits_[domain_.index(s)] != 0; }
  bool get(SiteCoord s) const { return bits_[domain_.index(s)] != 0; }
  void set(SiteCoord s, bool v) { bits_[domain_.index(s)] = v ? 1 : 0; }
  void flip(SiteCoord s) { bits_[domain_.index(s)] ^= 1; }
  bool at(std::size_t i) const { return bits_[i] != 0; }
  void set_at(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& raw() const { return bits_; }

  std::size_t count_ones() const { return std::size_t(std::count(bits_.begin(), bits_.end(), 1)); }
  bool operator==(const SiteConfig& o) const { return domain_ == o.domain_ && bits_ == o.bits_; }
  bool operator<(const SiteConfig& o) const { return bits_ < o.bits_; }

 private:
  Domain domain_;
  std::vector<std::uint8_t> bits_;
};

// Digits LL, UL, UR, LR from most to least significant.
inline unsigned face_reading(const SiteConfig& c, SiteCoord ll) {
  unsigned code = 0;
  code |= unsigned(c.get(ll)) << 3;
  code |= unsigned(c.get({ll.x, ll.y + 1})) << 2;
  code |= unsigned(c.get({ll.x + 1, ll.y + 1})) << 1;
  code |= unsigned(c.get({ll.x + 1, ll.y}));
  return code;
}

inline constexpr std::array<unsigned, 6> kAllowedPatterns = {0b0000, 0b1111, 0b0011, 0b1100, 0b0110, 0b1001};

inline constexpr bool pattern_allowed(unsigned code) {
  for (unsigned p : kAllowedPatterns)
    if (p == code) return true;
  return false;
}

inline std::string pattern_string(unsigned code) {
  std::string s(4, '0');
  for (int i = 0; i < 4; ++i) s[i] = ((code >> (3 - i)) & 1) ? '1' : '0';
  return s;
}

struct ValidationResult {
  std::vector<FaceId> offending;
  bool valid() const { return offending.empty(); }
  explicit operator bool() const { return valid(); }
};

inline ValidationResult validate(const SiteConfig& c) {
  ValidationResult r;
  for (const auto& f : enumerate_black_faces(c.domain()))
    if (!pattern_allowed(face_reading(c, f.lower_left))) r.offending.push_back(f);
  return r;
}

inline bool is_valid(const SiteConfig& c) {
  const Domain& d = c.domain();
  for (int j = 0; j < d.face_height(); ++j)
    for (int i = (j + d.anchor().x + d.anchor().y) & 1; i < d.face_width(); i += 2)
      if (!pattern_allowed(face_reading(c, {d.anchor().x + i, d.anchor().y + j}))) return false;
  return true;
}

inline SiteConfig theta(const SiteConfig& c) {
  SiteConfig out(c.domain());
  for (std::size_t i = 0; i < c.size(); ++i) out.set_at(i, !c.at(i));
  return out;
}

inline std::array<SiteCoord, 4> face_corners(SiteCoord ll) {
  return {ll, SiteCoord{ll.x, ll.y + 1}, SiteCoord{ll.x + 1, ll.y + 1}, SiteCoord{ll.x + 1, ll.y}};
}

inline bool white_face_monochromatic(const SiteConfig& c, SiteCoord ll) {
  auto k = face_corners(ll);
  bool v = c.get(k[0]);
  return c.get(k[1]) == v && c.get(k[2]) == v && c.get(k[3]) == v;
}

inline void white_face_flip_inplace(SiteConfig& c, const FaceId& f) {
  if (f.black()) throw FaceNotWhite();
  if (!c.domain().contains_face(f.lower_left)) throw InvalidInput("face outside domain");
  if (!white_face_monochromatic(c, f.lower_left)) throw FaceNotMonochromatic();
  for (auto s : face_corners(f.lower_left)) c.flip(s);
}

inline SiteConfig white_face_flip(const SiteConfig& c, const FaceId& f) {
  SiteConfig out = c;
  white_face_flip_inplace(out, f);
  return out;
}

enum class EdgeState : std::uint8_t { Absent = 0, Horizontal = 1, Vertical = 2 };

// One ternary state per black face, so a present L1 edge and a present L2 edge can never cross.
class ContourConfig {
 public:
  ContourConfig() = default;
  explicit ContourConfig(const Domain& d) : domain_(d), state_(d.face_count(), 0) {}

  const Domain& domain() const { return domain_; }

  EdgeState state(SiteCoord black_ll) const {
    if (!domain_.contains_face(black_ll)) return EdgeState::Absent;
    return EdgeState(state_[domain_.face_index(black_ll)]);
  }
  void set_state(SiteCoord black_ll, EdgeState s) {
    if (face_color(black_ll) != FaceColor::Black || !domain_.contains_face(black_ll))
      throw InvalidEdge("no such black face in domain");
    state_[domain_.face_index(black_ll)] = std::uint8_t(s);
  }

  bool present(const ContourEdgeId& e) const {
    auto s = state(e.black_face().lower_left);
    return s == (e.horizontal() ? EdgeState::Horizontal : EdgeState::Vertical);
  }
  void set(const ContourEdgeId& e, bool on) {
    SiteCoord f = e.black_face().lower_left;
    EdgeState want = e.horizontal() ? EdgeState::Horizontal : EdgeState::Vertical;
    EdgeState cur = state(f);
    if (on) {
      if (cur != EdgeState::Absent && cur != want) throw CrossingContours();
      set_state(f, want);
    } else if (cur == want) {
      set_state(f, EdgeState::Absent);
    }
  }

  // Present edges meeting at a white face (an L-vertex).
  int degree(SiteCoord w) const {
    return int(state({w.x - 1, w.y}) == EdgeState::Horizontal) + int(state({w.x + 1, w.y}) == EdgeState::Horizontal) +
           int(state({w.x, w.y - 1}) == EdgeState::Vertical) + int(state({w.x, w.y + 1}) == EdgeState::Vertical);
  }

  std::vector<ContourEdgeId> present_edges() const {
    std::vector<ContourEdgeId> out;
    for (std::size_t i = 0; i < state_.size(); ++i) {
      if (state_[i] == 0) continue;
      SiteCoord ll = domain_.face_at(i);
      out.emplace_back(FaceId(ll), state_[i] == 1 ? Orientation::Horizontal : Orientation::Vertical);
    }
    return out;
  }
  std::size_t present_count() const {
    return std::size_t(std::count_if(state_.begin(), state_.end(), [](auto v) { return v != 0; }));
  }

  // White faces that must have even degree yet do not.
  std::vector<FaceId> odd_vertices() const {
    std::vector<FaceId> out;
    for (std::size_t i = 0; i < state_.size(); ++i) {
      SiteCoord ll = domain_.face_at(i);
      if (face_color(ll) != FaceColor::White || !domain_.interior_lvertex(ll)) continue;
      if (degree(ll) & 1) out.emplace_back(ll);
    }
    return out;
  }
  bool even_degree() const { return odd_vertices().empty(); }

  ContourConfig restricted(Grid g) const {
    ContourConfig out(domain_);
    for (const auto& e : present_edges())
      if (e.grid() == g) out.set(e, true);
    return out;
  }

  const std::vector<std::uint8_t>& raw() const { return state_; }
  bool operator==(const ContourConfig& o) const { return domain_ == o.domain_ && state_ == o.state_; }
  bool operator<(const ContourConfig& o) const { return state_ < o.state_; }

 private:
  Domain domain_;
  std::vector<std::uint8_t> state_;
};

inline ContourConfig symmetric_difference(const ContourConfig& a, const ContourConfig& b) {
  if (!(a.domain() == b.domain())) throw DomainMismatch();
  ContourConfig out = a;
  for (const auto& e : b.present_edges()) out.set(e, !a.present(e));
  return out;
}

inline EdgeState phi_face(unsigned code) {
  switch (code) {
    case 0b0000:
    case 0b1111:
      return EdgeState::Absent;
    case 0b0110:
    case 0b1001:
      return EdgeState::Horizontal;
    case 0b0011:
    case 0b1100:
      return EdgeState::Vertical;
    default:
      throw InvalidInput("face pattern " + pattern_string(code) + " is not allowed");
  }
}

inline ContourConfig phi(const SiteConfig& c) {
  ContourConfig out(c.domain());
  for (const auto& f : enumerate_black_faces(c.domain()))
    out.set_state(f.lower_left, phi_face(face_reading(c, f.lower_left)));
  return out;
}

// Components of the graph on sites joined by sides of black faces in the domain.
inline UnionFind constraint_graph(const Domain& d) {
  UnionFind uf(d.site_count());
  for (const auto& f : enumerate_black_faces(d)) {
    auto k = face_corners(f.lower_left);
    for (int i = 1; i < 4; ++i) uf.unite(std::uint32_t(d.index(k[0])), std::uint32_t(d.index(k[i])));
  }
  return uf;
}

inline std::size_t constraint_components(const Domain& d) { return constraint_graph(d).set_count(); }

inline bool gedge_covered(const Domain& d, const GEdge& g) {
  return d.contains_edge(g) && crossing_contour_edge(d, g).has_value();
}

inline bool gedge_crossed(const ContourConfig& c, const GEdge& g) {
  auto e = crossing_contour_edge(c.domain(), g);
  return e && c.present(*e);
}

// Breadth-first reconstruction. Components of the constraint graph not reached from the seed start at
// their first site in row-major order with state 0.
inline SiteConfig phi_inverse(const ContourConfig& contours, SiteCoord seed, bool seed_state) {
  const Domain& d = contours.domain();
  if (!d.contains(seed)) throw InvalidInput("seed outside domain");
  if (!contours.even_degree()) throw InvalidInput("contour configuration has odd degree vertices");
  SiteConfig out(d);
  std::vector<std::uint8_t> seen(d.site_count(), 0);
  std::deque<SiteCoord> queue;
  auto run = [&](SiteCoord start, bool st) {
    out.set(start, st);
    seen[d.index(start)] = 1;
    queue.push_back(d.wrap(start));
    while (!queue.empty()) {
      SiteCoord s = queue.front();
      queue.pop_front();
      const GEdge nbr[4] = {GEdge{{s.x, s.y - 1}, false}, GEdge{{s.x - 1, s.y}, true}, GEdge{s, true}, GEdge{s, false}};
      for (const auto& g : nbr) {
        if (!d.contains_edge(g)) continue;
        auto e = crossing_contour_edge(d, g);
        if (!e) continue;
        SiteCoord t = (d.wrap(g.site) == s) ? d.wrap(g.other()) : d.wrap(g.site);
        bool want = out.get(s) != contours.present(*e);
        std::size_t ti = d.index(t);
        if (seen[ti]) {
          if (out.at(ti) != want) {
            if (d.is_torus()) throw InconsistentContours();
            throw std::logic_error("planar reconstruction conflict with even degrees");
          }
          continue;
        }
        seen[ti] = 1;
        out.set_at(ti, want);
        queue.push_back(t);
      }
    }
  };
  run(seed, seed_state);
  for (std::size_t i = 0; i < d.site_count(); ++i)
    if (!seen[i]) run(d.site(i), false);
  return out;
}

// All valid configurations, in lexicographic order of the state vector read in site-index order.
inline std::vector<SiteConfig> enumerate_omega(const Domain& d, std::size_t cap = 25) {
  if (d.site_count() > cap) throw DomainTooLarge("domain has " + std::to_string(d.site_count()) + " sites");
  const std::size_t n = d.site_count();
  // Faces checked once their last corner (by index) is assigned.
  std::vector<std::vector<SiteCoord>> finishing(n);
  for (const auto& f : enumerate_black_faces(d)) {
    std::size_t last = 0;
    for (auto s : face_corners(f.lower_left)) last = std::max(last, d.index(s));
    finishing[last].push_back(f.lower_left);
  }
  std::vector<SiteConfig> out;
  SiteConfig cur(d);
  auto ok_at = [&](std::size_t i) {
    for (auto ll : finishing[i])
      if (!pattern_allowed(face_reading(cur, ll))) return false;
    return true;
  };
  std::vector<int> choice(n + 1, -1);
  std::size_t i = 0;
  if (n == 0) return out;
  while (true) {
    if (i == n) {
      out.push_back(cur);
      --i;
      continue;
    }
    if (choice[i] == 1) {
      choice[i] = -1;
      if (i == 0) break;
      --i;
      continue;
    }
    ++choice[i];
    cur.set_at(i, choice[i] == 1);
    if (ok_at(i)) ++i;
  }
  return out;
}

// Uniform choice among the configurations that are constant along rows or along columns; all are valid.
inline SiteConfig random_stripe_config(const Domain& d, Rng& rng) {
  SiteConfig c(d);
  bool rows = rng.bit();
  std::vector<bool> line(std::size_t(rows ? d.height() : d.width()));
  for (std::size_t k = 0; k < line.size(); ++k) line[k] = rng.bit();
  for (std::size_t i = 0; i < d.site_count(); ++i) {
    SiteCoord s = d.site(i);
    c.set_at(i, rows ? line[std::size_t(s.y - d.anchor().y)] : line[std::size_t(s.x - d.anchor().x)]);
  }
  return c;
}

// Each sweep visits every white face once and flips it with probability 1/2 when it is monochromatic.
inline void white_flip_sweeps(SiteConfig& c, Rng& rng, std::size_t sweeps) {
  const Domain& d = c.domain();
  for (std::size_t k = 0; k < sweeps; ++k)
    for (int j = 0; j < d.face_height(); ++j) {
      int y = d.anchor().y + j;
      for (int i = 0; i < d.face_width(); ++i) {
        SiteCoord ll{d.anchor().x + i, y};
        if (face_color(ll) != FaceColor::White) continue;
        if (!white_face_monochromatic(c, ll)) continue;
        if (rng.bit())
          for (auto s : face_corners(ll)) c.flip(s);
      }
    }
}

inline SiteConfig random_valid_config(const Domain& d, Rng& rng, std::size_t sweeps) {
  SiteConfig c = random_stripe_config(d, rng);
  white_flip_sweeps(c, rng, sweeps);
  if (rng.bit()) c = theta(c);
  return c;
}

// Text format: header then rows from the top.
inline void write_grid_rows(std::ostream& os, int w, int h, auto&& cell) {
  for (int y = h - 1; y >= 0; --y) {
    std::string row(std::size_t(w), '0');
    for (int x = 0; x < w; ++x) row[std::size_t(x)] = cell(x, y);
    os << row << '\n';
  }
}

inline void write_site_config(std::ostream& os, const SiteConfig& c) {
  const Domain& d = c.domain();
  os << "percolation " << to_string(d.kind()) << ' ' << d.width() << ' ' << d.height() << '\n';
  write_grid_rows(os, d.width(), d.height(), [&](int x, int y) {
    return c.get({d.anchor().x + x, d.anchor().y + y}) ? '1' : '0';
  });
}

inline std::string to_text(const SiteConfig& c) {
  std::ostringstream os;
  write_site_config(os, c);
  return os.str();
}

struct GridHeader {
  std::string tag;
  DomainKind kind = DomainKind::PlanarBox;
  int width = 0;
  int height = 0;
};

inline GridHeader read_grid_header(std::istream& is, const std::string& expected_tag) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("missing header");
  std::istringstream hs(line);
  GridHeader h;
  std::string kind, extra;
  if (!(hs >> h.tag >> kind >> h.width >> h.height) || (hs >> extra)) throw ParseError("bad header: " + line);
  if (h.tag != expected_tag) throw ParseError("expected header tag " + expected_tag);
  if (kind == "box")
    h.kind = DomainKind::PlanarBox;
  else if (kind == "torus")
    h.kind = DomainKind::Torus;
  else
    throw ParseError("unknown domain kind " + kind);
  if (h.width <= 0 || h.height <= 0) throw ParseError("bad dimensions");
  return h;
}

inline std::vector<std::string> read_grid_rows(std::istream& is, int w, int h, const std::string& alphabet,
                                               bool expect_end = true) {
  std::vector<std::string> rows;
  std::string line;
  while (int(rows.size()) < h) {
    if (!std::getline(is, line)) throw ParseError("too few rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (int(line.size()) != w) throw ParseError("row has wrong width");
    if (line.find_first_not_of(alphabet) != std::string::npos) throw ParseError("unexpected character in row");
    rows.push_back(line);
  }
  while (expect_end && std::getline(is, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw ParseError("trailing content");
  return rows;
}

inline Domain make_domain(DomainKind k, int w, int h) {
  try {
    return k == DomainKind::Torus ? Domain::torus(w, h) : Domain::planar_box(w, h);
  } catch (const InvalidDomain& e) {
    throw ParseError(e.what());
  }
}

inline SiteConfig read_site_config(std::istream& is) {
  GridHeader h = read_grid_header(is, "percolation");
  SiteConfig c(make_domain(h.kind, h.width, h.height));
  auto rows = read_grid_rows(is, h.width, h.height, "01");
  for (int r = 0; r < h.height; ++r)
    for (int x = 0; x < h.width; ++x) c.set({x, h.height - 1 - r}, rows[std::size_t(r)][std::size_t(x)] == '1');
  return c;
}

inline SiteConfig site_config_from_text(const std::string& s) {
  std::istringstream is(s);
  return read_site_config(is);
}

}  // namespace cperc
