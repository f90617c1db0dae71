#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "constrained.hpp"
#include "lattice.hpp"
#include "rng.hpp"
#include "union_find.hpp"

namespace cperc {

// ---------------------------------------------------------------- couplings and weights

inline const double kCriticalCoupling = 0.5 * std::log(1.0 + std::numbers::sqrt2);
inline constexpr double kDefaultPc = 0.592746;  // external literature value, configurable

inline double F(double x, double y) { return std::exp(-2 * x) + std::exp(-2 * y) + std::exp(-2 * x - 2 * y); }

enum class Phase { Critical, LowTemperature, HighTemperature };

inline std::string to_string(Phase p) {
  switch (p) {
    case Phase::Critical: return "critical";
    case Phase::LowTemperature: return "low-temperature";
    case Phase::HighTemperature: return "high-temperature";
  }
  return "?";
}

struct Couplings {
  double jh = 0;
  double jv = 0;
  double h = 0;

  void validate() const {
    for (double v : {jh, jv, h})
      if (!std::isfinite(v) || v < 0) throw InvalidInput("couplings must be finite and non-negative");
  }
  bool operator==(const Couplings&) const = default;
};

inline Phase classify(const Couplings& c, double eps = 1e-12) {
  double f = F(c.jh, c.jv);
  if (std::abs(f - 1.0) <= eps) return Phase::Critical;
  return f < 1.0 ? Phase::LowTemperature : Phase::HighTemperature;
}

inline double weight_from_coupling(double j) {
  if (!(j > 0) || !std::isfinite(j)) throw NonPositiveCoupling("coupling must be positive");
  double x = std::exp(-2 * j);
  return 2 * x / (1 + x * x);
}

// Smaller root of w x^2 - 2x + w = 0, written to avoid cancellation near w = 0.
inline double coupling_from_weight(double w) {
  if (!(w > 0 && w < 1)) throw WeightOutOfRange("weight must lie in (0,1)");
  double x = w / (1 + std::sqrt((1 - w) * (1 + w)));
  return -0.5 * std::log(x);
}

inline double critical_partner(double j) {
  if (!(j > 0) || !std::isfinite(j)) throw NonPositiveCoupling("coupling must be positive");
  double a = std::exp(-2 * j);
  if (a >= 1) throw NoSolution();
  return -0.5 * std::log((1 - a) / (1 + a));
}

inline double h0_from_pc(double pc) {
  if (!(pc > 0.5 && pc < 1)) throw PcOutOfRange("pc must lie in (1/2,1)");
  return 0.5 * std::log(pc / (1 - pc));
}

// Type-I weights of one square: h on its top and bottom sides, v on its left and right sides.
struct SquareWeights {
  double h = std::numbers::sqrt2 / 2;
  double v = std::numbers::sqrt2 / 2;
  bool operator==(const SquareWeights&) const = default;
};

// Squares in black faces with even x carry a vertical dual edge, odd-x squares a horizontal one.
struct DimerWeights {
  SquareWeights even;
  SquareWeights odd;

  void validate(double tol = 1e-12) const {
    for (auto sq : {even, odd}) {
      if (!(sq.h > 0 && sq.h < 1 && sq.v > 0 && sq.v < 1)) throw WeightOutOfRange("Type-I weights must lie in (0,1)");
      if (std::abs(sq.h * sq.h + sq.v * sq.v - 1) > tol) throw WeightOutOfRange("perpendicular weights must satisfy h^2+v^2=1");
    }
  }
  const SquareWeights& at(SiteCoord black_ll) const { return floor_mod(black_ll.x, 2) == 0 ? even : odd; }

  static DimerWeights from_couplings(const Couplings& c) {
    DimerWeights w;
    w.odd.h = weight_from_coupling(c.jh);
    w.odd.v = std::sqrt(1 - w.odd.h * w.odd.h);
    w.even.v = weight_from_coupling(c.jv);
    w.even.h = std::sqrt(1 - w.even.v * w.even.v);
    return w;
  }
  Couplings couplings() const { return {coupling_from_weight(odd.h), coupling_from_weight(even.v), 0}; }
  // Invariance under the full translation group: both square classes carry the same weights.
  bool fully_invariant(double tol = 1e-12) const {
    return std::abs(even.h - odd.h) <= tol && std::abs(even.v - odd.v) <= tol;
  }
  bool operator==(const DimerWeights&) const = default;
};

// ---------------------------------------------------------------- spins on L2 vertices

// L2 vertex (i,j) is the white face with lower-left corner (ox + 2i, oy + 2j).
struct DualLayout {
  int ox = 0, oy = 0, lx = 0, ly = 0;
  bool torus = false;

  explicit DualLayout(const Domain& d) : torus(d.is_torus()) {
    int x0 = d.is_torus() ? d.anchor().x : d.anchor().x - 1;
    int y0 = d.is_torus() ? d.anchor().y : d.anchor().y - 1;
    int x1 = d.is_torus() ? x0 + d.width() - 1 : d.anchor().x + d.width() - 1;
    int y1 = d.is_torus() ? y0 + d.height() - 1 : d.anchor().y + d.height() - 1;
    ox = x0 + floor_mod(x0, 2);
    oy = y0 + (1 - floor_mod(y0, 2));
    lx = ox > x1 ? 0 : (x1 - ox) / 2 + 1;
    ly = oy > y1 ? 0 : (y1 - oy) / 2 + 1;
  }
  std::size_t count() const { return std::size_t(lx) * std::size_t(ly); }
  std::size_t index(int i, int j) const { return std::size_t(j) * std::size_t(lx) + std::size_t(i); }
  SiteCoord face(int i, int j) const { return {ox + 2 * i, oy + 2 * j}; }
  // Black face between (i,j) and its right or upper neighbour.
  SiteCoord bond_face(int i, int j, bool horizontal) const {
    return horizontal ? SiteCoord{ox + 2 * i + 1, oy + 2 * j} : SiteCoord{ox + 2 * i, oy + 2 * j + 1};
  }
};

struct Bond {
  std::size_t a = 0, b = 0;
  bool horizontal = true;
  ContourEdgeId edge;  // the L1 edge crossing this bond
};

// Bonds whose crossing L1 edge lies in the domain; a torus with two sides wraps them.
inline std::vector<Bond> dual_bonds(const Domain& d) {
  DualLayout L(d);
  std::vector<Bond> out;
  for (int j = 0; j < L.ly; ++j)
    for (int i = 0; i < L.lx; ++i)
      for (bool hor : {true, false}) {
        int ni = i + hor, nj = j + !hor;
        if (L.torus) {
          ni %= L.lx;
          nj %= L.ly;
        } else if (ni >= L.lx || nj >= L.ly) {
          continue;
        }
        SiteCoord f = L.bond_face(i, j, hor);
        if (!d.contains_face(f)) continue;
        if (d.is_torus()) f = d.wrap(f);
        out.push_back({L.index(i, j), L.index(ni, nj), hor,
                       ContourEdgeId(FaceId(f), hor ? Orientation::Vertical : Orientation::Horizontal)});
      }
  return out;
}

class SpinField {
 public:
  SpinField() = default;
  explicit SpinField(const Domain& d, std::int8_t fill = 1) : domain_(d), layout_(d), s_(layout_.count(), fill) {}

  const Domain& domain() const { return domain_; }
  const DualLayout& layout() const { return layout_; }
  std::size_t size() const { return s_.size(); }
  std::int8_t at(std::size_t k) const { return s_[k]; }
  void set_at(std::size_t k, std::int8_t v) { s_[k] = v; }
  std::int8_t get(int i, int j) const { return s_[layout_.index(i, j)]; }
  void set(int i, int j, std::int8_t v) { s_[layout_.index(i, j)] = v; }
  const std::vector<std::int8_t>& raw() const { return s_; }
  double magnetization() const {
    double m = 0;
    for (auto v : s_) m += v;
    return s_.empty() ? 0 : m / double(s_.size());
  }
  bool operator==(const SpinField& o) const { return domain_ == o.domain_ && s_ == o.s_; }

 private:
  Domain domain_;
  DualLayout layout_{Domain::planar_box(1, 1)};
  std::vector<std::int8_t> s_;
};

inline SpinField xor_compose(const SpinField& a, const SpinField& b) {
  if (!(a.domain() == b.domain())) throw DomainMismatch();
  SpinField out(a.domain());
  for (std::size_t k = 0; k < a.size(); ++k) out.set_at(k, std::int8_t(a.at(k) * b.at(k)));
  return out;
}

inline ContourConfig contours_from_spins(const SpinField& s) {
  ContourConfig cc(s.domain());
  for (const auto& b : dual_bonds(s.domain()))
    if (s.at(b.a) != s.at(b.b)) cc.set(b.edge, true);
  return cc;
}

// Dual field whose primal contours are those of cc; one coin fixes the global sign. L2 edges are ignored.
inline SpinField gamma2(const ContourConfig& cc, Rng& rng) {
  const Domain& d = cc.domain();
  SpinField out(d);
  auto bonds = dual_bonds(d);
  std::vector<std::vector<std::pair<std::size_t, bool>>> adj(out.size());
  for (const auto& b : bonds) {
    bool cut = cc.present(b.edge);
    adj[b.a].push_back({b.b, cut});
    adj[b.b].push_back({b.a, cut});
  }
  std::int8_t sign = rng.bit() ? 1 : -1;
  std::vector<std::uint8_t> seen(out.size(), 0);
  for (std::size_t root = 0; root < out.size(); ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    out.set_at(root, sign);
    std::deque<std::size_t> q{root};
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop_front();
      for (auto [v, cut] : adj[u]) {
        std::int8_t want = std::int8_t(cut ? -out.at(u) : out.at(u));
        if (seen[v]) {
          if (out.at(v) != want) throw InconsistentContours("contours do not bound a dual field");
          continue;
        }
        seen[v] = 1;
        out.set_at(v, want);
        q.push_back(v);
      }
    }
  }
  return out;
}

// Spins as a site configuration on the Lx x Ly torus, so cluster tools apply; +1 maps to 1.
inline SiteConfig as_site_config(const SpinField& s) {
  const auto& L = s.layout();
  if (!L.torus) throw InvalidDomain("spin clusters are labelled on tori only");
  SiteConfig c(Domain::torus(L.lx, L.ly));
  for (int j = 0; j < L.ly; ++j)
    for (int i = 0; i < L.lx; ++i) c.set({i, j}, s.get(i, j) > 0);
  return c;
}

// ---------------------------------------------------------------- Ising heat bath

struct IsingState {
  SpinField spins;
  Couplings couplings;

  IsingState(const SpinField& s, const Couplings& c) : spins(s), couplings(c) {
    if (!s.domain().is_torus()) throw InvalidDomain("the Ising sampler runs on tori");
    c.validate();
  }
  IsingState(const Domain& torus, const Couplings& c, std::int8_t fill = 1) : IsingState(SpinField(torus, fill), c) {}
};

// Energy -sum J s s - h sum s over every bond of the torus; bonds repeat when a side has two sites.
inline double ising_energy(const IsingState& st) {
  const auto& L = st.spins.layout();
  double e = 0;
  for (int j = 0; j < L.ly; ++j)
    for (int i = 0; i < L.lx; ++i) {
      int s = st.spins.get(i, j);
      e -= st.couplings.jh * s * st.spins.get((i + 1) % L.lx, j);
      e -= st.couplings.jv * s * st.spins.get(i, (j + 1) % L.ly);
      e -= st.couplings.h * s;
    }
  return e;
}

inline void ising_sweep(IsingState& st, Rng& rng, std::size_t sweeps = 1) {
  const auto& L = st.spins.layout();
  // P(+1) indexed by the horizontal and vertical neighbour sums, each in {-2, 0, 2}.
  double p_up[3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double field = st.couplings.jh * (2 * a - 2) + st.couplings.jv * (2 * b - 2) + st.couplings.h;
      p_up[a][b] = 1.0 / (1.0 + std::exp(-2 * field));
    }
  for (std::size_t t = 0; t < sweeps; ++t)
    for (int j = 0; j < L.ly; ++j) {
      int jd = (j + L.ly - 1) % L.ly, ju = (j + 1) % L.ly;
      for (int i = 0; i < L.lx; ++i) {
        int il = (i + L.lx - 1) % L.lx, ir = (i + 1) % L.lx;
        int sh = st.spins.get(il, j) + st.spins.get(ir, j);
        int sv = st.spins.get(i, jd) + st.spins.get(i, ju);
        st.spins.set(i, j, rng.uniform() < p_up[(sh + 2) / 2][(sv + 2) / 2] ? 1 : -1);
      }
    }
}

inline void randomize(SpinField& s, Rng& rng) {
  for (std::size_t k = 0; k < s.size(); ++k) s.set_at(k, rng.bit() ? 1 : -1);
}

// Swendsen-Wang sweeps for zero field and nonnegative couplings. Every site tries its right and upper
// link, so a doubled bond on a side of length two is tried twice; each cluster then flips with probability 1/2.
inline void cluster_sweep(IsingState& st, Rng& rng, std::size_t sweeps = 1) {
  const Couplings& c = st.couplings;
  if (c.h != 0 || c.jh < 0 || c.jv < 0) throw InvalidInput("cluster updates need zero field and nonnegative couplings");
  const auto& L = st.spins.layout();
  const double ph = -std::expm1(-2 * c.jh), pv = -std::expm1(-2 * c.jv);
  const std::size_t n = st.spins.size();
  UnionFind uf;
  std::vector<std::int8_t> flip(n);
  for (std::size_t t = 0; t < sweeps; ++t) {
    uf.reset(n);
    for (int j = 0; j < L.ly; ++j)
      for (int i = 0; i < L.lx; ++i) {
        auto k = std::uint32_t(L.index(i, j));
        auto r = std::uint32_t(L.index((i + 1) % L.lx, j)), u = std::uint32_t(L.index(i, (j + 1) % L.ly));
        if (st.spins.at(k) == st.spins.at(r) && rng.uniform() < ph) uf.unite(k, r);
        if (st.spins.at(k) == st.spins.at(u) && rng.uniform() < pv) uf.unite(k, u);
      }
    std::fill(flip.begin(), flip.end(), std::int8_t(-1));
    for (std::uint32_t k = 0; k < n; ++k) {
      auto root = uf.find(k);
      if (flip[root] < 0) flip[root] = std::int8_t(rng.bit());
      if (flip[root]) st.spins.set_at(k, std::int8_t(-st.spins.at(k)));
    }
  }
}

// ---------------------------------------------------------------- dimers on the square-octagon lattice

// Sides of the square inside a black face.
enum SquareSide : std::uint8_t { kBottom = 1, kTop = 2, kLeft = 4, kRight = 8 };

// Sides touching each corner, in the order LL, UL, UR, LR.
inline constexpr std::array<std::uint8_t, 4> kCornerSides = {kBottom | kLeft, kTop | kLeft, kTop | kRight,
                                                               kBottom | kRight};

// Internal matching forced by the Type-II pattern; both-pairs patterns return the top+bottom choice.
inline std::optional<std::uint8_t> forced_sides(unsigned code) {
  switch (code) {
    case 15: return 0;
    case 0: return kTop | kBottom;
    case 6: return kBottom;  // UL, UR matched outward
    case 9: return kTop;
    case 3: return kLeft;
    case 12: return kRight;
    default: return std::nullopt;
  }
}

// A perfect matching: Type-II edges are the site bits, Type-I edges a side mask per black face.
struct DimerConfig {
  SiteConfig type2;
  std::vector<std::uint8_t> sides;  // per face index, zero on white faces

  const Domain& domain() const { return type2.domain(); }
  std::uint8_t sides_at(SiteCoord black_ll) const { return sides[domain().face_index(black_ll)]; }
  bool operator==(const DimerConfig&) const = default;
};

inline bool is_perfect_matching(const DimerConfig& m) {
  const Domain& d = m.domain();
  if (m.sides.size() != d.face_count()) return false;
  for (std::size_t k = 0; k < d.face_count(); ++k) {
    SiteCoord ll = d.face_at(k);
    if (face_color(ll) == FaceColor::White) {
      if (m.sides[k]) return false;
      continue;
    }
    auto corners = face_corners(ll);
    for (std::size_t c = 0; c < 4; ++c) {
      int cover = int(m.type2.get(corners[c])) + std::popcount(unsigned(m.sides[k] & kCornerSides[c]));
      if (cover != 1) return false;
    }
  }
  return true;
}

inline DimerConfig dimer_from_omega(const SiteConfig& c) {
  const Domain& d = c.domain();
  if (!d.is_torus()) throw InvalidDomain("dimer configurations live on tori");
  DimerConfig m{c, std::vector<std::uint8_t>(d.face_count(), 0)};
  for (std::size_t k = 0; k < d.face_count(); ++k) {
    SiteCoord ll = d.face_at(k);
    if (face_color(ll) != FaceColor::Black) continue;
    auto s = forced_sides(face_reading(c, ll));
    if (!s) throw NotExtendable("Type-II pattern at face (" + std::to_string(ll.x) + "," + std::to_string(ll.y) + ")");
    m.sides[k] = *s;
  }
  return m;
}

// Site states from a Type-II edge set, which must extend to a perfect matching.
inline SiteConfig omega_from_type2(const SiteConfig& type2) {
  dimer_from_omega(type2);
  return type2;
}
inline SiteConfig omega_from_dimer(const DimerConfig& m) {
  if (!is_perfect_matching(m)) throw NotExtendable("not a perfect matching");
  return m.type2;
}

inline double dimer_log_weight(const DimerConfig& m, const DimerWeights& w) {
  const Domain& d = m.domain();
  double lw = 0;
  for (std::size_t k = 0; k < d.face_count(); ++k) {
    if (!m.sides[k]) continue;
    const auto& sq = w.at(d.face_at(k));
    unsigned s = m.sides[k];
    lw += std::popcount(s & (kTop | kBottom)) * std::log(sq.h) + std::popcount(s & (kLeft | kRight)) * std::log(sq.v);
  }
  return lw;
}

namespace detail {

// Black faces around a white face with the side of each that faces it.
inline std::array<std::pair<SiteCoord, std::uint8_t>, 4> octagon_sides(SiteCoord w) {
  return {{{{w.x - 1, w.y}, kRight}, {{w.x + 1, w.y}, kLeft}, {{w.x, w.y - 1}, kTop}, {{w.x, w.y + 1}, kBottom}}};
}

}  // namespace detail

struct DimerMoveStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
};

// Metropolis ratio of a square rotation or octagon move at a face, or nothing when no move applies.
inline std::optional<double> dimer_move_ratio(const DimerConfig& m, const DimerWeights& w, SiteCoord f) {
  const Domain& d = m.domain();
  if (face_color(f) == FaceColor::Black) {
    std::uint8_t s = m.sides_at(f);
    const auto& sq = w.at(f);
    double r = (sq.v * sq.v) / (sq.h * sq.h);
    if (s == (kTop | kBottom)) return r;
    if (s == (kLeft | kRight)) return 1 / r;
    return std::nullopt;
  }
  auto corners = face_corners(f);
  bool all_present = true, all_sides = true;
  for (auto c : corners) all_present = all_present && m.type2.get(c);
  double prod = 1;
  for (auto [b, side] : detail::octagon_sides(f)) {
    all_sides = all_sides && (m.sides[d.face_index(b)] & side);
    const auto& sq = w.at(b);
    prod *= (side == kTop || side == kBottom) ? sq.h : sq.v;
  }
  if (all_present) return prod;
  if (all_sides) return 1 / prod;
  return std::nullopt;
}

inline void apply_dimer_move(DimerConfig& m, SiteCoord f) {
  const Domain& d = m.domain();
  if (face_color(f) == FaceColor::Black) {
    auto& s = m.sides[d.face_index(f)];
    s = s == (kTop | kBottom) ? std::uint8_t(kLeft | kRight) : std::uint8_t(kTop | kBottom);
    return;
  }
  bool to_sides = m.type2.get(f);
  for (auto c : face_corners(f)) m.type2.set(c, !to_sides);
  for (auto [b, side] : detail::octagon_sides(f)) {
    auto& s = m.sides[d.face_index(b)];
    s = to_sides ? std::uint8_t(s | side) : std::uint8_t(s & ~side);
  }
}

// One sweep is one proposal per face on average; faces are drawn uniformly.
inline DimerMoveStats dimer_sweep(DimerConfig& m, const DimerWeights& w, Rng& rng, std::size_t sweeps = 1) {
  const Domain& d = m.domain();
  DimerMoveStats st;
  std::size_t nf = d.face_count();
  for (std::size_t t = 0; t < sweeps * nf; ++t) {
    SiteCoord f = d.face_at(std::size_t(rng.below(nf)));
    ++st.proposed;
    auto r = dimer_move_ratio(m, w, f);
    double u = rng.uniform();
    if (!r || !(*r >= 1 || u < *r)) continue;
    apply_dimer_move(m, f);
    ++st.accepted;
  }
  return st;
}

// All square faces matched internally by their top and bottom sides.
inline DimerConfig canonical_matching(const Domain& torus) { return dimer_from_omega(SiteConfig(torus, false)); }

// Every perfect matching of a small torus.
inline std::vector<DimerConfig> enumerate_matchings(const Domain& torus, std::size_t cap = 25) {
  std::vector<DimerConfig> out;
  for (const auto& c : enumerate_omega(torus, cap)) {
    DimerConfig base = dimer_from_omega(c);
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < base.sides.size(); ++k)
      if (base.sides[k] == (kTop | kBottom)) free.push_back(k);
    for (std::size_t mask = 0; mask < (std::size_t(1) << free.size()); ++mask) {
      DimerConfig m = base;
      for (std::size_t b = 0; b < free.size(); ++b)
        if ((mask >> b) & 1) m.sides[free[b]] = kLeft | kRight;
      out.push_back(std::move(m));
    }
  }
  return out;
}

// Crossing parities of closed loops around the torus, which local moves cannot change.
struct WindingSector {
  bool l1_row = false, l1_col = false, l2_row = false, l2_col = false;
  bool operator==(const WindingSector&) const = default;
  unsigned code() const { return unsigned(l1_row) | unsigned(l1_col) << 1 | unsigned(l2_row) << 2 | unsigned(l2_col) << 3; }
};

inline WindingSector winding_sector(const ContourConfig& cc) {
  const Domain& d = cc.domain();
  if (!d.is_torus()) throw TorusUnsupported();
  WindingSector ws;
  int ax = d.anchor().x, ay = d.anchor().y;
  // In a row of black faces, vertical edges are L1 when the row is odd; in a column, horizontal edges are L1 when it is even.
  for (int row : {0, 1}) {
    int y = ay + row;
    bool par = false;
    for (int x = ax; x < ax + d.width(); ++x)
      if (face_color({x, y}) == FaceColor::Black) par ^= cc.state({x, y}) == EdgeState::Vertical;
    (floor_mod(y, 2) == 1 ? ws.l1_row : ws.l2_row) = par;
  }
  for (int col : {0, 1}) {
    int x = ax + col;
    bool par = false;
    for (int y = ay; y < ay + d.height(); ++y)
      if (face_color({x, y}) == FaceColor::Black) par ^= cc.state({x, y}) == EdgeState::Horizontal;
    (floor_mod(x, 2) == 0 ? ws.l1_col : ws.l2_col) = par;
  }
  return ws;
}

// ---------------------------------------------------------------- snapshots

inline void write_spin_field(std::ostream& os, const SpinField& s) {
  const Domain& d = s.domain();
  if (!d.is_torus() || d.anchor() != SiteCoord{0, 0}) throw InvalidDomain("snapshots are written for anchored tori");
  os << "ising torus " << d.width() << ' ' << d.height() << '\n';
  write_grid_rows(os, s.layout().lx, s.layout().ly, [&](int i, int j) { return s.get(i, j) > 0 ? '+' : '-'; });
}

inline SpinField read_spin_field(std::istream& is) {
  GridHeader h = read_grid_header(is, "ising");
  if (h.kind != DomainKind::Torus) throw ParseError("spin snapshots are toroidal");
  SpinField s(make_domain(h.kind, h.width, h.height));
  auto rows = read_grid_rows(is, s.layout().lx, s.layout().ly, "+-");
  for (int r = 0; r < s.layout().ly; ++r)
    for (int i = 0; i < s.layout().lx; ++i)
      s.set(i, s.layout().ly - 1 - r, rows[std::size_t(r)][std::size_t(i)] == '+' ? 1 : -1);
  return s;
}

// Type-II rows, then one hex digit of side mask per face.
inline void write_dimer(std::ostream& os, const DimerConfig& m) {
  const Domain& d = m.domain();
  if (d.anchor() != SiteCoord{0, 0}) throw InvalidDomain("snapshots are written for anchored tori");
  os << "dimer torus " << d.width() << ' ' << d.height() << '\n';
  write_grid_rows(os, d.width(), d.height(), [&](int x, int y) { return m.type2.get({x, y}) ? '1' : '0'; });
  write_grid_rows(os, d.width(), d.height(), [&](int x, int y) { return "0123456789abcdef"[m.sides_at({x, y})]; });
}

inline DimerConfig read_dimer(std::istream& is) {
  GridHeader h = read_grid_header(is, "dimer");
  if (h.kind != DomainKind::Torus) throw ParseError("dimer snapshots are toroidal");
  Domain d = make_domain(h.kind, h.width, h.height);
  auto bits = read_grid_rows(is, h.width, h.height, "01", false);
  auto masks = read_grid_rows(is, h.width, h.height, "0123456789abcdef");
  DimerConfig m{SiteConfig(d), std::vector<std::uint8_t>(d.face_count(), 0)};
  for (int r = 0; r < h.height; ++r)
    for (int x = 0; x < h.width; ++x) {
      int y = h.height - 1 - r;
      m.type2.set({x, y}, bits[std::size_t(r)][std::size_t(x)] == '1');
      char c = masks[std::size_t(r)][std::size_t(x)];
      m.sides[d.face_index({x, y})] = std::uint8_t(c <= '9' ? c - '0' : c - 'a' + 10);
    }
  if (!is_perfect_matching(m)) throw ParseError("snapshot is not a perfect matching");
  return m;
}

}  // namespace cperc
