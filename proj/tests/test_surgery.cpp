#include <gtest/gtest.h>

#include <map>
#include <set>

#include "cperc/rng.hpp"
#include "cperc/surgery.hpp"
#include "cperc/topology.hpp"

using namespace cperc;

namespace {

// Independent check of a B*_{3,3} completion from the 4x4 grid of dual states, indexed g[i+2][j+2].
struct B33Oracle {
  int odd_inner = 0;
  bool crossings_joined = true;
  bool s_joined = true;
};

B33Oracle oracle_b33(const std::array<std::array<std::uint8_t, 4>, 4>& g) {
  auto val = [&](int i, int j) -> int {
    if (i < -2 || i > 1 || j < -2 || j > 1) return -1;
    return g[std::size_t(i + 2)][std::size_t(j + 2)];
  };
  // Vertex (a,b) has the four dual sites (a-1,b-1), (a,b-1), (a-1,b), (a,b) around it.
  auto right = [&](int a, int b) { return val(a, b - 1) >= 0 && val(a, b) >= 0 && val(a, b - 1) != val(a, b); };
  auto up = [&](int a, int b) { return val(a - 1, b) >= 0 && val(a, b) >= 0 && val(a - 1, b) != val(a, b); };
  std::map<std::pair<int, int>, int> id;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) id[{a, b}] = int(id.size());
  std::vector<int> parent(id.size());
  for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = int(k);
  auto find = [&](int x) {
    while (parent[std::size_t(x)] != x) x = parent[std::size_t(x)];
    return x;
  };
  auto join = [&](std::pair<int, int> p, std::pair<int, int> q) { parent[std::size_t(find(id[p]))] = find(id[q]); };
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      if (a < 2 && right(a, b)) join({a, b}, {a + 1, b});
      if (b < 2 && up(a, b)) join({a, b}, {a, b + 1});
    }
  B33Oracle r;
  std::set<int> roots;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      int deg = right(a, b) + right(a - 1, b) + up(a, b) + up(a, b - 1);
      r.odd_inner += deg & 1;
      if (a == -1 && right(-2, b)) roots.insert(find(id[{a, b}]));
      if (a == 1 && right(1, b)) roots.insert(find(id[{a, b}]));
      if (b == -1 && up(a, -2)) roots.insert(find(id[{a, b}]));
      if (b == 1 && up(a, 1)) roots.insert(find(id[{a, b}]));
    }
  r.crossings_joined = roots.size() <= 1;
  std::set<int> sroots;
  for (auto [a, b] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{-1, 0}, std::pair{0, -1}}) {
    int deg = right(a, b) + right(a - 1, b) + up(a, b) + up(a, b - 1);
    if (deg == 0) r.s_joined = false;
    sroots.insert(find(id[{a, b}]));
  }
  if (sroots.size() != 1) r.s_joined = false;
  if (!roots.empty() && sroots.size() == 1 && *roots.begin() != *sroots.begin()) r.s_joined = false;
  return r;
}

Ring12 ring_of(unsigned bits) {
  Ring12 r{};
  for (std::size_t k = 0; k < 12; ++k) r[k] = std::uint8_t((bits >> k) & 1);
  return r;
}

const Domain kBox20 = Domain::planar_box(20, 20, {-10, -9});

PrimalContours random_primal(Rng& rng) { return primal_from_contours(phi(random_valid_config(kBox20, rng, 4))); }

}  // namespace

TEST(SurgeryBox, OriginFaceAndGrowth) {
  SurgeryBox b(3, 3);
  // L2 face (i,j) spans [2i+1/2, 2i+5/2] x [2j+3/2, 2j+7/2]; the origin lies in face (-1,-1).
  auto contains_origin = [](int i, int j) { return 2 * i + 0.5 < 0 && 0 < 2 * i + 2.5 && 2 * j + 1.5 < 0 && 0 < 2 * j + 3.5; };
  EXPECT_TRUE(contains_origin(-1, -1));
  EXPECT_EQ(b.face_col_min(), -2);
  EXPECT_EQ(b.face_col_max(), 0);
  EXPECT_EQ(b.face_row_min(), -2);
  EXPECT_EQ(b.face_row_max(), 0);
  EXPECT_EQ(b.ring().size(), 12u);
  EXPECT_EQ(b.inner_sites().size(), 4u);
  EXPECT_EQ(b.crossing_edges().size(), 12u);
  EXPECT_EQ(b.inner_edges().size(), 12u);
  // Columns grow right then left; rows grow bottom then top.
  SurgeryBox c4(3, 4), c5(3, 5), r4(4, 3), r5(5, 3);
  EXPECT_EQ(c4.face_col_max(), 1);
  EXPECT_EQ(c4.face_col_min(), -2);
  EXPECT_EQ(c5.face_col_min(), -3);
  EXPECT_EQ(r4.face_row_min(), -3);
  EXPECT_EQ(r4.face_row_max(), 0);
  EXPECT_EQ(r5.face_row_max(), 1);
  EXPECT_THROW(SurgeryBox(2, 3), BoxTooSmall);
}

TEST(SurgeryBox, RingWalksAdjacentSites) {
  for (auto [m, n] : {std::pair{3, 3}, std::pair{4, 7}, std::pair{9, 9}}) {
    SurgeryBox b(m, n);
    auto r = b.ring();
    EXPECT_EQ(r.size(), b.dual_sites().size() - b.inner_sites().size());
    std::set<std::pair<L1Vertex, L1Vertex>> crossing;
    for (auto e : b.crossing_edges()) crossing.insert(std::minmax(e.first, e.second));
    for (std::size_t k = 0; k < r.size(); ++k) {
      auto d = r[(k + 1) % r.size()] - r[k];
      EXPECT_EQ(std::abs(d.a) + std::abs(d.b), 1);
      auto e = SurgeryBox::separating_edge(r[k], r[(k + 1) % r.size()]);
      EXPECT_TRUE(crossing.count(std::minmax(e.first, e.second)));
    }
  }
}

TEST(ExtendB33, AllBoundaryCasesSatisfyPost) {
  std::size_t even = 0;
  for (unsigned bits = 0; bits < 4096; ++bits) {
    Ring12 rho = ring_of(bits);
    auto inner = extend_b33(rho);
    auto lib = check_b33(rho, inner);
    EXPECT_TRUE(lib.empty()) << bits << ": " << (lib.empty() ? "" : lib.front());
    auto o = oracle_b33(b33_sites(rho, inner));
    EXPECT_EQ(o.odd_inner, 0) << bits;
    EXPECT_TRUE(o.crossings_joined) << bits;
    EXPECT_TRUE(o.s_joined) << bits;
    ++even;
  }
  EXPECT_EQ(even, 4096u);
}

TEST(ExtendB33, FourDoubleCorners) {
  Ring12 rho{};
  auto ring = B33::box().ring();
  for (auto u : B33::u)
    for (std::size_t k = 0; k < 12; ++k)
      if (ring[k] == u) rho[k] = 1;
  auto ca = analyze_corners(rho);
  EXPECT_EQ(ca.k, 4);
  auto inner = extend_b33(rho);
  EXPECT_TRUE(check_b33(rho, inner).empty());
  auto pc = b33_contours(rho, inner);
  for (auto v : B33::v) EXPECT_EQ(pc.degree(v), 4);
}

TEST(ExtendB33, UniformBoundaryGivesCheckerboard) {
  for (std::uint8_t s : {0, 1}) {
    Ring12 rho;
    rho.fill(s);
    auto inner = extend_b33(rho);
    EXPECT_EQ(inner[3], 0);  // the inner site nearest the origin
    EXPECT_NE(inner[0], inner[1]);
    EXPECT_EQ(inner[0], inner[2]);
    EXPECT_EQ(inner[1], inner[3]);
    EXPECT_EQ(b33_contours(rho, inner).degree({0, 0}), 4);
  }
}

TEST(ExtendB33, DoubleCornerOppositeState) {
  for (unsigned bits = 0; bits < 4096; ++bits) {
    Ring12 rho = ring_of(bits);
    auto ca = analyze_corners(rho);
    auto inner = extend_b33(rho);
    for (std::size_t i = 0; i < 4; ++i) {
      if (ca.kind[i] != CornerKind::Double) continue;
      for (std::size_t k = 0; k < 12; ++k)
        if (B33::box().ring()[k] == B33::u[i]) {
          EXPECT_EQ(inner[i], rho[k]);
        }
    }
  }
}

TEST(ExtendB33, SkippingOppositeRuleIsCaught) {
  std::size_t caught = 0;
  for (unsigned bits = 0; bits < 4096; ++bits) {
    Ring12 rho = ring_of(bits);
    caught += !check_b33(rho, extend_b33(rho, ExtendOptions{false})).empty();
  }
  EXPECT_GT(caught, 0u);
}

TEST(ExtendB33, OddBoundaryRejected) {
  auto pc = B33::box().empty_contours();
  pc.set_edge({1, 1}, {2, 1}, true);
  EXPECT_THROW(extend_b33(pc), OddBoundaryParity);
  EXPECT_THROW(merge_box(pc, B33::box()), OddBoundaryParity);
}

TEST(BoundaryCrossing, Examples) {
  SurgeryBox b(5, 5);
  auto pc = PrimalContours(b.window_lo(), b.window_hi());
  EXPECT_EQ(boundary_crossing_parity(pc, b).count, 0u);
  // Unit square straddling the bottom side.
  pc.toggle_face({0, b.face_row_min()});
  auto cp = boundary_crossing_parity(pc, b);
  EXPECT_EQ(cp.count, 2u);
  EXPECT_FALSE(cp.odd);
}

TEST(BoundaryCrossing, EvenForValidConfigs) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    auto pc = random_primal(rng);
    for (auto [m, n] : {std::pair{3, 3}, std::pair{4, 5}, std::pair{9, 9}, std::pair{6, 8}})
      EXPECT_FALSE(boundary_crossing_parity(pc, SurgeryBox(m, n)).odd);
  }
}

TEST(PrimalContours, RoundTripThroughContourConfig) {
  Rng rng(5);
  auto c = random_valid_config(kBox20, rng, 3);
  auto cc = phi(c);
  auto pc = primal_from_contours(cc);
  EXPECT_EQ(contours_from_primal(pc, kBox20), cc.restricted(Grid::L1));
}

TEST(MergeBox, ThreeByThreeIsExtension) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto pc = random_primal(rng);
    auto ext = pc;
    extend_b33(ext);
    EXPECT_EQ(merge_box(pc, B33::box()), ext);
  }
}

TEST(MergeBox, JoinsTwoSeparateCrossingContours) {
  SurgeryBox box(5, 5);
  PrimalContours pc = PrimalContours({-10, -10}, {10, 10});
  pc.toggle_face({0, box.face_row_min()});
  pc.toggle_face({0, box.face_row_max() + 1});
  auto before = extract_contours(contours_from_primal(pc, kBox20));
  EXPECT_EQ(before.contours.size(), 2u);
  auto after = merge_box(pc, box);
  EXPECT_TRUE(check_merge(pc, after, box).empty());
  auto cs = extract_contours(contours_from_primal(after, kBox20));
  std::set<int> ids;
  for (auto& [u, v] : box.crossing_edges())
    if (after.edge(u, v)) ids.insert(cs.contour_of(l1_edge_id(std::min(u, v), u.b == v.b)));
  EXPECT_EQ(ids.size(), 1u);
}

// Joining the two strip ends along the strip isolates them when nothing else crosses the strip.
TEST(MergeBox, StripEndsWithoutOutwardCrossing) {
  SurgeryBox big(3, 4);  // the last column sits on the right
  auto pc = PrimalContours(big.window_lo(), big.window_hi());
  L1Vertex lo = big.interior_lo(), hi = big.interior_hi();
  L1Vertex p{hi.a, hi.b}, q{hi.a, lo.b};
  pc.set_edge(p, p + L1Vertex{0, 1}, true);
  pc.set_edge(q, q - L1Vertex{0, 1}, true);
  pc.set_edge({lo.a, lo.b}, {lo.a - 1, lo.b}, true);
  pc.set_edge({lo.a, hi.b}, {lo.a - 1, hi.b}, true);

  auto literal = pc;
  for (auto& [u, v] : big.inner_edges()) literal.set_edge(u, v, false);
  for (int b = lo.b; b < hi.b; ++b) literal.set_edge({hi.a, b}, {hi.a, b + 1}, true);
  extend_b33(literal);
  EXPECT_FALSE(check_merge(pc, literal, big).empty());

  auto merged = merge_box(pc, big);
  EXPECT_TRUE(check_merge(pc, merged, big).empty());
}

TEST(MergeBox, RandomConfigsNineByNine) {
  SurgeryBox box(9, 9);
  Rng rng(2024);
  std::size_t crossings = 0, split = 0;
  for (int t = 0; t < 200; ++t) {
    auto pc = random_primal(rng);
    crossings += boundary_crossing_parity(pc, box).count;
    split += !check_merge(pc, pc, box).empty();
    auto out = merge_box(pc, box);
    auto f = check_merge(pc, out, box);
    ASSERT_TRUE(f.empty()) << t << ": " << f.front();
    // Locality checked independently on the ContourConfig view.
    auto a = contours_from_primal(pc, kBox20), b = contours_from_primal(out, kBox20);
    for (const auto& e : enumerate_contour_edges(kBox20)) {
      if (e.grid() != Grid::L1) continue;
      auto ends = e.endpoint_faces();
      auto vtx = [](SiteCoord w) { return L1Vertex{(w.x + 1) / 2, w.y / 2}; };
      bool inside = box.interior(vtx(ends[0])) && box.interior(vtx(ends[1]));
      if (!inside) {
        EXPECT_EQ(a.present(e), b.present(e));
      }
    }
    auto again = merge_box(out, box);
    EXPECT_TRUE(check_merge(out, again, box).empty());
  }
  // The inputs must actually need merging for the trials to mean anything.
  EXPECT_GT(crossings, 200u);
  EXPECT_GT(split, 20u);
}

TEST(MergeBox, MixedShapes) {
  Rng rng(77);
  for (auto [m, n] : {std::pair{3, 4}, std::pair{4, 3}, std::pair{5, 8}, std::pair{8, 5}, std::pair{7, 6}}) {
    SurgeryBox box(m, n);
    for (int t = 0; t < 40; ++t) {
      auto pc = random_primal(rng);
      auto out = merge_box(pc, box);
      auto f = check_merge(pc, out, box);
      EXPECT_TRUE(f.empty()) << m << "x" << n << ": " << (f.empty() ? "" : f.front());
    }
  }
}

TEST(MergeBox, WindowTooSmall) {
  EXPECT_THROW(merge_box(B33::box().empty_contours(), SurgeryBox(5, 5)), InvalidInput);
}

TEST(FaceFlip, IdentityAndSingle) {
  const auto& box = B33::box();
  Ring12 rho = ring_of(0b000111000111);
  Inner4 x{1, 0, 1, 1}, y = x;
  auto a = b33_contours(rho, x);
  auto same = face_flip_reachability(a, a, box);
  ASSERT_TRUE(same);
  EXPECT_TRUE(same->empty());
  y[2] ^= 1;
  auto b = b33_contours(rho, y);
  auto one = face_flip_reachability(a, b, box);
  ASSERT_TRUE(one);
  ASSERT_EQ(one->size(), 1u);
  EXPECT_EQ(one->front(), B33::w[2]);
}

TEST(FaceFlip, ExhaustiveSameBoundaryPairs) {
  const auto& box = B33::box();
  for (unsigned bits = 0; bits < 4096; bits += 7) {
    Ring12 rho = ring_of(bits);
    for (unsigned x = 0; x < 16; ++x)
      for (unsigned y = 0; y < 16; ++y) {
        Inner4 ix{}, iy{};
        for (std::size_t k = 0; k < 4; ++k) {
          ix[k] = std::uint8_t((x >> k) & 1);
          iy[k] = std::uint8_t((y >> k) & 1);
        }
        auto a = b33_contours(rho, ix), b = b33_contours(rho, iy);
        auto seq = face_flip_reachability(a, b, box);
        ASSERT_TRUE(seq);
        EXPECT_EQ(int(seq->size()), std::popcount(x ^ y));
        EXPECT_EQ(apply_face_flips(a, *seq), b);
      }
  }
}

TEST(FaceFlip, RandomLargeBox) {
  SurgeryBox box(9, 9);
  Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    auto a = random_primal(rng);
    auto b = a;
    for (int k = 0; k < 10; ++k) {
      auto inner = box.inner_sites();
      b.toggle_face(inner[rng.below(inner.size())]);
    }
    auto seq = face_flip_reachability(a, b, box);
    ASSERT_TRUE(seq);
    EXPECT_EQ(apply_face_flips(a, *seq), b);
  }
}

TEST(FaceFlip, Preconditions) {
  const auto& box = B33::box();
  auto a = box.empty_contours(), b = a;
  b.toggle_face({-2, -1});  // ring face, changes two crossing edges
  EXPECT_THROW(face_flip_reachability(a, b, box), PreconditionViolated);
  auto odd = a;
  odd.set_edge({0, 0}, {1, 0}, true);
  EXPECT_FALSE(face_flip_reachability(a, odd, box));
}
