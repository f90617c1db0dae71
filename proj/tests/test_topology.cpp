#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "cperc/topology.hpp"

using namespace cperc;

namespace {

SiteConfig checkerboard(const Domain& d) {
  SiteConfig c(d);
  for (std::size_t i = 0; i < d.site_count(); ++i) {
    SiteCoord s = d.site(i);
    c.set_at(i, ((s.x + s.y) % 2 + 2) % 2 == 1);
  }
  return c;
}

SiteConfig random_bits(const Domain& d, Rng& rng) {
  SiteConfig c(d);
  for (std::size_t i = 0; i < d.site_count(); ++i) c.set_at(i, rng.bit());
  return c;
}

std::set<QuarterEdgeId> edge_set(const Interface& itf) {
  std::set<QuarterEdgeId> s;
  for (auto& c : itf.components) s.insert(c.edges.begin(), c.edges.end());
  return s;
}

// Checks the interface statements on one valid configuration; returns the number of failures.
int lemma_failures(const SiteConfig& w) {
  int bad = 0;
  auto cc = phi(w);
  auto cs = extract_contours(cc);
  auto lab = label_clusters(w);
  auto itfs = extract_interfaces(cs);
  for (std::size_t k = 0; k < cs.contours.size(); ++k) {
    const auto& itf = itfs[k];
    if (itf.degree_violations) ++bad;
    if (interface_contour_intersections(cc, itf)) ++bad;
    for (const auto& comp : itf.components) {
      if (comp.kind == InterfaceKind::Path && w.domain().is_torus()) ++bad;
      auto f = interface_fringe(w.domain(), comp);
      if (!check_fringe(w.domain(), comp, f, lab).ok()) ++bad;
    }
  }
  if (separation_mismatches(cc, cc.present_edges())) ++bad;
  return bad;
}

}  // namespace

TEST(Clusters, AllZeroAndCheckerboard) {
  auto d = Domain::planar_box(5, 4);
  auto lab = label_clusters(SiteConfig(d));
  ASSERT_EQ(lab.count(), 1u);
  EXPECT_EQ(lab.clusters[0].size, 20u);
  EXPECT_TRUE(lab.clusters[0].touches_boundary);
  auto cb = label_clusters(checkerboard(d));
  EXPECT_EQ(cb.count(), 20u);
  for (auto& c : cb.clusters) EXPECT_EQ(c.size, 1u);
}

TEST(Clusters, MatchFloodFillAndAdjacencyRule) {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    auto d = k % 2 ? Domain::planar_box(6, 6) : Domain::torus(6, 6);
    auto c = random_bits(d, rng);
    auto lab = label_clusters(c);
    EXPECT_EQ(lab.count(), flood_fill_cluster_count(c));
    std::size_t total = 0;
    for (auto& s : lab.clusters) total += s.size;
    EXPECT_EQ(total, d.site_count());
    for (const auto& g : enumerate_gedges(d))
      EXPECT_EQ(lab.label(g.site) == lab.label(g.other()), c.get(g.site) == c.get(g.other()))
          << "adjacent sites share a label iff states agree";
  }
}

TEST(Clusters, WrapFlags) {
  auto d = Domain::torus(6, 4);
  SiteConfig c(d);
  for (int x = 0; x < 6; ++x) c.set({x, 1}, true);
  auto lab = label_clusters(c);
  EXPECT_TRUE(lab.clusters[std::size_t(lab.label({0, 1}))].wraps);
  SiteConfig blob(d);
  blob.set({2, 2}, true);
  blob.set({3, 2}, true);
  auto lb = label_clusters(blob);
  EXPECT_FALSE(lb.clusters[std::size_t(lb.label({2, 2}))].wraps);
  EXPECT_FALSE(lb.clusters[std::size_t(lb.label({2, 2}))].touches_boundary);
}

TEST(MeanClusterSize, Examples) {
  auto d = Domain::planar_box(4, 4);
  EXPECT_DOUBLE_EQ(mean_cluster_size_estimate({SiteConfig(d)}, {0, 0}), 16.0);
  EXPECT_DOUBLE_EQ(mean_cluster_size_estimate({checkerboard(d)}, {0, 0}), 1.0);
  EXPECT_THROW(mean_cluster_size_estimate({}, {0, 0}), InvalidInput);
}

TEST(Contours, EmptyAndSingleFace) {
  auto d = Domain::planar_box(8, 8);
  EXPECT_TRUE(extract_contours(ContourConfig(d)).contours.empty());
  for (SiteCoord w : {SiteCoord{3, 2}, SiteCoord{4, 3}}) {
    auto c = white_face_flip(SiteConfig(d), FaceId(w));
    auto cs = extract_contours(phi(c));
    ASSERT_EQ(cs.contours.size(), 1u);
    EXPECT_EQ(cs.contours[0].length, 4u);
    EXPECT_FALSE(cs.contours[0].touches_boundary);
    // The four L-edges around a white face lie on the grid whose vertices are the neighbouring white faces.
    Grid g = ((w.x % 2) == 1) ? Grid::L2 : Grid::L1;
    EXPECT_EQ(cs.contours[0].grid, g);
  }
}

TEST(Contours, DegreeFourVertexIsOneContour) {
  auto d = Domain::planar_box(6, 6);
  SiteCoord w{2, 3};
  SiteConfig c(d);
  for (std::size_t i = 0; i < d.site_count(); ++i) {
    SiteCoord s = d.site(i);
    c.set_at(i, (s.x <= w.x) == (s.y <= w.y));
  }
  ASSERT_TRUE(validate(c));
  auto cc = phi(c);
  EXPECT_EQ(cc.degree(w), 4);
  auto cs = extract_contours(cc);
  ASSERT_EQ(cs.contours.size(), 1u);
  EXPECT_EQ(cs.contours[0].length, cc.present_count());
  EXPECT_TRUE(cs.contours[0].touches_boundary);
}

TEST(Contours, GridsNeverMerged) {
  Rng rng(5);
  for (int k = 0; k < 30; ++k) {
    auto c = random_valid_config(Domain::torus(12, 12), rng, 4);
    auto cs = extract_contours(phi(c));
    std::size_t total = 0;
    for (auto& ct : cs.contours) {
      for (auto& e : ct.edges) EXPECT_EQ(e.grid(), ct.grid);
      total += ct.length;
    }
    EXPECT_EQ(total, phi(c).present_count());
  }
}

TEST(Contours, WrappingContourOnTorus) {
  auto d = Domain::torus(6, 4);
  SiteConfig c(d);
  for (int x = 0; x < 6; ++x) {
    c.set({x, 1}, true);
    c.set({x, 2}, true);
  }
  ASSERT_TRUE(validate(c));
  auto cs = extract_contours(phi(c));
  ASSERT_EQ(cs.contours.size(), 2u);
  for (auto& ct : cs.contours) EXPECT_TRUE(ct.wraps);
}

TEST(Interfaces, FlippedFaceHasInnerAndOuterCycle) {
  auto d = Domain::planar_box(8, 8);
  SiteCoord w{3, 2};
  auto c = white_face_flip(SiteConfig(d), FaceId(w));
  auto cc = phi(c);
  auto cs = extract_contours(cc);
  auto itf = extract_interface(d, cs.contours[0].edges);
  ASSERT_EQ(itf.components.size(), 2u);
  EXPECT_EQ(itf.degree_violations, 0u);
  std::set<SiteCoord> flipped = {{3, 2}, {3, 3}, {4, 3}, {4, 2}};
  int inner = 0;
  auto lab = label_clusters(c);
  for (auto& comp : itf.components) {
    EXPECT_EQ(comp.kind, InterfaceKind::Cycle);
    auto f = interface_fringe(d, comp);
    EXPECT_TRUE(check_fringe(d, comp, f, lab).ok());
    if (std::set<SiteCoord>(f.sites.begin(), f.sites.end()) == flipped) ++inner;
  }
  EXPECT_EQ(inner, 1);
  EXPECT_EQ(interface_contour_intersections(cc, itf), 0u);
}

TEST(Interfaces, IntersectionDetectorSeesCrossings) {
  // An interface from one configuration drawn over a contour that cuts it must register hits.
  auto d = Domain::planar_box(8, 8);
  auto c = white_face_flip(SiteConfig(d), FaceId(3, 2));
  auto itf = extract_interface(d, extract_contours(phi(c)).contours[0].edges);
  auto shifted = white_face_flip(SiteConfig(d), FaceId(4, 3));
  EXPECT_GT(interface_contour_intersections(phi(shifted), itf), 0u);
}

TEST(Interfaces, BulkMatchesSingleContourExtraction) {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    auto d = k % 2 ? Domain::torus(10, 8) : Domain::planar_box(9, 10);
    auto c = random_valid_config(d, rng, 3);
    auto cs = extract_contours(phi(c));
    auto bulk = extract_interfaces(cs);
    for (std::size_t i = 0; i < cs.contours.size(); ++i)
      EXPECT_EQ(edge_set(bulk[i]), edge_set(extract_interface(d, cs.contours[i].edges)));
  }
}

TEST(Interfaces, ExhaustiveSmallDomains) {
  std::vector<Domain> ds;
  for (int w = 2; w <= 5; ++w)
    for (int h = 2; h <= 5; ++h) ds.push_back(Domain::planar_box(w, h));
  for (auto [w, h] : std::vector<std::pair<int, int>>{{2, 2}, {4, 4}, {4, 6}, {2, 4}, {6, 4}})
    ds.push_back(Domain::torus(w, h));
  for (const auto& d : ds)
    for (const auto& w : enumerate_omega(d)) EXPECT_EQ(lemma_failures(w), 0) << d.describe() << "\n" << to_text(w);
}

TEST(Interfaces, RandomLargerDomains) {
  Rng rng(23);
  for (int k = 0; k < 60; ++k) {
    auto d = k % 2 ? Domain::torus(16, 12) : Domain::planar_box(15, 13, {-4, 3});
    auto w = random_valid_config(d, rng, std::size_t(1 + k % 6));
    EXPECT_EQ(lemma_failures(w), 0) << to_text(w);
  }
}

TEST(Separation, EachContourAlone) {
  for (auto d : {Domain::planar_box(4, 4), Domain::planar_box(5, 4), Domain::torus(4, 4)})
    for (const auto& w : enumerate_omega(d)) {
      auto cc = phi(w);
      for (auto& ct : extract_contours(cc).contours) EXPECT_EQ(separation_mismatches(cc, ct.edges), 0u);
    }
}

TEST(CrossingParity, Examples) {
  auto d = Domain::planar_box(4, 4);
  SiteConfig zero(d);
  auto r = crossing_parity(zero, {{0, 0}, {1, 0}, {1, 1}});
  EXPECT_EQ(r.count, 0u);
  EXPECT_FALSE(r.parity);
  auto c = white_face_flip(zero, FaceId(1, 2));
  auto q = crossing_parity(c, {{0, 0}, {0, 1}, {1, 1}, {1, 2}});
  EXPECT_TRUE(q.parity);
  EXPECT_EQ(q.count % 2, 1u);
  EXPECT_THROW(crossing_parity(c, {{0, 0}, {1, 1}}), NotAPath);
  EXPECT_THROW(crossing_parity(c, {}), NotAPath);
  EXPECT_THROW(crossing_parity(c, {{0, 0}, {-1, 0}}), NotAPath);
  EXPECT_THROW(crossing_parity(SiteConfig(Domain::torus(4, 4)), {{0, 0}}), TorusUnsupported);
}

TEST(CrossingParity, UncoveredBoundaryEdges) {
  auto d = Domain::planar_box(4, 4);
  SiteConfig c(d);
  c.set({2, 0}, true);
  c.set({3, 0}, true);
  ASSERT_TRUE(validate(c));
  // (1,0)-(2,0) is not a side of any black face inside the box.
  auto r = crossing_parity(c, {{1, 0}, {2, 0}});
  EXPECT_FALSE(r.fully_covered);
  EXPECT_TRUE(r.parity);
  EXPECT_EQ(r.count, 0u);
}

TEST(CrossingParity, AllSimplePathsAgree) {
  auto d = Domain::planar_box(4, 4);
  SiteCoord from{0, 0}, to{3, 2};
  auto om = enumerate_omega(d);
  std::vector<std::vector<SiteCoord>> paths;
  std::vector<SiteCoord> cur{from};
  std::set<SiteCoord> on{from};
  std::function<void()> dfs = [&]() {
    SiteCoord s = cur.back();
    if (s == to) {
      paths.push_back(cur);
      return;
    }
    for (SiteCoord t : {SiteCoord{s.x + 1, s.y}, SiteCoord{s.x - 1, s.y}, SiteCoord{s.x, s.y + 1}, SiteCoord{s.x, s.y - 1}}) {
      if (!d.contains(t) || on.count(t)) continue;
      cur.push_back(t);
      on.insert(t);
      dfs();
      on.erase(t);
      cur.pop_back();
    }
  };
  dfs();
  ASSERT_GT(paths.size(), 100u);
  for (std::size_t k = 0; k < om.size(); k += 7) {
    auto cc = phi(om[k]);
    for (auto& p : paths) {
      auto r = crossing_parity(om[k], cc, p);
      if (r.fully_covered) {
        EXPECT_EQ(r.count % 2 == 1, r.parity);
      }
    }
  }
}

TEST(TwoPoint, ZeroDistanceIsOne) {
  Rng rng(1);
  auto c = random_valid_config(Domain::torus(8, 8), rng, 2);
  auto tau = two_point_connectivity(label_clusters(c), 4);
  EXPECT_DOUBLE_EQ(tau[0], 1.0);
  for (double t : tau) EXPECT_LE(t, 1.0);
}
