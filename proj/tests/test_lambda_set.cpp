#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cascade/lambda_set.hpp"

using namespace cascade;

namespace {

// Independent brute-force oracle over Lambda^4: every momentum relation is
// either trivial or one of the declared families (either role order), and no
// three points span a right angle whose fourth vertex is missing.
bool oracle_passes(const std::vector<Mode>& pts, const std::vector<Quad>& fams, std::int64_t p, std::int64_t q) {
  std::set<Mode> in(pts.begin(), pts.end());
  std::set<std::pair<std::set<Mode>, std::set<Mode>>> fam;
  for (const auto& f : fams) {
    fam.insert({{f[0], f[2]}, {f[1], f[3]}});
    fam.insert({{f[1], f[3]}, {f[0], f[2]}});
  }
  for (const auto& a : pts)
    for (const auto& b : pts)
      for (const auto& c : pts)
        for (const auto& d : pts) {
          if (a - b + c - d != Mode{}) continue;
          if ((a == b && c == d) || (a == d && b == c)) continue;
          if (!fam.count({{a, c}, {b, d}})) return false;
        }
  for (const auto& a : pts)
    for (const auto& b : pts)
      for (const auto& c : pts) {
        if (a == b || b == c) continue;
        const Mode u = a - b, v = b - c;
        const Rational ip = Rational(u.j * v.j, p * p) + Rational(u.k * v.k, q * q);
        if (ip.is_zero() && u.j * v.k - u.k * v.j != 0 && !in.count(a - b + c)) return false;
      }
  return true;
}

PlacedSet n2_example() {
  PlacedSet ps;
  ps.genealogy = build_genealogy(2);
  ps.generations = {{Mode{0, 0}, Mode{2, 2}}, {Mode{2, 0}, Mode{0, 2}}};
  return ps;
}

}  // namespace

TEST(Genealogy, SizesAndFamilies) {
  EXPECT_EQ(build_genealogy(2).size(), 2u);
  EXPECT_EQ(all_families(build_genealogy(2)).size(), 1u);
  EXPECT_EQ(families(build_genealogy(3), 1).size(), 2u);
  EXPECT_EQ(families(build_genealogy(3), 2).size(), 2u);
  EXPECT_EQ(build_genealogy(5).size(), 16u);
  for (int i = 1; i < 5; ++i) EXPECT_EQ(families(build_genealogy(5), i).size(), 8u);
  EXPECT_THROW(build_genealogy(1), Error);
  EXPECT_THROW(build_genealogy(13), Error);
}

TEST(Genealogy, SpouseChildrenParentsAreConsistentAndP4Holds) {
  for (int N = 2; N <= 12; ++N) {
    const auto g = build_genealogy(N);
    for (int i = 1; i < N; ++i) {
      for (std::uint32_t s = 0; s < g.size(); ++s) {
        // enumerate the class of strings agreeing with s off coordinate i
        std::set<std::uint32_t> cls;
        for (std::uint32_t t = 0; t < g.size(); ++t)
          if (((t ^ s) & ~(1u << (i - 1))) == 0) cls.insert(t);
        EXPECT_EQ(cls, (std::set<std::uint32_t>{s, g.spouse(s, i)}));
        EXPECT_NE(g.spouse(s, i), s);
        const auto ch = g.children(s, i);
        EXPECT_EQ(std::set<std::uint32_t>(ch.begin(), ch.end()), cls);
        if (i + 1 < N) {
          EXPECT_NE(g.sibling(s, i), g.spouse(s, i + 1));
        }
      }
    }
  }
}

TEST(Place, SquareChildren) {
  const auto c = rectangle_children(Mode{0, 0}, Mode{2, 2});
  EXPECT_EQ(std::set<Mode>(c.begin(), c.end()), (std::set<Mode>{{2, 0}, {0, 2}}));
  // (0,0),(4,0) is a proper square under the rotation recipe
  const auto d = rectangle_children(Mode{0, 0}, Mode{4, 0});
  EXPECT_TRUE(is_pq_family_shape({Mode{0, 0}, d[0], Mode{4, 0}, d[1]}, 1, 1));
  // coinciding parents give a zero-area rectangle
  const auto z = rectangle_children(Mode{2, 2}, Mode{2, 2});
  EXPECT_FALSE(is_pq_family_shape({Mode{2, 2}, z[0], Mode{2, 2}, z[1]}, 1, 1));
}

TEST(Place, RotatedRectangles) {
  const auto rots = rotations(5);
  EXPECT_EQ(rots.size(), 10u);
  for (const auto& r : rots) {
    const Mode a{30, -10}, b{-20, 40};
    const auto c = rectangle_children(a, b, r);
    EXPECT_TRUE(is_pq_family_shape({a, c[0], b, c[1]}, 1, 1));
  }
}

TEST(Place, N3Seed7Box50) {
  const auto ps = place(build_genealogy(3), 7, 50, 64);
  EXPECT_EQ(ps.all_modes().size(), 12u);
  EXPECT_TRUE(verify_properties(ps).passed());
  EXPECT_TRUE(oracle_passes(ps.all_modes(), ps.family_quads(), 1, 1));
}

TEST(Place, DeterministicAndOracleAgrees) {
  for (int N = 2; N <= 4; ++N) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = place(build_genealogy(N), seed, 40, 64);
      const auto b = place(build_genealogy(N), seed, 40, 64);
      EXPECT_EQ(a.generations, b.generations);
      EXPECT_TRUE(oracle_passes(a.all_modes(), a.family_quads(), 1, 1)) << N << " " << seed;
    }
  }
}

TEST(Place, FailsWhenImpossible) {
  // box 1 with hypotenuse 1: every set of 4 first-generation points in {-1,0,1}^2 x 2
  PlaceOptions o;
  o.box = 1;
  o.retries = 3;
  o.hypotenuse = 1;
  try {
    place(build_genealogy(4), 0, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PlacementFailed);
  }
}

TEST(Place, CenterAndSpread) {
  PlaceOptions o;
  o.box = 30;
  o.center = {100000, 70000};
  o.max_spread = 1.5;
  const auto ps = place(build_genealogy(3), 2, o);
  EXPECT_TRUE(verify_properties(ps).passed());
  const auto st = stats(ps, 1.0, 1.0);
  double lo = 1e300, hi = 0;
  for (const auto& [a, b] : st.modulus_range) {
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  EXPECT_LE(hi / lo, 1.5);
}

TEST(Verify, Examples) {
  EXPECT_TRUE(verify_properties(n2_example()).passed());
  auto rogue = n2_example();
  rogue.extra.push_back({4, 2});
  const auto rep = verify_properties(rogue);
  EXPECT_TRUE(rep.has("P1'") || rep.has("P6'"));
  EXPECT_TRUE(verify_relations({Mode{3, 7}}, {}).passed());
}

TEST(Verify, RoguePointsAlwaysDetected) {
  SplitMix64 rng(99);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto ps = place(build_genealogy(3), seed, 50, 64);
    ASSERT_TRUE(verify_properties(ps).passed());
    // appended to the set
    auto a = ps;
    a.extra.push_back({rng.uniform_int(-2000, 2000), rng.uniform_int(-2000, 2000)});
    EXPECT_FALSE(verify_properties(a).passed());
    // appended inside a generation
    auto b = ps;
    b.generations[1].push_back({rng.uniform_int(-2000, 2000), rng.uniform_int(-2000, 2000)});
    EXPECT_FALSE(verify_properties(b).passed());
    // an existing point moved
    auto c = ps;
    c.generations[2][1] = c.generations[2][1] + Mode{1, 0};
    EXPECT_FALSE(verify_properties(c).passed());
  }
}

TEST(Verify, OrderIndependentAndIdempotent) {
  const auto ps = place(build_genealogy(3), 4, 50, 64);
  auto modes = ps.all_modes();
  modes.push_back(modes[0] - modes[1] + modes[5] + Mode{0, 0});
  auto canon = [](const PropertyReport& r) {
    std::multiset<std::pair<std::string, std::vector<Mode>>> out;
    for (const auto& v : r.violations) out.insert({v.property, v.witness});
    return out;
  };
  const auto r1 = verify_relations(modes, ps.family_quads());
  const auto r2 = verify_relations(modes, ps.family_quads());
  std::reverse(modes.begin(), modes.end());
  const auto r3 = verify_relations(modes, ps.family_quads());
  EXPECT_EQ(canon(r1), canon(r2));
  EXPECT_EQ(canon(r1), canon(r3));
}

TEST(Scale, Examples) {
  PlacedSet ps;
  ps.genealogy = build_genealogy(2);
  ps.generations = {{Mode{0, 0}, Mode{2, 0}}, {Mode{1, 1}, Mode{1, -1}}};
  const auto s = scale(ps, {3, 2});
  EXPECT_EQ(s.generations[0], (std::vector<Mode>{{0, 0}, {6, 0}}));
  EXPECT_EQ(s.generations[1], (std::vector<Mode>{{3, 2}, {3, -2}}));
  // <B^-2((0,0)-(3,2)), (3,2)-(6,0)> = 9/9 - 4/4 = 0
  const Rational ip = Rational(-3 * -3, 9) + Rational(-2 * 2, 4);
  EXPECT_TRUE(ip.is_zero());
  for (const auto& f : s.family_quads()) EXPECT_TRUE(is_pq_family_shape(f, 3, 2));
  EXPECT_TRUE(verify_properties(s).passed());

  PlacedSet axis;
  axis.genealogy = build_genealogy(2);
  axis.generations = {{Mode{0, 0}, Mode{1, 1}}, {Mode{1, 0}, Mode{0, 1}}};
  const auto sa = scale(axis, {3, 2});
  EXPECT_EQ(sa.generations[1], (std::vector<Mode>{{3, 0}, {0, 2}}));
  EXPECT_EQ(scale(axis, {1, 1}).generations, axis.generations);
  EXPECT_THROW(scale(sa, {3, 2}), Error);
}

TEST(Scale, PlacedSetsStayFamiliesAndLatticeMembership) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ps = place(build_genealogy(3), seed, 50, 64);
    const auto s = scale(ps, {17, 12});
    for (const auto& m : s.all_modes()) {
      EXPECT_EQ(m.j % 17, 0);
      EXPECT_EQ(m.k % 12, 0);
    }
    EXPECT_TRUE(verify_properties(s).passed());
    EXPECT_TRUE(oracle_passes(s.all_modes(), s.family_quads(), 17, 12));
  }
}

TEST(Stats, Examples) {
  const auto ps = n2_example();
  auto st = stats(ps, 1.0);
  EXPECT_DOUBLE_EQ(st.S[0], 8.0);
  EXPECT_DOUBLE_EQ(st.S[1], 8.0);
  const auto s = scale(ps, {3, 2});
  // recompute by enumeration
  double S2 = 0;
  for (const auto& m : s.generations[1]) S2 += double(m.j * m.j + m.k * m.k);
  EXPECT_DOUBLE_EQ(stats(s, 1.0).S[1], S2);
  EXPECT_DOUBLE_EQ(S2, 36.0 + 16.0);
  const auto p4 = place(build_genealogy(4), 1, 50, 64);
  for (double v : stats(p4, 0.0).S) EXPECT_EQ(v, 8.0);
}

TEST(Stats, ScaledWithinBracket) {
  for (double s_exp : {0.5, 1.0, 1.7}) {
    const auto ps = place(build_genealogy(4), 3, 50, 64);
    const auto st = stats(ps, s_exp);
    const auto sc = stats(scale(ps, {7, 5}), s_exp);
    for (std::size_t i = 0; i < st.S.size(); ++i) {
      EXPECT_GE(sc.S[i], std::pow(5.0, 2 * s_exp) * st.S[i] * (1 - 1e-12));
      EXPECT_LE(sc.S[i], std::pow(7.0, 2 * s_exp) * st.S[i] * (1 + 1e-12));
    }
  }
}

TEST(Stats, UnitExponentIsConstantAcrossGenerations) {
  // rectangles preserve |a|^2 + |b|^2 (equal diagonals)
  const auto ps = place(build_genealogy(4), 5, 50, 64);
  const auto st = stats(ps, 1.0);
  for (double v : st.S) EXPECT_DOUBLE_EQ(v, st.S[0]);
}

TEST(LambdaJson, RoundTrip) {
  const auto ps = scale(place(build_genealogy(3), 7, 50, 64), {3, 2});
  const auto j = to_json(ps);
  const auto back = placed_set_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.generations, ps.generations);
  EXPECT_EQ(back.p, 3);
  EXPECT_EQ(back.q, 2);
  EXPECT_TRUE(verify_properties(back).passed());
  EXPECT_THROW(placed_set_from_json(nlohmann::json::parse("{\"N\":3}")), Error);
}
