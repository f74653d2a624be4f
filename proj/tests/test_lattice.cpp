#include <gtest/gtest.h>

#include <sstream>

#include "cascade/lattice.hpp"

using namespace cascade;

TEST(Eigenvalue, Examples) {
  EXPECT_EQ(eigenvalue(Mode{3, 4}, 2.0), 73.0);
  EXPECT_EQ(eigenvalue(Mode{5, 0}, 1.2345), 25.0);
  EXPECT_EQ(eigenvalue(Mode{0, 2}, Rational(3, 2)), Rational(9));
  EXPECT_EQ(eigenvalue(Mode{1, 1}, Rational(3, 2)), Rational(13, 4));
}

TEST(Eigenvalue, ExactAgreesWithFloat) {
  SplitMix64 rng(11);
  for (int t = 0; t < 20000; ++t) {
    const std::int64_t q = rng.uniform_int(1, 1000);
    const std::int64_t p = rng.uniform_int(q, 3 * q);
    const Mode n{rng.uniform_int(-10000, 10000), rng.uniform_int(-10000, 10000)};
    const Rational w(p, q);
    const double exact = eigenvalue(n, w).to_double();
    const double fl = eigenvalue(n, static_cast<double>(p) / static_cast<double>(q));
    if (exact == 0.0) {
      EXPECT_EQ(fl, 0.0);
    } else {
      EXPECT_LE(std::fabs(exact - fl) / std::fabs(exact), 1e-12);
    }
  }
}

TEST(Potential, Kinds) {
  EXPECT_EQ(potential_coeff(PotentialSpec::zero(), Mode{3, 4}), 0.0);
  const auto v = PotentialSpec::decay(1.0, 2.0, 5);
  EXPECT_DOUBLE_EQ(std::fabs(potential_coeff(v, Mode{3, 4})), 1.0 / 25.0);
  EXPECT_DOUBLE_EQ(std::fabs(potential_coeff(PotentialSpec::decay(0.7, 3.0, 1), Mode{0, 0})), 0.7);
  PotentialSpec t;
  t.kind = PotentialSpec::Kind::Table;
  t.table[{1, 2}] = 0.25;
  EXPECT_EQ(potential_coeff(t, Mode{1, 2}), 0.25);
  EXPECT_EQ(potential_coeff(t, Mode{2, 1}), 0.0);
}

TEST(Potential, DecayBoundAndSignsReproducible) {
  const auto v = PotentialSpec::decay(2.0, 1.5, 42);
  int neg = 0, total = 0;
  for (int j = -30; j <= 30; ++j) {
    for (int k = -30; k <= 30; ++k) {
      const Mode n{j, k};
      const double c = potential_coeff(v, n);
      EXPECT_LE(std::fabs(c), 2.0 * std::pow(bracket(n), -1.5) * (1 + 1e-15));
      EXPECT_EQ(c, potential_coeff(v, n));
      neg += c < 0;
      ++total;
    }
  }
  // both signs occur
  EXPECT_GT(neg, total / 4);
  EXPECT_LT(neg, 3 * total / 4);
}

TEST(Norms, Examples) {
  FourierState z;
  z.set({1, 0}, 1.0);
  auto r = norms(z, 2.0);
  EXPECT_DOUBLE_EQ(r.h_s, 1.0);
  EXPECT_DOUBLE_EQ(r.l1, 1.0);
  EXPECT_DOUBLE_EQ(r.mass, 1.0);
  EXPECT_DOUBLE_EQ(r.momentum[0], 1.0);
  EXPECT_DOUBLE_EQ(r.momentum[1], 0.0);

  auto e = norms(FourierState{}, 1.0);
  EXPECT_EQ(e.h_s, 0.0);
  EXPECT_EQ(e.l1, 0.0);
  EXPECT_EQ(e.mass, 0.0);

  FourierState w;
  w.set({1, 0}, 1.0 / std::sqrt(2.0));
  w.set({0, 1}, 1.0 / std::sqrt(2.0));
  auto n = norms(w, 0.0);
  EXPECT_NEAR(n.mass, 1.0, 1e-15);
  EXPECT_NEAR(n.l1, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(n.h_s, std::sqrt(n.mass), 1e-15);
}

TEST(Norms, HsWeights) {
  FourierState z;
  z.set({3, 4}, cplx{0, 2});
  // |z|^2 <n>^{2s} = 4 * 25^s
  EXPECT_NEAR(norms(z, 1.5).h_s, std::sqrt(4.0 * std::pow(25.0, 1.5)), 1e-12);
}

TEST(Gauge, PreservesNormsAndInverts) {
  std::vector<Mode> modes{{0, 0}, {1, 2}, {-3, 1}, {2, -2}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = random_state(modes, 0.3, seed);
    EXPECT_EQ(gauge(z, 0.0, 1).map(), z.map());
    const auto g = gauge(z, 1.7, 1);
    const auto a = norms(z, 2.0), b = norms(g, 2.0);
    EXPECT_NEAR(a.h_s, b.h_s, 1e-15);
    EXPECT_NEAR(a.mass, b.mass, 1e-15);
    EXPECT_NEAR(a.momentum[0], b.momentum[0], 1e-15);
    const auto back = gauge(g, 1.7, -1);
    for (const auto& [n, v] : z) EXPECT_NEAR(std::abs(back[n] - v), 0.0, 1e-15);
  }
  EXPECT_THROW(gauge(FourierState{}, 1.0, 0), Error);
}

TEST(Convolution, L1Submultiplicative) {
  SplitMix64 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<Mode> a, b;
    for (int i = 0; i < 6; ++i) a.push_back({rng.uniform_int(-5, 5), rng.uniform_int(-5, 5)});
    for (int i = 0; i < 6; ++i) b.push_back({rng.uniform_int(-5, 5), rng.uniform_int(-5, 5)});
    const auto z = random_state(a, 1.3, t), w = random_state(b, 0.7, t + 100);
    EXPECT_LE(l1_norm(convolve(z, w)), l1_norm(z) * l1_norm(w) * (1 + 1e-14));
  }
  FourierState d1, d2;
  d1.set({1, 0}, 2.0);
  d2.set({0, 1}, 3.0);
  const Mode m11{1, 1};
  EXPECT_EQ(convolve(d1, d2)[m11], cplx(6.0));
}

TEST(StateIO, RoundTripIsBitExactAndOrdered) {
  const auto z = random_state({{2, 1}, {-1, 5}, {0, 0}, {-1, -7}}, 0.9, 8);
  std::stringstream ss;
  write_state(ss, z);
  const std::string text = ss.str();
  EXPECT_LT(text.find("\"j\":-1,\"k\":-7"), text.find("\"j\":-1,\"k\":5"));
  EXPECT_LT(text.find("\"j\":-1,\"k\":5"), text.find("\"j\":0,\"k\":0"));
  const auto back = read_state(ss);
  EXPECT_EQ(back.map(), z.map());
  std::stringstream again;
  write_state(again, back);
  EXPECT_EQ(again.str(), text);
}

TEST(StateIO, RejectsBadLines) {
  std::stringstream a("{\"j\":1,\"k\":2}\n");
  EXPECT_THROW(read_state(a), Error);
  std::stringstream b("{\"j\":1,\"k\":2,\"re\":1,\"im\":0}\n{\"j\":1,\"k\":2,\"re\":1,\"im\":0}\n");
  EXPECT_THROW(read_state(b), Error);
}
