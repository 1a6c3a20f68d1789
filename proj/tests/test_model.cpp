#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "recontree/model.hpp"
#include "recontree/serialize.hpp"
#include "support/oracles.hpp"

using namespace recontree;

TEST_CASE("colouring channel entries") {
  auto c3 = colouring_channel(3);
  CHECK(c3.k == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(c3(i, i) == 0.0);
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(c3(i, j) == doctest::Approx(0.5));
  }
  auto c2 = colouring_channel(2);
  CHECK(c2(0, 0) == 0.0);
  CHECK(c2(0, 1) == 1.0);
  CHECK(c2(1, 0) == 1.0);
  auto c5 = colouring_channel(5);
  CHECK(c5(2, 4) == doctest::Approx(0.25));
  CHECK(c5(2, 2) == 0.0);
  CHECK_THROWS_AS(colouring_channel(1), std::invalid_argument);
}

TEST_CASE("colouring channel is symmetric and doubly stochastic for k in [2,64]") {
  for (int k = 2; k <= 64; ++k) {
    auto ch = colouring_channel(k);
    for (int j = 0; j < k; ++j) {
      double col = 0.0;
      for (int i = 0; i < k; ++i) {
        col += ch(i, j);
        CHECK(ch(i, j) == ch(j, i));
      }
      CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("bsc channel") {
  auto ch = bsc_channel(0.25);
  CHECK(ch(0, 0) == doctest::Approx(0.75));
  CHECK(ch(0, 1) == doctest::Approx(0.25));
  auto ch2 = bsc_channel(0.1);
  CHECK(ch2(1, 1) == doctest::Approx(0.9));
  CHECK_THROWS_AS(bsc_channel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(bsc_channel(0.5), std::invalid_argument);
  CHECK_THROWS_AS(bsc_channel(-0.1), std::invalid_argument);
}

TEST_CASE("channel_from_matrix validation") {
  CHECK_NOTHROW(channel_from_matrix(2, {0.3, 0.7, 0.6, 0.4}));
  CHECK_THROWS_AS(channel_from_matrix(2, {0.3, 0.6, 0.6, 0.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(channel_from_matrix(2, {1.2, -0.2, 0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("second eigenvalue closed forms") {
  CHECK(second_eigenvalue(bsc_channel(0.25)) == doctest::Approx(0.5));
  CHECK(second_eigenvalue(colouring_channel(3)) == doctest::Approx(-0.5));
  for (int k = 2; k <= 64; ++k)
    CHECK(std::fabs(second_eigenvalue(colouring_channel(k)) + 1.0 / (k - 1)) <
          1e-10);
}

TEST_CASE("general eigensolver path agrees with an independent Jacobi oracle") {
  for (int k : {2, 3, 5, 8}) {
    auto ch = colouring_channel(k);
    auto general = channel_from_matrix(k, ch.matrix);
    double lambda = second_eigenvalue(general);
    auto eig = oracles::jacobi_eigenvalues(ch.matrix, k);
    std::sort(eig.begin(), eig.end(), [](double a, double b) {
      if (std::fabs(a) != std::fabs(b)) return std::fabs(a) > std::fabs(b);
      return a > b;
    });
    CHECK(lambda == doctest::Approx(eig[1]).epsilon(1e-10));
    CHECK(lambda == doctest::Approx(-1.0 / (k - 1)).epsilon(1e-10));
  }
  auto bsc = bsc_channel(0.1);
  auto general = channel_from_matrix(2, bsc.matrix);
  CHECK(second_eigenvalue(general) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("tree specs") {
  auto t = regular_tree(5, 4);
  CHECK(t.branching() == 5);
  CHECK(t.depth == 4);
  CHECK_THROWS_AS(regular_tree(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(regular_tree(2, -1), std::invalid_argument);
  auto g = gw_poisson_tree(5.0, 4);
  CHECK(g.delta == doctest::Approx(5.0));
  CHECK_THROWS_AS(gw_poisson_tree(0.0, 2), std::invalid_argument);
}

TEST_CASE("channel and tree JSON round trip") {
  auto c = channel_from_json(channel_to_json(colouring_channel(3)));
  CHECK(c.kind == ChannelKind::Colouring);
  CHECK(c.k == 3);
  auto b = channel_from_json(channel_to_json(bsc_channel(0.25)));
  CHECK(b.epsilon == doctest::Approx(0.25));
  CHECK(channel_to_json(colouring_channel(3)).dump() ==
        "{\"kind\":\"colouring\",\"k\":3}");
  CHECK(channel_to_json(bsc_channel(0.25)).dump() ==
        "{\"kind\":\"bsc\",\"epsilon\":0.25}");

  CHECK(tree_to_json(regular_tree(5, 4)).dump() ==
        "{\"tree\":\"regular\",\"delta\":5,\"depth\":4}");
  CHECK(tree_to_json(gw_poisson_tree(5.0, 4)).dump() ==
        "{\"tree\":\"gw_poisson\",\"delta\":5.0,\"depth\":4}");
  auto rt = tree_from_json(tree_to_json(regular_tree(5, 4)));
  CHECK(rt.kind == TreeKind::Regular);
  CHECK(rt.branching() == 5);
  auto gw = tree_from_json(tree_to_json(gw_poisson_tree(2.5, 3)));
  CHECK(gw.kind == TreeKind::GaltonWatsonPoisson);
  CHECK(gw.delta == doctest::Approx(2.5));
}
