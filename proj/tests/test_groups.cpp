#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <random>
#include <set>

#include "group.hpp"

using namespace halo;

namespace {

// Independent BFS over explicit 3x3 upper unitriangular integer matrices.
using Mat = std::array<std::int64_t, 9>;

Mat matmul(const Mat& a, const Mat& b) {
  Mat c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
  return c;
}

std::size_t heisenberg_ball_oracle(int r) {
  Mat id{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::vector<Mat> gens;
  for (int s : {1, -1}) {
    gens.push_back({1, s, 0, 0, 1, 0, 0, 0, 1});
    gens.push_back({1, 0, 0, 0, 1, s, 0, 0, 1});
  }
  std::set<Mat> seen{id};
  std::vector<Mat> frontier{id};
  for (int k = 0; k < r; ++k) {
    std::vector<Mat> next;
    for (const auto& m : frontier)
      for (const auto& s : gens) {
        Mat x = matmul(m, s);
        if (seen.insert(x).second) next.push_back(x);
      }
    frontier = std::move(next);
  }
  return seen.size();
}

std::size_t lattice_points(int d, int r) {
  // direct summation over the cube [-r, r]^d
  std::size_t count = 0;
  std::vector<int> x(static_cast<std::size_t>(d), -r);
  while (true) {
    int n = 0;
    for (int v : x) n += std::abs(v);
    if (n <= r) ++count;
    std::size_t i = 0;
    while (i < x.size() && ++x[i] > r) x[i++] = -r;
    if (i == x.size()) break;
  }
  return count;
}

}  // namespace

TEST_CASE("default generating sets") {
  CHECK(ZdGroup(2, false).generators().size() == 4);
  CHECK(CyclicGroup(5).generators().size() == 2);
  CHECK(HeisenbergGroup().generators().size() == 4);
  CHECK(ZdGroup(1, false).generators().size() == 2);
  auto p = std::make_shared<ProductGroup>(std::make_shared<ZdGroup>(1, false), std::make_shared<CyclicGroup>(3));
  CHECK(p->generators().size() == 4);
  CHECK(p->descriptor() == "Z x C3");
}

TEST_CASE("small balls") {
  ZdGroup z(1, false), z2(2, false);
  CHECK(ball(z, 0).size() == 1);
  CHECK(ball(z2, 1).size() == 5);
  for (int d = 1; d <= 3; ++d)
    for (int r = 0; r <= 5; ++r) CHECK(ball(ZdGroup(d, false), r).size() == lattice_points(d, r));
}

TEST_CASE("Heisenberg ball matches matrix BFS") {
  HeisenbergGroup h;
  for (int r = 0; r <= 5; ++r) CHECK(ball(h, r).size() == heisenberg_ball_oracle(r));
}

TEST_CASE("ball invariants and worker independence") {
  HeisenbergGroup h;
  Ball b = ball(h, 4);
  CHECK(b.length(h.identity()) == 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.lengths[i] == 0) continue;
    bool ok = false;
    for (const auto& s : h.generators()) ok = ok || b.length(h.multiply(b.elements[i], s)) == b.lengths[i] - 1;
    CHECK(ok);
  }
  BallOptions opt;
  opt.workers = 4;
  Ball b4 = ball(h, 4, opt);
  CHECK(b4.elements == b.elements);
  CHECK(b4.lengths == b.lengths);
  std::size_t prev = 0;
  for (int r = 0; r < 5; ++r) {
    std::size_t n = ball(h, r).size();
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("memory budget") {
  BallOptions opt;
  opt.memory_budget = 10000;
  try {
    ball(HeisenbergGroup(), 10, opt);
    FAIL("expected resource error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("radius") != std::string::npos);
  }
}

TEST_CASE("group axioms on samples") {
  std::mt19937_64 rng(7);
  std::vector<GroupPtr> gs{std::make_shared<ZdGroup>(2, false), std::make_shared<CyclicGroup>(7),
                           std::make_shared<HeisenbergGroup>(),
                           std::make_shared<ProductGroup>(std::make_shared<HeisenbergGroup>(), std::make_shared<CyclicGroup>(4))};
  for (const auto& g : gs) {
    Ball b = ball(*g, 4);
    std::uniform_int_distribution<std::size_t> pick(0, b.size() - 1);
    for (int i = 0; i < 1000; ++i) {
      const auto& a = b.elements[pick(rng)];
      const auto& c = b.elements[pick(rng)];
      const auto& d = b.elements[pick(rng)];
      CHECK(g->multiply(g->multiply(a, c), d) == g->multiply(a, g->multiply(c, d)));
      CHECK(g->multiply(a, g->invert(a)) == g->identity());
      CHECK(g->multiply(g->identity(), a) == a);
    }
    Ball b8 = ball(*g, 8);
    for (int i = 0; i < 300; ++i) {
      const auto& a = b.elements[pick(rng)];
      const auto& c = b.elements[pick(rng)];
      CHECK(b8.length(g->multiply(a, c)) <= b8.length(a) + b8.length(c));
    }
    for (std::size_t i = 0; i < g->generators().size(); ++i) {
      CHECK(g->generators()[g->inverse_generator(i)] == g->invert(g->generators()[i]));
    }
  }
}

TEST_CASE("lexicographic order") {
  ZdGroup z2(2, true);
  CHECK(lex_compare(z2, z2.point({0, 5}), z2.point({1, -9})) == std::strong_ordering::less);
  CHECK(lex_compare(z2, z2.point({1, 2}), z2.point({1, 3})) == std::strong_ordering::less);
  CHECK(lex_compare(z2, z2.point({1, 2}), z2.point({1, 2})) == std::strong_ordering::equal);
  CHECK_THROWS_AS(lex_compare(ZdGroup(2, false), z2.point({0, 0}), z2.point({1, 0})), ContractViolation);
  CHECK_THROWS_AS(lex_compare(CyclicGroup(5), Element{0}, Element{1}), ContractViolation);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-20, 20);
  for (int i = 0; i < 1000; ++i) {
    auto a = z2.point({c(rng), c(rng)}), b = z2.point({c(rng), c(rng)}), t = z2.point({c(rng), c(rng)});
    CHECK(lex_compare(z2, a, b) == lex_compare(z2, z2.multiply(t, a), z2.multiply(t, b)));
  }
}

TEST_CASE("element formatting round-trip") {
  auto p = std::make_shared<ProductGroup>(std::make_shared<ZdGroup>(2, false), std::make_shared<HeisenbergGroup>());
  Ball b = ball(*p, 3);
  for (const auto& e : b.elements) CHECK(p->parse_element(p->format(e)) == e);
  auto j = ball_to_json(*p, ball(*p, 1));
  CHECK(j.size() == 9);
  CHECK(j[0]["length"] == 0);
}

TEST_CASE("word metric geodesics") {
  auto h = std::make_shared<HeisenbergGroup>();
  WordMetric m(h);
  Element z{0, 0, 1};
  auto w = m.geodesic(z);
  CHECK(w.size() == 4);
  Element x = h->identity();
  for (auto s : w) x = h->multiply(x, h->generators()[s]);
  CHECK(x == z);
}
