#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "embeddings.hpp"

using namespace halo;

namespace {

GroupPtr Z() { return std::make_shared<ZdGroup>(1, false); }
GroupPtr Z2() { return std::make_shared<ZdGroup>(2, false); }

HaloPtr make(Family f, GroupPtr base = Z(), int tracks = 2, int q = 2) {
  HaloParams p;
  p.lamp_group = std::make_shared<CyclicGroup>(2);
  p.tracks = tracks;
  p.q = q;
  return make_halo(f, std::move(base), p);
}

Element shuffler_elem(const HaloGroup& g, std::vector<std::pair<std::int64_t, std::int64_t>> moves, std::int64_t cursor) {
  std::vector<std::pair<Site, Site>> m;
  for (auto [a, b] : moves) m.push_back({Site{Element{a}, 0}, Site{Element{b}, 0}});
  return g.encode({g.perm_from_map(m), Element{cursor}});
}

Element half(const Element& x) {
  Element y = x;
  for (auto& c : y) c /= 2;
  return y;
}

}  // namespace

TEST_CASE("coset systems factor uniquely") {
  auto c = sublattice_cosets(Z(), {2});
  CHECK(c.index() == 2);
  auto [k, i] = c.factor(Element{5});
  CHECK(k == Element{4});
  CHECK(i == 1);
  auto c2 = sublattice_cosets(Z2(), {2, 3});
  CHECK(c2.index() == 6);
  Ball b = ball(*Z2(), 6);
  for (const auto& h : b.elements) {
    auto [kk, s] = c2.factor(h);
    CHECK(c2.in_K(kk));
    CHECK(Z2()->multiply(kk, c2.transversal[s]) == h);
  }
  CHECK_THROWS_AS(sublattice_cosets(Z(), {1}), ContractViolation);
}

TEST_CASE("symmetric wreath group axioms") {
  auto c = sublattice_cosets(Z(), {2});
  SymWreathGroup W(Z(), c.in_K, c.K_generators, 3, c.descriptor);
  Ball b = ball(W, 3);
  for (const auto& x : b.elements) {
    CHECK(W.multiply(x, W.invert(x)) == W.identity());
    for (const auto& y : b.elements) {
      if (b.lengths[&y - b.elements.data()] > 1) break;
      for (const auto& z : b.elements) {
        if (b.lengths[&z - b.elements.data()] > 1) break;
        CHECK(W.multiply(W.multiply(x, y), z) == W.multiply(x, W.multiply(y, z)));
      }
    }
  }
}

TEST_CASE("wreath inside the lampshuffler") {
  auto sh = make(Family::Shuffler);
  auto cos = sublattice_cosets(Z(), {2});
  auto phi = wreath_in_shuffler(sh, cos);
  auto& W = dynamic_cast<const SymWreathGroup&>(*phi.codomain);

  // tau_{0,1} swaps inside the coset 0 + S
  auto v = W.decode(phi.map(shuffler_elem(*sh, {{0, 1}, {1, 0}}, 0)));
  REQUIRE(v.f.size() == 1);
  CHECK(v.f[0].first == Element{0});
  CHECK(v.f[0].second == std::vector<int>{1, 0});
  CHECK(W.is_identity(phi.map(sh->identity())));

  CHECK_FALSE(phi.in_domain(shuffler_elem(*sh, {{1, 2}, {2, 1}}, 0)));
  CHECK_FALSE(phi.in_domain(shuffler_elem(*sh, {}, 1)));
  CHECK_THROWS_AS(phi.map(shuffler_elem(*sh, {{1, 2}, {2, 1}}, 0)), ContractViolation);

  // closed form (k^-1 . sigma)|_S evaluated with the halo action
  auto sample = domain_sample(phi, 6);
  MESSAGE("coset-preserving elements in Ball(6): " << sample.size());
  CHECK(sample.size() > 10);
  for (const auto& e : sample) {
    HaloElement x = sh->decode(e);
    auto img = W.decode(phi.map(e));
    CHECK(img.k == x.cursor);
    for (std::int64_t k = -8; k <= 8; k += 2) {
      auto local = std::get<PermLamps>(sh->act(Element{-k}, x.lamp));
      std::vector<int> expect{static_cast<int>(sh->apply(local, Site{Element{0}, 0}).at[0]),
                              static_cast<int>(sh->apply(local, Site{Element{1}, 0}).at[0])};
      std::vector<int> got{0, 1};
      for (const auto& [p, perm] : img.f) {
        if (p == Element{k}) got = perm;
      }
      CHECK(got == expect);
    }
  }
  auto c = check_morphism(phi, domain_sample(phi, 4), 500, 1);
  CHECK(c.identity);
  CHECK_MESSAGE(c.homomorphism, c.counterexample);
  CHECK(c.injective);

  auto phi3 = wreath_in_shuffler(sh, sublattice_cosets(Z(), {3}));
  c = check_morphism(phi3, domain_sample(phi3, 6), 500, 2);
  CHECK(c.homomorphism);
  CHECK(c.injective);
}

TEST_CASE("lampshuffler endomorphism from doubling") {
  auto sh = make(Family::Shuffler);
  auto psi = doubling(Z());
  auto phi = shuffler_endomorphism(sh, psi, half);
  CHECK(phi.map(shuffler_elem(*sh, {{0, 1}, {1, 0}}, 0)) == shuffler_elem(*sh, {{0, 2}, {2, 0}}, 0));
  CHECK(phi.map(shuffler_elem(*sh, {{0, 1}, {1, 2}, {2, 0}}, 3)) == shuffler_elem(*sh, {{0, 2}, {2, 4}, {4, 0}}, 6));
  CHECK(sh->is_identity(phi.map(sh->identity())));

  Ball b4 = ball(*sh, 4);
  auto c = check_morphism(phi, b4.elements, 1000, 3, b4.elements);
  CHECK(c.identity);
  CHECK(c.homomorphism);
  CHECK(c.injective);
  REQUIRE(c.outside_image);
  // (tau_{0,1}, 0) has no preimage in Ball(4)
  Element witness = shuffler_elem(*sh, {{0, 1}, {1, 0}}, 0);
  CHECK_FALSE(in_shuffler_image(*sh, psi, witness));
  for (const auto& x : b4.elements) CHECK(phi.map(x) != witness);

  // pointwise two-case definition of sigma-bar
  for (const auto& e : b4.elements) {
    HaloElement x = sh->decode(e);
    HaloElement y = sh->decode(phi.map(e));
    auto& s = std::get<PermLamps>(x.lamp);
    auto& t = std::get<PermLamps>(y.lamp);
    for (std::int64_t g = -10; g <= 10; ++g) {
      std::int64_t expect = g % 2 == 0 ? 2 * sh->apply(s, Site{Element{g / 2}, 0}).at[0] : g;
      CHECK(sh->apply(t, Site{Element{g}, 0}).at[0] == expect);
    }
  }

  auto phi2 = compose(phi, phi);
  c = check_morphism(phi2, b4.elements, 500, 4);
  CHECK(c.homomorphism);
  CHECK(c.injective);
  CHECK(phi2.map(witness) == shuffler_elem(*sh, {{0, 4}, {4, 0}}, 0));
  bool hit = false;
  for (const auto& x : b4.elements) hit = hit || phi2.map(x) == phi.map(witness);
  CHECK_FALSE(hit);

  auto bad = psi;
  bad.map = [](const Element& x) { return Element{x[0] * x[0]}; };
  CHECK_THROWS_AS(shuffler_endomorphism(sh, bad, half), ContractViolation);
}

TEST_CASE("lamplighter subgroups of halo products") {
  for (auto g : {make(Family::Juggler, Z(), 2), make(Family::Designer), make(Family::Cloner, Z(), 1, 3)}) {
    auto phi = lamplighter_in_halo(g);
    auto sample = domain_sample(phi, 4);
    auto c = check_morphism(phi, sample, 1000, 5);
    CHECK_MESSAGE(c.identity, phi.name);
    CHECK_MESSAGE(c.homomorphism, phi.name << ": " << c.counterexample);
    CHECK_MESSAGE(c.injective, phi.name);
    CHECK(sample.size() > 20);
  }
  CHECK_THROWS_AS(lamplighter_in_halo(make(Family::Cloner)), ContractViolation);
  CHECK_THROWS_AS(lamplighter_in_halo(make(Family::Shuffler)), UnsupportedFamily);
}
