#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lampgraph.hpp"

using namespace halo;

namespace {

GroupPtr Z() { return std::make_shared<ZdGroup>(1, false); }
GroupPtr Z2() { return std::make_shared<ZdGroup>(2, false); }

std::shared_ptr<HaloGroup> make(Family f, GroupPtr base = Z()) {
  HaloParams p;
  p.lamp_group = std::make_shared<CyclicGroup>(2);
  p.tracks = 2;
  return make_halo(f, std::move(base), p);
}

FiniteGraph path(int n) {
  FiniteGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex(std::to_string(i));
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  g.basepoint = 0;
  return g;
}

FiniteGraph complete(int n) {
  FiniteGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex(std::to_string(i));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  }
  g.basepoint = 0;
  return g;
}

void check_mapping(const FiniteGraph& G, const FiniteGraph& H, const IsoResult& r) {
  REQUIRE(r.isomorphic);
  REQUIRE(r.mapping.size() == G.size());
  std::vector<int> hit(H.size(), 0);
  for (int u : r.mapping) hit.at(u)++;
  for (int h : hit) CHECK(h == 1);
  for (std::size_t v = 0; v < G.size(); ++v) {
    for (int u : G.neighbours(static_cast<int>(v))) CHECK(H.adjacent(r.mapping[v], r.mapping[u]));
  }
}

std::vector<std::int64_t> coords(const SeparatedNet& n) {
  std::vector<std::int64_t> v;
  for (const auto& e : n.points) v.push_back(e[0]);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("graph basics") {
  auto g = path(3);
  CHECK(g.edge_count() == 2);
  g.add_edge(1, 0);
  CHECK(g.edge_count() == 2);
  CHECK_THROWS_AS(g.add_edge(1, 1), ContractViolation);
  CHECK(g.edge_list() == "0 1\n1 2\n");
  CHECK(g.labels_json()["vertices"].size() == 3);
  g.validate();
}

TEST_CASE("lamplighter graph counts and degrees") {
  auto L = lamplighter_graph(complete(2), path(2), 2);
  CHECK(L.graph.size() == 8);
  L.graph.validate();
  auto B = complete(3);
  auto A = path(3);
  L = lamplighter_graph(B, A, 3);
  CHECK(L.graph.size() == 27 * 3);
  for (std::size_t v = 0; v < L.graph.size(); ++v) {
    CHECK(L.graph.degree(static_cast<int>(v)) ==
          A.degree(L.marker[v]) + B.degree(L.lamps[v][L.marker[v]]));
  }
  // capped: only labellings with at most one lit site
  L = lamplighter_graph(B, A, 1);
  CHECK(L.graph.size() == (1 + 3 * 2) * 3);
  CHECK_THROWS_AS(lamplighter_graph(B, A, 3, 10), ResourceError);
}

TEST_CASE("degenerate lamplighter graphs") {
  auto A = path(4);
  auto L = lamplighter_graph(complete(3), A, 0);
  check_mapping(L.graph, A, find_isomorphism(L.graph, A));
  FiniteGraph point;
  point.add_vertex("x");
  auto B = complete(4);
  L = lamplighter_graph(B, point, 1);
  check_mapping(L.graph, B, find_isomorphism(L.graph, B));
}

TEST_CASE("lamplighter graph over a path is the lamplighter box") {
  // K2 wr P_{n+1} against the box A_n of wreath(C2, Z) with its induced edges
  auto wr = make(Family::Wreath);
  for (int n = 0; n <= 3; ++n) {
    std::vector<Element> box;
    for (std::uint32_t mask = 0; mask < (1u << (n + 1)); ++mask) {
      WreathLamps l;
      for (int i = 0; i <= n; ++i) {
        if (mask >> i & 1) l.entries.emplace_back(Element{i}, Element{1});
      }
      for (int c = 0; c <= n; ++c) box.push_back(wr->encode({l, Element{c}}));
    }
    std::sort(box.begin(), box.end());
    FiniteGraph G;
    for (const auto& b : box) G.add_vertex(wr->format(b));
    for (std::size_t i = 0; i < box.size(); ++i) {
      for (const auto& s : wr->generators()) {
        auto it = std::lower_bound(box.begin(), box.end(), wr->multiply(box[i], s));
        if (it != box.end() && *it == wr->multiply(box[i], s)) G.add_edge(static_cast<int>(i), static_cast<int>(it - box.begin()));
      }
    }
    auto L = lamplighter_graph(complete(2), path(n + 1), n + 1);
    check_mapping(L.graph, G, find_isomorphism(L.graph, G));
  }
}

TEST_CASE("isomorphism search") {
  auto L = lamplighter_graph(complete(2), path(3), 3);
  check_mapping(L.graph, L.graph, find_isomorphism(L.graph, L.graph));
  // relabel randomly
  std::mt19937_64 rng(1);
  std::vector<int> perm(L.graph.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  FiniteGraph P(std::vector<std::string>(perm.size(), "v"));
  for (std::size_t v = 0; v < perm.size(); ++v) {
    for (int u : L.graph.neighbours(static_cast<int>(v))) P.add_edge(perm[v], perm[u]);
  }
  check_mapping(L.graph, P, find_isomorphism(L.graph, P));
  // same degrees, not isomorphic: C6 vs two triangles
  FiniteGraph c6(std::vector<std::string>(6, "v")), tt(std::vector<std::string>(6, "v"));
  for (int i = 0; i < 6; ++i) c6.add_edge(i, (i + 1) % 6);
  for (int i = 0; i < 3; ++i) {
    tt.add_edge(i, (i + 1) % 3);
    tt.add_edge(3 + i, 3 + (i + 1) % 3);
  }
  CHECK_FALSE(find_isomorphism(c6, tt).isomorphic);
  CHECK_FALSE(find_isomorphism(path(3), path(4)).isomorphic);
}

TEST_CASE("greedy nets on Z") {
  auto net = greedy_net(Z(), 12, 1);
  CHECK(coords(net) == std::vector<std::int64_t>{-12, -9, -6, -3, 0, 3, 6, 9, 12});
  CHECK(net.bigstep.size() == 14);
  net = greedy_net(Z(), 6, 0);
  CHECK(coords(net) == std::vector<std::int64_t>{-6, -4, -2, 0, 2, 4, 6});
  net = greedy_net(Z(), 2, 1);
  CHECK(coords(net) == std::vector<std::int64_t>{0});
}

TEST_CASE("net separation, maximality and bilipschitz bounds") {
  for (auto g : {Z(), Z2()}) {
    for (int D = 0; D <= 2; ++D) {
      for (int r = 1; r <= 6; ++r) {
        auto net = greedy_net(g, r, D);
        auto c = check_net(net, r);
        CHECK(c.separated);
        CHECK(c.maximal);
        CHECK(c.lower_bound);
        CHECK_MESSAGE(c.upper_bound, c.detail);
      }
    }
  }
}

TEST_CASE("Y* for the shuffler") {
  auto sh = make(Family::Shuffler);
  auto net = greedy_net(Z(), 3, 1);
  auto Y = build_ystar(*sh, net, 0);
  CHECK(Y.graph.size() == 24);
  CHECK(Y.block_graph.size() == 2);
  CHECK(Y.commuting_pairs_checked == 3 * 4);
  Y.graph.validate();
  auto A = net_graph(net);
  auto r = check_iso_to_lamplighter(Y.graph, Y.block_graph, A);
  check_mapping(Y.graph, lamplighter_graph(Y.block_graph, A, 3).graph, r);
  CHECK_FALSE(check_iso_to_lamplighter(Y.graph, complete(3), A).isomorphic);
}

TEST_CASE("Y* for other families") {
  auto wr = make(Family::Wreath);
  auto net = greedy_net(Z(), 3, 0);
  auto Y = build_ystar(*wr, net, 0);
  CHECK(Y.block_graph.size() == 4);
  CHECK(check_iso_to_lamplighter(Y.graph, Y.block_graph, net_graph(net)).isomorphic);

  auto cl = make(Family::Cloner);
  net = greedy_net(Z(), 3, 1);
  Y = build_ystar(*cl, net, 0);
  CHECK(Y.block_graph.size() == 6);
  CHECK(check_iso_to_lamplighter(Y.graph, Y.block_graph, net_graph(net)).isomorphic);

  auto ds = make(Family::Designer);
  net = greedy_net(Z(), 1, 1);
  Y = build_ystar(*ds, net, 1);
  CHECK(net.points.size() == 1);
  check_mapping(Y.graph, Y.block_graph, find_isomorphism(Y.graph, Y.block_graph));
}

TEST_CASE("Y* rejects overlapping blocks") {
  auto sh = make(Family::Shuffler);
  SeparatedNet net = greedy_net(Z(), 0, 1);
  net.points = {Element{0}, Element{1}};
  CHECK_THROWS_AS(build_ystar(*sh, net, 0), ContractViolation);
}
