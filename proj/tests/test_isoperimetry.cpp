#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "isoperimetry.hpp"

using namespace halo;

namespace {

GroupPtr Z() { return std::make_shared<ZdGroup>(1, false); }
GroupPtr Z2() { return std::make_shared<ZdGroup>(2, false); }
GroupPtr C(int m) { return std::make_shared<CyclicGroup>(m); }

std::shared_ptr<HaloGroup> make(Family f, GroupPtr base = Z(), int tracks = 2, int q = 2) {
  HaloParams p;
  p.lamp_group = C(2);
  p.tracks = tracks;
  p.q = q;
  return make_halo(f, std::move(base), p);
}

Element pt(std::int64_t x) { return Element{x}; }
Element pt(std::int64_t x, std::int64_t y) { return Element{x, y}; }

std::vector<Element> interval(std::int64_t a, std::int64_t b) {
  std::vector<Element> v;
  for (auto x = a; x <= b; ++x) v.push_back(pt(x));
  return v;
}

// |A|/|AS \ A| over a std::set, as a reduced pair.
std::pair<long, long> oracle_ratio(const Group& g, const std::vector<Element>& A) {
  std::set<Element> in(A.begin(), A.end()), out;
  for (const auto& a : in) {
    for (const auto& s : g.generators()) {
      auto x = g.multiply(a, s);
      if (!in.count(x)) out.insert(x);
    }
  }
  return {static_cast<long>(in.size()), static_cast<long>(out.size())};
}

bool better(std::pair<long, long> a, std::pair<long, long> b) { return a.first * b.second > b.first * a.second; }

// sum over x in supp f and its neighbours, every s, of |f(xs) - f(x)|^p
double oracle_gradient(const Group& g, const std::map<Element, double>& f, double p) {
  std::set<Element> region;
  for (const auto& [x, v] : f) {
    region.insert(x);
    for (const auto& s : g.generators()) region.insert(g.multiply(x, s));
  }
  auto val = [&](const Element& x) {
    auto it = f.find(x);
    return it == f.end() ? 0.0 : it->second;
  };
  double num = 0, den = 0;
  for (const auto& x : region) {
    for (const auto& s : g.generators()) num += std::pow(std::fabs(val(g.multiply(x, s)) - val(x)), p);
  }
  for (const auto& [x, v] : f) den += std::pow(std::fabs(v), p);
  return std::pow(num / den, 1.0 / p);
}

bool connected(const Group& g, const std::vector<Element>& A) {
  std::set<Element> in(A.begin(), A.end()), seen{A[0]};
  std::vector<Element> stack{A[0]};
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    for (const auto& s : g.generators()) {
      auto y = g.multiply(x, s);
      if (in.count(y) && seen.insert(y).second) stack.push_back(y);
    }
  }
  return seen.size() == in.size();
}

// Best ratio over all subsets of `pool` containing the identity, per size.
std::vector<std::pair<long, long>> oracle_subsets(const Group& g, const std::vector<Element>& pool, int n_max,
                                                  bool need_connected) {
  std::vector<Element> others;
  for (const auto& e : pool) {
    if (!g.is_identity(e)) others.push_back(e);
  }
  std::vector<std::pair<long, long>> best(n_max + 1, {0, 1});
  std::vector<Element> cur{g.identity()};
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!need_connected || connected(g, cur)) {
      auto r = oracle_ratio(g, cur);
      if (better(r, best[cur.size()])) best[cur.size()] = r;
    }
    if (static_cast<int>(cur.size()) == n_max) return;
    for (std::size_t i = start; i < others.size(); ++i) {
      cur.push_back(others[i]);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return best;
}

mpq_class q(long a, long b) {
  mpq_class r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("boundary of small sets") {
  auto z = Z();
  auto w = boundary(*z, {pt(0)});
  CHECK(w.boundary == std::vector<Element>{pt(-1), pt(1)});
  CHECK(w.ratio == Ratio::of(1, 2));
  w = boundary(*z, interval(0, 2));
  CHECK(w.boundary == std::vector<Element>{pt(-1), pt(3)});
  CHECK(w.ratio == Ratio::of(3, 2));

  auto z2 = Z2();
  std::vector<Element> sq;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) sq.push_back(pt(x, y));
  }
  w = boundary(*z2, sq);
  CHECK(w.boundary.size() == 12);
  CHECK(w.ratio == Ratio::of(3, 4));
  for (const auto& b : w.boundary) CHECK_FALSE(std::binary_search(w.set.begin(), w.set.end(), b));
  CHECK_THROWS_AS(boundary(*z, {}), ContractViolation);
}

TEST_CASE("ratio arithmetic") {
  CHECK(Ratio::of(4, 8).str() == "1/2");
  CHECK(Ratio::of(3, 0).infinite());
  CHECK(Ratio::of(1, 2) < Ratio::of(2, 3));
  CHECK(Ratio::of(100, 1) < Ratio::of(1, 0));
  CHECK_FALSE(Ratio::of(1, 0) < Ratio::of(5, 1));
}

TEST_CASE("gradient ratio examples") {
  auto z = Z();
  auto delta = FiniteFunction::indicator({pt(0)});
  auto r1 = gradient_ratio(*z, delta, 1);
  REQUIRE(r1.exact);
  CHECK(*r1.exact == 4);
  CHECK(gradient_ratio(*z, delta, 2).value == doctest::Approx(2.0).epsilon(1e-14));

  auto c5 = C(5);
  auto whole = FiniteFunction::indicator(enumerate_finite_group(*c5));
  CHECK(*gradient_ratio(*c5, whole, 1).exact == 0);
  CHECK(gradient_ratio(*c5, whole, 2).value == 0);
  CHECK_THROWS_AS(gradient_ratio(*z, FiniteFunction{}, 1), ContractViolation);
}

TEST_CASE("gradient ratio against neighbourhood oracle") {
  auto z2 = Z2();
  Ball b = ball(*z2, 3);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::pair<Element, mpq_class>> e;
    std::map<Element, double> m;
    for (const auto& x : b.elements) {
      if (rng() % 3 == 0) {
        mpq_class v(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 4) + 1);
        v.canonicalize();
        if (v == 0) continue;
        e.emplace_back(x, v);
        m[x] = v.get_d();
      }
    }
    if (e.empty()) continue;
    auto f = FiniteFunction::exact(e);
    for (double p : {1.0, 2.0, 3.0}) {
      auto r = gradient_ratio(*z2, f, p);
      CHECK(r.value == doctest::Approx(oracle_gradient(*z2, m, p)).epsilon(1e-12));
      CHECK(r.exact.has_value() == (p == 1));
    }
  }
}

TEST_CASE("indicator gradient and directed cut") {
  auto z2 = Z2();
  Ball b = ball(*z2, 3);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Element> A;
    for (const auto& x : b.elements) {
      if (rng() % 2) A.push_back(x);
    }
    if (A.empty()) continue;
    auto cut = directed_cut(*z2, A);
    auto w = boundary(*z2, A);
    auto r = gradient_ratio(*z2, FiniteFunction::indicator(A), 1);
    CHECK(*r.exact == q(2 * static_cast<long>(cut), static_cast<long>(w.set.size())));
    CHECK(w.boundary.size() <= cut);
    CHECK(cut <= z2->generators().size() * w.boundary.size());
  }
}

TEST_CASE("ratio is translation invariant") {
  auto wr = make(Family::Wreath);
  Ball b = ball(*wr, 3);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Element> A;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (rng() % 4 == 0) A.push_back(b.elements[i]);
    }
    if (A.empty()) continue;
    const Element& g = b.elements[rng() % b.size()];
    std::vector<Element> gA;
    for (const auto& a : A) gA.push_back(wr->multiply(g, a));
    CHECK(boundary(*wr, A).ratio == boundary(*wr, gA).ratio);
  }
}

TEST_CASE("exact profile of Z") {
  auto z = Z();
  auto run = profile_exact(*z, 10, 12);
  REQUIRE(run.points.size() == 10);
  CHECK(run.warnings.empty());
  auto oracle = oracle_subsets(*z, interval(-12, 12), 7, false);
  for (const auto& p : run.points) {
    CHECK(p.exact);
    CHECK(*p.ratio == Ratio::of(p.n, 2));
    CHECK(boundary(*z, p.witness).ratio == *p.ratio);
    // witness is an interval of length n
    CHECK(static_cast<int>(p.witness.size()) == p.n);
    CHECK(p.witness.back()[0] - p.witness.front()[0] == p.n - 1);
    if (p.n <= 7) CHECK(Ratio::of(oracle[p.n].first, oracle[p.n].second) == Ratio::of(p.n, 2));
  }
  auto f2 = folner_function(run.points, mpq_class(2));
  REQUIRE(f2);
  CHECK(*f2 == 4);
  CHECK_FALSE(folner_function(run.points, mpq_class(6)).has_value());
}

TEST_CASE("exact profile is a lower bound inverse of the Folner function") {
  auto z2 = Z2();
  auto run = profile_exact(*z2, 7, 4);
  for (std::size_t i = 1; i < run.points.size(); ++i) CHECK_FALSE(*run.points[i].ratio < *run.points[i - 1].ratio);
  for (const auto& p : run.points) {
    CHECK_FALSE(p.exact);
    CHECK(boundary(*z2, p.witness).ratio == *p.ratio);
    auto f = folner_function(run.points, mpq_class(p.ratio->num, p.ratio->den));
    REQUIRE(f);
    CHECK(static_cast<int>(*f) <= p.n);
  }
  CHECK_FALSE(run.warnings.empty());
}

TEST_CASE("first profile value is one over the number of neighbours") {
  for (auto g : std::vector<GroupPtr>{Z(), Z2(), make(Family::Shuffler), make(Family::Cloner)}) {
    auto run = profile_exact(*g, 1, 1);
    std::set<Element> nb(g->generators().begin(), g->generators().end());
    CHECK(*run.points[0].ratio == Ratio::of(1, static_cast<std::int64_t>(nb.size())));
    auto greedy = profile_heuristic(*g, 1, Method::Greedy);
    CHECK(*greedy.points[0].ratio == *run.points[0].ratio);
  }
}

TEST_CASE("exact profile of the lamplighter agrees with subset enumeration") {
  auto wr = make(Family::Wreath);
  auto run = profile_exact(*wr, 4, 3);
  Ball b = ball(*wr, 3);
  auto oracle = oracle_subsets(*wr, b.elements, 4, true);
  std::pair<long, long> cum{0, 1};
  for (const auto& p : run.points) {
    if (better(oracle[p.n], cum)) cum = oracle[p.n];
    CHECK(*p.ratio == Ratio::of(cum.first, cum.second));
  }
  MESSAGE("wreath(C2,Z) j(4) = " << run.points.back().ratio->str());
}

TEST_CASE("exact search is independent of worker count") {
  for (auto g : std::vector<GroupPtr>{Z2(), make(Family::Shuffler)}) {
    ExactOptions one, many;
    many.workers = 4;
    auto a = profile_exact(*g, 6, 3, one);
    auto b = profile_exact(*g, 6, 3, many);
    CHECK(profile_csv(a.points) == profile_csv(b.points));
    CHECK(profile_witness_json(*g, a.points).dump() == profile_witness_json(*g, b.points).dump());
  }
}

TEST_CASE("node budget yields a non-exact tail") {
  auto z = Z();
  ExactOptions opt;
  opt.node_budget = 20;
  auto run = profile_exact(*z, 10, 12, opt);
  CHECK_FALSE(run.warnings.empty());
  CHECK_FALSE(run.points.back().exact);
  for (const auto& p : run.points) CHECK(boundary(*z, p.witness).ratio == *p.ratio);
}

TEST_CASE("greedy and annealing witnesses") {
  auto z2 = Z2();
  auto greedy = profile_heuristic(*z2, 9, Method::Greedy);
  CHECK_FALSE(*greedy.points[8].ratio < Ratio::of(3, 4));
  HeuristicOptions opt;
  opt.seed = 42;
  auto a1 = profile_heuristic(*z2, 12, Method::Anneal, opt);
  auto a2 = profile_heuristic(*z2, 12, Method::Anneal, opt);
  CHECK(profile_csv(a1.points) == profile_csv(a2.points));
  auto g12 = profile_heuristic(*z2, 12, Method::Greedy);
  for (std::size_t i = 0; i < a1.points.size(); ++i) {
    const auto& p = a1.points[i];
    CHECK(boundary(*z2, p.witness).ratio == *p.ratio);
    CHECK_FALSE(*p.ratio < *g12.points[i].ratio);
    CHECK(static_cast<int>(p.witness.size()) <= p.n);
  }
  CHECK_THROWS_AS(profile_heuristic(*z2, 3, Method::Exact), ContractViolation);
}

TEST_CASE("heuristics stop at a whole finite group") {
  auto c6 = C(6);
  auto run = profile_heuristic(*c6, 10, Method::Greedy);
  CHECK(run.points.back().ratio->infinite());
  CHECK(run.points.back().witness.size() == 6);
  auto f = folner_function(run.points, mpq_class(1000));
  REQUIRE(f);
  CHECK(*f <= 6);
}

TEST_CASE("lamplighter box ratio") {
  auto wr = make(Family::Wreath);
  for (int n = 0; n <= 6; ++n) {
    std::vector<Element> A;
    for (std::uint32_t mask = 0; mask < (1u << (n + 1)); ++mask) {
      WreathLamps l;
      for (int i = 0; i <= n; ++i) {
        if (mask >> i & 1) l.entries.emplace_back(pt(i), Element{1});
      }
      for (int c = 0; c <= n; ++c) A.push_back(wr->encode({l, pt(c)}));
    }
    auto w = boundary(*wr, A);
    CHECK(w.set.size() == static_cast<std::size_t>((n + 1) << (n + 1)));
    CHECK(w.boundary.size() == static_cast<std::size_t>(2u << (n + 1)));
    CHECK(w.ratio == Ratio::of(n + 1, 2));
  }
}

TEST_CASE("spectral witness on Z matches the path eigenvalue") {
  auto z = Z();
  for (int k = 1; k <= 12; ++k) {
    auto sr = dirichlet_eigenvector(*z, interval(0, k - 1));
    CHECK(sr.converged);
    double lam = 2 - 2 * std::cos(M_PI / (k + 1));
    CHECK(sr.lambda == doctest::Approx(lam).epsilon(1e-9));
    CHECK(gradient_ratio(*z, sr.f, 2).value == doctest::Approx(std::sqrt(2 * lam)).epsilon(1e-8));
  }
  auto run = profile_spectral(*z, 8);
  for (std::size_t i = 1; i < run.points.size(); ++i) CHECK(run.points[i].value >= run.points[i - 1].value);
  CHECK(run.points[0].value == doctest::Approx(0.5));
  auto c4 = C(4);
  auto sr = dirichlet_eigenvector(*c4, enumerate_finite_group(*c4));
  CHECK(sr.lambda == doctest::Approx(0.0).epsilon(1e-12));
  auto csv = profile_csv(run.points);
  CHECK(csv.find("spectral") != std::string::npos);
}

TEST_CASE("csv format") {
  auto run = profile_exact(*Z(), 2, 2);
  CHECK(profile_csv(run.points) ==
        "n,value_num,value_den_or_float,method,exact,witness_size\n1,1,2,exact,true,1\n2,1,1,exact,true,2\n");
  auto j = profile_witness_json(*Z(), run.points);
  CHECK(j[1]["witness"].size() == 2);
}

TEST_CASE("lift examples") {
  auto sh = make(Family::Shuffler);
  auto c = lift_check(*sh, FiniteFunction::indicator({pt(0)}), {1, 2, 3});
  CHECK(c.V == interval(-1, 1));
  CHECK(c.support_size == 6);
  CHECK(c.expected_support == 6);
  CHECK(*c.lifted[0].exact == 4);
  CHECK(*c.base[0].exact == 4);

  auto wr = make(Family::Wreath);
  c = lift_check(*wr, FiniteFunction::indicator(interval(0, 1)), {1});
  CHECK(c.V == interval(-1, 2));
  CHECK(c.support_size == 32);
  CHECK(*c.lifted[0].exact == *c.base[0].exact);
}

TEST_CASE("lift against direct gradient on the halo") {
  std::vector<std::shared_ptr<HaloGroup>> gs;
  for (Family f : {Family::Wreath, Family::Shuffler, Family::Juggler, Family::Designer, Family::Cloner, Family::Upcloner}) {
    gs.push_back(make(f));
  }
  std::vector<FiniteFunction> fs{
      FiniteFunction::indicator({pt(0)}),
      FiniteFunction::exact({{pt(0), mpq_class(3)}, {pt(1), mpq_class(1, 2)}}),
  };
  for (const auto& g : gs) {
    for (const auto& f : fs) {
      auto c = lift_check(*g, f, {1, 2, 3});
      CHECK(mpz_class(static_cast<unsigned long>(c.support_size)) == c.expected_support);
      if (c.support_size > 50000) continue;
      auto lifted = almost_invariant_lift(*g, f);
      CHECK(lifted.size() == c.support_size);
      for (std::size_t i = 0; i < 3; ++i) {
        double p = static_cast<double>(i + 1);
        auto direct = gradient_ratio(*g, lifted, p);
        if (p == 1) {
          CHECK(*direct.exact == *c.lifted[0].exact);
          CHECK(*direct.exact == *c.base[0].exact);
        } else {
          CHECK(direct.value == doctest::Approx(c.base[i].value).epsilon(1e-10));
          CHECK(c.lifted[i].value == doctest::Approx(c.base[i].value).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("lift of a constant on a finite base") {
  HaloParams p;
  auto sh = make_halo(Family::Shuffler, C(3), p);
  auto f = FiniteFunction::indicator(enumerate_finite_group(*C(3)));
  auto c = lift_check(*sh, f, {1, 2});
  CHECK(c.support_size == 18);
  CHECK(*c.lifted[0].exact == 0);
  CHECK(*c.base[0].exact == 0);
  CHECK(c.lifted[1].value == 0);
}

TEST_CASE("power transform") {
  auto z = Z();
  auto delta = FiniteFunction::indicator({pt(0)});
  auto h = power_transform(delta, 2, 1);
  CHECK(h.points() == delta.points());
  auto c = power_inequality(*z, delta, 2, 1);
  CHECK(c.lhs == doctest::Approx(4));
  CHECK(c.rhs == doctest::Approx(2 * std::sqrt(2.0) * 2 * 2));
  CHECK(c.holds);
  CHECK_THROWS_AS(power_transform(delta, 2, 2), ContractViolation);
  CHECK_THROWS_AS(power_transform(delta, 1, 2), ContractViolation);

  auto z2 = Z2();
  Ball b = ball(*z2, 4);
  std::mt19937_64 rng(5);
  int violations = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<Element, double>> e;
    for (const auto& x : b.elements) {
      if (rng() % 3 == 0) e.emplace_back(x, static_cast<double>(rng() % 1000) / 100.0 - 5.0);
    }
    auto f = FiniteFunction::real(e);
    if (f.empty()) continue;
    for (auto [pp, qq] : {std::pair{2.0, 1.0}, {3.0, 1.0}, {3.0, 2.0}}) {
      if (!power_inequality(*z2, f, pp, qq).holds) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("product boundary") {
  auto zz = std::make_shared<ProductGroup>(Z(), Z());
  auto r = product_boundary(zz, {pt(0)}, {pt(0)});
  CHECK(r.product.boundary.size() == 4);
  CHECK(r.identity_holds);
  r = product_boundary(zz, interval(0, 2), interval(0, 4));
  CHECK(r.product.boundary.size() == 16);
  CHECK(r.formula.size() == 16);
  CHECK(r.identity_holds);
  CHECK(r.harmonic_holds);

  auto cz = std::make_shared<ProductGroup>(C(5), Z());
  r = product_boundary(cz, enumerate_finite_group(*C(5)), interval(0, 2));
  CHECK(r.identity_holds);
  CHECK(r.inv_ratio_a == 0);
  CHECK(r.product.boundary.size() == 10);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Element> A, B;
    for (int x = -3; x <= 3; ++x) {
      if (rng() % 2) A.push_back(pt(x));
      if (rng() % 2) B.push_back(pt(x));
    }
    if (A.empty() || B.empty()) continue;
    r = product_boundary(zz, A, B);
    CHECK(r.identity_holds);
    CHECK(r.harmonic_holds);
  }
}

TEST_CASE("transported witnesses never beat the ambient optimum") {
  auto sh = make(Family::Shuffler);
  auto ambient = profile_exact(*sh, 4, 3);
  for (int k = 1; k <= 4; ++k) {
    std::vector<Element> A;
    for (int x = 0; x < k; ++x) A.push_back(sh->encode({sh->lamp_identity(), pt(x)}));
    auto r = boundary(*sh, A).ratio;
    CHECK_FALSE(*ambient.points[k - 1].ratio < r);
  }
}
