// Acceptance suite: one PASS/FAIL line per criterion, with analysis lines
// under failures.
#include <CLI11.hpp>

#include <unistd.h>

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "bounds.hpp"
#include "decompose.hpp"
#include "descriptor.hpp"
#include "embeddings.hpp"
#include "experiment.hpp"
#include "isoperimetry.hpp"
#include "lampgraph.hpp"

using namespace halo;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> notes;
  void fail(std::string why) {
    pass = false;
    notes.push_back(std::move(why));
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

HaloPtr halo(std::string_view desc) {
  auto g = std::dynamic_pointer_cast<const HaloGroup>(make_group(desc));
  if (!g) throw ContractViolation(std::string(desc) + " is not a halo product");
  return g;
}

Element pt(std::int64_t x) { return Element{x}; }
Element pt(std::int64_t x, std::int64_t y) { return Element{x, y}; }

std::vector<Element> interval(std::int64_t a, std::int64_t b) {
  std::vector<Element> v;
  for (auto x = a; x <= b; ++x) v.push_back(pt(x));
  return v;
}

template <class... T>
std::string cat(const T&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

const std::vector<std::string> kSixFamilies{"wreath(C2, Z)", "shuffler(Z)",  "juggler(2, Z)",
                                            "designer(C2, Z)", "cloner(GF2, Z)", "upcloner(GF2, Z)"};

Outcome lift_ratios() {
  Outcome o;
  std::vector<std::pair<std::string, FiniteFunction>> fs{{"delta_0", FiniteFunction::indicator({pt(0)})},
                                                         {"1[0,1]", FiniteFunction::indicator(interval(0, 1))},
                                                         {"1[0,2]", FiniteFunction::indicator(interval(0, 2))}};
  int cases = 0;
  double worst = 0;
  for (const auto& d : kSixFamilies) {
    auto g = halo(d);
    for (const auto& [fname, f] : fs) {
      auto c = lift_check(*g, f, {1, 2, 3}, 100000000);
      ++cases;
      std::string tag = d + " " + fname;
      mpz_class expect = mpz_class(static_cast<unsigned long>(c.U.size())) * lamp_growth(*g, static_cast<int>(c.V.size()));
      o.check(c.expected_support == expect, tag + ": expected support disagrees with closed form");
      o.check(mpz_class(static_cast<unsigned long>(c.support_size)) == expect,
              cat(tag, ": |supp g| = ", c.support_size, ", want ", expect.get_str()));
      o.check(c.lifted[0].exact && c.base[0].exact && *c.lifted[0].exact == *c.base[0].exact,
              tag + ": p=1 ratios differ");
      for (std::size_t i = 1; i < 3; ++i) {
        double rel = std::abs(c.lifted[i].value - c.base[i].value) / std::max(1e-300, std::abs(c.base[i].value));
        worst = std::max(worst, rel);
        o.check(rel <= 1e-10, cat(tag, ": p=", i + 1, " relative error ", rel));
      }
    }
  }
  o.summary = cat(cases, " family/function cases, p=1 exact, worst p>1 relative error ", worst);
  return o;
}

Outcome lamp_growth_oracle() {
  Outcome o;
  std::vector<std::pair<std::string, std::vector<std::uint64_t>>> want{
      {"shuffler(Z)", {1, 2, 6, 24}},   {"wreath(C2, Z)", {2, 4, 8, 16}},   {"designer(C2, Z)", {2, 8, 48}},
      {"juggler(2, Z)", {2, 24, 720}}, {"cloner(GF2, Z)", {1, 6, 168}}, {"upcloner(GF2, Z)", {1, 2, 8, 64}}};
  int checked = 0;
  for (const auto& [d, seq] : want) {
    auto g = halo(d);
    for (std::size_t n = 1; n <= seq.size(); ++n) {
      auto got = enumerate_block(*g, interval(0, static_cast<std::int64_t>(n) - 1)).size();
      ++checked;
      o.check(got == seq[n - 1], cat(d, " n=", n, ": enumerated ", got, ", want ", seq[n - 1]));
      o.check(lamp_growth(*g, static_cast<int>(n)) == static_cast<unsigned long>(seq[n - 1]),
              cat(d, " n=", n, ": closed form disagrees"));
    }
  }
  o.summary = cat(checked, " block cardinalities match");
  return o;
}

// Random block element: k distinct points from a coordinate box.
template <class Point>
LampConfig random_block_element(const HaloGroup& g, std::mt19937_64& rng, Point point) {
  std::vector<Element> R;
  std::size_t k = 1 + rng() % 3;
  while (R.size() < k) {
    Element e = point(rng);
    if (std::find(R.begin(), R.end(), e) == R.end()) R.push_back(e);
  }
  auto blk = enumerate_block(g, R);
  return blk[rng() % blk.size()];
}

struct RoundTrips {
  int ok = 0, decomposition_errors = 0, mismatches = 0, not_decreasing = 0;
  int unreachable = 0, reachable_failed = 0;
  std::string first_error;
};

RoundTrips upcloner_round_trips(int count, std::uint64_t seed) {
  auto up = halo("upcloner(GF2, Z^2:lex)");
  std::mt19937_64 rng(seed);
  RoundTrips r;
  auto point = [](std::mt19937_64& g) {
    return pt(static_cast<std::int64_t>(g() % 7) - 3, static_cast<std::int64_t>(g() % 7) - 3);
  };
  for (int i = 0; i < count; ++i) {
    auto s = random_block_element(*up, rng, point);
    bool reachable = upcloner_reachable(*up, s);
    if (!reachable) ++r.unreachable;
    try {
      auto d = decompose_upcloner(*up, s);
      auto x = evaluate_word(*up, d.word);
      if (!(x.lamp == s) || x.cursor != up->base()->identity()) {
        ++r.mismatches;
      } else if (!d.strictly_decreasing()) {
        ++r.not_decreasing;
      } else {
        ++r.ok;
      }
    } catch (const DecompositionError& e) {
      ++r.decomposition_errors;
      if (reachable) ++r.reachable_failed;
      if (r.first_error.empty()) r.first_error = up->format_lamp(s) + ": " + e.what();
    }
  }
  return r;
}

Outcome decomposition_round_trip() {
  Outcome o;
  auto up = upcloner_round_trips(200, 2024);
  int gluing_ok = 0;
  std::mt19937_64 rng(4048);
  auto point = [](std::mt19937_64& g) { return pt(static_cast<std::int64_t>(g() % 7) - 3); };
  for (const auto& d : {"shuffler(Z)", "wreath(C2, Z)"}) {
    auto g = halo(d);
    for (int i = 0; i < 100; ++i) {
      auto s = random_block_element(*g, rng, point);
      try {
        auto dec = decompose_gluing(*g, s);
        auto x = evaluate_word(*g, dec.word);
        bool good = x.lamp == s && x.cursor == g->base()->identity() && dec.strictly_decreasing();
        if (good) ++gluing_ok;
        o.check(good, cat(d, ": round-trip failed on ", g->format_lamp(s)));
      } catch (const Error& e) {
        o.fail(cat(d, ": ", e.what()));
      }
    }
  }
  o.summary = cat("gluing ", gluing_ok, "/200, upcloner Z^2-lex ", up.ok, "/200");
  if (up.ok != 200) {
    o.fail(cat("upcloner: ", up.decomposition_errors, " DecompositionError, ", up.mismatches, " mismatches, ",
               up.not_decreasing, " non-decreasing traces"));
    o.notes.push_back(cat(up.unreachable, " of 200 sampled elements have an entry (p,q) with q-p outside N^2; ",
                          up.reachable_failed, " failures are inside the N^2 pattern"));
    o.notes.push_back(
        "conjugates of the natural generators are transvections tau_{p,q} with q-p in N^2, and matrices on that "
        "pattern form a subgroup, so FU(Z^2) is not naturally generated for the lex order; the case analysis "
        "stops when SubsetLength fails to decrease");
    o.notes.push_back("first failure: " + up.first_error);
  }
  return o;
}

using Dense3 = std::array<int, 9>;

Dense3 mul3(const Dense3& a, const Dense3& b, const Field& F) {
  Dense3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::uint8_t s = 0;
      for (int k = 0; k < 3; ++k)
        s = F.add(s, F.mul(static_cast<std::uint8_t>(a[i * 3 + k]), static_cast<std::uint8_t>(b[k * 3 + j])));
      c[i * 3 + j] = s;
    }
  return c;
}

Dense3 elem3(int r, int c, std::uint8_t l) {
  Dense3 m{1, 0, 0, 0, 1, 0, 0, 0, 1};
  m[r * 3 + c] = l;
  return m;
}

Outcome commutator_identity() {
  Outcome o;
  std::mt19937_64 rng(31);
  int trials = 0, lm_form = 0, l_form = 0;
  for (const auto& d : {"cloner(GF2, Z)", "cloner(GF3, Z)"}) {
    auto g = halo(d);
    const Field& F = g->field();
    for (int i = 0; i < 100; ++i) {
      std::set<std::int64_t> pts;
      while (pts.size() < 3) pts.insert(static_cast<std::int64_t>(rng() % 21) - 10);
      auto it = pts.begin();
      auto r = *it++, f = *it++, s = *it;
      auto l = static_cast<std::uint8_t>(rng() % F.q()), m = static_cast<std::uint8_t>(rng() % F.q());
      Dense3 o4 = mul3(mul3(mul3(elem3(0, 1, F.neg(l)), elem3(1, 2, F.neg(m)), F), elem3(0, 1, l), F), elem3(1, 2, m), F);
      auto lm = F.mul(l, m);
      bool is_lm = o4 == elem3(0, 2, lm), is_l = o4 == elem3(0, 2, l);
      lm_form += is_lm;
      l_form += is_l;
      auto want = [&](std::uint8_t v) { return v ? g->transvection(pt(r), pt(s), v) : g->lamp_identity(); };
      auto got = commutator_transvection(*g, pt(r), pt(f), pt(s), l, m);
      ++trials;
      o.check(is_lm || is_l, cat(d, ": oracle matches neither form"));
      o.check(got == want(is_lm ? lm : l), cat(d, ": commutator disagrees with oracle at r=", r, " f=", f, " s=", s,
                                                " l=", int(l), " m=", int(m)));
    }
    auto form = certify_commutator(*g);
    o.check(form == CommutatorForm::LambdaMu, cat(d, ": certified ", commutator_form_name(form)));
  }
  o.check(lm_form == trials, cat("lambda*mu form held in ", lm_form, "/", trials));
  // the upcloner decomposer reaches tau_{0,2} through the certified commutator
  auto up = halo("upcloner(GF3, Z^2:lex)");
  o.check(certify_commutator(*up) == CommutatorForm::LambdaMu, "upcloner GF3: certified form is not lambda*mu");
  auto t = up->transvection(pt(0, 0), pt(2, 0), 2);
  auto dec = decompose_upcloner(*up, t);
  o.check(evaluate_word(*up, dec.word).lamp == t, "upcloner: commutator route does not rebuild tau_{0,2}(2)");
  o.summary = cat(trials, " random commutators match the matrix oracle, certified form lambda*mu (",
                  l_form, " also fit lambda)");
  auto rt = upcloner_round_trips(200, 2024);
  if (rt.ok != 200) {
    o.fail(cat("the criterion also requires criterion 3 to pass; its upcloner round-trip fails on ",
               200 - rt.ok, "/200 elements"));
    o.notes.push_back("the commutator identity itself holds; see criterion 3 for the generation failure");
  }
  return o;
}

// Largest |A|/|dA| over subsets of {-(n-1),...,n-1} of size <= n holding 0.
std::pair<long, long> subset_oracle(int n) {
  int w = 2 * n - 1;
  long bn = 0, bd = 1;
  for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
    if (!(mask >> (n - 1) & 1) || std::popcount(mask) > n) continue;
    std::set<int> A;
    for (int i = 0; i < w; ++i)
      if (mask >> i & 1) A.insert(i - (n - 1));
    std::set<int> dA;
    for (int a : A)
      for (int s : {-1, 1})
        if (!A.count(a + s)) dA.insert(a + s);
    long num = static_cast<long>(A.size()), den = static_cast<long>(dA.size());
    if (num * bd > bn * den) bn = num, bd = den;
  }
  long g = std::gcd(bn, bd);
  return {bn / g, bd / g};
}

Outcome exact_profiles() {
  Outcome o;
  auto z = make_group("Z");
  auto run = profile_exact(*z, 10, 10);
  for (const auto& p : run.points) {
    o.check(p.exact && p.ratio && *p.ratio == Ratio::of(p.n, 2), cat("j(", p.n, ") = ", p.ratio ? p.ratio->str() : "?"));
    if (p.n <= 7) {
      auto [a, b] = subset_oracle(p.n);
      o.check(p.ratio && *p.ratio == Ratio::of(a, b), cat("subset oracle disagrees at n=", p.n));
    }
  }
  auto fol = folner_function(run.points, mpq_class(2));
  o.check(fol && *fol == 4, cat("Fol(2) = ", fol ? std::to_string(*fol) : "none"));
  o.summary = cat("j(n) = n/2 for n <= 10, subset oracle agrees for n <= 7, Fol(2) = ", fol ? *fol : 0);
  return o;
}

Outcome lamplighter_box() {
  Outcome o;
  auto wr = halo("wreath(C2, Z)");
  for (int n = 0; n <= 6; ++n) {
    std::vector<Element> A;
    for (std::uint32_t mask = 0; mask < (1u << (n + 1)); ++mask) {
      WreathLamps l;
      for (int i = 0; i <= n; ++i)
        if (mask >> i & 1) l.entries.emplace_back(pt(i), Element{1});
      for (int c = 0; c <= n; ++c) A.push_back(wr->encode({l, pt(c)}));
    }
    // direct neighbour scan with the membership test of the box
    auto in_box = [&](const HaloElement& x) {
      for (const auto& p : wr->support(x.lamp))
        if (p[0] < 0 || p[0] > n) return false;
      return x.cursor[0] >= 0 && x.cursor[0] <= n;
    };
    std::set<Element> out;
    for (const auto& a : A) {
      for (const auto& s : wr->generators()) {
        auto y = wr->multiply(a, s);
        if (!in_box(wr->decode(y))) out.insert(y);
      }
    }
    auto w = boundary(*wr, A);
    std::size_t size = static_cast<std::size_t>(n + 1) << (n + 1), dsize = std::size_t{2} << (n + 1);
    o.check(A.size() == size && w.set.size() == size, cat("n=", n, ": |A| = ", w.set.size()));
    o.check(out.size() == dsize && w.boundary.size() == dsize,
            cat("n=", n, ": |dA| = ", w.boundary.size(), " (scan ", out.size(), "), want ", dsize));
    o.check(w.ratio == Ratio::of(n + 1, 2), cat("n=", n, ": ratio ", w.ratio.str()));
  }
  o.summary = "|A_n| = (n+1)2^(n+1), |dA_n| = 2^(n+2) for n <= 6";
  return o;
}

Outcome commutativity() {
  Outcome o;
  auto w = commutativity_constant(*halo("wreath(C2, Z)"), 3);
  o.check(w.D == 0, cat("wreath D = ", w.D));
  std::string s = cat("wreath D=", w.D);
  for (const auto& d : {"shuffler(Z)", "cloner(GF2, Z)"}) {
    auto g = halo(d);
    auto r = commutativity_constant(*g, 3);
    s += cat(", ", d, " D=", r.D);
    o.check(r.D == 1, cat(d, ": D = ", r.D));
    if (!r.witness_lamps || !r.witness_sets) {
      o.fail(cat(d, ": no witness"));
      continue;
    }
    o.check(r.witness_distance == r.D - 1, cat(d, ": witness at distance ", r.witness_distance));
    auto [x, y] = *r.witness_lamps;
    o.check(!(g->compose(x, y) == g->compose(y, x)), cat(d, ": witness lamps commute"));
    auto [A, B] = *r.witness_sets;
    std::sort(A.begin(), A.end());
    std::sort(B.begin(), B.end());
    o.check(g->supported_in(x, A) && g->supported_in(y, B), cat(d, ": witness lamps outside their blocks"));
  }
  o.summary = s + ", non-commuting witnesses at distance D-1";
  return o;
}

Outcome ystar_iso() {
  Outcome o;
  auto sh = halo("shuffler(Z)");
  auto net = greedy_net(sh->base(), 3, 1);
  auto Y = build_ystar(*sh, net, 0);
  auto A = net_graph(net);
  auto iso = check_iso_to_lamplighter(Y.graph, Y.block_graph, A);
  o.check(iso.isomorphic, "Y* not isomorphic: " + iso.reason);
  auto c = check_net(net, 3);
  o.check(c.separated && c.maximal, "net not separated and maximal: " + c.detail);
  o.check(c.lower_bound && c.upper_bound, "metric bounds fail: " + c.detail);
  o.summary = cat("Y* with ", Y.graph.size(), " vertices is isomorphic to the lamplighter graph; metric bounds on ",
                  c.pairs, " net pairs");
  return o;
}

Outcome power_inequality_check() {
  Outcome o;
  auto z2 = make_group("Z^2");
  Ball b = ball(*z2, 4);
  std::mt19937_64 rng(5);
  int violations = 0, evaluated = 0;
  double tightest = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::pair<Element, double>> e;
    for (const auto& x : b.elements)
      if (rng() % 3 == 0) e.emplace_back(x, static_cast<double>(rng() % 2001) / 100.0 - 10.0);
    if (e.empty()) e.emplace_back(b.elements[rng() % b.size()], 1.0);
    auto f = FiniteFunction::real(e);
    for (auto [p, q] : {std::pair{2.0, 1.0}, {3.0, 1.0}, {3.0, 2.0}}) {
      auto c = power_inequality(*z2, f, p, q);
      ++evaluated;
      if (!c.holds) ++violations;
      if (c.rhs > 0) tightest = std::max(tightest, c.lhs / c.rhs);
    }
  }
  o.check(violations == 0, cat(violations, " violations"));
  o.summary = cat(evaluated, " function/exponent cases, ", violations, " violations, largest lhs/rhs ", tightest);
  return o;
}

Outcome product_boundary_check() {
  Outcome o;
  auto zz = std::make_shared<ProductGroup>(make_group("Z"), make_group("Z"));
  std::mt19937_64 rng(9);
  int pairs = 0;
  while (pairs < 200) {
    std::vector<Element> A, B;
    for (int x = -4; x <= 4; ++x) {
      if (rng() % 2) A.push_back(pt(x));
      if (rng() % 2) B.push_back(pt(x));
    }
    if (A.empty() || B.empty()) continue;
    ++pairs;
    auto r = product_boundary(zz, A, B);
    // independent set-level oracle for (dA x B) u (A x dB)
    auto dA = boundary(*zz->left(), A).boundary, dB = boundary(*zz->right(), B).boundary;
    std::set<Element> formula;
    for (const auto& a : dA)
      for (const auto& b : B) formula.insert(zz->pair(a, b));
    for (const auto& a : A)
      for (const auto& b : dB) formula.insert(zz->pair(a, b));
    std::set<Element> got(r.product.boundary.begin(), r.product.boundary.end());
    o.check(r.identity_holds && got == formula, cat("pair ", pairs, ": boundary identity fails"));
    o.check(r.harmonic_holds, cat("pair ", pairs, ": harmonic-sum inequality fails"));
  }
  o.summary = cat(pairs, " pairs: boundary identity and harmonic-sum inequality hold");
  return o;
}

Outcome embeddings() {
  Outcome o;
  std::vector<std::string> parts;
  auto report = [&](const std::string& name, const MorphismCheck& c) {
    o.check(c.identity && c.homomorphism && c.injective,
            cat(name, ": identity ", c.identity, " homomorphism ", c.homomorphism, " injective ", c.injective, " ",
                c.counterexample));
    parts.push_back(cat(name, " (", c.elements, " elements, ", c.pairs, " pairs)"));
  };
  auto sh = halo("shuffler(Z)");
  auto phi = wreath_in_shuffler(sh, sublattice_cosets(sh->base(), {2}));
  report("wreath_in_shuffler(2Z)", check_morphism(phi, domain_sample(phi, 4), 1000, 11));

  auto psi = doubling(sh->base());
  auto half = [](const Element& x) {
    Element y = x;
    for (auto& c : y) c /= 2;
    return y;
  };
  auto endo = shuffler_endomorphism(sh, psi, half);
  Ball b4 = ball(*sh, 4);
  auto c = check_morphism(endo, b4.elements, 1000, 12, b4.elements);
  report("shuffler endomorphism", c);
  if (!c.outside_image) {
    o.fail("no non-surjectivity witness in Ball(4)");
  } else {
    o.check(!in_shuffler_image(*sh, psi, *c.outside_image), "reported witness lies in the image");
    parts.push_back("non-image witness " + sh->format(*c.outside_image));
  }
  for (const auto& d : {"juggler(2, Z)", "designer(C2, Z)", "cloner(GF3, Z)"}) {
    auto g = halo(d);
    auto lp = lamplighter_in_halo(g);
    report(std::string("lamplighter in ") + d, check_morphism(lp, domain_sample(lp, 4), 1000, 13));
  }
  for (std::size_t i = 0; i < parts.size(); ++i) o.summary += (i ? "; " : "") + parts[i];
  return o;
}

// ratio of the shuffler at phi_inverse(x) = y, written as a function of y
double shuffler_ratio_at(double y) { return y * std::log(y) / (std::log(y) + std::lgamma(y + 1)); }

Outcome asymptotic_fit() {
  Outcome o;
  auto sh = halo("shuffler(Z)");
  std::string vals;
  for (int e = 3; e <= 9; ++e) {
    double x = std::pow(10.0, e);
    double y = phi_inverse(*sh, x);
    double r = y * std::log(y) / std::log(x);
    vals += cat(e == 3 ? "" : " ", "1e", e, ":", std::round(r * 1000) / 1000);
    o.check(r >= 0.8 && r <= 1.2, cat("x = 1e", e, ": y ln y / ln x = ", r, " outside [0.8, 1.2]"));
  }
  auto up = halo("upcloner(GF2, Z)");
  auto [gen, full] = gluing_orders(*up, {pt(1), pt(3)}, {pt(2), pt(3)});
  o.check(gen == 4 && full == 8, cat("gluing orders ", gen, " < ", full));
  o.summary = cat("ratios ", vals, "; upcloner gluing ", gen, " < ", full);
  if (!o.pass) {
    // with ln x = ln y + ln y!, the ratio is about 1 + 1/(ln y - 1) and enters the band only for ln y > 6
    double lo = 3, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
      double mid = std::sqrt(lo * hi);
      (shuffler_ratio_at(mid) > 1.2 ? lo : hi) = mid;
    }
    double log10x = (std::log(hi) + std::lgamma(hi + 1)) / std::log(10.0);
    o.notes.push_back(cat("Stirling: ln x = y ln y - y + O(ln y), so y ln y / ln x = 1 + 1/(ln y - 1) + o(1/ln y); "
                          "the ratio tends to 1 but first drops below 1.2 at y = ",
                          std::round(hi), ", i.e. x = 10^", std::round(log10x)));
    o.notes.push_back("the band holds asymptotically; the finite window 1e3..1e9 is too small by hundreds of orders of magnitude");
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  Outcome o;
  int compared = 0;
  for (const auto& d : {"Z^2", "shuffler(Z)", "wreath(C2, Z)"}) {
    auto g = make_group(d);
    for (std::uint64_t seed : {1u, 17u}) {
      HeuristicOptions h;
      h.seed = seed;
      for (Method m : {Method::Greedy, Method::Anneal}) {
        auto a = profile_csv(profile_heuristic(*g, 8, m, h).points);
        auto b = profile_csv(profile_heuristic(*g, 8, m, h).points);
        ++compared;
        o.check(a == b, cat(d, " ", method_name(m), " seed ", seed, ": CSV differs on rerun"));
      }
      auto a = profile_csv(profile_spectral(*g, 6, h).points);
      auto b = profile_csv(profile_spectral(*g, 6, h).points);
      ++compared;
      o.check(a == b, cat(d, " spectral seed ", seed, ": CSV differs on rerun"));
    }
  }
  // full experiment pipeline, byte for byte
  auto tmp = std::filesystem::temp_directory_path() / cat("halo_acceptance_", ::getpid());
  std::string cfg = R"j({"group": "shuffler(Z)", "method": "anneal", "n_max": 6, "seed": 42, "bounds": "standard"})j";
  run_experiment_text(cfg, "run.json", tmp / "a");
  run_experiment_text(cfg, "run.json", tmp / "b");
  for (const auto& f : {"profile.csv", "bounds.csv", "witnesses.json", "manifest.json"}) {
    ++compared;
    o.check(slurp(tmp / "a" / f) == slurp(tmp / "b" / f), cat("experiment ", f, " differs on rerun"));
  }
  std::filesystem::remove_all(tmp);

  int exact_cmp = 0;
  for (auto [d, n, r] : {std::tuple{"Z^2", 7, 4}, {"wreath(C2, Z)", 6, 4}, {"shuffler(Z)", 5, 3}}) {
    auto g = make_group(d);
    ExactOptions one, many;
    many.workers = 4;
    auto a = profile_exact(*g, n, r, one), b = profile_exact(*g, n, r, many);
    ++exact_cmp;
    o.check(profile_csv(a.points) == profile_csv(b.points) &&
                profile_witness_json(*g, a.points).dump() == profile_witness_json(*g, b.points).dump(),
            cat(d, ": exact search differs between 1 and 4 workers"));
  }
  o.summary = cat(compared, " seeded reruns byte-identical; exact search identical at 1 and 4 workers on ", exact_cmp,
                  " groups");
  return o;
}

const std::vector<std::pair<std::string, Outcome (*)()>> kCriteria{
    {"lift ratio equality", lift_ratios},
    {"lamp growth oracle", lamp_growth_oracle},
    {"decomposition round-trip", decomposition_round_trip},
    {"commutator identity", commutator_identity},
    {"exact profiles", exact_profiles},
    {"lamplighter box", lamplighter_box},
    {"large-scale commutativity", commutativity},
    {"Y* isomorphism", ystar_iso},
    {"power inequality", power_inequality_check},
    {"product boundary", product_boundary_check},
    {"embeddings", embeddings},
    {"asymptotic fit", asymptotic_fit},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite for the halo library"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, static_cast<int>(kCriteria.size())));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = kCriteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " " << kCriteria[i].first << ": "
              << o.summary << " [" << std::round(secs * 10) / 10 << "s]\n";
    if (!o.pass) {
      ++failed;
      for (std::size_t k = 0; k < o.notes.size() && k < 12; ++k) std::cout << "    " << o.notes[k] << "\n";
    }
    std::cout.flush();
  }
  return failed ? 1 : 0;
}
