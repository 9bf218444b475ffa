#include "isoperimetry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

namespace halo {

// ---------------------------------------------------------------- Ratio

Ratio Ratio::of(const mpz_class& n, const mpz_class& d) {
  if (n < 0 || d < 0) throw ContractViolation("ratio must be non-negative");
  Ratio r;
  if (d == 0) {
    if (n == 0) throw ContractViolation("ratio 0/0");
    r.num = 1;
    r.den = 0;
    return r;
  }
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  r.num = n / g;
  r.den = d / g;
  return r;
}

double Ratio::to_double() const {
  if (infinite()) return std::numeric_limits<double>::infinity();
  return mpq_class(num, den).get_d();
}

std::string Ratio::str() const {
  if (infinite()) return "inf";
  if (den == 1) return num.get_str();
  return num.get_str() + "/" + den.get_str();
}

bool operator<(const Ratio& a, const Ratio& b) {
  if (a.infinite()) return false;
  if (b.infinite()) return true;
  return a.num * b.den < b.num * a.den;
}

// ------------------------------------------------------- FiniteFunction

namespace {

template <class V>
void sort_entries(std::vector<std::pair<Element, V>>& e) {
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i].first == e[i - 1].first) throw ContractViolation("duplicate point in function");
  }
}

// Neumaier summation.
struct Sum {
  double s = 0, c = 0;
  void add(double x) {
    double t = s + x;
    if (std::fabs(s) >= std::fabs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double value() const { return s + c; }
};

double ppow(double x, double p) {
  x = std::fabs(x);
  if (p == 1) return x;
  if (p == 2) return x * x;
  return std::pow(x, p);
}

void check_p(double p) {
  if (!(p >= 1) || !std::isfinite(p)) throw ContractViolation("norm exponent must be >= 1");
}

}  // namespace

FiniteFunction FiniteFunction::exact(std::vector<std::pair<Element, mpq_class>> entries) {
  sort_entries(entries);
  FiniteFunction f;
  for (auto& [e, v] : entries) {
    v.canonicalize();
    if (v == 0) continue;
    f.points_.push_back(e);
    f.values_.push_back(v.get_d());
    f.exact_values_.push_back(v);
  }
  return f;
}

FiniteFunction FiniteFunction::real(std::vector<std::pair<Element, double>> entries) {
  sort_entries(entries);
  FiniteFunction f;
  f.exact_ = false;
  for (auto& [e, v] : entries) {
    if (!std::isfinite(v)) throw ContractViolation("function value is not finite");
    if (v == 0) continue;
    f.points_.push_back(e);
    f.values_.push_back(v);
  }
  return f;
}

FiniteFunction FiniteFunction::indicator(std::vector<Element> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<std::pair<Element, mpq_class>> e;
  e.reserve(points.size());
  for (auto& p : points) e.emplace_back(std::move(p), mpq_class(1));
  return exact(std::move(e));
}

const mpq_class& FiniteFunction::exact_value(std::size_t i) const {
  if (!exact_) throw ContractViolation("function has no exact values");
  return exact_values_[i];
}

std::optional<std::size_t> FiniteFunction::find(const Element& e) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), e);
  if (it == points_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

double FiniteFunction::at(const Element& e) const {
  auto i = find(e);
  return i ? values_[*i] : 0.0;
}

nlohmann::json FiniteFunction::to_json(const Group& g) const {
  auto out = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    nlohmann::json v;
    if (exact_) {
      v = exact_values_[i].get_str();
    } else {
      v = values_[i];
    }
    out.push_back({{"element", g.format(points_[i])}, {"value", v}});
  }
  return out;
}

// ------------------------------------------------------ boundaries, ratios

SubsetWitness boundary(const Group& g, std::vector<Element> A) {
  if (A.empty()) throw ContractViolation("boundary of empty set");
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  std::vector<Element> out;
  for (const auto& a : A) {
    for (const auto& s : g.generators()) {
      Element x = g.multiply(a, s);
      if (!std::binary_search(A.begin(), A.end(), x)) out.push_back(std::move(x));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  SubsetWitness w;
  w.ratio = Ratio::of(static_cast<std::int64_t>(A.size()), static_cast<std::int64_t>(out.size()));
  w.set = std::move(A);
  w.boundary = std::move(out);
  return w;
}

std::uint64_t directed_cut(const Group& g, const std::vector<Element>& A0) {
  std::vector<Element> A = A0;
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  std::uint64_t n = 0;
  for (const auto& a : A) {
    for (const auto& s : g.generators()) {
      if (!std::binary_search(A.begin(), A.end(), g.multiply(a, s))) ++n;
    }
  }
  return n;
}

GradRatio gradient_ratio(const Group& g, const FiniteFunction& f, double p) {
  check_p(p);
  if (f.empty()) throw ContractViolation("gradient ratio of the zero function");
  GradRatio r;
  bool exact = p == 1 && f.is_exact();
  mpq_class qnum = 0, qden = 0;
  Sum num, den;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Element& y = f.points()[i];
    for (const auto& s : g.generators()) {
      auto j = f.find(g.multiply(y, s));
      if (j) {
        num.add(ppow(f.value(i) - f.value(*j), p));
        if (exact) qnum += abs(f.exact_value(i) - f.exact_value(*j));
      } else {
        // the pair (ys, s^-1) sees the same jump from outside the support
        num.add(2 * ppow(f.value(i), p));
        if (exact) qnum += 2 * abs(f.exact_value(i));
      }
    }
    den.add(ppow(f.value(i), p));
    if (exact) qden += abs(f.exact_value(i));
  }
  if (exact) {
    r.exact = qnum / qden;
    r.value = r.exact->get_d();
  } else {
    double x = num.value() / den.value();
    r.value = p == 1 ? x : std::pow(x, 1.0 / p);
  }
  return r;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Greedy: return "greedy";
    case Method::Anneal: return "anneal";
    case Method::Spectral: return "spectral";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view s) {
  for (Method m : {Method::Exact, Method::Greedy, Method::Anneal, Method::Spectral}) {
    if (method_name(m) == s) return m;
  }
  return std::nullopt;
}

// --------------------------------------------------------- exact search

namespace {

// Best set of one size: ratio k/b (b == 0 is infinite), witness sorted.
struct Best {
  bool set = false;
  std::int64_t k = 0, b = 0;
  std::vector<Element> witness;
};

// > 0 when k1/b1 beats k2/b2.
int cmp_ratio(std::int64_t k1, std::int64_t b1, std::int64_t k2, std::int64_t b2) {
  __int128 l = static_cast<__int128>(k1) * b2, r = static_cast<__int128>(k2) * b1;
  if (b1 == 0 && b2 == 0) return 0;
  return l > r ? 1 : (l < r ? -1 : 0);
}

bool offer(Best& best, std::int64_t k, std::int64_t b, const std::function<std::vector<Element>()>& make) {
  if (!best.set) {
    best = {true, k, b, make()};
    return true;
  }
  int c = cmp_ratio(k, b, best.k, best.b);
  if (c < 0) return false;
  auto w = make();
  if (c > 0 || w < best.witness) {
    best = {true, k, b, std::move(w)};
    return true;
  }
  return false;
}

struct SearchGraph {
  Ball ball;
  int radius = 0;
  std::vector<std::vector<int>> nbr;  // per vertex of length <= radius, one entry per generator
};

SearchGraph build_search_graph(const Group& g, int radius) {
  SearchGraph sg;
  sg.radius = radius;
  sg.ball = ball(g, radius + 1);
  sg.nbr.resize(sg.ball.size());
  for (std::size_t v = 0; v < sg.ball.size(); ++v) {
    if (sg.ball.lengths[v] > radius) break;
    for (const auto& s : g.generators()) {
      sg.nbr[v].push_back(static_cast<int>(sg.ball.index.at(g.multiply(sg.ball.elements[v], s))));
    }
  }
  return sg;
}

// Connected sets containing vertex 0, each produced once: pop a candidate,
// recurse with it added and its new neighbours as extra candidates, then
// exclude it for the remaining siblings.
class Enumerator {
 public:
  Enumerator(const SearchGraph& sg, int max_size, std::uint64_t cap)
      : sg_(sg), max_(max_size), cap_(cap), best_(max_size + 1) {
    std::size_t n = sg.ball.size();
    in_.assign(n, 0);
    cand_.assign(n, 0);
    excl_.assign(n, 0);
    touch_.assign(n, 0);
  }

  // Runs the subtree of the sequential search that handles top-level
  // candidate number `branch` (counted from the back of the root list).
  void run_branch(std::size_t branch) {
    add(0);
    std::vector<int> C;
    for (int u : candidates_of(0)) {
      cand_[u] = 1;
      C.push_back(u);
    }
    for (std::size_t i = 0; i < branch; ++i) {
      int v = C.back();
      C.pop_back();
      cand_[v] = 0;
      excl_[v] = 1;
    }
    int v = C.back();
    C.pop_back();
    cand_[v] = 0;
    descend(v, C);
  }

  std::size_t root_branches() const { return candidates_of_root().size(); }
  bool complete() const { return !aborted_; }
  std::vector<Best>& best() { return best_; }

 private:
  std::vector<int> candidates_of_root() const {
    std::vector<int> out;
    std::vector<char> seen(sg_.ball.size(), 0);
    seen[0] = 1;
    for (int u : sg_.nbr[0]) {
      if (!seen[u] && sg_.ball.lengths[u] <= sg_.radius) {
        seen[u] = 1;
        out.push_back(u);
      }
    }
    return out;
  }

  std::vector<int> candidates_of(int v) {
    std::vector<int> out;
    for (int u : sg_.nbr[v]) {
      if (!in_[u] && !cand_[u] && !excl_[u] && sg_.ball.lengths[u] <= sg_.radius &&
          std::find(out.begin(), out.end(), u) == out.end()) {
        out.push_back(u);
      }
    }
    return out;
  }

  void add(int v) {
    if (touch_[v] > 0) --bsize_;
    in_[v] = 1;
    S_.push_back(v);
    for (int u : sg_.nbr[v]) {
      if (touch_[u]++ == 0 && !in_[u]) ++bsize_;
    }
  }

  void remove(int v) {
    for (int u : sg_.nbr[v]) {
      if (--touch_[u] == 0 && !in_[u]) --bsize_;
    }
    in_[v] = 0;
    S_.pop_back();
    if (touch_[v] > 0) ++bsize_;
  }

  void record() {
    std::int64_t k = static_cast<std::int64_t>(S_.size());
    offer(best_[k], k, bsize_, [&] {
      std::vector<Element> w;
      w.reserve(S_.size());
      for (int x : S_) w.push_back(sg_.ball.elements[x]);
      std::sort(w.begin(), w.end());
      return w;
    });
  }

  void descend(int v, std::vector<int> C) {
    if (aborted_) return;
    add(v);
    auto fresh = candidates_of(v);
    for (int u : fresh) {
      cand_[u] = 1;
      C.push_back(u);
    }
    recurse(C);
    for (int u : fresh) cand_[u] = 0;
    remove(v);
  }

  void recurse(std::vector<int>& C) {
    if (++nodes_ > cap_) {
      aborted_ = true;
      return;
    }
    record();
    if (static_cast<int>(S_.size()) >= max_) return;
    std::vector<int> excluded;
    while (!C.empty() && !aborted_) {
      int v = C.back();
      C.pop_back();
      cand_[v] = 0;
      descend(v, C);
      excl_[v] = 1;
      excluded.push_back(v);
    }
    // C is a copy: the caller still holds these as candidates
    for (int v : excluded) {
      excl_[v] = 0;
      cand_[v] = 1;
    }
  }

  const SearchGraph& sg_;
  int max_;
  std::uint64_t cap_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<char> in_, cand_, excl_;
  std::vector<int> touch_;
  std::vector<int> S_;
  std::int64_t bsize_ = 0;
  std::vector<Best> best_;
};

struct LevelResult {
  std::vector<Best> best;
  bool complete = true;
};

LevelResult run_level(const SearchGraph& sg, int max_size, std::uint64_t budget, int workers) {
  LevelResult res;
  res.best.resize(max_size + 1);
  std::size_t nb;
  {
    Enumerator probe(sg, max_size, budget);
    nb = probe.root_branches();
  }
  {
    std::int64_t b = 0;
    std::vector<char> seen(sg.ball.size(), 0);
    for (int u : sg.nbr[0]) {
      if (!seen[u] && u != 0) {
        seen[u] = 1;
        ++b;
      }
    }
    offer(res.best[1], 1, b, [&] { return std::vector<Element>{sg.ball.elements[0]}; });
  }
  if (nb == 0 || max_size <= 1) return res;
  std::uint64_t cap = std::max<std::uint64_t>(1, budget / nb);
  std::vector<std::vector<Best>> per(nb);
  std::vector<char> done(nb, 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= nb) return;
      Enumerator e(sg, max_size, cap);
      e.run_branch(i);
      per[i] = std::move(e.best());
      done[i] = e.complete();
    }
  };
  int w = std::max(1, std::min<int>(workers, static_cast<int>(nb)));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < nb; ++i) {
    res.complete = res.complete && done[i];
    for (int k = 1; k <= max_size; ++k) {
      const Best& b = per[i][k];
      if (b.set) offer(res.best[k], b.k, b.b, [&] { return b.witness; });
    }
  }
  return res;
}

bool is_integers(const Group& g) {
  auto* z = dynamic_cast<const ZdGroup*>(&g);
  return z != nullptr && z->dim() == 1;
}

ProfilePoint point_from_best(int n, const Best& b, Method m, bool exact) {
  ProfilePoint p;
  p.n = n;
  p.method = m;
  p.exact = exact;
  p.ratio = Ratio::of(b.k, b.b);
  p.value = p.ratio->to_double();
  p.witness = b.witness;
  return p;
}

// j(n) = best over sizes <= n; ties keep the smaller set.
std::vector<ProfilePoint> cumulative(const std::vector<Best>& by_size, int n_max, Method m,
                                     const std::function<bool(int)>& exact) {
  std::vector<ProfilePoint> out;
  Best run;
  for (int n = 1; n <= n_max; ++n) {
    if (n < static_cast<int>(by_size.size()) && by_size[n].set) {
      const Best& b = by_size[n];
      if (!run.set || cmp_ratio(b.k, b.b, run.k, run.b) > 0) run = b;
    }
    if (run.set) out.push_back(point_from_best(n, run, m, exact(n)));
  }
  return out;
}

}  // namespace

ProfileRun profile_exact(const Group& g, int n_max, int radius, const ExactOptions& opt) {
  if (n_max < 1) throw ContractViolation("n_max must be >= 1");
  if (radius < 0) throw ContractViolation("radius must be >= 0");
  SearchGraph sg = build_search_graph(g, radius);
  ProfileRun run;
  std::vector<Best> by_size(n_max + 1);
  int complete_to = 0;
  for (int m = 1; m <= n_max; ++m) {
    LevelResult lr = run_level(sg, m, opt.node_budget, opt.workers);
    if (lr.complete) {
      by_size = lr.best;
      by_size.resize(n_max + 1);
      complete_to = m;
      continue;
    }
    for (int k = m; k <= n_max && k < static_cast<int>(lr.best.size()); ++k) by_size[k] = lr.best[k];
    run.warnings.push_back("node budget exhausted at size " + std::to_string(m) + "; larger sizes are lower bounds");
    break;
  }
  bool z = is_integers(g);
  if (!z) {
    run.warnings.push_back("search restricted to connected sets in Ball(" + std::to_string(radius) +
                           ") of " + g.descriptor() + "; values are lower bounds");
  }
  run.points = cumulative(by_size, n_max, Method::Exact,
                          [&](int n) { return z && n <= complete_to && radius >= n - 1; });
  return run;
}

// ------------------------------------------------------------ heuristics

namespace {

class IndexedSet {
 public:
  bool contains(const Element& e) const { return pos_.count(e) != 0; }
  void insert(const Element& e) {
    if (contains(e)) return;
    pos_.emplace(e, items_.size());
    items_.push_back(e);
  }
  void erase(const Element& e) {
    auto it = pos_.find(e);
    if (it == pos_.end()) return;
    std::size_t i = it->second;
    pos_.erase(it);
    if (i + 1 != items_.size()) {
      items_[i] = std::move(items_.back());
      pos_[items_[i]] = i;
    }
    items_.pop_back();
  }
  std::size_t size() const { return items_.size(); }
  const std::vector<Element>& items() const { return items_; }

 private:
  std::vector<Element> items_;
  ElementMap<std::size_t> pos_;
};

class SetState {
 public:
  explicit SetState(const Group& g) : g_(g) {}

  void add(const Element& e) {
    B_.erase(e);
    A_.insert(e);
    for (const auto& s : g_.generators()) {
      Element u = g_.multiply(e, s);
      if (touch_[u]++ == 0 && !A_.contains(u)) B_.insert(u);
    }
  }

  void remove(const Element& e) {
    A_.erase(e);
    for (const auto& s : g_.generators()) {
      Element u = g_.multiply(e, s);
      auto it = touch_.find(u);
      if (--it->second == 0) {
        touch_.erase(it);
        B_.erase(u);
      }
    }
    if (touch_.count(e)) B_.insert(e);
  }

  // |boundary| after adding c, a current boundary point.
  std::size_t boundary_after_add(const Element& c) const {
    std::size_t b = B_.size() - 1;
    Element seen[64];
    std::size_t ns = 0;
    std::vector<Element> extra;
    for (const auto& s : g_.generators()) {
      Element u = g_.multiply(c, s);
      if (u == c || A_.contains(u) || touch_.count(u)) continue;
      bool dup = false;
      for (std::size_t i = 0; i < ns; ++i) dup = dup || seen[i] == u;
      for (const auto& x : extra) dup = dup || x == u;
      if (dup) continue;
      if (ns < 64) {
        seen[ns++] = u;
      } else {
        extra.push_back(u);
      }
      ++b;
    }
    return b;
  }

  std::size_t neighbours_in_A(const Element& c) const {
    std::vector<Element> in;
    for (const auto& s : g_.generators()) {
      Element u = g_.multiply(c, s);
      if (A_.contains(u) && std::find(in.begin(), in.end(), u) == in.end()) in.push_back(std::move(u));
    }
    return in.size();
  }

  const IndexedSet& A() const { return A_; }
  const IndexedSet& B() const { return B_; }
  std::vector<Element> sorted_A() const {
    auto w = A_.items();
    std::sort(w.begin(), w.end());
    return w;
  }

 private:
  const Group& g_;
  IndexedSet A_, B_;
  ElementMap<int> touch_;
};

// Greedy sets of every size 1..n_max, each extending the previous.
std::vector<Best> greedy_sets(const Group& g, int n_max, std::vector<std::vector<Element>>* sets = nullptr) {
  std::vector<Best> out(n_max + 1);
  SetState st(g);
  st.add(g.identity());
  auto snap = [&](int k) {
    auto w = st.sorted_A();
    out[k] = {true, k, static_cast<std::int64_t>(st.B().size()), w};
    if (sets) sets->push_back(std::move(w));
  };
  snap(1);
  for (int k = 2; k <= n_max; ++k) {
    if (st.B().size() == 0) break;  // whole finite group
    std::vector<Element> cands = st.B().items();
    std::sort(cands.begin(), cands.end());
    // ties: most neighbours already in A, then smallest code
    const Element* pick = nullptr;
    std::size_t best = 0, best_in = 0;
    for (const auto& c : cands) {
      std::size_t b = st.boundary_after_add(c);
      std::size_t in = st.neighbours_in_A(c);
      if (!pick || b < best || (b == best && in > best_in)) {
        pick = &c;
        best = b;
        best_in = in;
      }
    }
    st.add(*pick);
    snap(k);
  }
  return out;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Best> anneal_sets(const Group& g, int n_max, const HeuristicOptions& opt) {
  std::vector<std::vector<Element>> greedy;
  std::vector<Best> out = greedy_sets(g, n_max, &greedy);
  std::mt19937_64 rng(opt.seed);
  for (int n = 2; n <= n_max && n <= static_cast<int>(greedy.size()); ++n) {
    SetState st(g);
    for (const auto& e : greedy[n - 1]) st.add(e);
    Best& best = out[n];
    double T = opt.t0;
    for (int it = 0; it < opt.anneal_iterations; ++it, T *= opt.cooling) {
      if (st.B().size() == 0) break;
      std::size_t before = st.B().size();
      Element a = st.A().items()[rng() % st.A().size()];
      Element b = st.B().items()[rng() % st.B().size()];
      st.remove(a);
      st.add(b);
      std::size_t after = st.B().size();
      double delta = static_cast<double>(after) - static_cast<double>(before);
      double u = unit(rng);
      if (delta > 0 && u >= std::exp(-delta / T)) {
        st.remove(b);
        st.add(a);
        continue;
      }
      offer(best, n, static_cast<std::int64_t>(after), [&] { return st.sorted_A(); });
    }
  }
  return out;
}

}  // namespace

ProfileRun profile_heuristic(const Group& g, int n_max, Method method, const HeuristicOptions& opt) {
  if (n_max < 1) throw ContractViolation("n_max must be >= 1");
  std::vector<Best> by_size;
  if (method == Method::Greedy) {
    by_size = greedy_sets(g, n_max);
  } else if (method == Method::Anneal) {
    by_size = anneal_sets(g, n_max, opt);
  } else {
    throw ContractViolation("heuristic method must be greedy or anneal");
  }
  ProfileRun run;
  run.points = cumulative(by_size, n_max, method, [](int) { return false; });
  return run;
}

SpectralResult dirichlet_eigenvector(const Group& g, const std::vector<Element>& A0, double tol, int max_iter) {
  std::vector<Element> A = A0;
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  if (A.empty()) throw ContractViolation("empty support");
  const auto n = static_cast<Eigen::Index>(A.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  double deg = static_cast<double>(g.generators().size());
  for (Eigen::Index i = 0; i < n; ++i) {
    L(i, i) += deg;
    for (const auto& s : g.generators()) {
      auto it = std::lower_bound(A.begin(), A.end(), g.multiply(A[i], s));
      if (it != A.end() && *it == g.multiply(A[i], s)) L(i, it - A.begin()) -= 1;
    }
  }
  SpectralResult r;
  Eigen::VectorXd x;
  Eigen::LLT<Eigen::MatrixXd> llt(L);
  if (llt.info() == Eigen::Success) {
    x = Eigen::VectorXd::Ones(n).normalized();
    double lam = x.dot(L * x);
    for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
      Eigen::VectorXd y = llt.solve(x);
      x = y.normalized();
      double next = x.dot(L * x);
      bool done = std::fabs(next - lam) <= tol * std::fabs(next);
      lam = next;
      if (done) {
        r.converged = true;
        break;
      }
    }
    r.lambda = lam;
  } else {
    // A is a whole finite group: the constant vector has eigenvalue 0
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    r.lambda = std::max(0.0, es.eigenvalues()(0));
    x = es.eigenvectors().col(0);
    r.converged = true;
  }
  if (x.sum() < 0) x = -x;
  std::vector<std::pair<Element, double>> e;
  for (Eigen::Index i = 0; i < n; ++i) e.emplace_back(A[i], x(i));
  r.f = FiniteFunction::real(std::move(e));
  return r;
}

ProfileRun profile_spectral(const Group& g, int n_max, const HeuristicOptions&) {
  if (n_max < 1) throw ContractViolation("n_max must be >= 1");
  std::vector<std::vector<Element>> sets;
  greedy_sets(g, n_max, &sets);
  ProfileRun run;
  std::optional<ProfilePoint> cur;
  for (int n = 1; n <= n_max; ++n) {
    if (n <= static_cast<int>(sets.size())) {
      SpectralResult sr = dirichlet_eigenvector(g, sets[n - 1]);
      if (!sr.converged) run.warnings.push_back("inverse iteration did not converge at n=" + std::to_string(n));
      double grad = sr.f.empty() ? 0 : gradient_ratio(g, sr.f, 2).value;
      double value = grad > 0 ? 1.0 / grad : std::numeric_limits<double>::infinity();
      if (!cur || value > cur->value) {
        ProfilePoint p;
        p.method = Method::Spectral;
        p.value = value;
        p.witness = sr.f.points();
        p.witness_fn = std::move(sr.f);
        cur = std::move(p);
      }
    }
    ProfilePoint p = *cur;
    p.n = n;
    run.points.push_back(std::move(p));
  }
  return run;
}

std::optional<std::size_t> folner_function(const std::vector<ProfilePoint>& points, const mpq_class& n) {
  std::optional<std::size_t> best;
  for (const auto& p : points) {
    bool ok;
    if (p.ratio) {
      ok = p.ratio->infinite() || mpq_class(p.ratio->num, p.ratio->den) >= n;
    } else {
      ok = p.value >= n.get_d();
    }
    if (ok && (!best || p.witness_size() < *best)) best = p.witness_size();
  }
  return best;
}

std::string profile_csv(const std::vector<ProfilePoint>& points, bool header) {
  std::ostringstream os;
  if (header) os << "n,value_num,value_den_or_float,method,exact,witness_size\n";
  for (const auto& p : points) {
    os << p.n << ',';
    if (p.ratio) {
      os << p.ratio->num.get_str() << ',' << p.ratio->den.get_str();
    } else {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", p.value);
      os << ',' << buf;
    }
    os << ',' << method_name(p.method) << ',' << (p.exact ? "true" : "false") << ',' << p.witness_size() << '\n';
  }
  return os.str();
}

nlohmann::json profile_witness_json(const Group& g, const std::vector<ProfilePoint>& points) {
  auto out = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j{{"n", p.n}, {"method", method_name(p.method)}, {"exact", p.exact}};
    if (p.ratio) {
      j["value"] = p.ratio->str();
    } else {
      j["value"] = p.value;
    }
    if (p.witness_fn) {
      j["witness"] = p.witness_fn->to_json(g);
    } else {
      auto w = nlohmann::json::array();
      for (const auto& e : p.witness) w.push_back(g.format(e));
      j["witness"] = w;
    }
    out.push_back(std::move(j));
  }
  return out;
}

// ------------------------------------------------------------------ lift

std::vector<Element> lift_region(const Group& base, const std::vector<Element>& U) {
  std::vector<Element> V = U;
  for (const auto& u : U) {
    for (const auto& s : base.generators()) V.push_back(base.multiply(u, s));
  }
  std::sort(V.begin(), V.end());
  V.erase(std::unique(V.begin(), V.end()), V.end());
  return V;
}

LiftCheck lift_check(const HaloGroup& g, const FiniteFunction& f, const std::vector<double>& ps, std::uint64_t budget) {
  if (f.empty()) throw ContractViolation("lift of the zero function");
  for (double p : ps) check_p(p);
  const Group& H = *g.base();
  LiftCheck out;
  out.U = f.points();
  out.V = lift_region(H, out.U);
  out.ps = ps;
  out.expected_support = lamp_growth(g, static_cast<int>(out.V.size())) * static_cast<unsigned long>(out.U.size());
  const std::size_t nu = out.U.size();

  // Moves keep the lamp, so (sigma,h)(1,s) stays in supp g iff hs in U.
  std::vector<std::vector<std::optional<std::size_t>>> move_to(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    for (const auto& s : H.generators()) move_to[i].push_back(f.find(H.multiply(out.U[i], s)));
  }
  // Lamp generators: (sigma,h)(t,1) = (sigma * alpha(h)(t), h).
  std::vector<std::vector<LampConfig>> shifted(nu);
  for (std::size_t i = 0; i < nu; ++i) {
    for (const auto& gi : g.generator_info()) {
      if (!gi.is_move) shifted[i].push_back(g.act(out.U[i], gi.lamp));
    }
  }
  std::vector<std::uint64_t> escapes(nu, 0);
  std::uint64_t count = 0;
  for_each_block_element(
      g, out.V,
      [&](const LampConfig& sigma) {
        ++count;
        for (std::size_t i = 0; i < nu; ++i) {
          for (const auto& t : shifted[i]) {
            if (!g.supported_in(g.compose(sigma, t), out.V)) ++escapes[i];
          }
        }
      },
      budget);
  out.lamp_count = count;
  out.support_size = count * nu;

  for (double p : ps) {
    out.base.push_back(gradient_ratio(H, f, p));
    GradRatio r;
    if (p == 1 && f.is_exact()) {
      mpq_class num = 0, den = 0;
      for (std::size_t i = 0; i < nu; ++i) {
        mpq_class a = abs(f.exact_value(i));
        mpq_class local = 0;
        for (const auto& j : move_to[i]) local += j ? mpq_class(abs(f.exact_value(i) - f.exact_value(*j))) : mpq_class(2 * a);
        num += local * count + 2 * a * escapes[i];
        den += a * count;
      }
      r.exact = num / den;
      r.value = r.exact->get_d();
    } else {
      Sum num, den;
      for (std::size_t i = 0; i < nu; ++i) {
        Sum local;
        for (const auto& j : move_to[i]) local.add(j ? ppow(f.value(i) - f.value(*j), p) : 2 * ppow(f.value(i), p));
        num.add(local.value() * static_cast<double>(count));
        num.add(2 * ppow(f.value(i), p) * static_cast<double>(escapes[i]));
        den.add(ppow(f.value(i), p) * static_cast<double>(count));
      }
      double x = num.value() / den.value();
      r.value = p == 1 ? x : std::pow(x, 1.0 / p);
    }
    out.lifted.push_back(r);
  }
  return out;
}

FiniteFunction almost_invariant_lift(const HaloGroup& g, const FiniteFunction& f, std::uint64_t budget) {
  if (f.empty()) throw ContractViolation("lift of the zero function");
  std::vector<Element> V = lift_region(*g.base(), f.points());
  if (f.is_exact()) {
    std::vector<std::pair<Element, mpq_class>> e;
    for_each_block_element(
        g, V,
        [&](const LampConfig& sigma) {
          for (std::size_t i = 0; i < f.size(); ++i) e.emplace_back(g.encode({sigma, f.points()[i]}), f.exact_value(i));
        },
        budget);
    return FiniteFunction::exact(std::move(e));
  }
  std::vector<std::pair<Element, double>> e;
  for_each_block_element(
      g, V,
      [&](const LampConfig& sigma) {
        for (std::size_t i = 0; i < f.size(); ++i) e.emplace_back(g.encode({sigma, f.points()[i]}), f.value(i));
      },
      budget);
  return FiniteFunction::real(std::move(e));
}

// --------------------------------------------------------- power transform

FiniteFunction power_transform(const FiniteFunction& f, double p, double q) {
  if (!(q >= 1)) throw ContractViolation("q must be >= 1");
  if (!(p > q)) throw ContractViolation("power transform needs p > q");
  double v = p / q;
  if (f.is_exact() && v == std::floor(v) && v <= 64) {
    auto k = static_cast<unsigned long>(v);
    std::vector<std::pair<Element, mpq_class>> e;
    for (std::size_t i = 0; i < f.size(); ++i) {
      mpq_class a = abs(f.exact_value(i));
      mpz_class n, d;
      mpz_pow_ui(n.get_mpz_t(), a.get_num_mpz_t(), k);
      mpz_pow_ui(d.get_mpz_t(), a.get_den_mpz_t(), k);
      e.emplace_back(f.points()[i], mpq_class(n, d));
    }
    return FiniteFunction::exact(std::move(e));
  }
  std::vector<std::pair<Element, double>> e;
  for (std::size_t i = 0; i < f.size(); ++i) e.emplace_back(f.points()[i], std::pow(std::fabs(f.value(i)), v));
  return FiniteFunction::real(std::move(e));
}

PowerCheck power_inequality(const Group& g, const FiniteFunction& f, double p, double q) {
  FiniteFunction h = power_transform(f, p, q);
  PowerCheck c;
  c.lhs = gradient_ratio(g, h, q).value;
  double S = static_cast<double>(g.generators().size());
  c.rhs = std::pow(2.0, 1.0 / q) * std::pow(S, (p - q) / (p * q)) * (p / q) * gradient_ratio(g, f, p).value;
  c.holds = c.lhs <= c.rhs * (1 + 1e-12);
  return c;
}

// ------------------------------------------------------- product boundary

ProductBoundary product_boundary(const std::shared_ptr<const ProductGroup>& gp, const std::vector<Element>& A,
                                 const std::vector<Element>& B) {
  const Group& GA = *gp->left();
  const Group& GB = *gp->right();
  SubsetWitness wa = boundary(GA, A), wb = boundary(GB, B);
  std::vector<Element> AB;
  for (const auto& a : wa.set) {
    for (const auto& b : wb.set) AB.push_back(gp->pair(a, b));
  }
  ProductBoundary r;
  r.product = boundary(*gp, AB);
  for (const auto& a : wa.boundary) {
    for (const auto& b : wb.set) r.formula.push_back(gp->pair(a, b));
  }
  for (const auto& a : wa.set) {
    for (const auto& b : wb.boundary) r.formula.push_back(gp->pair(a, b));
  }
  std::sort(r.formula.begin(), r.formula.end());
  r.formula.erase(std::unique(r.formula.begin(), r.formula.end()), r.formula.end());
  r.identity_holds = r.formula == r.product.boundary;
  auto inv = [](const SubsetWitness& w) {
    return mpq_class(static_cast<long>(w.boundary.size()), static_cast<unsigned long>(w.set.size()));
  };
  r.inv_ratio = inv(r.product);
  r.inv_ratio_a = inv(wa);
  r.inv_ratio_b = inv(wb);
  r.inv_ratio.canonicalize();
  r.inv_ratio_a.canonicalize();
  r.inv_ratio_b.canonicalize();
  r.harmonic_holds = r.inv_ratio <= r.inv_ratio_a + r.inv_ratio_b;
  return r;
}

}  // namespace halo
