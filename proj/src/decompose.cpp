#include "decompose.hpp"

#include <algorithm>

namespace halo {

bool Decomposition::strictly_decreasing() const {
  return std::all_of(trace.begin(), trace.end(), [](const RecursionStep& s) { return s.child_length < s.parent_length; });
}

LampConfig commutator_transvection(const HaloGroup& g, const Element& r, const Element& f, const Element& s,
                                   std::uint8_t lambda, std::uint8_t mu) {
  if (r == f || f == s || r == s) throw ContractViolation("commutator needs pairwise distinct points");
  if (g.family() == Family::Upcloner && !(r < f && f < s)) throw ContractViolation("upcloner commutator needs r < f < s");
  const Field& F = g.field();
  auto t = [&](const Element& a, const Element& b, std::uint8_t l) { return g.transvection(a, b, l); };
  LampConfig out = t(r, f, F.neg(lambda));
  out = g.compose(out, t(f, s, F.neg(mu)));
  out = g.compose(out, t(r, f, lambda));
  return g.compose(out, t(f, s, mu));
}

std::string commutator_form_name(CommutatorForm c) {
  switch (c) {
    case CommutatorForm::LambdaMu: return "tau_{r,s}(lambda*mu)";
    case CommutatorForm::Lambda: return "tau_{r,s}(lambda)";
    case CommutatorForm::Both: return "tau_{r,s}(lambda*mu) = tau_{r,s}(lambda) (indistinguishable over this field)";
    case CommutatorForm::Neither: return "neither closed form";
  }
  return "?";
}

CommutatorForm certify_commutator(const HaloGroup& g) {
  Ball b = ball(*g.base(), 2);
  std::vector<Element> pts(b.elements.begin(), b.elements.end());
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 3) throw ContractViolation("base group too small to certify the commutator identity");
  const Element &r = pts[0], &f = pts[1], &s = pts[2];
  const Field& F = g.field();
  bool lm = true, l = true;
  for (int a = 0; a < F.q(); ++a) {
    for (int m = 0; m < F.q(); ++m) {
      auto la = static_cast<std::uint8_t>(a), mu = static_cast<std::uint8_t>(m);
      LampConfig c = commutator_transvection(g, r, f, s, la, mu);
      std::uint8_t prod = F.mul(la, mu);
      LampConfig want_lm = prod ? g.transvection(r, s, prod) : g.lamp_identity();
      LampConfig want_l = la ? g.transvection(r, s, la) : g.lamp_identity();
      if (!(c == want_lm)) lm = false;
      if (!(c == want_l)) l = false;
    }
  }
  if (lm && l) return CommutatorForm::Both;
  if (lm) return CommutatorForm::LambdaMu;
  if (l) return CommutatorForm::Lambda;
  return CommutatorForm::Neither;
}

namespace {

// Elementary lamp: a transposition of two sites, a single-site value of F
// (a generator of F), a transvection tau_{a,b}(lambda), or a diagonal
// delta_a(lambda).
struct Factor {
  enum Kind { Swap, Color, Shear, Scale } kind;
  Site a, b;
  Element value;
  std::uint8_t lambda = 0;

  std::vector<Element> points() const {
    if (kind == Color || kind == Scale || a.at == b.at) return {a.at};
    std::vector<Element> p{a.at, b.at};
    std::sort(p.begin(), p.end());
    return p;
  }
};

Factor swap_f(Site a, Site b) { return {Factor::Swap, std::move(a), std::move(b), {}, 0}; }
Factor shear_f(const Element& p, const Element& q, std::uint8_t l) { return {Factor::Shear, {p, 0}, {q, 0}, {}, l}; }

LampConfig factor_lamp(const HaloGroup& g, const Factor& f) {
  switch (f.kind) {
    case Factor::Swap: return g.transposition(f.a, f.b);
    case Factor::Color: return g.single(f.a.at, f.value);
    case Factor::Shear: return g.transvection(f.a.at, f.b.at, f.lambda);
    case Factor::Scale: return g.diagonal(f.a.at, f.lambda);
  }
  throw ContractViolation("bad factor");
}

LampConfig product(const HaloGroup& g, const std::vector<Factor>& fs) {
  LampConfig out = g.lamp_identity();
  for (const auto& f : fs) out = g.compose(out, factor_lamp(g, f));
  return out;
}

bool contains(const std::vector<Element>& sorted, const Element& p) {
  return std::binary_search(sorted.begin(), sorted.end(), p);
}

// Word in the generators of F for each element (BFS tree).
std::vector<std::size_t> f_word(const Group& F, const Element& v) {
  ElementMap<std::pair<Element, std::size_t>> parent;
  std::vector<Element> queue{F.identity()};
  parent[F.identity()] = {F.identity(), 0};
  for (std::size_t i = 0; i < queue.size() && !parent.count(v); ++i) {
    for (std::size_t k = 0; k < F.generators().size(); ++k) {
      Element y = F.multiply(queue[i], F.generators()[k]);
      if (parent.emplace(y, std::make_pair(queue[i], k)).second) queue.push_back(y);
    }
    if (queue.size() > 1000000) throw ResourceError("lamp group word search exceeded budget");
  }
  if (!parent.count(v)) throw ContractViolation("lamp value not reachable in F");
  std::vector<std::size_t> w;
  for (Element x = v; !F.is_identity(x); x = parent.at(x).first) w.push_back(parent.at(x).second);
  std::reverse(w.begin(), w.end());
  return w;
}

// Gauss-Jordan on a dense block: M = E_1 ... E_k with elementary E_i.
std::vector<Factor> matrix_factors(const HaloGroup& g, const MatrixLamps& m) {
  const Field& F = g.field();
  const std::size_t n = m.dim();
  std::vector<std::uint8_t> a(m.a.begin(), m.a.end());
  std::vector<Factor> inv_ops;  // inverses of the row operations, in order
  auto row_add = [&](std::size_t i, std::size_t j, std::uint8_t l) {  // row_i += l row_j
    for (std::size_t c = 0; c < n; ++c) a[i * n + c] = F.add(a[i * n + c], F.mul(l, a[j * n + c]));
    inv_ops.push_back(shear_f(m.index[i], m.index[j], F.neg(l)));
  };
  for (std::size_t c = 0; c < n; ++c) {
    if (a[c * n + c] == 0) {
      std::size_t r = c + 1;
      while (r < n && a[r * n + c] == 0) ++r;
      if (r == n) throw ContractViolation("singular matrix lamp");
      row_add(c, r, 1);
    }
    std::uint8_t p = a[c * n + c];
    if (p != 1) {
      std::uint8_t s = F.inv(p);
      for (std::size_t k = 0; k < n; ++k) a[c * n + k] = F.mul(s, a[c * n + k]);
      inv_ops.push_back({Factor::Scale, {m.index[c], 0}, {}, {}, p});
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r != c && a[r * n + c] != 0) row_add(r, c, F.neg(a[r * n + c]));
    }
  }
  return inv_ops;
}

std::vector<Factor> perm_factors(const HaloGroup& g, PermLamps p) {
  std::vector<Factor> out;
  while (!p.moves.empty()) {
    Site x = p.moves.front().first;
    Site y = p.moves.front().second;
    out.push_back(swap_f(x, y));
    // p <- (x y) o p
    std::vector<std::pair<Site, Site>> mv;
    for (auto [u, v] : p.moves) mv.push_back({u, v == x ? y : v == y ? x : v});
    p = g.perm_from_map(std::move(mv));
  }
  return out;
}

std::vector<Factor> color_factors(const HaloGroup& g, const WreathLamps& w) {
  const Group& F = *g.params().lamp_group;
  std::vector<Factor> out;
  for (const auto& [p, v] : w.entries) {
    for (auto k : f_word(F, v)) out.push_back({Factor::Color, {p, 0}, {}, F.generators()[k], 0});
  }
  return out;
}

std::vector<Factor> elementary_factors(const HaloGroup& g, const LampConfig& sigma) {
  std::vector<Factor> fs;
  switch (g.family()) {
    case Family::Wreath: fs = color_factors(g, std::get<WreathLamps>(sigma)); break;
    case Family::Shuffler:
    case Family::Juggler: fs = perm_factors(g, std::get<PermLamps>(sigma)); break;
    case Family::Designer: {
      const auto& d = std::get<DesignerLamps>(sigma);
      fs = color_factors(g, d.colors);
      auto ps = perm_factors(g, d.perm);
      fs.insert(fs.end(), ps.begin(), ps.end());
      break;
    }
    case Family::Cloner:
    case Family::Upcloner: fs = matrix_factors(g, std::get<MatrixLamps>(sigma)); break;
  }
  if (!(product(g, fs) == sigma)) throw Error("internal: elementary factorization does not reproduce the lamp");
  return fs;
}

// Collects (offset, lamp generator) atoms and renders them as words.
class WordBuilder {
 public:
  WordBuilder(const HaloGroup& g, const DecomposeOptions& opt) : g_(g), opt_(opt), metric_(g.base()) {
    for (std::size_t i = 0; i < g.lamp_generator_count(); ++i) gen_index_[g.encode_lamp(g.generator_info()[i].lamp)] = i;
  }

  std::size_t lamp_gen(const LampConfig& l) const {
    auto it = gen_index_.find(g_.encode_lamp(l));
    if (it == gen_index_.end()) throw Error("internal: " + g_.format_lamp(l) + " is not a natural generator");
    return it->second;
  }

  // alpha(t)(generator) = path(t) . gen . path(t)^-1
  void atom(const Element& t, std::size_t gen) {
    auto path = metric_.geodesic(t);
    for (auto s : path) push({g_.move_generator(s), false});
    push({gen, false});
    for (auto it = path.rbegin(); it != path.rend(); ++it) push({g_.move_generator(*it), true});
  }

  void moves(const Element& h) {
    for (auto s : metric_.geodesic(h)) push({g_.move_generator(s), false});
  }

  int length(const Element& h) { return metric_.length(h); }
  GeneratorWord take() { return std::move(word_); }
  WordMetric& metric() { return metric_; }

 private:
  void push(Letter l) {
    word_.push_back(l);
    if (word_.size() > opt_.word_cap) {
      throw ResourceError("generator word exceeds the cap of " + std::to_string(opt_.word_cap) + " letters");
    }
  }
  const HaloGroup& g_;
  DecomposeOptions opt_;
  WordMetric metric_;
  ElementMap<std::size_t> gen_index_;
  GeneratorWord word_;
};

// ------------------------------------------------------------------ gluing

class GluingDecomposer {
 public:
  GluingDecomposer(const HaloGroup& g, const DecomposeOptions& opt) : g_(g), H_(*g.base()), wb_(g, opt) {}

  Decomposition run(const LampConfig& sigma) {
    auto fs = elementary_factors(g_, sigma);
    std::vector<Element> R = g_.support(sigma);
    if (!fs.empty()) node(H_.identity(), R, fs);
    Decomposition d;
    d.word = wb_.take();
    d.trace = std::move(trace_);
    return d;
  }

 private:
  std::int64_t measure(const std::vector<Element>& R) {
    std::int64_t m = 0;
    for (const auto& r : R) m += wb_.length(r);
    return m;
  }

  Element abs(const Element& t, const Element& r) const { return H_.multiply(t, r); }

  void step(std::int64_t parent, const std::vector<Element>& child, const char* rule) {
    std::int64_t c = measure(child);
    trace_.push_back({parent, c, rule});
    if (c >= parent) throw DecompositionError(std::string("SubsetLength did not decrease in rule ") + rule);
  }

  // Node: block over t*R (R relative, sorted); factors in absolute coordinates.
  void node(const Element& t, std::vector<Element> R, const std::vector<Factor>& fs) {
    std::sort(R.begin(), R.end());
    const Element one = H_.identity();
    if (R.size() == 1 && R[0] == one) return base_one(t, fs);
    if (R.size() == 2 && contains(R, one)) {
      const Element& s = R[0] == one ? R[1] : R[0];
      if (wb_.length(s) == 1) return base_edge(t, s, fs);
    }
    const std::int64_t mR = measure(R);
    if (R.size() == 1) {
      step(mR, {one}, "singleton");
      return node(abs(t, R[0]), {one}, fs);
    }
    if (R.size() == 2) return pair(t, R, mR, fs);
    split(t, R, mR, fs);
  }

  void split(const Element& t, const std::vector<Element>& R, std::int64_t mR, const std::vector<Factor>& fs) {
    const Element one = H_.identity();
    Element h = contains(R, one) ? one : R[0];
    Element hp;
    for (const auto& r : R) {
      if (r != h && r != one) {
        hp = r;
        break;
      }
    }
    std::vector<Element> R1{h, hp};
    std::sort(R1.begin(), R1.end());
    std::vector<Element> R2;
    for (const auto& r : R) {
      if (r != hp) R2.push_back(r);
    }
    const Element H = abs(t, h), Hp = abs(t, hp);
    std::vector<Element> A1{H, Hp};
    std::sort(A1.begin(), A1.end());

    // 1 = block R1, 2 = block R2
    std::vector<std::pair<int, Factor>> seq;
    auto place = [&](const Factor& f) {
      auto pts = f.points();
      bool in1 = std::all_of(pts.begin(), pts.end(), [&](const Element& p) { return contains(A1, p); });
      bool touches_hp = contains(pts, Hp);
      if (in1 && (touches_hp || (!seq.empty() && seq.back().first == 1))) {
        seq.push_back({1, f});
      } else if (!touches_hp) {
        seq.push_back({2, f});
      } else {
        rewrite_across(f, H, Hp, seq);
      }
    };
    for (const auto& f : fs) place(f);

    step(mR, R1, "split R1");
    step(mR, R2, "split R2");
    for (std::size_t i = 0; i < seq.size();) {
      std::size_t j = i;
      std::vector<Factor> run;
      while (j < seq.size() && seq[j].first == seq[i].first) run.push_back(seq[j++].second);
      node(t, seq[i].first == 1 ? R1 : R2, run);
      i = j;
    }
  }

  // Factor joining h' to a point z outside {h, h'}: route through h.
  void rewrite_across(const Factor& f, const Element& H, const Element& Hp, std::vector<std::pair<int, Factor>>& seq) {
    if (f.kind == Factor::Swap) {
      Site x = f.a.at == Hp ? f.a : f.b;
      Site y = f.a.at == Hp ? f.b : f.a;
      Site a{H, x.track};
      // (x y) = (a x)(a y)(a x)
      seq.push_back({1, swap_f(a, x)});
      seq.push_back({2, swap_f(a, y)});
      seq.push_back({1, swap_f(a, x)});
      return;
    }
    if (f.kind == Factor::Shear) {
      const Field& F = g_.field();
      const Element &r = f.a.at, &s = f.b.at;
      int br = r == Hp ? 1 : 2, bs = s == Hp ? 1 : 2;
      // tau_{r,s}(l) = tau_{r,h}(-l) tau_{h,s}(-1) tau_{r,h}(l) tau_{h,s}(1)
      seq.push_back({br, shear_f(r, H, F.neg(f.lambda))});
      seq.push_back({bs, shear_f(H, s, F.neg(1))});
      seq.push_back({br, shear_f(r, H, f.lambda)});
      seq.push_back({bs, shear_f(H, s, 1)});
      return;
    }
    throw Error("internal: single-point factor cannot span two points");
  }

  void pair(const Element& t, const std::vector<Element>& R, std::int64_t mR, const std::vector<Factor>& fs) {
    const Element& x = R[0];
    const Element& y = R[1];
    auto steps = wb_.metric().geodesic(H_.multiply(H_.invert(x), y));
    const std::size_t n = steps.size();
    std::vector<Element> p{abs(t, x)};
    for (auto s : steps) p.push_back(H_.multiply(p.back(), H_.generators()[s]));
    // edge index -> factors; consecutive runs on the same edge form one child
    std::vector<std::pair<std::size_t, Factor>> seq;
    std::function<void(const Site&, const Site&, std::size_t)> swap_chain = [&](const Site& a, const Site& b, std::size_t k) {
      // a at p[0], b at p[k]
      if (k == 1) return seq.push_back({1, swap_f(a, b)});
      Site c{p[k - 1], b.track}, d{p[k], b.track};
      seq.push_back({k, swap_f(c, d)});
      swap_chain(a, c, k - 1);
      seq.push_back({k, swap_f(c, d)});
    };
    const Field* F = g_.family() == Family::Cloner ? &g_.field() : nullptr;
    // tau_{p0,pk}(l) and tau_{pk,p0}(l)
    std::function<void(bool, std::uint8_t, std::size_t)> shear_chain = [&](bool forward, std::uint8_t l, std::size_t k) {
      if (k == 1) return seq.push_back({1, forward ? shear_f(p[0], p[1], l) : shear_f(p[1], p[0], l)});
      if (forward) {
        shear_chain(true, F->neg(l), k - 1);
        seq.push_back({k, shear_f(p[k - 1], p[k], F->neg(1))});
        shear_chain(true, l, k - 1);
        seq.push_back({k, shear_f(p[k - 1], p[k], 1)});
      } else {
        seq.push_back({k, shear_f(p[k], p[k - 1], F->neg(l))});
        shear_chain(false, F->neg(1), k - 1);
        seq.push_back({k, shear_f(p[k], p[k - 1], l)});
        shear_chain(false, 1, k - 1);
      }
    };
    for (const auto& f : fs) {
      auto pts = f.points();
      if (pts.size() == 1) {
        seq.push_back({pts[0] == p[0] ? 1 : n, f});
      } else if (f.kind == Factor::Swap) {
        bool a_first = f.a.at == p[0];
        swap_chain(a_first ? f.a : f.b, a_first ? f.b : f.a, n);
      } else {
        shear_chain(f.a.at == p[0], f.lambda, n);
      }
    }
    const Element one = H_.identity();
    for (std::size_t k = 1; k <= n; ++k) step(mR, {one, H_.generators()[steps[k - 1]]}, "path edge");
    for (std::size_t i = 0; i < seq.size();) {
      std::size_t j = i;
      std::vector<Factor> run;
      while (j < seq.size() && seq[j].first == seq[i].first) run.push_back(seq[j++].second);
      std::size_t k = seq[i].first;
      // child block {1, s_k} at offset p_{k-1}
      std::vector<Element> child{one, H_.generators()[steps[k - 1]]};
      std::sort(child.begin(), child.end());
      node(p[k - 1], child, run);
      i = j;
    }
  }

  // Same-site juggler swap at offset t: (a b) = (a c)(b c)(a c), c on a neighbor.
  void same_site_swap(const Element& t, int ti, int tj) {
    const Element one = H_.identity();
    const Element& s = H_.generators()[0];
    std::size_t gac = wb_.lamp_gen(g_.transposition({one, ti}, {s, 0}));
    std::size_t gbc = wb_.lamp_gen(g_.transposition({one, tj}, {s, 0}));
    wb_.atom(t, gac);
    wb_.atom(t, gbc);
    wb_.atom(t, gac);
  }

  void point_factor(const Element& at, const Factor& f) {
    const Element one = H_.identity();
    switch (f.kind) {
      case Factor::Color: return wb_.atom(at, wb_.lamp_gen(g_.single(one, f.value)));
      case Factor::Scale: return wb_.atom(at, wb_.lamp_gen(g_.diagonal(one, f.lambda)));
      case Factor::Swap: return same_site_swap(at, f.a.track, f.b.track);
      case Factor::Shear: break;
    }
    throw Error("internal: transvection with a single point");
  }

  void base_one(const Element& t, const std::vector<Factor>& fs) {
    for (const auto& f : fs) point_factor(t, f);
  }

  void base_edge(const Element& t, const Element& s, const std::vector<Factor>& fs) {
    const Element one = H_.identity();
    const Element A = t, B = H_.multiply(t, s);
    const Element sinv = H_.invert(s);
    for (const auto& f : fs) {
      auto pts = f.points();
      if (pts.size() == 1) {
        point_factor(pts[0], f);
      } else if (f.kind == Factor::Swap) {
        Site a = f.a.at == A ? f.a : f.b;
        Site b = f.a.at == A ? f.b : f.a;
        wb_.atom(A, wb_.lamp_gen(g_.transposition({one, a.track}, {s, b.track})));
      } else if (f.a.at == A) {
        wb_.atom(A, wb_.lamp_gen(g_.transvection(one, s, f.lambda)));
      } else {
        wb_.atom(B, wb_.lamp_gen(g_.transvection(one, sinv, f.lambda)));
      }
    }
  }

  const HaloGroup& g_;
  const Group& H_;
  WordBuilder wb_;
  std::vector<RecursionStep> trace_;
};

// ------------------------------------------------------------------ upcloner

class UpclonerDecomposer {
 public:
  UpclonerDecomposer(const HaloGroup& g, const DecomposeOptions& opt) : g_(g), H_(*g.base()), wb_(g, opt) {
    form_ = certify_commutator(g);
    if (form_ == CommutatorForm::Neither) throw DecompositionError("commutator identity not certified over " + g.field().name());
    auto* zd = dynamic_cast<const ZdGroup*>(g.base().get());
    if (!zd || !zd->has_total_order()) throw UnsupportedFamily("upcloner decomposition needs base Z^d:lex");
    dim_ = zd->dim();
  }

  Decomposition run(const LampConfig& sigma) {
    g_.validate(sigma);
    auto fs = elementary_factors(g_, sigma);
    if (!fs.empty()) node(g_.support(sigma), fs);
    Decomposition d;
    d.word = wb_.take();
    d.trace = std::move(trace_);
    return d;
  }

 private:
  // Translation-minimal l1 length: sum of distances to a coordinatewise median.
  std::int64_t measure(const std::vector<Element>& R) const {
    std::int64_t m = 0;
    for (int c = 0; c < dim_; ++c) {
      std::vector<std::int64_t> xs;
      for (const auto& r : R) xs.push_back(r[static_cast<std::size_t>(c)]);
      std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2), xs.end());
      std::int64_t med = xs[xs.size() / 2];
      for (auto x : xs) m += std::abs(x - med);
    }
    return m;
  }

  std::string set_str(const std::vector<Element>& R) const {
    std::string s = "{";
    for (std::size_t i = 0; i < R.size(); ++i) s += (i ? ", " : "") + H_.format(R[i]);
    return s + "}";
  }

  void step(const std::vector<Element>& parent, std::int64_t mp, const std::vector<Element>& child, const std::string& rule) {
    std::int64_t c = measure(child);
    trace_.push_back({mp, c, rule});
    if (c >= mp) {
      throw DecompositionError("SubsetLength does not decrease (" + rule + "): " + set_str(parent) + " has length " +
                               std::to_string(mp) + " but " + set_str(child) + " has length " + std::to_string(c));
    }
  }

  // Factors are unitriangular transvections tau_{p,q}(l) with p < q in R.
  void node(std::vector<Element> R, const std::vector<Factor>& fs) {
    std::sort(R.begin(), R.end());
    if (R.size() <= 1 || fs.empty()) return;
    const std::int64_t mR = measure(R);
    if (R.size() >= 3) return split(R, mR, fs);
    Element d = H_.multiply(H_.invert(R[0]), R[1]);
    if (wb_.length(d) == 1) return base(R, fs);
    std::size_t i = 0;
    while (d[i] == 0) ++i;
    Element h = H_.identity();
    std::string rule;
    if (d[i] >= 2) {
      h[i] = 1;
      rule = "case 1 (midpoint r1+e_i)";
    } else {
      std::size_t i0 = i + 1;
      while (d[i0] == 0) ++i0;
      h[i] = 1;
      h[i0] = d[i0] - 1;
      rule = "case 3 (h = e_i + (k_i0 - 1) e_i0)";
    }
    const Element f = H_.multiply(R[0], h);
    std::vector<Element> C1{R[0], f}, C2{f, R[1]};
    step(R, mR, C1, rule);
    step(R, mR, C2, rule);
    const Field& F = g_.field();
    std::vector<std::pair<int, Factor>> seq;
    for (const auto& x : fs) {
      // tau_{r1,r2}(l) = tau_{r1,f}(-l) tau_{f,r2}(-1) tau_{r1,f}(l) tau_{f,r2}(1)
      seq.push_back({1, shear_f(R[0], f, F.neg(x.lambda))});
      seq.push_back({2, shear_f(f, R[1], F.neg(1))});
      seq.push_back({1, shear_f(R[0], f, x.lambda)});
      seq.push_back({2, shear_f(f, R[1], 1)});
    }
    runs(seq, C1, C2);
  }

  void split(const std::vector<Element>& R, std::int64_t mR, const std::vector<Factor>& fs) {
    std::vector<Element> R1{R[0], R[1]}, R2(R.begin() + 1, R.end());
    step(R, mR, R1, "pair splitting R1");
    step(R, mR, R2, "pair splitting R2");
    const Field& F = g_.field();
    std::vector<std::pair<int, Factor>> seq;
    for (const auto& x : fs) {
      if (x.a.at == R[0] && x.b.at == R[1]) {
        seq.push_back({1, x});
      } else if (x.a.at != R[0]) {
        seq.push_back({2, x});
      } else {
        seq.push_back({1, shear_f(R[0], R[1], F.neg(x.lambda))});
        seq.push_back({2, shear_f(R[1], x.b.at, F.neg(1))});
        seq.push_back({1, shear_f(R[0], R[1], x.lambda)});
        seq.push_back({2, shear_f(R[1], x.b.at, 1)});
      }
    }
    runs(seq, R1, R2);
  }

  void runs(const std::vector<std::pair<int, Factor>>& seq, const std::vector<Element>& C1, const std::vector<Element>& C2) {
    for (std::size_t i = 0; i < seq.size();) {
      std::size_t j = i;
      std::vector<Factor> run;
      while (j < seq.size() && seq[j].first == seq[i].first) run.push_back(seq[j++].second);
      node(seq[i].first == 1 ? C1 : C2, run);
      i = j;
    }
  }

  void base(const std::vector<Element>& R, const std::vector<Factor>& fs) {
    const Element one = H_.identity();
    Element s = H_.multiply(H_.invert(R[0]), R[1]);
    for (const auto& x : fs) wb_.atom(R[0], wb_.lamp_gen(g_.transvection(one, s, x.lambda)));
  }

  const HaloGroup& g_;
  const Group& H_;
  WordBuilder wb_;
  CommutatorForm form_ = CommutatorForm::Neither;
  int dim_ = 1;
  std::vector<RecursionStep> trace_;
};

}  // namespace

Decomposition decompose_gluing(const HaloGroup& g, const LampConfig& sigma, const DecomposeOptions& opt) {
  if (!family_has_gluing(g.family())) {
    throw UnsupportedFamily(family_name(g.family()) + " lacks the gluing property; use the upcloner decomposition");
  }
  GluingDecomposer d(g, opt);
  Decomposition out = d.run(sigma);
  if (opt.simplify) out.word = simplify_word(std::move(out.word));
  return out;
}

Decomposition decompose_upcloner(const HaloGroup& g, const LampConfig& sigma, const DecomposeOptions& opt) {
  if (g.family() != Family::Upcloner) throw UnsupportedFamily("decompose_upcloner needs an upcloner");
  UpclonerDecomposer d(g, opt);
  Decomposition out = d.run(sigma);
  if (opt.simplify) out.word = simplify_word(std::move(out.word));
  return out;
}

Decomposition decompose_element(const HaloGroup& g, const HaloElement& x, const DecomposeOptions& opt) {
  DecomposeOptions inner = opt;
  inner.simplify = false;
  Decomposition d = g.family() == Family::Upcloner ? decompose_upcloner(g, x.lamp, inner) : decompose_gluing(g, x.lamp, inner);
  WordMetric m(g.base());
  for (auto s : m.geodesic(x.cursor)) d.word.push_back({g.move_generator(s), false});
  if (d.word.size() > opt.word_cap) throw ResourceError("generator word exceeds the cap");
  if (opt.simplify) d.word = simplify_word(std::move(d.word));
  return d;
}

HaloElement evaluate_word(const HaloGroup& g, const GeneratorWord& w) {
  std::vector<HaloElement> gens, invs;
  for (const auto& e : g.generators()) {
    gens.push_back(g.decode(e));
    invs.push_back(g.hinv(gens.back()));
  }
  HaloElement x{g.lamp_identity(), g.base()->identity()};
  for (const auto& l : w) {
    if (l.gen >= gens.size()) throw ContractViolation("generator index out of range");
    x = g.hmul(x, l.inv ? invs[l.gen] : gens[l.gen]);
  }
  return x;
}

GeneratorWord simplify_word(GeneratorWord w) {
  GeneratorWord out;
  for (const auto& l : w) {
    if (!out.empty() && out.back().gen == l.gen && out.back().inv != l.inv) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

bool upcloner_reachable(const HaloGroup& g, const LampConfig& sigma) {
  if (g.family() != Family::Upcloner) throw UnsupportedFamily("upcloner_reachable needs an upcloner");
  const auto& m = std::get<MatrixLamps>(sigma);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (i == j || m.at(i, j) == 0) continue;
      for (std::size_t c = 0; c < m.index[i].size(); ++c) {
        if (m.index[j][c] < m.index[i][c]) return false;
      }
    }
  }
  return true;
}

nlohmann::json word_to_json(const GeneratorWord& w) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : w) arr.push_back({{"gen", l.gen}, {"inv", l.inv}});
  return arr;
}

std::string word_to_string(const HaloGroup& g, const GeneratorWord& w) {
  std::string s;
  for (const auto& l : w) {
    if (!s.empty()) s += " ";
    s += g.generator_info()[l.gen].label;
    if (l.inv) s += "^-1";
  }
  return s;
}

}  // namespace halo
