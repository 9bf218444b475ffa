#include "embeddings.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace halo {

// --------------------------------------------------------------- cosets

std::pair<Element, std::size_t> CosetSystem::factor(const Element& h) const {
  std::optional<std::pair<Element, std::size_t>> found;
  for (std::size_t i = 0; i < transversal.size(); ++i) {
    Element k = H->multiply(h, H->invert(transversal[i]));
    if (!in_K(k)) continue;
    if (found) throw ContractViolation(H->format(h) + " lies in two cosets of " + descriptor);
    found.emplace(std::move(k), i);
  }
  if (!found) throw ContractViolation(H->format(h) + " lies in no coset K*s of " + descriptor);
  return *found;
}

CosetSystem sublattice_cosets(GroupPtr zd, const std::vector<std::int64_t>& moduli) {
  auto* z = dynamic_cast<const ZdGroup*>(zd.get());
  if (!z || static_cast<int>(moduli.size()) != z->dim()) throw ContractViolation("sublattice needs Z^d and d moduli");
  for (auto m : moduli) {
    if (m < 1) throw ContractViolation("moduli must be positive");
  }
  CosetSystem c;
  c.H = zd;
  c.in_K = [moduli](const Element& k) {
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      if (k[i] % moduli[i] != 0) return false;
    }
    return true;
  };
  const std::size_t d = moduli.size();
  c.descriptor = "";
  for (std::size_t i = 0; i < d; ++i) {
    c.descriptor += (i ? "x" : "") + std::to_string(moduli[i]) + "Z";
    Element e(d, 0);
    e[i] = moduli[i];
    c.K_generators.push_back(e);
    e[i] = -moduli[i];
    c.K_generators.push_back(e);
  }
  Element s(d, 0);
  for (;;) {
    c.transversal.push_back(s);
    std::size_t i = 0;
    while (i < d && ++s[i] == moduli[i]) s[i++] = 0;
    if (i == d) break;
  }
  if (c.transversal.size() < 2) throw ContractViolation("K must be a proper subgroup");
  return c;
}

// --------------------------------------------------------- FSym(m) wr K

namespace {

std::vector<int> perm_compose(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[b[i]];
  return r;
}

std::vector<int> perm_inverse(const std::vector<int>& a) {
  std::vector<int> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[a[i]] = static_cast<int>(i);
  return r;
}

bool perm_is_identity(const std::vector<int>& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != static_cast<int>(i)) return false;
  }
  return true;
}

}  // namespace

SymWreathGroup::SymWreathGroup(GroupPtr H, Predicate in_K, std::vector<Element> K_generators, int m, std::string K_name)
    : H_(std::move(H)), in_K_(std::move(in_K)), m_(m), width_(H_->identity().size()), K_name_(std::move(K_name)) {
  if (m < 1) throw ContractViolation("FSym(m) needs m >= 1");
  std::vector<Element> gens;
  for (const auto& k : K_generators) {
    if (!in_K_(k)) throw ContractViolation("generator outside K");
    gens.push_back(encode({{}, k}));
  }
  for (int i = 0; i + 1 < m; ++i) {
    std::vector<int> t(m);
    for (int j = 0; j < m; ++j) t[j] = j;
    std::swap(t[i], t[i + 1]);
    gens.push_back(encode({{{H_->identity(), t}}, H_->identity()}));
  }
  set_generators(std::move(gens));
}

Element SymWreathGroup::encode(const Value& v) const {
  Element e(v.k.begin(), v.k.end());
  for (const auto& [p, perm] : v.f) {
    e.insert(e.end(), p.begin(), p.end());
    e.insert(e.end(), perm.begin(), perm.end());
  }
  return e;
}

SymWreathGroup::Value SymWreathGroup::decode(const Element& e) const {
  Value v;
  v.k.assign(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(width_));
  for (std::size_t i = width_; i < e.size(); i += width_ + m_) {
    Element p(e.begin() + static_cast<std::ptrdiff_t>(i), e.begin() + static_cast<std::ptrdiff_t>(i + width_));
    std::vector<int> perm(e.begin() + static_cast<std::ptrdiff_t>(i + width_),
                          e.begin() + static_cast<std::ptrdiff_t>(i + width_ + m_));
    v.f.emplace_back(std::move(p), std::move(perm));
  }
  return v;
}

Element SymWreathGroup::identity() const { return H_->identity(); }

Element SymWreathGroup::multiply(const Element& a, const Element& b) const {
  Value x = decode(a), y = decode(b);
  std::map<Element, std::vector<int>> f;
  for (auto& [p, perm] : x.f) f.emplace(p, perm);
  for (auto& [p, perm] : y.f) {
    Element q = H_->multiply(x.k, p);
    auto it = f.find(q);
    if (it == f.end()) {
      f.emplace(std::move(q), perm);
    } else {
      it->second = perm_compose(it->second, perm);
    }
  }
  Value r;
  r.k = H_->multiply(x.k, y.k);
  for (auto& [p, perm] : f) {
    if (!perm_is_identity(perm)) r.f.emplace_back(p, std::move(perm));
  }
  return encode(r);
}

Element SymWreathGroup::invert(const Element& a) const {
  Value x = decode(a);
  Value r;
  r.k = H_->invert(x.k);
  for (auto& [p, perm] : x.f) r.f.emplace_back(H_->multiply(r.k, p), perm_inverse(perm));
  std::sort(r.f.begin(), r.f.end());
  return encode(r);
}

std::string SymWreathGroup::descriptor() const { return "FSym(" + std::to_string(m_) + ") wr " + K_name_; }

std::string SymWreathGroup::format(const Element& a) const {
  Value x = decode(a);
  std::string s = "(";
  for (std::size_t i = 0; i < x.f.size(); ++i) {
    if (i) s += ' ';
    s += H_->format(x.f[i].first) + ":[";
    for (int j = 0; j < m_; ++j) s += (j ? "," : "") + std::to_string(x.f[i].second[j]);
    s += "]";
  }
  return s + "; " + H_->format(x.k) + ")";
}

// ------------------------------------------------------------ morphisms

GroupMorphism compose(const GroupMorphism& outer, const GroupMorphism& inner) {
  if (inner.codomain->descriptor() != outer.domain->descriptor()) throw ContractViolation("morphisms do not compose");
  GroupMorphism r;
  r.domain = inner.domain;
  r.codomain = outer.codomain;
  r.name = outer.name + " o " + inner.name;
  r.map = [o = outer.map, i = inner.map](const Element& x) { return o(i(x)); };
  r.in_domain = [o = outer.in_domain, i = inner.in_domain, im = inner.map](const Element& x) {
    return i(x) && o(im(x));
  };
  return r;
}

std::vector<Element> domain_sample(const GroupMorphism& phi, int radius) {
  Ball b = ball(*phi.domain, radius);
  std::vector<Element> out;
  for (const auto& e : b.elements) {
    if (phi.in_domain(e)) out.push_back(e);
  }
  return out;
}

MorphismCheck check_morphism(const GroupMorphism& phi, const std::vector<Element>& sample, std::size_t pairs,
                             std::uint64_t seed, const std::vector<Element>& codomain_scan) {
  const Group& A = *phi.domain;
  const Group& B = *phi.codomain;
  MorphismCheck c;
  c.elements = sample.size();
  c.identity = B.is_identity(phi.map(A.identity()));
  if (!c.identity) c.counterexample = "identity maps to " + B.format(phi.map(A.identity()));

  std::vector<Element> images;
  images.reserve(sample.size());
  for (const auto& x : sample) images.push_back(phi.map(x));

  c.homomorphism = true;
  if (!sample.empty()) {
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < pairs; ++t) {
      std::size_t i = rng() % sample.size(), j = rng() % sample.size();
      ++c.pairs;
      Element ab = A.multiply(sample[i], sample[j]);
      if (!phi.in_domain(ab)) {
        c.homomorphism = false;
        c.counterexample = "domain not closed at " + A.format(sample[i]) + " * " + A.format(sample[j]);
        break;
      }
      if (phi.map(ab) != B.multiply(images[i], images[j])) {
        c.homomorphism = false;
        c.counterexample = "phi(ab) != phi(a)phi(b) for a = " + A.format(sample[i]) + ", b = " + A.format(sample[j]);
        break;
      }
    }
  }

  std::vector<std::pair<Element, std::size_t>> sorted;
  for (std::size_t i = 0; i < images.size(); ++i) sorted.emplace_back(images[i], i);
  std::sort(sorted.begin(), sorted.end());
  c.injective = true;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].first == sorted[i - 1].first) {
      c.injective = false;
      c.counterexample = A.format(sample[sorted[i].second]) + " and " + A.format(sample[sorted[i - 1].second]) +
                         " have the same image";
      break;
    }
  }

  if (phi.in_image) {
    for (const auto& y : codomain_scan) {
      if (!(*phi.in_image)(y)) {
        c.outside_image = y;
        break;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------- constructions

namespace {

const PermLamps& perm_of(const HaloGroup& g, const LampConfig& l) {
  if (g.family() != Family::Shuffler && g.family() != Family::Juggler) throw ContractViolation("not a permutation halo");
  return std::get<PermLamps>(l);
}

}  // namespace

GroupMorphism wreath_in_shuffler(const HaloPtr& shuffler, const CosetSystem& cosets) {
  if (shuffler->family() != Family::Shuffler) throw ContractViolation("wreath_in_shuffler needs a lampshuffler");
  if (shuffler->base()->descriptor() != cosets.H->descriptor()) throw ContractViolation("cosets are not in the base");
  auto target = std::make_shared<SymWreathGroup>(cosets.H, cosets.in_K, cosets.K_generators,
                                                 static_cast<int>(cosets.index()), cosets.descriptor);
  GroupMorphism phi;
  phi.domain = shuffler;
  phi.codomain = target;
  phi.name = "wreath_in_shuffler";
  // sigma(k'S) = k'S for every k' and cursor in K
  phi.in_domain = [g = shuffler, cosets](const Element& e) {
    HaloElement x = g->decode(e);
    if (!cosets.in_K(x.cursor)) return false;
    for (const auto& [from, to] : perm_of(*g, x.lamp).moves) {
      if (cosets.factor(from.at).first != cosets.factor(to.at).first) return false;
    }
    return true;
  };
  phi.map = [g = shuffler, cosets, target, dom = phi.in_domain](const Element& e) {
    if (!dom(e)) throw ContractViolation("not in domain: " + g->format(e) + " does not preserve the cosets");
    HaloElement x = g->decode(e);
    const auto& sigma = perm_of(*g, x.lamp);
    // f_sigma(k) = (k^-1 . sigma) restricted to S, i.e. s_i -> s_j when sigma(k s_i) = k s_j
    std::map<Element, std::vector<int>> f;
    for (const auto& [from, to] : sigma.moves) {
      auto [k, i] = cosets.factor(from.at);
      auto j = cosets.factor(to.at).second;
      auto it = f.find(k);
      if (it == f.end()) {
        std::vector<int> id(cosets.index());
        for (std::size_t t = 0; t < id.size(); ++t) id[t] = static_cast<int>(t);
        it = f.emplace(k, std::move(id)).first;
      }
      it->second[i] = static_cast<int>(j);
    }
    SymWreathGroup::Value v;
    v.k = x.cursor;
    for (auto& [k, perm] : f) v.f.emplace_back(k, std::move(perm));
    return target->encode(v);
  };
  return phi;
}

GroupMorphism doubling(GroupPtr zd) {
  if (!dynamic_cast<const ZdGroup*>(zd.get())) throw ContractViolation("doubling is defined on Z^d");
  GroupMorphism psi;
  psi.domain = psi.codomain = zd;
  psi.name = "doubling";
  psi.map = [](const Element& x) {
    Element y = x;
    for (auto& c : y) c *= 2;
    return y;
  };
  psi.in_image = [](const Element& y) {
    return std::all_of(y.begin(), y.end(), [](std::int64_t c) { return c % 2 == 0; });
  };
  return psi;
}

GroupMorphism shuffler_endomorphism(const HaloPtr& shuffler, const GroupMorphism& psi,
                                    std::function<Element(const Element&)> psi_inverse) {
  if (shuffler->family() != Family::Shuffler) throw ContractViolation("shuffler_endomorphism needs a lampshuffler");
  if (!psi.in_image) throw ContractViolation("psi needs an image membership test");
  // psi must be injective on the working ball
  Ball b = ball(*psi.domain, 4);
  std::set<Element> seen;
  for (const auto& h : b.elements) {
    if (!seen.insert(psi.map(h)).second) throw ContractViolation("psi is not injective on Ball(4)");
    if (psi_inverse(psi.map(h)) != h) throw ContractViolation("psi_inverse does not invert psi");
  }
  GroupMorphism phi;
  phi.domain = phi.codomain = shuffler;
  phi.name = "shuffler_endomorphism(" + psi.name + ")";
  phi.map = [g = shuffler, f = psi.map](const Element& e) {
    HaloElement x = g->decode(e);
    std::vector<std::pair<Site, Site>> moves;
    for (const auto& [from, to] : perm_of(*g, x.lamp).moves) moves.push_back({Site{f(from.at), 0}, Site{f(to.at), 0}});
    return g->encode({g->perm_from_map(std::move(moves)), f(x.cursor)});
  };
  phi.in_image = [g = shuffler, psi](const Element& e) { return in_shuffler_image(*g, psi, e); };
  return phi;
}

bool in_shuffler_image(const HaloGroup& g, const GroupMorphism& psi, const Element& e) {
  HaloElement x = g.decode(e);
  if (!(*psi.in_image)(x.cursor)) return false;
  for (const auto& [from, to] : perm_of(g, x.lamp).moves) {
    if (!(*psi.in_image)(from.at)) return false;
  }
  return true;
}

GroupMorphism lamplighter_in_halo(const HaloPtr& halo) {
  const GroupPtr& H = halo->base();
  GroupMorphism phi;
  phi.codomain = halo;
  switch (halo->family()) {
    case Family::Juggler: {
      int r = halo->params().tracks;
      auto dom = std::make_shared<SymWreathGroup>(H, [](const Element&) { return true; }, H->generators(), r,
                                                  H->descriptor());
      phi.domain = dom;
      phi.name = "Sym(" + std::to_string(r) + ") wr " + H->descriptor() + " -> " + halo->descriptor();
      phi.map = [halo, dom](const Element& e) {
        auto v = dom->decode(e);
        std::vector<std::pair<Site, Site>> moves;
        for (const auto& [p, perm] : v.f) {
          for (int i = 0; i < dom->m(); ++i) {
            if (perm[i] != i) moves.push_back({Site{p, i}, Site{p, perm[i]}});
          }
        }
        return halo->encode({halo->perm_from_map(std::move(moves)), v.k});
      };
      return phi;
    }
    case Family::Designer: {
      HaloParams p;
      p.lamp_group = halo->params().lamp_group;
      auto dom = make_halo(Family::Wreath, H, p);
      phi.domain = dom;
      phi.name = dom->descriptor() + " -> " + halo->descriptor();
      phi.map = [halo, dom](const Element& e) {
        HaloElement x = dom->decode(e);
        return halo->encode({DesignerLamps{std::get<WreathLamps>(x.lamp), PermLamps{}}, x.cursor});
      };
      return phi;
    }
    case Family::Cloner: {
      const Field& F = halo->field();
      if (F.q() < 3) throw ContractViolation("cloner over GF2 has a trivial unit group: no lamplighter subgroup");
      HaloParams p;
      p.lamp_group = std::make_shared<CyclicGroup>(F.q() - 1);
      auto dom = make_halo(Family::Wreath, H, p);
      phi.domain = dom;
      phi.name = dom->descriptor() + " -> " + halo->descriptor();
      phi.map = [halo, dom](const Element& e) {
        const Field& F = halo->field();
        HaloElement x = dom->decode(e);
        LampConfig l = halo->lamp_identity();
        for (const auto& [pt, v] : std::get<WreathLamps>(x.lamp).entries) {
          std::uint8_t lam = 1;
          for (std::int64_t i = 0; i < v[0]; ++i) lam = F.mul(lam, F.primitive());
          l = halo->compose(l, halo->diagonal(pt, lam));
        }
        return halo->encode({l, x.cursor});
      };
      return phi;
    }
    default:
      throw UnsupportedFamily("no lamplighter subgroup construction for " + family_name(halo->family()));
  }
}

}  // namespace halo
