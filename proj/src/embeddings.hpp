#pragma once

#include "halo.hpp"

namespace halo {

using Predicate = std::function<bool(const Element&)>;

// Right transversal S of a subgroup K in H: every h is uniquely k*s.
struct CosetSystem {
  GroupPtr H;
  Predicate in_K;
  std::vector<Element> K_generators;
  std::vector<Element> transversal;
  std::string descriptor;

  // (k, index of s); throws ContractViolation unless exactly one s fits
  std::pair<Element, std::size_t> factor(const Element& h) const;
  std::size_t index() const { return transversal.size(); }
};

// K = m_1 Z x ... x m_d Z inside Z^d with the box transversal.
CosetSystem sublattice_cosets(GroupPtr zd, const std::vector<std::int64_t>& moduli);

// FSym(m) wr K with K a subgroup of H given by a predicate. Product
// (f,k)(g,l) = (f * (k.g), kl), (k.g)(x) = g(k^-1 x), f*g pointwise with
// the right factor applied first.
class SymWreathGroup final : public Group {
 public:
  SymWreathGroup(GroupPtr H, Predicate in_K, std::vector<Element> K_generators, int m, std::string K_name);

  struct Value {
    std::vector<std::pair<Element, std::vector<int>>> f;  // sorted, identity permutations omitted
    Element k;
  };
  Element encode(const Value& v) const;
  Value decode(const Element& e) const;
  int m() const { return m_; }
  const Group& H() const { return *H_; }
  bool in_K(const Element& k) const { return in_K_(k); }

  Element identity() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element invert(const Element& a) const override;
  std::string descriptor() const override;
  std::string format(const Element& a) const override;

 private:
  GroupPtr H_;
  Predicate in_K_;
  int m_;
  std::size_t width_;
  std::string K_name_;
};

struct GroupMorphism {
  GroupPtr domain, codomain;
  std::function<Element(const Element&)> map;
  // subgroup of the domain on which the map is defined
  Predicate in_domain = [](const Element&) { return true; };
  // decides membership in the image, when known in closed form
  std::optional<Predicate> in_image;
  std::string name;
};

GroupMorphism compose(const GroupMorphism& outer, const GroupMorphism& inner);

struct MorphismCheck {
  bool identity = false;
  bool homomorphism = false;
  bool injective = false;
  std::size_t elements = 0;  // sampled domain elements
  std::size_t pairs = 0;
  std::string counterexample;
  std::optional<Element> outside_image;  // codomain element with no preimage
};

// Identity, homomorphism on random pairs of the sample, pairwise distinct
// images; with in_image, scans the codomain ball for a non-image element.
MorphismCheck check_morphism(const GroupMorphism& phi, const std::vector<Element>& sample, std::size_t pairs,
                             std::uint64_t seed, const std::vector<Element>& codomain_scan = {});

// Domain elements of Ball(radius) where the map is defined.
std::vector<Element> domain_sample(const GroupMorphism& phi, int radius);

// Coset-preserving subgroup G of Shuffler(H) onto FSym([H:K]) wr K.
GroupMorphism wreath_in_shuffler(const HaloPtr& shuffler, const CosetSystem& cosets);

// Coordinatewise doubling on Z^d; image = even vectors.
GroupMorphism doubling(GroupPtr zd);
GroupMorphism shuffler_endomorphism(const HaloPtr& shuffler, const GroupMorphism& psi,
                                    std::function<Element(const Element&)> psi_inverse);
// Preimage of a shuffler element under shuffler_endomorphism, if any.
bool in_shuffler_image(const HaloGroup& g, const GroupMorphism& psi, const Element& x);

// Juggler: Sym(r) wr H by track permutations; designer: F wr H; cloner
// over GF(q), q >= 3: (GF(q)^*) wr H by diagonal matrices.
GroupMorphism lamplighter_in_halo(const HaloPtr& halo);

}  // namespace halo
