#pragma once

#include <functional>
#include <optional>
#include <variant>

#include <gmpxx.h>

#include "field.hpp"
#include "group.hpp"

namespace halo {

enum class Family { Wreath, Shuffler, Juggler, Designer, Cloner, Upcloner };

std::string family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);
bool family_has_gluing(Family f);

// A point of the permuted set: base element plus track (0-based; only the
// juggler uses tracks other than 0).
struct Site {
  Element at;
  std::int32_t track = 0;
  bool operator==(const Site& o) const { return track == o.track && at == o.at; }
  bool operator<(const Site& o) const { return at < o.at || (at == o.at && track < o.track); }
};

// Finitely supported map H -> F, sorted by point, identity values omitted.
struct WreathLamps {
  std::vector<std::pair<Element, Element>> entries;
  bool operator==(const WreathLamps&) const = default;
};

// Finitely supported bijection, stored as x -> sigma(x) for moved x only.
struct PermLamps {
  std::vector<std::pair<Site, Site>> moves;
  bool operator==(const PermLamps&) const = default;
};

// Square block on the sorted index set; every index has a row or a column
// differing from the identity matrix. Row-major entries over GF(q).
struct MatrixLamps {
  boost::container::small_vector<Element, 6> index;
  boost::container::small_vector<std::uint8_t, 36> a;
  bool operator==(const MatrixLamps&) const = default;
  std::size_t dim() const { return index.size(); }
  std::uint8_t at(std::size_t i, std::size_t j) const { return a[i * index.size() + j]; }
};

// Colored permutation (f, sigma) with (f,s)(g,t) = (f * (s.g), s t) where
// (s.g)(x) = g(s^-1 x).
struct DesignerLamps {
  WreathLamps colors;
  PermLamps perm;
  bool operator==(const DesignerLamps&) const = default;
};

using LampConfig = std::variant<WreathLamps, PermLamps, MatrixLamps, DesignerLamps>;

struct HaloElement {
  LampConfig lamp;
  Element cursor;
  bool operator==(const HaloElement&) const = default;
};

struct GeneratorInfo {
  bool is_move = false;
  std::size_t base_index = 0;  // for moves: index into base generators
  LampConfig lamp;             // for lamp generators (cursor 1_H)
  std::string label;
};

struct HaloParams {
  GroupPtr lamp_group;  // wreath, designer
  int tracks = 1;       // juggler
  int q = 2;            // cloner, upcloner
};

class HaloGroup final : public Group {
 public:
  HaloGroup(Family family, GroupPtr base, HaloParams params);

  Family family() const { return family_; }
  const GroupPtr& base() const { return base_; }
  const HaloParams& params() const { return params_; }
  const Field& field() const;

  // Lamp algebra.
  LampConfig lamp_identity() const;
  bool lamp_is_identity(const LampConfig& a) const;
  LampConfig compose(const LampConfig& a, const LampConfig& b) const;
  LampConfig lamp_inverse(const LampConfig& a) const;
  // alpha(h): translate supports by h (left multiplication).
  LampConfig act(const Element& h, const LampConfig& a) const;
  // Sorted base points carrying non-trivial lamp data.
  std::vector<Element> support(const LampConfig& a) const;
  bool supported_in(const LampConfig& a, const std::vector<Element>& sorted_set) const;

  HaloElement hmul(const HaloElement& x, const HaloElement& y) const;
  HaloElement hinv(const HaloElement& x) const;
  HaloElement lamp_element(LampConfig l) const { return {std::move(l), base_->identity()}; }

  Element encode(const HaloElement& x) const;
  HaloElement decode(const Element& code) const;
  Element encode_lamp(const LampConfig& l) const;

  // Elementary lamps.
  LampConfig transposition(const Site& a, const Site& b) const;
  LampConfig transvection(const Element& p, const Element& q, std::uint8_t lambda) const;
  LampConfig diagonal(const Element& p, std::uint8_t lambda) const;
  LampConfig single(const Element& p, const Element& value) const;
  // Canonical matrix lamp from a dense matrix on a sorted index set.
  MatrixLamps matrix_from_dense(const std::vector<Element>& sorted_index, const std::vector<std::uint8_t>& dense) const;
  PermLamps perm_from_map(std::vector<std::pair<Site, Site>> moves) const;
  Site apply(const PermLamps& p, const Site& x) const;
  // Value of a wreath/designer map at a point (identity of F when absent).
  Element value_at(const WreathLamps& w, const Element& p) const;
  // Throws when a matrix lamp is not unitriangular for the upcloner.
  void validate(const LampConfig& l) const;

  const std::vector<GeneratorInfo>& generator_info() const { return info_; }
  std::size_t lamp_generator_count() const { return lamp_gens_; }
  std::size_t move_generator(std::size_t base_index) const { return lamp_gens_ + base_index; }

  nlohmann::json lamp_to_json(const LampConfig& l) const;
  LampConfig lamp_from_json(const nlohmann::json& j) const;
  std::string format_lamp(const LampConfig& l) const;

  // Group interface.
  Element identity() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element invert(const Element& a) const override;
  std::string descriptor() const override;
  std::string format(const Element& a) const override;
  nlohmann::json to_json(const Element& a) const override;
  Element from_json(const nlohmann::json& j) const override;
  std::optional<std::uint64_t> finite_order() const override;

 private:
  std::string site_str(const Site& s) const;
  Family family_;
  GroupPtr base_;
  HaloParams params_;
  std::optional<Field> field_;
  std::vector<GeneratorInfo> info_;
  std::size_t lamp_gens_ = 0;
};

using HaloPtr = std::shared_ptr<const HaloGroup>;

std::shared_ptr<HaloGroup> make_halo(Family family, GroupPtr base, HaloParams params);

// Closed-form lamp growth.
struct GrowthParams {
  std::uint64_t lamp_order = 2;  // |F|
  int tracks = 1;
  int q = 2;
};
mpz_class lamp_growth(Family family, const GrowthParams& params, int n);
mpz_class lamp_growth(const HaloGroup& g, int n);
GrowthParams growth_params(const HaloGroup& g);

// All elements of a finite group, in BFS order.
std::vector<Element> enumerate_finite_group(const Group& g, std::uint64_t budget = 1000000);

constexpr std::uint64_t kDefaultBlockBudget = 1000000;

// Streams L(S) (S need not be sorted). Throws when Lambda(|S|) > budget.
void for_each_block_element(const HaloGroup& g, const std::vector<Element>& S,
                            const std::function<void(const LampConfig&)>& visit,
                            std::uint64_t budget = kDefaultBlockBudget);
std::vector<LampConfig> enumerate_block(const HaloGroup& g, const std::vector<Element>& S,
                                        std::uint64_t budget = kDefaultBlockBudget);

struct CommutativityResult {
  int D = 0;
  // Non-commuting pair of block sets at distance D-1, with elements.
  std::optional<std::pair<std::vector<Element>, std::vector<Element>>> witness_sets;
  std::optional<std::pair<LampConfig, LampConfig>> witness_lamps;
  int witness_distance = -1;
};

CommutativityResult commutativity_constant(const HaloGroup& g, int radius,
                                           std::uint64_t budget = kDefaultBlockBudget);

// Order of the subgroup of L(H) generated by the given lamps (closure BFS).
std::uint64_t generated_subgroup_order(const HaloGroup& g, const std::vector<LampConfig>& gens,
                                       std::uint64_t budget = kDefaultBlockBudget);

// |<L(R), L(S)>| and |L(R u S)|.
std::pair<std::uint64_t, std::uint64_t> gluing_orders(const HaloGroup& g, const std::vector<Element>& R,
                                                      const std::vector<Element>& S);

int permutation_sign(const PermLamps& p);

}  // namespace halo
