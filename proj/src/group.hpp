#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <json.hpp>

#include "errors.hpp"

namespace halo {

// Canonical flat encoding of a group element. Two elements are equal iff
// their encodings are equal.
using Element = boost::container::small_vector<std::int64_t, 4>;

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ e.size();
    for (auto v : e) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

template <class V>
using ElementMap = std::unordered_map<Element, V, ElementHash>;

class Group;
using GroupPtr = std::shared_ptr<const Group>;

class Group {
 public:
  virtual ~Group() = default;

  virtual Element identity() const = 0;
  virtual Element multiply(const Element& a, const Element& b) const = 0;
  virtual Element invert(const Element& a) const = 0;

  // Canonical descriptor string (round-trips through the parser).
  virtual std::string descriptor() const = 0;
  virtual std::string format(const Element& a) const = 0;
  virtual nlohmann::json to_json(const Element& a) const { return format(a); }
  virtual Element from_json(const nlohmann::json& j) const;
  // Parse the output of format(); only base groups implement this.
  virtual Element parse_element(std::string_view text) const;

  virtual bool has_total_order() const { return false; }
  // Number of elements when the group is finite.
  virtual std::optional<std::uint64_t> finite_order() const { return std::nullopt; }

  // Translation-invariant total order; contract violation when unordered.
  std::strong_ordering compare(const Element& a, const Element& b) const;

  const std::vector<Element>& generators() const { return gens_; }
  // Index of the inverse of generator i inside generators().
  std::size_t inverse_generator(std::size_t i) const { return gen_inv_[i]; }
  bool is_identity(const Element& a) const { return a == identity(); }

 protected:
  // Deduplicates, drops the identity and checks closure under inversion.
  void set_generators(std::vector<Element> gens);

 private:
  std::vector<Element> gens_;
  std::vector<std::size_t> gen_inv_;
};

// Z^d with generators +e_1,-e_1,...,+e_d,-e_d. Z (d=1) is naturally ordered;
// for d >= 2 the lexicographic order must be requested.
class ZdGroup final : public Group {
 public:
  ZdGroup(int dim, bool lex);
  int dim() const { return dim_; }
  bool lex_requested() const { return lex_; }
  Element identity() const override;
  Element multiply(const Element& a, const Element& b) const override;
  Element invert(const Element& a) const override;
  std::string descriptor() const override;
  std::string format(const Element& a) const override;
  Element parse_element(std::string_view text) const override;
  bool has_total_order() const override { return dim_ == 1 || lex_; }
  Element point(std::initializer_list<std::int64_t> coords) const;

 private:
  int dim_;
  bool lex_;
};

class CyclicGroup final : public Group {
 public:
  explicit CyclicGroup(std::int64_t m);
  std::int64_t modulus() const { return m_; }
  Element identity() const override { return Element{0}; }
  Element multiply(const Element& a, const Element& b) const override;
  Element invert(const Element& a) const override;
  std::string descriptor() const override { return "C" + std::to_string(m_); }
  std::string format(const Element& a) const override { return std::to_string(a[0]); }
  Element parse_element(std::string_view text) const override;
  std::optional<std::uint64_t> finite_order() const override { return static_cast<std::uint64_t>(m_); }

 private:
  std::int64_t m_;
};

// Discrete Heisenberg group: (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y'),
// i.e. unitriangular matrices [[1,x,z],[0,1,y],[0,0,1]].
class HeisenbergGroup final : public Group {
 public:
  HeisenbergGroup();
  Element identity() const override { return Element{0, 0, 0}; }
  Element multiply(const Element& a, const Element& b) const override;
  Element invert(const Element& a) const override;
  std::string descriptor() const override { return "H3"; }
  std::string format(const Element& a) const override;
  Element parse_element(std::string_view text) const override;
};

// Direct product with the union generating set (s,1) and (1,t).
class ProductGroup final : public Group {
 public:
  ProductGroup(GroupPtr a, GroupPtr b);
  const GroupPtr& left() const { return a_; }
  const GroupPtr& right() const { return b_; }
  Element pair(const Element& x, const Element& y) const;
  Element first(const Element& p) const;
  Element second(const Element& p) const;
  Element identity() const override;
  Element multiply(const Element& x, const Element& y) const override;
  Element invert(const Element& x) const override;
  std::string descriptor() const override;
  std::string format(const Element& x) const override;
  Element parse_element(std::string_view text) const override;
  std::optional<std::uint64_t> finite_order() const override;

 private:
  GroupPtr a_, b_;
};

struct Ball {
  int radius = 0;
  // Elements in BFS order; layers are sorted by canonical encoding.
  std::vector<Element> elements;
  std::vector<int> lengths;
  ElementMap<std::size_t> index;

  std::size_t size() const { return elements.size(); }
  bool contains(const Element& e) const { return index.count(e) != 0; }
  int length(const Element& e) const;
};

struct BallOptions {
  std::uint64_t memory_budget = 2ULL << 30;
  int workers = 1;
};

// Breadth-first closure of {1} under right multiplication by generators.
Ball ball(const Group& g, int radius, const BallOptions& opt = {});

nlohmann::json ball_to_json(const Group& g, const Ball& b);

std::strong_ordering lex_compare(const Group& g, const Element& a, const Element& b);

// Word metric with a lazily grown ball; geodesic() returns generator indices.
class WordMetric {
 public:
  explicit WordMetric(GroupPtr g, int max_radius = 64);
  int length(const Element& h);
  std::vector<std::size_t> geodesic(const Element& h);
  int distance(const Element& a, const Element& b);
  const Group& group() const { return *g_; }

 private:
  void grow();
  void ensure(const Element& h);
  GroupPtr g_;
  int max_radius_;
  int radius_ = 0;
  std::vector<Element> frontier_;
  ElementMap<std::pair<int, std::size_t>> seen_;  // length, generator used to arrive
};

std::string format_code(const Element& e);

}  // namespace halo
