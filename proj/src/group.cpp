#include "group.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

namespace halo {

namespace {

std::int64_t parse_int(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && s[pos] == ' ') ++pos;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
  if (ec != std::errc()) throw ParseError("expected integer", pos);
  pos = static_cast<std::size_t>(ptr - s.data());
  while (pos < s.size() && s[pos] == ' ') ++pos;
  return v;
}

void expect(std::string_view s, std::size_t& pos, char c) {
  while (pos < s.size() && s[pos] == ' ') ++pos;
  if (pos >= s.size() || s[pos] != c) throw ParseError(std::string("expected '") + c + "'", pos);
  ++pos;
}

// Splits "[a, b]" at the top-level comma.
std::pair<std::string_view, std::string_view> split_pair(std::string_view s) {
  std::size_t b = s.find_first_not_of(' ');
  std::size_t e = s.find_last_not_of(' ');
  if (b == std::string_view::npos || s[b] != '[' || s[e] != ']') throw ParseError("expected [a, b]", 0);
  int depth = 0;
  for (std::size_t i = b + 1; i < e; ++i) {
    char c = s[i];
    if (c == '[' || c == '(' || c == '{') ++depth;
    if (c == ']' || c == ')' || c == '}') --depth;
    if (c == ',' && depth == 0) return {s.substr(b + 1, i - b - 1), s.substr(i + 1, e - i - 1)};
  }
  throw ParseError("expected top-level comma", b);
}

}  // namespace

std::string format_code(const Element& e) {
  std::string out = "[";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(e[i]);
  }
  return out + "]";
}

Element Group::from_json(const nlohmann::json& j) const {
  if (!j.is_string()) throw ContractViolation("element must be given as a string");
  return parse_element(j.get<std::string>());
}

Element Group::parse_element(std::string_view) const {
  throw UnsupportedFamily("element parsing not available for " + descriptor());
}

std::strong_ordering Group::compare(const Element& a, const Element& b) const {
  if (!has_total_order()) throw ContractViolation("group " + descriptor() + " has no total order");
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

void Group::set_generators(std::vector<Element> gens) {
  Element id = identity();
  std::vector<Element> out;
  for (auto& g : gens) {
    if (g == id) continue;
    if (std::find(out.begin(), out.end(), g) != out.end()) continue;
    out.push_back(std::move(g));
  }
  gen_inv_.assign(out.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    Element inv = invert(out[i]);
    auto it = std::find(out.begin(), out.end(), inv);
    if (it == out.end()) throw ContractViolation("generator list of " + descriptor() + " not closed under inversion");
    gen_inv_[i] = static_cast<std::size_t>(it - out.begin());
  }
  gens_ = std::move(out);
}

std::strong_ordering lex_compare(const Group& g, const Element& a, const Element& b) {
  return g.compare(a, b);
}

// ---- Z^d

ZdGroup::ZdGroup(int dim, bool lex) : dim_(dim), lex_(lex) {
  if (dim < 1) throw ContractViolation("Z^d needs d >= 1");
  std::vector<Element> gens;
  for (int i = 0; i < dim; ++i) {
    Element e(dim, 0);
    e[i] = 1;
    gens.push_back(e);
    e[i] = -1;
    gens.push_back(e);
  }
  set_generators(std::move(gens));
}

Element ZdGroup::identity() const { return Element(dim_, 0); }

Element ZdGroup::multiply(const Element& a, const Element& b) const {
  Element r(dim_);
  for (int i = 0; i < dim_; ++i) r[i] = a[i] + b[i];
  return r;
}

Element ZdGroup::invert(const Element& a) const {
  Element r(dim_);
  for (int i = 0; i < dim_; ++i) r[i] = -a[i];
  return r;
}

std::string ZdGroup::descriptor() const {
  if (dim_ == 1 && !lex_) return "Z";
  std::string s = "Z^" + std::to_string(dim_);
  if (lex_) s += ":lex";
  return s;
}

std::string ZdGroup::format(const Element& a) const {
  if (dim_ == 1) return std::to_string(a[0]);
  std::string s = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + ")";
}

Element ZdGroup::parse_element(std::string_view text) const {
  std::size_t pos = 0;
  Element r(dim_);
  if (dim_ == 1 && text.find('(') == std::string_view::npos) {
    r[0] = parse_int(text, pos);
  } else {
    expect(text, pos, '(');
    for (int i = 0; i < dim_; ++i) {
      if (i) expect(text, pos, ',');
      r[i] = parse_int(text, pos);
    }
    expect(text, pos, ')');
  }
  if (pos != text.size()) throw ParseError("trailing characters in element", pos);
  return r;
}

Element ZdGroup::point(std::initializer_list<std::int64_t> coords) const {
  if (static_cast<int>(coords.size()) != dim_) throw ContractViolation("wrong number of coordinates");
  return Element(coords.begin(), coords.end());
}

// ---- C_m

CyclicGroup::CyclicGroup(std::int64_t m) : m_(m) {
  if (m < 2) throw ContractViolation("C_m needs m >= 2");
  set_generators({Element{1}, Element{m - 1}});
}

Element CyclicGroup::multiply(const Element& a, const Element& b) const { return Element{(a[0] + b[0]) % m_}; }

Element CyclicGroup::invert(const Element& a) const { return Element{(m_ - a[0]) % m_}; }

Element CyclicGroup::parse_element(std::string_view text) const {
  std::size_t pos = 0;
  std::int64_t v = parse_int(text, pos);
  if (pos != text.size()) throw ParseError("trailing characters in element", pos);
  return Element{((v % m_) + m_) % m_};
}

// ---- H3

HeisenbergGroup::HeisenbergGroup() {
  set_generators({Element{1, 0, 0}, Element{-1, 0, 0}, Element{0, 1, 0}, Element{0, -1, 0}});
}

Element HeisenbergGroup::multiply(const Element& a, const Element& b) const {
  return Element{a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
}

Element HeisenbergGroup::invert(const Element& a) const {
  return Element{-a[0], -a[1], -a[2] + a[0] * a[1]};
}

std::string HeisenbergGroup::format(const Element& a) const {
  return "(" + std::to_string(a[0]) + "," + std::to_string(a[1]) + "," + std::to_string(a[2]) + ")";
}

Element HeisenbergGroup::parse_element(std::string_view text) const {
  std::size_t pos = 0;
  Element r(3);
  expect(text, pos, '(');
  for (int i = 0; i < 3; ++i) {
    if (i) expect(text, pos, ',');
    r[i] = parse_int(text, pos);
  }
  expect(text, pos, ')');
  if (pos != text.size()) throw ParseError("trailing characters in element", pos);
  return r;
}

// ---- products: code = [len(a), a..., b...]

ProductGroup::ProductGroup(GroupPtr a, GroupPtr b) : a_(std::move(a)), b_(std::move(b)) {
  std::vector<Element> gens;
  for (const auto& s : a_->generators()) gens.push_back(pair(s, b_->identity()));
  for (const auto& t : b_->generators()) gens.push_back(pair(a_->identity(), t));
  set_generators(std::move(gens));
}

Element ProductGroup::pair(const Element& x, const Element& y) const {
  Element r;
  r.reserve(1 + x.size() + y.size());
  r.push_back(static_cast<std::int64_t>(x.size()));
  r.insert(r.end(), x.begin(), x.end());
  r.insert(r.end(), y.begin(), y.end());
  return r;
}

Element ProductGroup::first(const Element& p) const { return Element(p.begin() + 1, p.begin() + 1 + p[0]); }

Element ProductGroup::second(const Element& p) const { return Element(p.begin() + 1 + p[0], p.end()); }

Element ProductGroup::identity() const { return pair(a_->identity(), b_->identity()); }

Element ProductGroup::multiply(const Element& x, const Element& y) const {
  return pair(a_->multiply(first(x), first(y)), b_->multiply(second(x), second(y)));
}

Element ProductGroup::invert(const Element& x) const { return pair(a_->invert(first(x)), b_->invert(second(x))); }

std::string ProductGroup::descriptor() const {
  std::string r = b_->descriptor();
  if (dynamic_cast<const ProductGroup*>(b_.get())) r = "(" + r + ")";
  return a_->descriptor() + " x " + r;
}

std::string ProductGroup::format(const Element& x) const {
  return "[" + a_->format(first(x)) + ", " + b_->format(second(x)) + "]";
}

Element ProductGroup::parse_element(std::string_view text) const {
  auto [l, r] = split_pair(text);
  return pair(a_->parse_element(l.substr(l.find_first_not_of(' '))),
              b_->parse_element(r.substr(r.find_first_not_of(' '))));
}

std::optional<std::uint64_t> ProductGroup::finite_order() const {
  auto x = a_->finite_order();
  auto y = b_->finite_order();
  if (!x || !y) return std::nullopt;
  return *x * *y;
}

// ---- balls

int Ball::length(const Element& e) const {
  auto it = index.find(e);
  if (it == index.end()) return -1;
  return lengths[it->second];
}

namespace {

std::uint64_t element_bytes(const Element& e) {
  std::uint64_t heap = e.size() > 4 ? e.size() * 8 : 0;
  return 160 + heap;
}

}  // namespace

Ball ball(const Group& g, int radius, const BallOptions& opt) {
  if (radius < 0) throw ContractViolation("ball radius must be non-negative");
  Ball b;
  b.radius = radius;
  std::uint64_t bytes = 0;
  auto add = [&](Element e, int len) {
    bytes += element_bytes(e);
    b.index.emplace(e, b.elements.size());
    b.elements.push_back(std::move(e));
    b.lengths.push_back(len);
  };
  add(g.identity(), 0);
  std::size_t layer_begin = 0;
  const auto& gens = g.generators();
  int workers = std::max(1, opt.workers);
  for (int r = 1; r <= radius; ++r) {
    std::size_t layer_end = b.elements.size();
    std::size_t n = layer_end - layer_begin;
    std::vector<std::vector<Element>> found(static_cast<std::size_t>(workers));
    auto expand = [&](int w) {
      for (std::size_t i = layer_begin + static_cast<std::size_t>(w); i < layer_end; i += static_cast<std::size_t>(workers)) {
        for (const auto& s : gens) {
          Element x = g.multiply(b.elements[i], s);
          if (!b.index.count(x)) found[static_cast<std::size_t>(w)].push_back(std::move(x));
        }
      }
    };
    if (workers == 1 || n < 64) {
      for (int w = 0; w < workers; ++w) expand(w);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(expand, w);
      for (auto& t : pool) t.join();
    }
    std::vector<Element> layer;
    for (auto& f : found) {
      for (auto& x : f) layer.push_back(std::move(x));
    }
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
    for (auto& x : layer) {
      add(std::move(x), r);
      if (bytes > opt.memory_budget) {
        throw ResourceError("memory budget exceeded while building ball of radius " + std::to_string(r) +
                            " (complete up to radius " + std::to_string(r - 1) + ")");
      }
    }
    layer_begin = layer_end;
  }
  return b;
}

nlohmann::json ball_to_json(const Group& g, const Ball& b) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < b.size(); ++i) {
    arr.push_back({{"element", g.format(b.elements[i])}, {"length", b.lengths[i]}});
  }
  return arr;
}

// ---- word metric

WordMetric::WordMetric(GroupPtr g, int max_radius) : g_(std::move(g)), max_radius_(max_radius) {
  Element id = g_->identity();
  seen_.emplace(id, std::make_pair(0, std::size_t(-1)));
  frontier_.push_back(id);
}

void WordMetric::grow() {
  if (radius_ >= max_radius_) throw ResourceError("word metric radius cap reached");
  ++radius_;
  std::vector<Element> next;
  const auto& gens = g_->generators();
  for (const auto& x : frontier_) {
    for (std::size_t i = 0; i < gens.size(); ++i) {
      Element y = g_->multiply(x, gens[i]);
      if (seen_.emplace(y, std::make_pair(radius_, i)).second) next.push_back(std::move(y));
    }
  }
  frontier_ = std::move(next);
}

void WordMetric::ensure(const Element& h) {
  while (!seen_.count(h)) grow();
}

int WordMetric::length(const Element& h) {
  ensure(h);
  return seen_.at(h).first;
}

std::vector<std::size_t> WordMetric::geodesic(const Element& h) {
  ensure(h);
  std::vector<std::size_t> word;
  Element x = h;
  while (true) {
    auto [len, gi] = seen_.at(x);
    if (len == 0) break;
    word.push_back(gi);
    x = g_->multiply(x, g_->generators()[g_->inverse_generator(gi)]);
  }
  std::reverse(word.begin(), word.end());
  return word;
}

int WordMetric::distance(const Element& a, const Element& b) { return length(g_->multiply(g_->invert(a), b)); }

}  // namespace halo
