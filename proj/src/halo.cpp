#include "halo.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace halo {

std::string family_name(Family f) {
  switch (f) {
    case Family::Wreath: return "wreath";
    case Family::Shuffler: return "shuffler";
    case Family::Juggler: return "juggler";
    case Family::Designer: return "designer";
    case Family::Cloner: return "cloner";
    case Family::Upcloner: return "upcloner";
  }
  return "?";
}

std::optional<Family> family_from_name(std::string_view name) {
  for (Family f : {Family::Wreath, Family::Shuffler, Family::Juggler, Family::Designer, Family::Cloner, Family::Upcloner}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

bool family_has_gluing(Family f) { return f != Family::Upcloner; }

namespace {

bool is_perm_family(Family f) { return f == Family::Shuffler || f == Family::Juggler; }
bool is_matrix_family(Family f) { return f == Family::Cloner || f == Family::Upcloner; }

struct Reader {
  const Element& c;
  std::size_t pos = 0;
  std::int64_t next() {
    if (pos >= c.size()) throw ContractViolation("truncated halo element encoding");
    return c[pos++];
  }
  Element take() {
    std::int64_t n = next();
    if (n < 0 || pos + static_cast<std::size_t>(n) > c.size()) throw ContractViolation("bad halo element encoding");
    Element e(c.begin() + static_cast<std::ptrdiff_t>(pos), c.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += static_cast<std::size_t>(n);
    return e;
  }
};

void put(Element& out, const Element& e) {
  out.push_back(static_cast<std::int64_t>(e.size()));
  out.insert(out.end(), e.begin(), e.end());
}

template <class Map, class Key>
auto find_sorted(const Map& v, const Key& k) {
  auto it = std::lower_bound(v.begin(), v.end(), k, [](const auto& e, const Key& key) { return e.first < key; });
  if (it != v.end() && it->first == k) return it;
  return v.end();
}

// Gauss-Jordan inverse of a dense n x n matrix; empty result when singular.
std::vector<std::uint8_t> dense_inverse(const Field& f, std::vector<std::uint8_t> m, std::size_t n) {
  std::vector<std::uint8_t> inv(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p * n + c] == 0) ++p;
    if (p == n) return {};
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m[p * n + j], m[c * n + j]);
        std::swap(inv[p * n + j], inv[c * n + j]);
      }
    }
    std::uint8_t s = f.inv(m[c * n + c]);
    for (std::size_t j = 0; j < n; ++j) {
      m[c * n + j] = f.mul(s, m[c * n + j]);
      inv[c * n + j] = f.mul(s, inv[c * n + j]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r * n + c] == 0) continue;
      std::uint8_t t = m[r * n + c];
      for (std::size_t j = 0; j < n; ++j) {
        m[r * n + j] = f.sub(m[r * n + j], f.mul(t, m[c * n + j]));
        inv[r * n + j] = f.sub(inv[r * n + j], f.mul(t, inv[c * n + j]));
      }
    }
  }
  return inv;
}

}  // namespace

// ---------------------------------------------------------------- construction

HaloGroup::HaloGroup(Family family, GroupPtr base, HaloParams params)
    : family_(family), base_(std::move(base)), params_(std::move(params)) {
  if (!base_) throw ContractViolation("halo product needs a base group");
  if (family_ == Family::Wreath || family_ == Family::Designer) {
    if (!params_.lamp_group) throw ContractViolation(family_name(family_) + " needs a lamp group F");
  }
  if (family_ == Family::Juggler && params_.tracks < 1) throw ContractViolation("juggler needs s >= 1 tracks");
  if (is_matrix_family(family_)) field_.emplace(params_.q);
  if (family_ == Family::Upcloner && !base_->has_total_order()) {
    std::string msg = "order required";
    if (auto* zd = dynamic_cast<const ZdGroup*>(base_.get())) {
      msg += ": use Z^" + std::to_string(zd->dim()) + ":lex";
    } else {
      msg += ": " + base_->descriptor() + " has no translation-invariant total order";
    }
    throw ContractViolation(msg);
  }

  const Element one = base_->identity();
  const auto& S = base_->generators();
  std::vector<GeneratorInfo> lamp_info;
  auto add_lamp = [&](LampConfig l, std::string label) {
    for (const auto& gi : lamp_info) {
      if (gi.lamp == l) return;
    }
    GeneratorInfo gi;
    gi.lamp = std::move(l);
    gi.label = std::move(label);
    lamp_info.push_back(std::move(gi));
  };
  auto bf = [&](const Element& e) { return base_->format(e); };

  if (family_ == Family::Wreath || family_ == Family::Designer) {
    for (const auto& a : params_.lamp_group->generators()) {
      add_lamp(single(one, a), "lamp(" + params_.lamp_group->format(a) + ")@" + bf(one));
    }
  }
  if (family_ == Family::Cloner) {
    for (int l = 2; l < params_.q; ++l) {
      add_lamp(diagonal(one, static_cast<std::uint8_t>(l)), "delta(" + std::to_string(l) + ")@" + bf(one));
    }
  }
  for (const auto& s : S) {
    switch (family_) {
      case Family::Wreath: break;
      case Family::Shuffler:
      case Family::Designer:
        add_lamp(transposition({one, 0}, {s, 0}), "tau(" + bf(one) + "," + bf(s) + ")");
        break;
      case Family::Juggler:
        for (int i = 0; i < params_.tracks; ++i) {
          for (int j = 0; j < params_.tracks; ++j) {
            add_lamp(transposition({one, i}, {s, j}),
                     "tau(" + site_str({one, i}) + "," + site_str({s, j}) + ")");
          }
        }
        break;
      case Family::Cloner:
        for (int l = 1; l < params_.q; ++l) {
          add_lamp(transvection(one, s, static_cast<std::uint8_t>(l)),
                   "tau(" + bf(one) + "," + bf(s) + ";" + std::to_string(l) + ")");
        }
        break;
      case Family::Upcloner: {
        bool up = base_->compare(one, s) == std::strong_ordering::less;
        const Element& p = up ? one : s;
        const Element& q = up ? s : one;
        for (int l = 1; l < params_.q; ++l) {
          add_lamp(transvection(p, q, static_cast<std::uint8_t>(l)),
                   "tau(" + bf(p) + "," + bf(q) + ";" + std::to_string(l) + ")");
        }
        break;
      }
    }
  }
  lamp_gens_ = lamp_info.size();
  std::vector<Element> gens;
  for (auto& gi : lamp_info) {
    gens.push_back(encode(lamp_element(gi.lamp)));
    info_.push_back(std::move(gi));
  }
  for (std::size_t i = 0; i < S.size(); ++i) {
    GeneratorInfo gi;
    gi.is_move = true;
    gi.base_index = i;
    gi.lamp = lamp_identity();
    gi.label = "move(" + bf(S[i]) + ")";
    gens.push_back(encode({lamp_identity(), S[i]}));
    info_.push_back(std::move(gi));
  }
  set_generators(std::move(gens));
  if (generators().size() != info_.size()) throw ContractViolation("degenerate natural generating set");
}

std::shared_ptr<HaloGroup> make_halo(Family family, GroupPtr base, HaloParams params) {
  return std::make_shared<HaloGroup>(family, std::move(base), std::move(params));
}

const Field& HaloGroup::field() const {
  if (!field_) throw ContractViolation(family_name(family_) + " has no coefficient field");
  return *field_;
}

// ---------------------------------------------------------------- elementary lamps

LampConfig HaloGroup::lamp_identity() const {
  switch (family_) {
    case Family::Wreath: return WreathLamps{};
    case Family::Shuffler:
    case Family::Juggler: return PermLamps{};
    case Family::Designer: return DesignerLamps{};
    case Family::Cloner:
    case Family::Upcloner: return MatrixLamps{};
  }
  return WreathLamps{};
}

bool HaloGroup::lamp_is_identity(const LampConfig& a) const {
  return std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WreathLamps>) return x.entries.empty();
        if constexpr (std::is_same_v<T, PermLamps>) return x.moves.empty();
        if constexpr (std::is_same_v<T, MatrixLamps>) return x.index.empty();
        if constexpr (std::is_same_v<T, DesignerLamps>) return x.colors.entries.empty() && x.perm.moves.empty();
      },
      a);
}

PermLamps HaloGroup::perm_from_map(std::vector<std::pair<Site, Site>> moves) const {
  PermLamps p;
  for (auto& m : moves) {
    if (!(m.first == m.second)) p.moves.push_back(std::move(m));
  }
  std::sort(p.moves.begin(), p.moves.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return p;
}

LampConfig HaloGroup::transposition(const Site& a, const Site& b) const {
  if (!is_perm_family(family_) && family_ != Family::Designer) throw ContractViolation("transposition in a non-permutational family");
  if (a == b) throw ContractViolation("transposition needs two distinct points");
  PermLamps p = perm_from_map({{a, b}, {b, a}});
  if (family_ == Family::Designer) return DesignerLamps{{}, std::move(p)};
  return p;
}

MatrixLamps HaloGroup::matrix_from_dense(const std::vector<Element>& idx, const std::vector<std::uint8_t>& m) const {
  const std::size_t n = idx.size();
  boost::container::small_vector<std::size_t, 8> keep;
  for (std::size_t i = 0; i < n; ++i) {
    bool trivial = true;
    for (std::size_t j = 0; j < n && trivial; ++j) {
      std::uint8_t e = i == j ? 1 : 0;
      if (m[i * n + j] != e || m[j * n + i] != e) trivial = false;
    }
    if (!trivial) keep.push_back(i);
  }
  MatrixLamps out;
  for (auto i : keep) out.index.push_back(idx[i]);
  out.a.resize(keep.size() * keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    for (std::size_t c = 0; c < keep.size(); ++c) out.a[r * keep.size() + c] = m[keep[r] * n + keep[c]];
  }
  return out;
}

LampConfig HaloGroup::transvection(const Element& p, const Element& q, std::uint8_t lambda) const {
  if (!is_matrix_family(family_)) throw ContractViolation("transvection in a non-matrix family");
  if (p == q) throw ContractViolation("transvection needs two distinct points");
  if (lambda >= params_.q) throw ContractViolation("scalar outside the field");
  bool pq = p < q;
  std::vector<Element> idx = pq ? std::vector<Element>{p, q} : std::vector<Element>{q, p};
  std::vector<std::uint8_t> m{1, 0, 0, 1};
  // row p, column q
  m[pq ? 1 : 2] = lambda;
  return matrix_from_dense(idx, m);
}

LampConfig HaloGroup::diagonal(const Element& p, std::uint8_t lambda) const {
  if (family_ != Family::Cloner) throw ContractViolation("diagonal lamps exist only in the cloner");
  if (lambda == 0 || lambda >= params_.q) throw ContractViolation("diagonal entry must be a unit");
  return matrix_from_dense({p}, {lambda});
}

LampConfig HaloGroup::single(const Element& p, const Element& value) const {
  if (family_ != Family::Wreath && family_ != Family::Designer) throw ContractViolation("single-site values need a lamp group");
  WreathLamps w;
  if (!params_.lamp_group->is_identity(value)) w.entries.push_back({p, value});
  if (family_ == Family::Designer) return DesignerLamps{std::move(w), {}};
  return w;
}

Site HaloGroup::apply(const PermLamps& p, const Site& x) const {
  auto it = find_sorted(p.moves, x);
  return it == p.moves.end() ? x : it->second;
}

Element HaloGroup::value_at(const WreathLamps& w, const Element& p) const {
  auto it = find_sorted(w.entries, p);
  return it == w.entries.end() ? params_.lamp_group->identity() : it->second;
}

// ---------------------------------------------------------------- composition

namespace {

WreathLamps wreath_mul(const Group& F, const WreathLamps& a, const WreathLamps& b) {
  WreathLamps r;
  r.entries.reserve(a.entries.size() + b.entries.size());
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j == b.entries.size() || (i < a.entries.size() && a.entries[i].first < b.entries[j].first)) {
      r.entries.push_back(a.entries[i++]);
    } else if (i == a.entries.size() || b.entries[j].first < a.entries[i].first) {
      r.entries.push_back(b.entries[j++]);
    } else {
      Element v = F.multiply(a.entries[i].second, b.entries[j].second);
      if (!F.is_identity(v)) r.entries.push_back({a.entries[i].first, std::move(v)});
      ++i;
      ++j;
    }
  }
  return r;
}

// a o b: apply b first.
PermLamps perm_mul(const PermLamps& a, const PermLamps& b) {
  PermLamps r;
  r.moves.reserve(a.moves.size() + b.moves.size());
  auto apply_a = [&](const Site& y) -> const Site& {
    auto it = find_sorted(a.moves, y);
    return it == a.moves.end() ? y : it->second;
  };
  std::size_t i = 0, j = 0;
  while (i < a.moves.size() || j < b.moves.size()) {
    if (j == b.moves.size() || (i < a.moves.size() && a.moves[i].first < b.moves[j].first)) {
      // x fixed by b
      r.moves.push_back(a.moves[i++]);
    } else {
      const Site& x = b.moves[j].first;
      if (i < a.moves.size() && a.moves[i].first == x) ++i;
      const Site& z = apply_a(b.moves[j].second);
      if (!(z == x)) r.moves.push_back({x, z});
      ++j;
    }
  }
  return r;
}

PermLamps perm_inv(const PermLamps& a) {
  PermLamps r;
  r.moves.reserve(a.moves.size());
  for (const auto& m : a.moves) r.moves.push_back({m.second, m.first});
  std::sort(r.moves.begin(), r.moves.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return r;
}

// (s.g)(x) = g(s^-1 x): move each colored point p to s(p).
WreathLamps push_colors(const HaloGroup& g, const PermLamps& s, const WreathLamps& w) {
  if (s.moves.empty()) return w;
  WreathLamps r;
  r.entries.reserve(w.entries.size());
  for (const auto& [p, v] : w.entries) r.entries.push_back({g.apply(s, Site{p, 0}).at, v});
  std::sort(r.entries.begin(), r.entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return r;
}

MatrixLamps matrix_mul(const HaloGroup& g, const Field& f, const MatrixLamps& a, const MatrixLamps& b) {
  if (a.index.empty()) return b;
  if (b.index.empty()) return a;
  std::vector<Element> u;
  u.reserve(a.index.size() + b.index.size());
  std::merge(a.index.begin(), a.index.end(), b.index.begin(), b.index.end(), std::back_inserter(u));
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const std::size_t n = u.size();
  auto embed = [&](const MatrixLamps& m) {
    std::vector<std::uint8_t> d(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1;
    boost::container::small_vector<std::size_t, 8> pos;
    std::size_t k = 0;
    for (const auto& e : m.index) {
      while (!(u[k] == e)) ++k;
      pos.push_back(k);
    }
    const std::size_t k2 = m.index.size();
    for (std::size_t r = 0; r < k2; ++r) {
      for (std::size_t c = 0; c < k2; ++c) d[pos[r] * n + pos[c]] = m.a[r * k2 + c];
    }
    return d;
  };
  auto da = embed(a);
  auto db = embed(b);
  std::vector<std::uint8_t> dc(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      std::uint8_t x = da[i * n + k];
      if (x == 0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        std::uint8_t y = db[k * n + j];
        if (y) dc[i * n + j] = f.add(dc[i * n + j], f.mul(x, y));
      }
    }
  }
  return g.matrix_from_dense(u, dc);
}

}  // namespace

LampConfig HaloGroup::compose(const LampConfig& a, const LampConfig& b) const {
  switch (family_) {
    case Family::Wreath:
      return wreath_mul(*params_.lamp_group, std::get<WreathLamps>(a), std::get<WreathLamps>(b));
    case Family::Shuffler:
    case Family::Juggler:
      return perm_mul(std::get<PermLamps>(a), std::get<PermLamps>(b));
    case Family::Designer: {
      const auto& x = std::get<DesignerLamps>(a);
      const auto& y = std::get<DesignerLamps>(b);
      return DesignerLamps{wreath_mul(*params_.lamp_group, x.colors, push_colors(*this, x.perm, y.colors)),
                           perm_mul(x.perm, y.perm)};
    }
    case Family::Cloner:
    case Family::Upcloner:
      return matrix_mul(*this, *field_, std::get<MatrixLamps>(a), std::get<MatrixLamps>(b));
  }
  throw ContractViolation("unknown family");
}

LampConfig HaloGroup::lamp_inverse(const LampConfig& a) const {
  switch (family_) {
    case Family::Wreath: {
      WreathLamps r = std::get<WreathLamps>(a);
      for (auto& e : r.entries) e.second = params_.lamp_group->invert(e.second);
      return r;
    }
    case Family::Shuffler:
    case Family::Juggler:
      return perm_inv(std::get<PermLamps>(a));
    case Family::Designer: {
      const auto& x = std::get<DesignerLamps>(a);
      WreathLamps finv = x.colors;
      for (auto& e : finv.entries) e.second = params_.lamp_group->invert(e.second);
      PermLamps sinv = perm_inv(x.perm);
      return DesignerLamps{push_colors(*this, sinv, finv), sinv};
    }
    case Family::Cloner:
    case Family::Upcloner: {
      const auto& m = std::get<MatrixLamps>(a);
      if (m.index.empty()) return m;
      std::vector<std::uint8_t> d(m.a.begin(), m.a.end());
      auto inv = dense_inverse(*field_, d, m.dim());
      if (inv.empty()) throw ContractViolation("singular matrix lamp");
      MatrixLamps r;
      r.index = m.index;
      r.a.assign(inv.begin(), inv.end());
      return r;
    }
  }
  throw ContractViolation("unknown family");
}

LampConfig HaloGroup::act(const Element& h, const LampConfig& a) const {
  if (base_->is_identity(h)) return a;
  auto tr = [&](const Element& x) { return base_->multiply(h, x); };
  auto act_wreath = [&](const WreathLamps& w) {
    WreathLamps r;
    r.entries.reserve(w.entries.size());
    for (const auto& [p, v] : w.entries) r.entries.push_back({tr(p), v});
    std::sort(r.entries.begin(), r.entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return r;
  };
  auto act_perm = [&](const PermLamps& p) {
    PermLamps r;
    r.moves.reserve(p.moves.size());
    for (const auto& [x, y] : p.moves) r.moves.push_back({Site{tr(x.at), x.track}, Site{tr(y.at), y.track}});
    std::sort(r.moves.begin(), r.moves.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return r;
  };
  switch (family_) {
    case Family::Wreath: return act_wreath(std::get<WreathLamps>(a));
    case Family::Shuffler:
    case Family::Juggler: return act_perm(std::get<PermLamps>(a));
    case Family::Designer: {
      const auto& d = std::get<DesignerLamps>(a);
      return DesignerLamps{act_wreath(d.colors), act_perm(d.perm)};
    }
    case Family::Cloner:
    case Family::Upcloner: {
      const auto& m = std::get<MatrixLamps>(a);
      const std::size_t n = m.dim();
      std::vector<std::pair<Element, std::size_t>> moved;
      moved.reserve(n);
      for (std::size_t i = 0; i < n; ++i) moved.push_back({tr(m.index[i]), i});
      std::sort(moved.begin(), moved.end());
      MatrixLamps r;
      r.a.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) r.index.push_back(moved[i].first);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) r.a[i * n + j] = m.a[moved[i].second * n + moved[j].second];
      }
      return r;
    }
  }
  throw ContractViolation("unknown family");
}

std::vector<Element> HaloGroup::support(const LampConfig& a) const {
  std::vector<Element> pts;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WreathLamps>) {
          for (const auto& e : x.entries) pts.push_back(e.first);
        } else if constexpr (std::is_same_v<T, PermLamps>) {
          for (const auto& m : x.moves) pts.push_back(m.first.at);
        } else if constexpr (std::is_same_v<T, MatrixLamps>) {
          pts.assign(x.index.begin(), x.index.end());
        } else {
          for (const auto& e : x.colors.entries) pts.push_back(e.first);
          for (const auto& m : x.perm.moves) pts.push_back(m.first.at);
        }
      },
      a);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

bool HaloGroup::supported_in(const LampConfig& a, const std::vector<Element>& S) const {
  auto in = [&](const Element& p) { return std::binary_search(S.begin(), S.end(), p); };
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WreathLamps>) {
          return std::all_of(x.entries.begin(), x.entries.end(), [&](const auto& e) { return in(e.first); });
        } else if constexpr (std::is_same_v<T, PermLamps>) {
          return std::all_of(x.moves.begin(), x.moves.end(), [&](const auto& m) { return in(m.first.at); });
        } else if constexpr (std::is_same_v<T, MatrixLamps>) {
          return std::all_of(x.index.begin(), x.index.end(), in);
        } else {
          return std::all_of(x.colors.entries.begin(), x.colors.entries.end(), [&](const auto& e) { return in(e.first); }) &&
                 std::all_of(x.perm.moves.begin(), x.perm.moves.end(), [&](const auto& m) { return in(m.first.at); });
        }
      },
      a);
}

HaloElement HaloGroup::hmul(const HaloElement& x, const HaloElement& y) const {
  return {compose(x.lamp, act(x.cursor, y.lamp)), base_->multiply(x.cursor, y.cursor)};
}

HaloElement HaloGroup::hinv(const HaloElement& x) const {
  Element hi = base_->invert(x.cursor);
  return {act(hi, lamp_inverse(x.lamp)), hi};
}

void HaloGroup::validate(const LampConfig& l) const {
  if (!is_matrix_family(family_)) return;
  const auto& m = std::get<MatrixLamps>(l);
  const std::size_t n = m.dim();
  if (!std::is_sorted(m.index.begin(), m.index.end())) throw ContractViolation("matrix index not sorted");
  std::vector<std::uint8_t> d(m.a.begin(), m.a.end());
  if (n && dense_inverse(*field_, d, n).empty()) throw ContractViolation("matrix lamp is not invertible");
  if (family_ == Family::Upcloner) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::uint8_t e = m.at(i, j);
        if ((i == j && e != 1) || (i > j && e != 0)) {
          throw ContractViolation("upcloner lamp is not unitriangular w.r.t. the base order");
        }
      }
    }
  }
}

// ---------------------------------------------------------------- encoding

Element HaloGroup::encode_lamp(const LampConfig& l) const {
  Element out;
  auto enc_wreath = [&](const WreathLamps& w) {
    out.push_back(static_cast<std::int64_t>(w.entries.size()));
    for (const auto& [p, v] : w.entries) {
      put(out, p);
      put(out, v);
    }
  };
  auto enc_perm = [&](const PermLamps& p) {
    out.push_back(static_cast<std::int64_t>(p.moves.size()));
    for (const auto& [x, y] : p.moves) {
      put(out, x.at);
      out.push_back(x.track);
      put(out, y.at);
      out.push_back(y.track);
    }
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WreathLamps>) {
          enc_wreath(x);
        } else if constexpr (std::is_same_v<T, PermLamps>) {
          enc_perm(x);
        } else if constexpr (std::is_same_v<T, MatrixLamps>) {
          out.push_back(static_cast<std::int64_t>(x.index.size()));
          for (const auto& p : x.index) put(out, p);
          out.insert(out.end(), x.a.begin(), x.a.end());
        } else {
          enc_wreath(x.colors);
          enc_perm(x.perm);
        }
      },
      l);
  return out;
}

Element HaloGroup::encode(const HaloElement& x) const {
  Element out;
  put(out, x.cursor);
  Element l = encode_lamp(x.lamp);
  out.insert(out.end(), l.begin(), l.end());
  return out;
}

HaloElement HaloGroup::decode(const Element& code) const {
  Reader rd{code};
  HaloElement x;
  x.cursor = rd.take();
  auto dec_wreath = [&]() {
    WreathLamps w;
    auto n = rd.next();
    for (std::int64_t i = 0; i < n; ++i) {
      Element p = rd.take();
      Element v = rd.take();
      w.entries.push_back({std::move(p), std::move(v)});
    }
    return w;
  };
  auto dec_perm = [&]() {
    PermLamps p;
    auto n = rd.next();
    for (std::int64_t i = 0; i < n; ++i) {
      Site a, b;
      a.at = rd.take();
      a.track = static_cast<std::int32_t>(rd.next());
      b.at = rd.take();
      b.track = static_cast<std::int32_t>(rd.next());
      p.moves.push_back({std::move(a), std::move(b)});
    }
    return p;
  };
  switch (family_) {
    case Family::Wreath: x.lamp = dec_wreath(); break;
    case Family::Shuffler:
    case Family::Juggler: x.lamp = dec_perm(); break;
    case Family::Designer: {
      auto c = dec_wreath();
      x.lamp = DesignerLamps{std::move(c), dec_perm()};
      break;
    }
    case Family::Cloner:
    case Family::Upcloner: {
      MatrixLamps m;
      auto n = static_cast<std::size_t>(rd.next());
      for (std::size_t i = 0; i < n; ++i) m.index.push_back(rd.take());
      for (std::size_t i = 0; i < n * n; ++i) m.a.push_back(static_cast<std::uint8_t>(rd.next()));
      x.lamp = std::move(m);
      break;
    }
  }
  if (rd.pos != code.size()) throw ContractViolation("trailing data in halo element encoding");
  return x;
}

Element HaloGroup::identity() const { return encode({lamp_identity(), base_->identity()}); }

Element HaloGroup::multiply(const Element& a, const Element& b) const { return encode(hmul(decode(a), decode(b))); }

Element HaloGroup::invert(const Element& a) const { return encode(hinv(decode(a))); }

std::string HaloGroup::descriptor() const {
  std::string b = base_->descriptor();
  switch (family_) {
    case Family::Wreath:
    case Family::Designer:
      return family_name(family_) + "(" + params_.lamp_group->descriptor() + ", " + b + ")";
    case Family::Shuffler: return "shuffler(" + b + ")";
    case Family::Juggler: return "juggler(" + std::to_string(params_.tracks) + ", " + b + ")";
    case Family::Cloner:
    case Family::Upcloner: return family_name(family_) + "(GF" + std::to_string(params_.q) + ", " + b + ")";
  }
  return "?";
}

std::string HaloGroup::site_str(const Site& s) const {
  std::string r = base_->format(s.at);
  if (family_ == Family::Juggler) r += "/" + std::to_string(s.track + 1);
  return r;
}

std::string HaloGroup::format_lamp(const LampConfig& l) const {
  auto fmt_wreath = [&](const WreathLamps& w) {
    std::string s = "{";
    for (std::size_t i = 0; i < w.entries.size(); ++i) {
      if (i) s += " ";
      s += base_->format(w.entries[i].first) + ":" + params_.lamp_group->format(w.entries[i].second);
    }
    return s + "}";
  };
  auto fmt_perm = [&](const PermLamps& p) {
    // cycle notation starting from the smallest point of each cycle
    std::string s;
    std::vector<bool> done(p.moves.size(), false);
    for (std::size_t i = 0; i < p.moves.size(); ++i) {
      if (done[i]) continue;
      s += "(";
      Site x = p.moves[i].first;
      bool first = true;
      do {
        auto it = find_sorted(p.moves, x);
        done[static_cast<std::size_t>(it - p.moves.begin())] = true;
        if (!first) s += " ";
        first = false;
        s += site_str(x);
        x = it->second;
      } while (!(x == p.moves[i].first));
      s += ")";
    }
    return s.empty() ? std::string("()") : s;
  };
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WreathLamps>) {
          return fmt_wreath(x);
        } else if constexpr (std::is_same_v<T, PermLamps>) {
          return fmt_perm(x);
        } else if constexpr (std::is_same_v<T, MatrixLamps>) {
          std::string s = "{";
          bool first = true;
          for (std::size_t i = 0; i < x.dim(); ++i) {
            for (std::size_t j = 0; j < x.dim(); ++j) {
              std::uint8_t e = x.at(i, j);
              if (e == (i == j ? 1 : 0)) continue;
              if (!first) s += " ";
              first = false;
              s += "<" + base_->format(x.index[i]) + ";" + base_->format(x.index[j]) + ">=" + std::to_string(e);
            }
          }
          return s + "}";
        } else {
          return fmt_wreath(x.colors) + fmt_perm(x.perm);
        }
      },
      l);
}

std::string HaloGroup::format(const Element& a) const {
  HaloElement x = decode(a);
  return format_lamp(x.lamp) + "@" + base_->format(x.cursor);
}

nlohmann::json HaloGroup::lamp_to_json(const LampConfig& l) const {
  using nlohmann::json;
  auto wreath_json = [&](const WreathLamps& w) {
    json arr = json::array();
    for (const auto& [p, v] : w.entries) arr.push_back({{"at", base_->to_json(p)}, {"value", params_.lamp_group->to_json(v)}});
    return arr;
  };
  auto perm_json = [&](const PermLamps& p) {
    json arr = json::array();
    for (const auto& [x, y] : p.moves) arr.push_back({{"from", site_str(x)}, {"to", site_str(y)}});
    return arr;
  };
  json j;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, WreathLamps>) {
          j = {{"variant", "wreath"}, {"entries", wreath_json(x)}};
        } else if constexpr (std::is_same_v<T, PermLamps>) {
          j = {{"variant", "permutation"}, {"entries", perm_json(x)}};
        } else if constexpr (std::is_same_v<T, MatrixLamps>) {
          json arr = json::array();
          for (std::size_t r = 0; r < x.dim(); ++r) {
            for (std::size_t c = 0; c < x.dim(); ++c) {
              std::uint8_t e = x.at(r, c);
              if (e == (r == c ? 1 : 0)) continue;
              arr.push_back({{"row", base_->to_json(x.index[r])}, {"col", base_->to_json(x.index[c])}, {"value", e}});
            }
          }
          j = {{"variant", "matrix"}, {"entries", arr}};
        } else {
          j = {{"variant", "designer"}, {"entries", {{"colors", wreath_json(x.colors)}, {"moves", perm_json(x.perm)}}}};
        }
      },
      l);
  return j;
}

LampConfig HaloGroup::lamp_from_json(const nlohmann::json& j) const {
  if (!j.is_object() || !j.contains("entries")) throw ContractViolation("lamp JSON needs {variant, entries}");
  const auto& entries = j.at("entries");
  auto parse_site = [&](const nlohmann::json& s) {
    std::string t = s.get<std::string>();
    Site site;
    if (family_ == Family::Juggler) {
      auto slash = t.rfind('/');
      if (slash == std::string::npos) throw ContractViolation("juggler site needs a track: " + t);
      int track = std::stoi(t.substr(slash + 1));
      if (track < 1 || track > params_.tracks) throw ContractViolation("track out of range: " + t);
      site.track = track - 1;
      t = t.substr(0, slash);
    }
    site.at = base_->from_json(t);
    return site;
  };
  auto parse_wreath = [&](const nlohmann::json& arr) {
    WreathLamps w;
    for (const auto& e : arr) {
      Element v = params_.lamp_group->from_json(e.at("value"));
      if (!params_.lamp_group->is_identity(v)) w.entries.push_back({base_->from_json(e.at("at")), v});
    }
    std::sort(w.entries.begin(), w.entries.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 1; i < w.entries.size(); ++i) {
      if (w.entries[i].first == w.entries[i - 1].first) throw ContractViolation("duplicate lamp position");
    }
    return w;
  };
  auto parse_perm = [&](const nlohmann::json& arr) {
    std::vector<std::pair<Site, Site>> mv;
    for (const auto& e : arr) mv.push_back({parse_site(e.at("from")), parse_site(e.at("to"))});
    PermLamps p = perm_from_map(mv);
    std::vector<Site> from, to;
    for (const auto& m : p.moves) {
      from.push_back(m.first);
      to.push_back(m.second);
    }
    std::sort(to.begin(), to.end());
    if (from != to || std::adjacent_find(from.begin(), from.end()) != from.end()) {
      throw ContractViolation("permutation entries are not a bijection on their support");
    }
    return p;
  };
  switch (family_) {
    case Family::Wreath: return parse_wreath(entries);
    case Family::Shuffler:
    case Family::Juggler: return parse_perm(entries);
    case Family::Designer: return DesignerLamps{parse_wreath(entries.at("colors")), parse_perm(entries.at("moves"))};
    case Family::Cloner:
    case Family::Upcloner: {
      std::vector<std::tuple<Element, Element, int>> es;
      std::vector<Element> idx;
      for (const auto& e : entries) {
        es.emplace_back(base_->from_json(e.at("row")), base_->from_json(e.at("col")), e.at("value").get<int>());
        idx.push_back(std::get<0>(es.back()));
        idx.push_back(std::get<1>(es.back()));
      }
      std::sort(idx.begin(), idx.end());
      idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
      const std::size_t n = idx.size();
      std::vector<std::uint8_t> d(n * n, 0);
      for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1;
      for (const auto& [r, c, v] : es) {
        if (v < 0 || v >= params_.q) throw ContractViolation("matrix entry outside GF(q)");
        auto ri = static_cast<std::size_t>(std::lower_bound(idx.begin(), idx.end(), r) - idx.begin());
        auto ci = static_cast<std::size_t>(std::lower_bound(idx.begin(), idx.end(), c) - idx.begin());
        d[ri * n + ci] = static_cast<std::uint8_t>(v);
      }
      LampConfig l = matrix_from_dense(idx, d);
      validate(l);
      return l;
    }
  }
  throw ContractViolation("unknown family");
}

nlohmann::json HaloGroup::to_json(const Element& a) const {
  HaloElement x = decode(a);
  return {{"lamp", lamp_to_json(x.lamp)}, {"cursor", base_->to_json(x.cursor)}};
}

Element HaloGroup::from_json(const nlohmann::json& j) const {
  if (!j.is_object()) throw ContractViolation("halo element JSON needs {lamp, cursor}");
  HaloElement x{lamp_from_json(j.at("lamp")), base_->from_json(j.at("cursor"))};
  return encode(x);
}

std::optional<std::uint64_t> HaloGroup::finite_order() const {
  auto n = base_->finite_order();
  if (!n || *n > 64) return std::nullopt;
  if ((family_ == Family::Wreath || family_ == Family::Designer) && !params_.lamp_group->finite_order()) return std::nullopt;
  mpz_class total = lamp_growth(*this, static_cast<int>(*n)) * static_cast<unsigned long>(*n);
  if (!total.fits_ulong_p()) return std::nullopt;
  return total.get_ui();
}

// ---------------------------------------------------------------- growth

GrowthParams growth_params(const HaloGroup& g) {
  GrowthParams p;
  p.tracks = g.params().tracks;
  p.q = g.params().q;
  if (g.params().lamp_group) {
    auto o = g.params().lamp_group->finite_order();
    if (!o) throw ContractViolation("lamp group " + g.params().lamp_group->descriptor() + " is infinite");
    p.lamp_order = *o;
  }
  return p;
}

mpz_class lamp_growth(Family family, const GrowthParams& p, int n) {
  if (n < 0) throw ContractViolation("lamp_growth needs n >= 0");
  auto fact = [](unsigned long k) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), k);
    return r;
  };
  mpz_class F(static_cast<unsigned long>(p.lamp_order));
  mpz_class q(p.q);
  mpz_class r;
  switch (family) {
    case Family::Wreath:
      mpz_pow_ui(r.get_mpz_t(), F.get_mpz_t(), static_cast<unsigned long>(n));
      return r;
    case Family::Shuffler: return fact(static_cast<unsigned long>(n));
    case Family::Juggler: return fact(static_cast<unsigned long>(p.tracks) * static_cast<unsigned long>(n));
    case Family::Designer:
      mpz_pow_ui(r.get_mpz_t(), F.get_mpz_t(), static_cast<unsigned long>(n));
      return r * fact(static_cast<unsigned long>(n));
    case Family::Cloner: {
      mpz_class qn, qi, prod = 1;
      mpz_pow_ui(qn.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(n));
      for (int i = 0; i < n; ++i) {
        mpz_pow_ui(qi.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(i));
        prod *= qn - qi;
      }
      return prod;
    }
    case Family::Upcloner:
      mpz_pow_ui(r.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(n) * static_cast<unsigned long>(n > 0 ? n - 1 : 0) / 2);
      return r;
  }
  return 1;
}

mpz_class lamp_growth(const HaloGroup& g, int n) { return lamp_growth(g.family(), growth_params(g), n); }

std::vector<Element> enumerate_finite_group(const Group& g, std::uint64_t budget) {
  std::vector<Element> out{g.identity()};
  std::unordered_set<Element, ElementHash> seen{g.identity()};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& s : g.generators()) {
      Element y = g.multiply(out[i], s);
      if (seen.insert(y).second) {
        out.push_back(std::move(y));
        if (out.size() > budget) throw ResourceError("group " + g.descriptor() + " exceeds the enumeration budget");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- blocks

void for_each_block_element(const HaloGroup& g, const std::vector<Element>& S_in,
                            const std::function<void(const LampConfig&)>& visit, std::uint64_t budget) {
  std::vector<Element> S = S_in;
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  const int n = static_cast<int>(S.size());
  mpz_class lam = lamp_growth(g, n);
  if (lam > mpz_class(static_cast<unsigned long>(budget))) {
    throw ResourceError("block of size " + std::to_string(n) + " has Lambda = " + lam.get_str() +
                        " elements, above the enumeration budget " + std::to_string(budget));
  }
  const Family fam = g.family();
  std::vector<Element> fvals;
  if (fam == Family::Wreath || fam == Family::Designer) fvals = enumerate_finite_group(*g.params().lamp_group);

  auto for_each_map = [&](const std::function<void(const WreathLamps&)>& f) {
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    while (true) {
      WreathLamps w;
      for (int i = 0; i < n; ++i) {
        if (digit[static_cast<std::size_t>(i)] != 0) w.entries.push_back({S[static_cast<std::size_t>(i)], fvals[digit[static_cast<std::size_t>(i)]]});
      }
      f(w);
      int k = 0;
      while (k < n && ++digit[static_cast<std::size_t>(k)] == fvals.size()) digit[static_cast<std::size_t>(k++)] = 0;
      if (k == n) break;
    }
  };
  auto for_each_perm = [&](int tracks, const std::function<void(const PermLamps&)>& f) {
    std::vector<Site> sites;
    for (const auto& s : S) {
      for (int t = 0; t < tracks; ++t) sites.push_back({s, t});
    }
    std::vector<std::size_t> perm(sites.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      PermLamps p;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] != i) p.moves.push_back({sites[i], sites[perm[i]]});
      }
      f(p);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };

  switch (fam) {
    case Family::Wreath:
      for_each_map([&](const WreathLamps& w) { visit(w); });
      return;
    case Family::Shuffler:
    case Family::Juggler:
      for_each_perm(fam == Family::Juggler ? g.params().tracks : 1, [&](const PermLamps& p) { visit(p); });
      return;
    case Family::Designer:
      for_each_map([&](const WreathLamps& w) {
        for_each_perm(1, [&](const PermLamps& p) { visit(DesignerLamps{w, p}); });
      });
      return;
    case Family::Upcloner: {
      const int q = g.params().q;
      std::vector<std::pair<std::size_t, std::size_t>> slots;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) slots.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
      std::vector<int> digit(slots.size(), 0);
      const auto un = static_cast<std::size_t>(n);
      while (true) {
        std::vector<std::uint8_t> d(un * un, 0);
        for (std::size_t i = 0; i < un; ++i) d[i * un + i] = 1;
        for (std::size_t k = 0; k < slots.size(); ++k) d[slots[k].first * un + slots[k].second] = static_cast<std::uint8_t>(digit[k]);
        visit(g.matrix_from_dense(S, d));
        std::size_t k = 0;
        while (k < slots.size() && ++digit[k] == q) digit[k++] = 0;
        if (k == slots.size()) break;
      }
      return;
    }
    case Family::Cloner: {
      const Field& f = g.field();
      const int q = f.q();
      const auto un = static_cast<std::size_t>(n);
      std::size_t total = 1;
      for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(q);
      std::vector<std::vector<std::uint8_t>> vecs(total, std::vector<std::uint8_t>(un));
      for (std::size_t v = 0; v < total; ++v) {
        std::size_t x = v;
        for (std::size_t i = 0; i < un; ++i) {
          vecs[v][i] = static_cast<std::uint8_t>(x % static_cast<std::size_t>(q));
          x /= static_cast<std::size_t>(q);
        }
      }
      std::vector<std::uint8_t> dense(un * un, 0);
      // echelon basis of chosen rows: (pivot column, normalized row)
      std::vector<std::pair<std::size_t, std::vector<std::uint8_t>>> basis;
      std::function<void(std::size_t)> rec = [&](std::size_t row) {
        if (row == un) {
          visit(g.matrix_from_dense(S, dense));
          return;
        }
        for (std::size_t v = 1; v < total; ++v) {
          std::vector<std::uint8_t> r = vecs[v];
          for (const auto& [pc, b] : basis) {
            std::uint8_t t = r[pc];
            if (!t) continue;
            for (std::size_t j = 0; j < un; ++j) r[j] = f.sub(r[j], f.mul(t, b[j]));
          }
          std::size_t pc = 0;
          while (pc < un && r[pc] == 0) ++pc;
          if (pc == un) continue;
          std::uint8_t s = f.inv(r[pc]);
          for (auto& e : r) e = f.mul(s, e);
          for (std::size_t j = 0; j < un; ++j) dense[row * un + j] = vecs[v][j];
          basis.push_back({pc, std::move(r)});
          rec(row + 1);
          basis.pop_back();
        }
      };
      rec(0);
      return;
    }
  }
}

std::vector<LampConfig> enumerate_block(const HaloGroup& g, const std::vector<Element>& S, std::uint64_t budget) {
  std::vector<LampConfig> out;
  for_each_block_element(g, S, [&](const LampConfig& l) { out.push_back(l); }, budget);
  return out;
}

// ---------------------------------------------------------------- commutativity

CommutativityResult commutativity_constant(const HaloGroup& g, int radius, std::uint64_t budget) {
  const Group& H = *g.base();
  Ball B = ball(H, radius);
  Ball B2 = ball(H, 2 * radius);
  auto dist = [&](const Element& x, const Element& y) { return B2.length(H.multiply(H.invert(x), y)); };

  std::vector<std::vector<Element>> subsets;
  for (std::size_t i = 0; i < B.size(); ++i) subsets.push_back({B.elements[i]});
  for (std::size_t i = 0; i < B.size(); ++i) {
    for (std::size_t j = i + 1; j < B.size(); ++j) subsets.push_back({B.elements[i], B.elements[j]});
  }
  std::vector<std::vector<LampConfig>> blocks;
  blocks.reserve(subsets.size());
  for (const auto& s : subsets) {
    auto blk = enumerate_block(g, s, budget);
    blk.erase(std::remove_if(blk.begin(), blk.end(), [&](const LampConfig& l) { return g.lamp_is_identity(l); }), blk.end());
    blocks.push_back(std::move(blk));
  }

  CommutativityResult res;
  int worst = -1;
  for (std::size_t a = 0; a < subsets.size(); ++a) {
    if (blocks[a].empty()) continue;
    for (std::size_t b = a; b < subsets.size(); ++b) {
      if (blocks[b].empty()) continue;
      int d = std::numeric_limits<int>::max();
      for (const auto& x : subsets[a]) {
        for (const auto& y : subsets[b]) d = std::min(d, dist(x, y));
      }
      if (d <= worst) continue;
      bool found = false;
      for (const auto& x : blocks[a]) {
        for (const auto& y : blocks[b]) {
          if (!(g.compose(x, y) == g.compose(y, x))) {
            worst = d;
            res.witness_sets = std::make_pair(subsets[a], subsets[b]);
            res.witness_lamps = std::make_pair(x, y);
            res.witness_distance = d;
            found = true;
            break;
          }
        }
        if (found) break;
      }
    }
  }
  res.D = worst + 1;
  return res;
}

std::uint64_t generated_subgroup_order(const HaloGroup& g, const std::vector<LampConfig>& gens, std::uint64_t budget) {
  std::vector<LampConfig> elems{g.lamp_identity()};
  std::unordered_set<Element, ElementHash> seen{g.encode_lamp(elems[0])};
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& s : gens) {
      LampConfig y = g.compose(elems[i], s);
      if (seen.insert(g.encode_lamp(y)).second) {
        elems.push_back(std::move(y));
        if (elems.size() > budget) throw ResourceError("generated subgroup exceeds the enumeration budget");
      }
    }
  }
  return elems.size();
}

std::pair<std::uint64_t, std::uint64_t> gluing_orders(const HaloGroup& g, const std::vector<Element>& R,
                                                      const std::vector<Element>& S) {
  auto gens = enumerate_block(g, R);
  auto more = enumerate_block(g, S);
  gens.insert(gens.end(), more.begin(), more.end());
  std::vector<Element> U = R;
  U.insert(U.end(), S.begin(), S.end());
  std::sort(U.begin(), U.end());
  U.erase(std::unique(U.begin(), U.end()), U.end());
  std::uint64_t full = enumerate_block(g, U).size();
  return {generated_subgroup_order(g, gens), full};
}

int permutation_sign(const PermLamps& p) {
  std::vector<bool> done(p.moves.size(), false);
  int transpositions = 0;
  for (std::size_t i = 0; i < p.moves.size(); ++i) {
    if (done[i]) continue;
    int len = 0;
    Site x = p.moves[i].first;
    do {
      auto it = find_sorted(p.moves, x);
      done[static_cast<std::size_t>(it - p.moves.begin())] = true;
      x = it->second;
      ++len;
    } while (!(x == p.moves[i].first));
    transpositions += len - 1;
  }
  return transpositions % 2 ? -1 : 1;
}

}  // namespace halo
