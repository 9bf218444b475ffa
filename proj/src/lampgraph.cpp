#include "lampgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace halo {

// ---------------------------------------------------------------- graphs

FiniteGraph::FiniteGraph(std::vector<std::string> labels) : labels_(std::move(labels)), adj_(labels_.size()) {}

int FiniteGraph::add_vertex(std::string label) {
  labels_.push_back(std::move(label));
  adj_.emplace_back();
  return static_cast<int>(labels_.size() - 1);
}

void FiniteGraph::add_edge(int u, int v) {
  if (u == v) throw ContractViolation("self-loop at vertex " + labels_[u]);
  auto ins = [](std::vector<int>& a, int x) {
    auto it = std::lower_bound(a.begin(), a.end(), x);
    if (it == a.end() || *it != x) a.insert(it, x);
  };
  ins(adj_[u], v);
  ins(adj_[v], u);
}

std::size_t FiniteGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adj_) n += a.size();
  return n / 2;
}

bool FiniteGraph::adjacent(int u, int v) const { return std::binary_search(adj_[u].begin(), adj_[u].end(), v); }

std::string FiniteGraph::edge_list() const {
  std::ostringstream os;
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (int v : adj_[u]) {
      if (static_cast<int>(u) < v) os << u << ' ' << v << '\n';
    }
  }
  return os.str();
}

nlohmann::json FiniteGraph::labels_json() const {
  nlohmann::json j = nlohmann::json::object();
  j["vertices"] = labels_;
  j["basepoint"] = basepoint ? nlohmann::json(*basepoint) : nlohmann::json(nullptr);
  return j;
}

void FiniteGraph::validate() const {
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (int v : adj_[u]) {
      if (v == static_cast<int>(u)) throw ContractViolation("self-loop");
      if (!adjacent(v, static_cast<int>(u))) throw ContractViolation("asymmetric adjacency");
    }
  }
}

// ---------------------------------------------------------- lamplighters

LamplighterGraph lamplighter_graph(const FiniteGraph& B, const FiniteGraph& A, int support_cap,
                                   std::uint64_t vertex_budget) {
  if (B.size() == 0 || A.size() == 0) throw ContractViolation("lamplighter graph needs non-empty graphs");
  if (support_cap < 0) throw ContractViolation("support cap must be >= 0");
  const int b0 = B.basepoint.value_or(0);
  const int na = static_cast<int>(A.size());
  const int cap = std::min(support_cap, na);

  // count first: sum_k C(|A|, k) (|B|-1)^k labellings
  mpz_class labellings = 0;
  for (int k = 0; k <= cap; ++k) {
    mpz_class c, p;
    mpz_bin_uiui(c.get_mpz_t(), na, k);
    mpz_ui_pow_ui(p.get_mpz_t(), B.size() - 1, k);
    labellings += c * p;
  }
  if (labellings * na > mpz_class(static_cast<unsigned long>(vertex_budget))) {
    throw ResourceError("lamplighter graph has " + mpz_class(labellings * na).get_str() + " vertices, budget " +
                        std::to_string(vertex_budget));
  }

  std::vector<std::vector<int>> fs;
  std::vector<int> f(na, b0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == na) {
      fs.push_back(f);
      return;
    }
    for (int b = 0; b < static_cast<int>(B.size()); ++b) {
      int u = used + (b != b0);
      if (u > cap) continue;
      f[i] = b;
      rec(i + 1, u);
    }
    f[i] = b0;
  };
  rec(0, 0);
  std::sort(fs.begin(), fs.end());

  LamplighterGraph L;
  std::map<std::vector<int>, int> fid;
  for (std::size_t i = 0; i < fs.size(); ++i) fid[fs[i]] = static_cast<int>(i);
  auto vid = [&](int fi, int a) { return fi * na + a; };
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (int a = 0; a < na; ++a) {
      std::string s = "(";
      for (int x = 0; x < na; ++x) s += (x ? "," : "") + B.label(fs[i][x]);
      s += ";" + A.label(a) + ")";
      L.graph.add_vertex(std::move(s));
      L.lamps.push_back(fs[i]);
      L.marker.push_back(a);
    }
  }
  L.graph.basepoint = vid(fid.at(std::vector<int>(na, b0)), A.basepoint.value_or(0));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    int used = 0;
    for (int x : fs[i]) used += x != b0;
    for (int a = 0; a < na; ++a) {
      int v = vid(static_cast<int>(i), a);
      for (int a2 : A.neighbours(a)) L.graph.add_edge(v, vid(static_cast<int>(i), a2));
      for (int b2 : B.neighbours(fs[i][a])) {
        int u = used - (fs[i][a] != b0) + (b2 != b0);
        if (u > cap) continue;
        auto g = fs[i];
        g[a] = b2;
        L.graph.add_edge(v, vid(fid.at(g), a));
      }
    }
  }
  return L;
}

// ------------------------------------------------------------------ nets

namespace {

int dist(WordMetric& m, const Group& g, const Element& x, const Element& y) {
  return m.length(g.multiply(g.invert(x), y));
}

}  // namespace

SeparatedNet greedy_net(GroupPtr g, int radius, int D) {
  if (D < 0 || radius < 0) throw ContractViolation("net needs D >= 0 and radius >= 0");
  SeparatedNet net;
  net.group = g;
  net.D = D;
  net.radius = radius;
  Ball b = ball(*g, radius);
  WordMetric m(g, 2 * radius + 2);
  for (const auto& x : b.elements) {
    bool ok = true;
    for (const auto& y : net.points) {
      if (dist(m, *g, x, y) < net.separation()) {
        ok = false;
        break;
      }
    }
    if (ok) net.points.push_back(x);
  }
  Ball big = ball(*g, net.step());
  for (const auto& h : big.elements) {
    if (!g->is_identity(h)) net.bigstep.push_back(h);
  }
  return net;
}

FiniteGraph net_graph(const SeparatedNet& net) {
  const Group& g = *net.group;
  FiniteGraph G;
  for (const auto& x : net.points) G.add_vertex(g.format(x));
  G.basepoint = 0;
  WordMetric m(net.group, 2 * net.radius + 2);
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    for (std::size_t j = i + 1; j < net.points.size(); ++j) {
      if (dist(m, g, net.points[i], net.points[j]) <= net.step()) G.add_edge(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return G;
}

NetCheck check_net(const SeparatedNet& net, int interior) {
  const Group& g = *net.group;
  WordMetric m(net.group, 2 * net.radius + 2);
  NetCheck c;
  c.separated = true;
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    for (std::size_t j = i + 1; j < net.points.size(); ++j) {
      if (dist(m, g, net.points[i], net.points[j]) < net.separation()) c.separated = false;
    }
  }
  c.maximal = true;
  Ball b = ball(g, net.radius);
  for (const auto& x : b.elements) {
    bool near = false;
    for (const auto& y : net.points) {
      if (dist(m, g, x, y) < net.separation()) {
        near = true;
        break;
      }
    }
    if (!near) {
      c.maximal = false;
      c.detail = "point " + g.format(x) + " is far from the net";
    }
  }
  FiniteGraph G = net_graph(net);
  c.lower_bound = c.upper_bound = true;
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    if (m.length(net.points[i]) > interior) continue;
    // BFS in the net graph
    std::vector<int> d(G.size(), -1);
    std::deque<int> q{static_cast<int>(i)};
    d[i] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int u : G.neighbours(v)) {
        if (d[u] < 0) {
          d[u] = d[v] + 1;
          q.push_back(u);
        }
      }
    }
    for (std::size_t j = 0; j < net.points.size(); ++j) {
      if (j == i || m.length(net.points[j]) > interior) continue;
      ++c.pairs;
      int ds = dist(m, g, net.points[i], net.points[j]);
      int dh = (ds + net.step() - 1) / net.step();
      int dx = d[j];
      if (dx < 0 || dx < dh) {
        c.lower_bound = false;
        c.detail = "pair " + g.format(net.points[i]) + ", " + g.format(net.points[j]) + " too close in the net";
      }
      if (dx < 0 || dx > net.step() * dh) {
        c.upper_bound = false;
        c.detail = "pair " + g.format(net.points[i]) + ", " + g.format(net.points[j]) + " too far in the net";
      }
    }
  }
  return c;
}

// ------------------------------------------------------------------ Y*

Ystar build_ystar(const HaloGroup& g, const SeparatedNet& net, std::size_t s0_index, std::uint64_t vertex_budget) {
  const Group& H = *g.base();
  if (net.group.get() != g.base().get() && net.group->descriptor() != H.descriptor()) {
    throw ContractViolation("net is not over the base group");
  }
  if (s0_index >= H.generators().size()) throw ContractViolation("s0 is not a base generator");
  const Element& s0 = H.generators()[s0_index];
  std::vector<Element> R{H.identity(), s0};
  std::sort(R.begin(), R.end());

  Ystar Y;
  Y.sites = net.points;
  auto block = enumerate_block(g, R);

  // S(s0): lamp generators and their s0-translates that live in L({1, s0})
  std::vector<Element> seen;
  for (const auto& gi : g.generator_info()) {
    if (gi.is_move) continue;
    for (const auto& t : {gi.lamp, g.act(s0, gi.lamp)}) {
      if (!g.supported_in(t, R) || g.lamp_is_identity(t)) continue;
      Element code = g.encode_lamp(t);
      if (std::find(seen.begin(), seen.end(), code) != seen.end()) continue;
      seen.push_back(code);
      Y.block_generators.push_back(t);
    }
  }
  if (generated_subgroup_order(g, Y.block_generators) != block.size()) {
    throw ContractViolation("block generators do not generate L({1, s0})");
  }

  std::vector<Element> block_codes;
  for (const auto& b : block) block_codes.push_back(g.encode_lamp(b));
  std::vector<std::size_t> order(block.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return block_codes[a] < block_codes[b]; });
  std::vector<LampConfig> sorted_block;
  std::vector<Element> sorted_codes;
  for (auto i : order) {
    sorted_block.push_back(block[i]);
    sorted_codes.push_back(block_codes[i]);
  }
  for (const auto& b : sorted_block) Y.block_graph.add_vertex(g.format_lamp(b));
  for (std::size_t i = 0; i < sorted_block.size(); ++i) {
    if (g.lamp_is_identity(sorted_block[i])) Y.block_graph.basepoint = static_cast<int>(i);
    for (const auto& t : Y.block_generators) {
      Element c = g.encode_lamp(g.compose(sorted_block[i], t));
      auto it = std::lower_bound(sorted_codes.begin(), sorted_codes.end(), c);
      Y.block_graph.add_edge(static_cast<int>(i), static_cast<int>(it - sorted_codes.begin()));
    }
  }

  // blocks at distinct net sites must commute
  const std::size_t k = Y.sites.size();
  std::vector<std::vector<LampConfig>> local(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& b : sorted_block) local[i].push_back(g.act(Y.sites[i], b));
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (const auto& a : local[i]) {
        for (const auto& b : local[j]) {
          ++Y.commuting_pairs_checked;
          if (!(g.compose(a, b) == g.compose(b, a))) {
            throw ContractViolation("blocks at " + H.format(Y.sites[i]) + " and " + H.format(Y.sites[j]) +
                                    " do not commute");
          }
        }
      }
    }
  }

  mpz_class count = 1;
  for (std::size_t i = 0; i < k; ++i) count *= static_cast<unsigned long>(sorted_block.size());
  count *= static_cast<unsigned long>(k);
  if (count > mpz_class(static_cast<unsigned long>(vertex_budget))) {
    throw ResourceError("Y* has " + count.get_str() + " vertices, budget " + std::to_string(vertex_budget));
  }

  std::vector<Element> verts;
  std::vector<std::size_t> digits(k, 0);
  for (;;) {
    LampConfig rho = g.lamp_identity();
    for (std::size_t i = 0; i < k; ++i) rho = g.compose(rho, local[i][digits[i]]);
    for (const auto& x : Y.sites) verts.push_back(g.encode({rho, x}));
    std::size_t i = 0;
    while (i < k && ++digits[i] == sorted_block.size()) digits[i++] = 0;
    if (i == k) break;
  }
  std::sort(verts.begin(), verts.end());
  if (std::adjacent_find(verts.begin(), verts.end()) != verts.end()) {
    throw ContractViolation("Y* vertices collide: site blocks are not independent");
  }
  Y.vertices = verts;
  for (const auto& v : verts) Y.graph.add_vertex(g.format(v));
  auto id = [&](const Element& e) -> int {
    auto it = std::lower_bound(verts.begin(), verts.end(), e);
    if (it == verts.end() || *it != e) return -1;
    return static_cast<int>(it - verts.begin());
  };
  std::vector<Element> sites_sorted = Y.sites;
  std::sort(sites_sorted.begin(), sites_sorted.end());
  for (std::size_t v = 0; v < verts.size(); ++v) {
    HaloElement x = g.decode(verts[v]);
    if (g.lamp_is_identity(x.lamp) && H.is_identity(x.cursor)) Y.graph.basepoint = static_cast<int>(v);
    for (const auto& t : Y.block_generators) {
      int u = id(g.encode(g.hmul(x, g.lamp_element(t))));
      if (u < 0) throw ContractViolation("block move leaves Y*");
      Y.graph.add_edge(static_cast<int>(v), u);
    }
    for (const auto& h : net.bigstep) {
      HaloElement y = g.hmul(x, HaloElement{g.lamp_identity(), h});
      if (!std::binary_search(sites_sorted.begin(), sites_sorted.end(), y.cursor)) continue;
      int u = id(g.encode(y));
      if (u < 0) throw ContractViolation("bigstep move leaves Y*");
      Y.graph.add_edge(static_cast<int>(v), u);
    }
  }
  return Y;
}

// ---------------------------------------------------------- isomorphism

namespace {

struct IsoSearch {
  const FiniteGraph& G;
  const FiniteGraph& H;
  std::uint64_t nodes = 0;
  std::uint64_t node_budget = 1000000;

  // Joint colour refinement; false when the colour histograms split apart.
  bool refine(std::vector<int>& cg, std::vector<int>& ch) const {
    std::size_t classes = 0;
    for (;;) {
      std::vector<std::vector<int>> sg(G.size()), sh(H.size());
      auto sig = [](const FiniteGraph& X, const std::vector<int>& c, int v) {
        std::vector<int> s{c[v]};
        for (int u : X.neighbours(v)) s.push_back(c[u]);
        std::sort(s.begin() + 1, s.end());
        return s;
      };
      for (std::size_t v = 0; v < G.size(); ++v) sg[v] = sig(G, cg, static_cast<int>(v));
      for (std::size_t v = 0; v < H.size(); ++v) sh[v] = sig(H, ch, static_cast<int>(v));
      std::map<std::vector<int>, std::pair<int, int>> hist;
      for (const auto& s : sg) ++hist[s].first;
      for (const auto& s : sh) ++hist[s].second;
      int next = 0;
      std::map<std::vector<int>, int> code;
      for (auto& [s, n] : hist) {
        if (n.first != n.second) return false;
        code[s] = next++;
      }
      for (std::size_t v = 0; v < G.size(); ++v) cg[v] = code[sg[v]];
      for (std::size_t v = 0; v < H.size(); ++v) ch[v] = code[sh[v]];
      if (hist.size() == classes) return true;
      classes = hist.size();
    }
  }

  bool search(std::vector<int> cg, std::vector<int> ch, std::vector<int>& mapping) {
    if (++nodes > node_budget) throw ResourceError("isomorphism search budget exceeded");
    if (!refine(cg, ch)) return false;
    std::map<int, std::vector<int>> classes;
    for (std::size_t v = 0; v < G.size(); ++v) classes[cg[v]].push_back(static_cast<int>(v));
    int pick = -1;
    std::size_t smallest = 0;
    for (const auto& [c, vs] : classes) {
      if (vs.size() > 1 && (pick < 0 || vs.size() < smallest)) {
        pick = c;
        smallest = vs.size();
      }
    }
    if (pick < 0) {
      std::map<int, int> hv;
      for (std::size_t u = 0; u < H.size(); ++u) hv[ch[u]] = static_cast<int>(u);
      mapping.assign(G.size(), -1);
      for (std::size_t v = 0; v < G.size(); ++v) mapping[v] = hv.at(cg[v]);
      for (std::size_t v = 0; v < G.size(); ++v) {
        for (int u : G.neighbours(static_cast<int>(v))) {
          if (!H.adjacent(mapping[v], mapping[u])) return false;
        }
      }
      return true;
    }
    int v = classes[pick].front();
    int fresh = static_cast<int>(std::max(G.size(), H.size())) + 1;
    for (std::size_t u = 0; u < H.size(); ++u) {
      if (ch[u] != pick) continue;
      auto cg2 = cg;
      auto ch2 = ch;
      cg2[v] = fresh;
      ch2[u] = fresh;
      if (search(std::move(cg2), std::move(ch2), mapping)) return true;
    }
    return false;
  }
};

}  // namespace

IsoResult find_isomorphism(const FiniteGraph& G, const FiniteGraph& H, std::size_t size_budget) {
  IsoResult r;
  if (G.size() > size_budget || H.size() > size_budget) throw ResourceError("graph too large for isomorphism check");
  if (G.size() != H.size()) {
    r.reason = "vertex counts differ: " + std::to_string(G.size()) + " vs " + std::to_string(H.size());
    return r;
  }
  if (G.edge_count() != H.edge_count()) {
    r.reason = "edge counts differ: " + std::to_string(G.edge_count()) + " vs " + std::to_string(H.edge_count());
    return r;
  }
  IsoSearch s{G, H};
  std::vector<int> cg(G.size(), 0), ch(H.size(), 0);
  if (s.search(cg, ch, r.mapping)) {
    r.isomorphic = true;
  } else {
    r.mapping.clear();
    r.reason = "no degree-refined bijection preserves edges";
  }
  return r;
}

IsoResult check_iso_to_lamplighter(const FiniteGraph& Y, const FiniteGraph& B, const FiniteGraph& A) {
  LamplighterGraph L = lamplighter_graph(B, A, static_cast<int>(A.size()), 10000);
  return find_isomorphism(Y, L.graph);
}

}  // namespace halo
