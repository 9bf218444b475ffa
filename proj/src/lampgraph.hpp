#pragma once

#include "halo.hpp"

namespace halo {

class FiniteGraph {
 public:
  FiniteGraph() = default;
  explicit FiniteGraph(std::vector<std::string> labels);

  int add_vertex(std::string label);
  // Ignores duplicates; self-loops are a contract violation.
  void add_edge(int u, int v);

  std::size_t size() const { return labels_.size(); }
  std::size_t edge_count() const;
  const std::vector<int>& neighbours(int v) const { return adj_[v]; }
  std::size_t degree(int v) const { return adj_[v].size(); }
  bool adjacent(int u, int v) const;
  const std::string& label(int v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> basepoint;

  // "u v" per line, u < v, sorted.
  std::string edge_list() const;
  nlohmann::json labels_json() const;
  void validate() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> adj_;
};

struct LamplighterGraph {
  FiniteGraph graph;
  // per vertex: labelling of A (vertex ids of B) and marker position
  std::vector<std::vector<int>> lamps;
  std::vector<int> marker;
};

// B wr A restricted to labellings with at most support_cap sites off the
// basepoint of B.
LamplighterGraph lamplighter_graph(const FiniteGraph& B, const FiniteGraph& A, int support_cap,
                                   std::uint64_t vertex_budget = 1000000);

struct SeparatedNet {
  GroupPtr group;
  int D = 0;
  int radius = 0;
  std::vector<Element> points;   // BFS insertion order
  std::vector<Element> bigstep;  // S_{2D+5} without the identity
  int separation() const { return D + 2; }
  int step() const { return 2 * D + 5; }
};

SeparatedNet greedy_net(GroupPtr g, int radius, int D);

// Net points joined when their word distance is at most 2D+5.
FiniteGraph net_graph(const SeparatedNet& net);

struct NetCheck {
  bool separated = false;
  bool maximal = false;
  std::size_t pairs = 0;
  bool lower_bound = false;  // d_H <= d_X0
  bool upper_bound = false;  // d_X0 <= (2D+5) d_H
  std::string detail;
};
// Separation and maximality on Ball(radius); the bilipschitz bounds on all
// pairs of net points in Ball(interior).
NetCheck check_net(const SeparatedNet& net, int interior);

struct Ystar {
  FiniteGraph graph;
  std::vector<Element> vertices;  // halo encodings, parallel to graph ids
  std::vector<LampConfig> block_generators;  // S(s0) inside L({1, s0})
  FiniteGraph block_graph;                   // Cayley graph of L({1, s0})
  std::vector<Element> sites;                // net points used
  std::uint64_t commuting_pairs_checked = 0;
};

// Y* = T x X0 restricted to net points in the window; edges by right
// multiplication with (sigma, 1) for sigma in S(s0) and (1, h) for h in S_{2D+5}.
Ystar build_ystar(const HaloGroup& g, const SeparatedNet& net, std::size_t s0_index,
                  std::uint64_t vertex_budget = 100000);

struct IsoResult {
  bool isomorphic = false;
  std::vector<int> mapping;  // vertex of the first graph -> vertex of the second
  std::string reason;
};
IsoResult find_isomorphism(const FiniteGraph& G, const FiniteGraph& H, std::size_t size_budget = 10000);
IsoResult check_iso_to_lamplighter(const FiniteGraph& Y, const FiniteGraph& B, const FiniteGraph& A);

}  // namespace halo
