#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "herdscan/graph.hpp"

namespace herdscan {

struct Neighbor {
  std::size_t node = 0;
  double weight = 0.0;
};

/// Undirected weighted graph. Self-loop weights enter A_ii directly, so a
/// self-loop of weight w adds w to the node's degree.
class WeightedGraph {
 public:
  explicit WeightedGraph(std::size_t node_count = 0);

  void add_edge(std::size_t u, std::size_t v, double weight);
  void add_self_loop(std::size_t u, double weight);

  std::size_t node_count() const { return adjacency_.size(); }
  std::span<const Neighbor> neighbors(std::size_t u) const { return adjacency_[u]; }
  double self_loop(std::size_t u) const { return self_loops_[u]; }
  double degree(std::size_t u) const { return degrees_[u]; }

  /// m: half the sum of all degrees.
  double total_weight() const;

  std::vector<std::string> labels;  // optional, one per node

 private:
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> self_loops_;
  std::vector<double> degrees_;
};

enum class EdgeWeighting {
  Unit,        // every tree edge weighs 1
  Similarity,  // w = 2 - d
};

WeightedGraph graph_from_tree(const SpanningTree& tree, EdgeWeighting weighting = EdgeWeighting::Unit);

struct Partition {
  std::vector<std::size_t> assignment;  // node -> community, dense from 0 by first appearance
  std::size_t community_count = 0;
  double modularity = 0.0;

  std::vector<std::vector<std::size_t>> communities() const;
};

/// Relabels arbitrary community ids densely in order of first appearance.
std::vector<std::size_t> normalize_assignment(std::span<const std::size_t> assignment);

Partition make_partition(const WeightedGraph& g, std::span<const std::size_t> assignment);
Partition singleton_partition(const WeightedGraph& g);

double modularity(const WeightedGraph& g, std::span<const std::size_t> assignment);

/// Incremental per-community sums used by the local-move phase.
/// sigma_in(c) sums A_ij over ordered member pairs (internal edges twice,
/// self-loops once); sigma_tot(c) sums member degrees.
class CommunityState {
 public:
  static constexpr std::size_t kIsolated = std::numeric_limits<std::size_t>::max();

  CommunityState(const WeightedGraph& g, std::span<const std::size_t> assignment);

  std::size_t community_of(std::size_t node) const { return community_[node]; }
  double sigma_in(std::size_t c) const { return sigma_in_[c]; }
  double sigma_tot(std::size_t c) const { return sigma_tot_[c]; }
  std::size_t slot_count() const { return sigma_tot_.size(); }

  /// Weight of edges from `node` into community `c`, self-loop excluded.
  double link_weight(std::size_t node, std::size_t c) const;

  void isolate(std::size_t node);
  void insert(std::size_t node, std::size_t c);

  /// Q with isolated nodes counted as singleton communities.
  double modularity() const;
  std::vector<std::size_t> assignment() const;

 private:
  const WeightedGraph* graph_;
  double two_m_;
  std::vector<std::size_t> community_;
  std::vector<double> sigma_in_;
  std::vector<double> sigma_tot_;
};

/// Gain of moving an isolated `node` into `target`.
double delta_q(const WeightedGraph& g, std::size_t node, std::size_t target, const CommunityState& state);

struct LocalMoveResult {
  Partition partition;
  std::size_t sweeps = 0;
};

/// Sweeps nodes in index order, moving each to the neighbouring community
/// with the largest strictly positive gain, until a sweep moves nothing.
LocalMoveResult local_move_phase(const WeightedGraph& g, const Partition& initial);

/// One node per community; cross weights summed; self-loop = sum of A_ij
/// over ordered member pairs, which keeps m and Q unchanged.
WeightedGraph aggregate(const WeightedGraph& g, const Partition& p);

struct LouvainLevel {
  std::size_t node_count = 0;
  double total_weight = 0.0;
  double modularity_before = 0.0;  // singleton partition of this level
  double modularity_after = 0.0;   // after the local-move phase
  std::size_t sweeps = 0;
};

struct LouvainResult {
  Partition partition;
  std::vector<LouvainLevel> levels;
};

LouvainResult louvain(const WeightedGraph& g);

}  // namespace herdscan
