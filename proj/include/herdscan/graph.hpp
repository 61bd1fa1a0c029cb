#pragma once

#include <string>
#include <vector>

#include "herdscan/returns.hpp"

namespace herdscan {

/// Dense symmetric n x n matrix over a fixed ticker order.
struct SymmetricMatrix {
  std::vector<std::string> tickers;
  std::vector<double> values;  // row-major

  std::size_t size() const { return tickers.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * tickers.size() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * tickers.size() + j]; }
};

/// Unit diagonal, entries clamped to [-1, 1].
struct CorrelationMatrix : SymmetricMatrix {};

/// d = sqrt(2 (1 - c)); zero diagonal, entries in [0, 2].
struct DistanceMatrix : SymmetricMatrix {};

struct TreeEdge {
  std::size_t source = 0;  // index into nodes; nodes[source] < nodes[target]
  std::size_t target = 0;
  double weight = 0.0;

  bool operator==(const TreeEdge&) const = default;
};

struct SpanningTree {
  std::vector<std::string> nodes;
  std::vector<TreeEdge> edges;
  double total_weight = 0.0;
};

/// Pearson correlation of every asset pair over the panel's full window.
/// Throws ZeroVarianceAsset when an asset's return variance is below 1e-18.
CorrelationMatrix pearson_matrix(const ReturnPanel& rp);

DistanceMatrix to_distance(const CorrelationMatrix& cm);

/// Kruskal over the complete graph. Ties are broken by
/// (weight, smaller ticker, larger ticker).
SpanningTree mst(const DistanceMatrix& dm);

/// CSV "source,target,correlation,distance" for the tree edges.
std::string mst_edge_csv(const SpanningTree& tree, const CorrelationMatrix& cm);

}  // namespace herdscan
