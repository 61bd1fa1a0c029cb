#include "herdscan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "herdscan/error.hpp"
#include "herdscan/format.hpp"
#include "herdscan/kernels.hpp"

namespace herdscan {

namespace {

constexpr double kMinVariance = 1e-18;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

}  // namespace

CorrelationMatrix pearson_matrix(const ReturnPanel& rp) {
  const std::size_t n = rp.asset_count();
  const std::size_t T = rp.time_count();
  if (T < 2) throw Error(Errc::TooFewObservations, "correlation needs at least 2 returns");

  std::vector<double> centered(n * T);
  std::vector<double> sum_sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = rp.row(i);
    std::span<double> row(centered.data() + i * T, T);
    std::copy(src.begin(), src.end(), row.begin());
    kernels::subtract_scalar(row, kernels::sum(src) / static_cast<double>(T));
    const double ss = kernels::dot(row, row);
    if (ss / static_cast<double>(T) < kMinVariance)
      throw Error(Errc::ZeroVarianceAsset, rp.assets()[i].ticker);
    sum_sq[i] = ss;
  }

  CorrelationMatrix cm;
  for (const auto& a : rp.assets()) cm.tickers.push_back(a.ticker);
  cm.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cm(i, i) = 1.0;
    const std::span<const double> xi(centered.data() + i * T, T);
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::span<const double> xj(centered.data() + j * T, T);
      const double c = std::clamp(kernels::dot(xi, xj) / std::sqrt(sum_sq[i] * sum_sq[j]), -1.0, 1.0);
      cm(i, j) = c;
      cm(j, i) = c;
    }
  }
  return cm;
}

DistanceMatrix to_distance(const CorrelationMatrix& cm) {
  DistanceMatrix dm;
  dm.tickers = cm.tickers;
  dm.values.resize(cm.values.size());
  const std::size_t n = cm.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      dm(i, j) = i == j ? 0.0 : std::sqrt(std::max(0.0, 2.0 * (1.0 - cm(i, j))));
  return dm;
}

SpanningTree mst(const DistanceMatrix& dm) {
  const std::size_t n = dm.size();
  if (n < 2) throw Error(Errc::EmptyInput, "spanning tree needs at least 2 nodes");

  // Rank nodes by ticker so ties resolve on names, not input order.
  std::vector<std::size_t> by_name(n);
  std::iota(by_name.begin(), by_name.end(), std::size_t{0});
  std::sort(by_name.begin(), by_name.end(),
            [&](std::size_t a, std::size_t b) { return dm.tickers[a] < dm.tickers[b]; });
  std::vector<std::size_t> name_rank(n);
  for (std::size_t r = 0; r < n; ++r) name_rank[by_name[r]] = r;

  std::vector<TreeEdge> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool i_first = name_rank[i] < name_rank[j];
      candidates.push_back({i_first ? i : j, i_first ? j : i, dm(i, j)});
    }
  std::sort(candidates.begin(), candidates.end(), [&](const TreeEdge& a, const TreeEdge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.source != b.source) return name_rank[a.source] < name_rank[b.source];
    return name_rank[a.target] < name_rank[b.target];
  });

  SpanningTree tree;
  tree.nodes = dm.tickers;
  DisjointSets sets(n);
  for (const auto& e : candidates) {
    if (!sets.unite(e.source, e.target)) continue;
    tree.edges.push_back(e);
    tree.total_weight += e.weight;
    if (tree.edges.size() + 1 == n) break;
  }
  return tree;
}

std::string mst_edge_csv(const SpanningTree& tree, const CorrelationMatrix& cm) {
  std::string out = "source,target,correlation,distance\n";
  for (const auto& e : tree.edges) {
    out += tree.nodes[e.source];
    out += ',';
    out += tree.nodes[e.target];
    out += ',';
    out += format_number(cm(e.source, e.target));
    out += ',';
    out += format_number(e.weight);
    out += '\n';
  }
  return out;
}

}  // namespace herdscan
