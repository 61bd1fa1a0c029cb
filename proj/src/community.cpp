#include "herdscan/community.hpp"

#include <algorithm>
#include <map>

#include "herdscan/error.hpp"

namespace herdscan {

namespace {

constexpr double kMinGain = 1e-12;
constexpr std::size_t kMaxSweeps = 100000;

}  // namespace

WeightedGraph::WeightedGraph(std::size_t node_count)
    : adjacency_(node_count), self_loops_(node_count, 0.0), degrees_(node_count, 0.0) {}

void WeightedGraph::add_edge(std::size_t u, std::size_t v, double weight) {
  if (u == v) {
    add_self_loop(u, weight);
    return;
  }
  adjacency_.at(u).push_back({v, weight});
  adjacency_.at(v).push_back({u, weight});
  degrees_[u] += weight;
  degrees_[v] += weight;
}

void WeightedGraph::add_self_loop(std::size_t u, double weight) {
  self_loops_.at(u) += weight;
  degrees_[u] += weight;
}

double WeightedGraph::total_weight() const {
  double s = 0.0;
  for (double k : degrees_) s += k;
  return 0.5 * s;
}

WeightedGraph graph_from_tree(const SpanningTree& tree, EdgeWeighting weighting) {
  WeightedGraph g(tree.nodes.size());
  g.labels = tree.nodes;
  for (const auto& e : tree.edges)
    g.add_edge(e.source, e.target, weighting == EdgeWeighting::Unit ? 1.0 : 2.0 - e.weight);
  return g;
}

// ---- partitions ----------------------------------------------------------

std::vector<std::vector<std::size_t>> Partition::communities() const {
  std::vector<std::vector<std::size_t>> out(community_count);
  for (std::size_t i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
  return out;
}

std::vector<std::size_t> normalize_assignment(std::span<const std::size_t> assignment) {
  std::map<std::size_t, std::size_t> relabel;
  std::vector<std::size_t> out;
  out.reserve(assignment.size());
  for (auto c : assignment) {
    const auto it = relabel.try_emplace(c, relabel.size()).first;
    out.push_back(it->second);
  }
  return out;
}

double modularity(const WeightedGraph& g, std::span<const std::size_t> assignment) {
  if (assignment.size() != g.node_count())
    throw Error(Errc::UncoveredNode, std::to_string(assignment.size()) + " labels for " +
                                         std::to_string(g.node_count()) + " nodes");
  const double two_m = 2.0 * g.total_weight();
  if (!(two_m > 0.0)) throw Error(Errc::EmptyInput, "graph has no edge weight");
  std::map<std::size_t, std::pair<double, double>> sums;  // community -> (in, tot)
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    auto& s = sums[assignment[u]];
    s.second += g.degree(u);
    s.first += g.self_loop(u);
    for (const auto& nb : g.neighbors(u))
      if (assignment[nb.node] == assignment[u]) s.first += nb.weight;
  }
  double q = 0.0;
  for (const auto& [c, s] : sums) q += s.first / two_m - (s.second / two_m) * (s.second / two_m);
  return q;
}

Partition make_partition(const WeightedGraph& g, std::span<const std::size_t> assignment) {
  Partition p;
  p.assignment = normalize_assignment(assignment);
  p.community_count =
      p.assignment.empty() ? 0 : *std::max_element(p.assignment.begin(), p.assignment.end()) + 1;
  p.modularity = modularity(g, p.assignment);
  return p;
}

Partition singleton_partition(const WeightedGraph& g) {
  std::vector<std::size_t> a(g.node_count());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = i;
  return make_partition(g, a);
}

// ---- incremental state ---------------------------------------------------

CommunityState::CommunityState(const WeightedGraph& g, std::span<const std::size_t> assignment)
    : graph_(&g), two_m_(2.0 * g.total_weight()), community_(assignment.begin(), assignment.end()) {
  if (assignment.size() != g.node_count()) throw Error(Errc::UncoveredNode, "assignment size mismatch");
  std::size_t slots = g.node_count();
  for (auto c : community_) slots = std::max(slots, c + 1);
  sigma_in_.assign(slots, 0.0);
  sigma_tot_.assign(slots, 0.0);
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    const auto c = community_[u];
    sigma_tot_[c] += g.degree(u);
    sigma_in_[c] += g.self_loop(u);
    for (const auto& nb : g.neighbors(u))
      if (community_[nb.node] == c) sigma_in_[c] += nb.weight;
  }
}

double CommunityState::link_weight(std::size_t node, std::size_t c) const {
  double w = 0.0;
  for (const auto& nb : graph_->neighbors(node))
    if (community_[nb.node] == c) w += nb.weight;
  return w;
}

void CommunityState::isolate(std::size_t node) {
  const auto c = community_[node];
  if (c == kIsolated) return;
  const double k_in = link_weight(node, c);
  sigma_tot_[c] -= graph_->degree(node);
  sigma_in_[c] -= 2.0 * k_in + graph_->self_loop(node);
  community_[node] = kIsolated;
}

void CommunityState::insert(std::size_t node, std::size_t c) {
  if (community_[node] != kIsolated) isolate(node);
  const double k_in = link_weight(node, c);
  sigma_tot_[c] += graph_->degree(node);
  sigma_in_[c] += 2.0 * k_in + graph_->self_loop(node);
  community_[node] = c;
}

double CommunityState::modularity() const {
  double q = 0.0;
  for (std::size_t c = 0; c < sigma_tot_.size(); ++c) {
    if (sigma_tot_[c] == 0.0 && sigma_in_[c] == 0.0) continue;
    q += sigma_in_[c] / two_m_ - (sigma_tot_[c] / two_m_) * (sigma_tot_[c] / two_m_);
  }
  for (std::size_t u = 0; u < community_.size(); ++u) {
    if (community_[u] != kIsolated) continue;
    const double k = graph_->degree(u);
    q += graph_->self_loop(u) / two_m_ - (k / two_m_) * (k / two_m_);
  }
  return q;
}

std::vector<std::size_t> CommunityState::assignment() const { return community_; }

double delta_q(const WeightedGraph& g, std::size_t node, std::size_t target, const CommunityState& state) {
  const double two_m = 2.0 * g.total_weight();
  const double k_i = g.degree(node);
  const double k_i_in = state.link_weight(node, target);
  const double in = state.sigma_in(target);
  const double tot = state.sigma_tot(target);
  const double after = (in + 2.0 * k_i_in) / two_m - ((tot + k_i) / two_m) * ((tot + k_i) / two_m);
  const double before = in / two_m - (tot / two_m) * (tot / two_m) - (k_i / two_m) * (k_i / two_m);
  return after - before;
}

// ---- phases --------------------------------------------------------------

LocalMoveResult local_move_phase(const WeightedGraph& g, const Partition& initial) {
  const std::size_t n = g.node_count();
  CommunityState state(g, initial.assignment);
  const double two_m = 2.0 * g.total_weight();

  std::vector<double> link(state.slot_count(), 0.0);
  std::vector<std::size_t> touched;
  LocalMoveResult result;

  bool moved = true;
  while (moved && result.sweeps < kMaxSweeps) {
    moved = false;
    ++result.sweeps;
    for (std::size_t u = 0; u < n; ++u) {
      const auto own = state.community_of(u);
      touched.clear();
      for (const auto& nb : g.neighbors(u)) {
        const auto c = state.community_of(nb.node);
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += nb.weight;
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

      state.isolate(u);
      // Same expression as delta_q, reusing the gathered link weights.
      const double k_i = g.degree(u);
      auto gain = [&](std::size_t c) {
        const double in = state.sigma_in(c);
        const double tot = state.sigma_tot(c);
        return ((in + 2.0 * link[c]) / two_m - ((tot + k_i) / two_m) * ((tot + k_i) / two_m)) -
               (in / two_m - (tot / two_m) * (tot / two_m) - (k_i / two_m) * (k_i / two_m));
      };
      std::size_t best = own;
      double best_gain = gain(own);
      for (const auto c : touched) {
        if (c == own) continue;
        const double candidate = gain(c);
        if (candidate > best_gain + kMinGain) {
          best = c;
          best_gain = candidate;
        }
      }
      state.insert(u, best);
      if (best != own) moved = true;
      for (const auto c : touched) link[c] = 0.0;
    }
  }
  result.partition = make_partition(g, state.assignment());
  return result;
}

WeightedGraph aggregate(const WeightedGraph& g, const Partition& p) {
  if (p.assignment.size() != g.node_count()) throw Error(Errc::UncoveredNode, "partition size mismatch");
  WeightedGraph out(p.community_count);
  std::map<std::pair<std::size_t, std::size_t>, double> cross;
  std::vector<double> self(p.community_count, 0.0);
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    const auto cu = p.assignment[u];
    self[cu] += g.self_loop(u);
    for (const auto& nb : g.neighbors(u)) {
      const auto cv = p.assignment[nb.node];
      if (cu == cv) {
        self[cu] += nb.weight;
      } else if (u < nb.node) {
        cross[{std::min(cu, cv), std::max(cu, cv)}] += nb.weight;
      }
    }
  }
  for (std::size_t c = 0; c < self.size(); ++c)
    if (self[c] != 0.0) out.add_self_loop(c, self[c]);
  for (const auto& [key, w] : cross) out.add_edge(key.first, key.second, w);
  return out;
}

LouvainResult louvain(const WeightedGraph& g) {
  if (!(g.total_weight() > 0.0)) throw Error(Errc::EmptyInput, "graph has no edge weight");
  LouvainResult result;
  std::vector<std::size_t> membership(g.node_count());
  for (std::size_t i = 0; i < membership.size(); ++i) membership[i] = i;

  WeightedGraph level = g;
  while (true) {
    const Partition start = singleton_partition(level);
    const auto moved = local_move_phase(level, start);
    result.levels.push_back({level.node_count(), level.total_weight(), start.modularity,
                             moved.partition.modularity, moved.sweeps});
    if (moved.partition.modularity - start.modularity <= kMinGain ||
        moved.partition.community_count == level.node_count())
      break;
    for (auto& m : membership) m = moved.partition.assignment[m];
    level = aggregate(level, moved.partition);
  }
  result.partition = make_partition(g, membership);
  return result;
}

}  // namespace herdscan
