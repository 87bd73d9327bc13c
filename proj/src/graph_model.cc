//
// Copyright 2026 The privest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "privest/graph_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "privest/errors.h"

namespace privest {
namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-10;

void CheckAdjacency(const Eigen::MatrixXd& a, int n, int u) {
  const std::string where = "topology " + std::to_string(u + 1);
  if (a.rows() != n || a.cols() != n) {
    throw ValidationError(where + ": adjacency must be " + std::to_string(n) +
                          "x" + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    if (a(i, i) != 0.0) {
      throw ValidationError(where + ": self-loop at vertex " +
                            std::to_string(i + 1));
    }
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(a(i, j)) || a(i, j) < 0.0) {
        throw ValidationError(where + ": negative or non-finite weight at (" +
                              std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")");
      }
      if (a(i, j) != a(j, i)) {
        throw ValidationError(where + ": adjacency is not symmetric at (" +
                              std::to_string(i + 1) + "," +
                              std::to_string(j + 1) + ")");
      }
    }
  }
}

// Breadth-first reachability on the support of a square matrix.
std::vector<int> BfsLevels(const Eigen::MatrixXd& support, int source,
                           bool transpose) {
  const int m = static_cast<int>(support.rows());
  std::vector<int> level(m, -1);
  std::queue<int> frontier;
  level[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < m; ++v) {
      const double w = transpose ? support(v, u) : support(u, v);
      if (w > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

double InfResidual(const Eigen::VectorXd& pi, const Eigen::MatrixXd& p) {
  const Eigen::RowVectorXd row = pi.transpose();
  return (row * p - row).cwiseAbs().maxCoeff();
}

Eigen::VectorXd PowerIterate(const Eigen::MatrixXd& p, Eigen::VectorXd pi) {
  const Eigen::MatrixXd pt = p.transpose();
  for (int it = 0; it < 1000000; ++it) {
    Eigen::VectorXd next = pt * pi;
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = std::move(next);
    if (delta < 1e-15) break;
  }
  return pi;
}

}  // namespace

TopologySet::TopologySet(int vertex_count,
                         std::vector<Eigen::MatrixXd> adjacencies)
    : vertex_count_(vertex_count), adjacencies_(std::move(adjacencies)) {
  if (vertex_count_ <= 0) {
    throw ValidationError("vertex count must be positive");
  }
  if (adjacencies_.empty()) {
    throw ValidationError("topology set must contain at least one graph");
  }
  for (int u = 0; u < size(); ++u) {
    CheckAdjacency(adjacencies_[u], vertex_count_, u);
  }
  const Eigen::MatrixXd all = UnionAdjacency();
  for (int i = 0; i < vertex_count_; ++i) {
    for (int j = i + 1; j < vertex_count_; ++j) {
      if (all(i, j) > 0.0) union_edges_.push_back({i, j});
    }
  }
  edge_lists_.resize(adjacencies_.size());
  for (int u = 0; u < size(); ++u) {
    const Eigen::MatrixXd& a = adjacencies_[u];
    for (int e = 0; e < static_cast<int>(union_edges_.size()); ++e) {
      const auto [i, j] = union_edges_[e];
      if (a(i, j) > 0.0) edge_lists_[u].push_back({i, j, a(i, j), e});
    }
  }
}

TopologySet TopologySet::FromEdgeLists(
    int vertex_count, const std::vector<std::vector<WeightedEdge>>& lists) {
  if (vertex_count <= 0) {
    throw ValidationError("vertex count must be positive");
  }
  std::vector<Eigen::MatrixXd> adjacencies;
  adjacencies.reserve(lists.size());
  for (std::size_t u = 0; u < lists.size(); ++u) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(vertex_count, vertex_count);
    const std::string where = "topology " + std::to_string(u + 1);
    for (const WeightedEdge& e : lists[u]) {
      if (e.i < 0 || e.j < 0 || e.i >= vertex_count || e.j >= vertex_count) {
        throw ValidationError(where + ": vertex id out of range");
      }
      if (e.i == e.j) {
        throw ValidationError(where + ": self-loop at vertex " +
                              std::to_string(e.i + 1));
      }
      if (a(e.i, e.j) != 0.0) {
        throw ValidationError(where + ": duplicate edge (" +
                              std::to_string(e.i + 1) + "," +
                              std::to_string(e.j + 1) + ")");
      }
      if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
        throw ValidationError(where + ": edge weight must be positive");
      }
      a(e.i, e.j) = e.weight;
      a(e.j, e.i) = e.weight;
    }
    adjacencies.push_back(std::move(a));
  }
  return TopologySet(vertex_count, std::move(adjacencies));
}

const Eigen::MatrixXd& TopologySet::adjacency(int u) const {
  if (u < 0 || u >= size()) {
    throw DomainError("topology index " + std::to_string(u + 1) +
                      " out of range");
  }
  return adjacencies_[u];
}

const std::vector<WeightedEdge>& TopologySet::edges(int u) const {
  if (u < 0 || u >= size()) {
    throw DomainError("topology index " + std::to_string(u + 1) +
                      " out of range");
  }
  return edge_lists_[u];
}

Eigen::MatrixXd TopologySet::UnionAdjacency() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(vertex_count_, vertex_count_);
  for (const auto& a : adjacencies_) sum += a;
  return sum;
}

int TopologySet::UnionEdgeIndex(int i, int j) const {
  const UndirectedEdge key = UndirectedEdge::Of(i, j);
  const auto it =
      std::lower_bound(union_edges_.begin(), union_edges_.end(), key);
  if (it == union_edges_.end() || *it != key) return -1;
  return static_cast<int>(it - union_edges_.begin());
}

std::vector<int> TopologySet::UnionNeighbors(int i) const {
  std::vector<int> out;
  for (const auto& e : union_edges_) {
    if (e.i == i) out.push_back(e.j);
    if (e.j == i) out.push_back(e.i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> TopologySet::TopologiesContaining(int i, int j) const {
  std::vector<int> out;
  for (int u = 0; u < size(); ++u) {
    if (adjacencies_[u](i, j) > 0.0) out.push_back(u);
  }
  return out;
}

MarkovChain::MarkovChain(Eigen::MatrixXd transition_in,
                         Eigen::VectorXd initial_in)
    : transition(std::move(transition_in)), initial(std::move(initial_in)) {
  const auto m = transition.rows();
  if (m == 0 || transition.cols() != m) {
    throw ValidationError("transition matrix must be square and non-empty");
  }
  if (initial.size() != m) {
    throw ValidationError("initial distribution length " +
                          std::to_string(initial.size()) +
                          " does not match transition size " +
                          std::to_string(m));
  }
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index v = 0; v < m; ++v) {
      const double p = transition(u, v);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("transition entry (" + std::to_string(u + 1) +
                              "," + std::to_string(v + 1) +
                              ") outside [0,1]");
      }
    }
    if (std::abs(transition.row(u).sum() - 1.0) > kStochasticTol) {
      throw ValidationError("transition row " + std::to_string(u + 1) +
                            " does not sum to 1");
    }
    if (!(initial(u) >= 0.0 && initial(u) <= 1.0)) {
      throw ValidationError("initial probability outside [0,1]");
    }
  }
  if (std::abs(initial.sum() - 1.0) > kStochasticTol) {
    throw ValidationError("initial distribution does not sum to 1");
  }
}

bool ValidateUnionConnected(const TopologySet& topologies) {
  const Eigen::MatrixXd all = topologies.UnionAdjacency();
  const std::vector<int> level = BfsLevels(all, 0, false);
  return std::all_of(level.begin(), level.end(),
                     [](int l) { return l >= 0; });
}

Eigen::VectorXd StationaryDistribution(const MarkovChain& chain) {
  const Eigen::MatrixXd& p = chain.transition;
  const int m = chain.size();

  const std::vector<int> forward = BfsLevels(p, 0, false);
  const std::vector<int> backward = BfsLevels(p, 0, true);
  for (int u = 0; u < m; ++u) {
    if (forward[u] < 0 || backward[u] < 0) {
      throw DomainError(
          "Markov chain is reducible; the stationary limit is not unique");
    }
  }
  // Period = gcd over support edges u->v of level(u) + 1 - level(v).
  int period = 0;
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < m; ++v) {
      if (p(u, v) > 0.0) {
        period = std::gcd(period, std::abs(forward[u] + 1 - forward[v]));
      }
    }
  }
  if (period != 1) {
    throw DomainError("Markov chain is periodic with period " +
                      std::to_string(period) +
                      "; the stationary limit does not exist");
  }

  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(m, m);
  a.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  if (!pi.allFinite() || InfResidual(pi, p) > kStationaryResidualTol) {
    pi = PowerIterate(p, Eigen::VectorXd::Constant(m, 1.0 / m));
  }
  if (!pi.allFinite() || InfResidual(pi, p) > kStationaryResidualTol) {
    throw NumericError("stationary distribution solve did not converge");
  }
  return pi;
}

Eigen::MatrixXd Laplacian(const TopologySet& topologies, int u) {
  const Eigen::MatrixXd& a = topologies.adjacency(u);
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

Eigen::MatrixXd MeanAdjacency(const TopologySet& topologies,
                              const Eigen::VectorXd& pi) {
  if (pi.size() != topologies.size()) {
    throw DomainError("weight vector length " + std::to_string(pi.size()) +
                      " does not match " + std::to_string(topologies.size()) +
                      " topologies");
  }
  const int n = topologies.vertex_count();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < topologies.size(); ++u) {
    mean += pi(u) * topologies.adjacency(u);
  }
  return mean;
}

int SampleRow(const Eigen::MatrixXd& transition, int state,
              RandomStream& rng) {
  const double r = rng.Uniform();
  double acc = 0.0;
  const int m = static_cast<int>(transition.cols());
  int last_positive = 0;
  for (int v = 0; v < m; ++v) {
    const double p = transition(state, v);
    if (p <= 0.0) continue;
    last_positive = v;
    acc += p;
    if (r < acc) return v;
  }
  return last_positive;
}

SwitchingGraphProcess::SwitchingGraphProcess(TopologySet topologies,
                                             MarkovChain chain,
                                             int current_state)
    : topologies_(std::move(topologies)),
      chain_(std::move(chain)),
      state_(current_state) {
  if (chain_.size() != topologies_.size()) {
    throw ValidationError("Markov chain has " + std::to_string(chain_.size()) +
                          " states but there are " +
                          std::to_string(topologies_.size()) + " topologies");
  }
  if (state_ < 0 || state_ >= chain_.size()) {
    throw ValidationError("current state out of range");
  }
}

int SwitchingGraphProcess::Start(RandomStream& rng) {
  const double r = rng.Uniform();
  double acc = 0.0;
  state_ = chain_.size() - 1;
  for (int u = 0; u < chain_.size(); ++u) {
    acc += chain_.initial(u);
    if (r < acc && chain_.initial(u) > 0.0) {
      state_ = u;
      break;
    }
  }
  return state_;
}

int SwitchingGraphProcess::SampleStep(RandomStream& rng) {
  state_ = SampleRow(chain_.transition, state_, rng);
  return state_;
}

std::vector<double> EdgeProbabilitySeries(const SwitchingGraphProcess& process,
                                          int i, int j, std::int64_t horizon) {
  const TopologySet& t = process.topologies();
  if (i < 0 || j < 0 || i >= t.vertex_count() || j >= t.vertex_count() ||
      t.UnionEdgeIndex(i, j) < 0) {
    throw DomainError("(" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + ") is not a union edge");
  }
  const std::vector<int> members = t.TopologiesContaining(i, j);
  const Eigen::MatrixXd pt = process.chain().transition.transpose();
  Eigen::VectorXd dist = process.chain().initial;
  std::vector<double> q;
  q.reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
  for (std::int64_t k = 1; k <= horizon; ++k) {
    double s = 0.0;
    for (int u : members) s += dist(u);
    // Normalise away the drift of repeated products with P^T.
    q.push_back(std::clamp(s / dist.sum(), 0.0, 1.0));
    dist = pt * dist;
  }
  return q;
}

IndependentLinkProcess::IndependentLinkProcess(int vertex_count,
                                               std::vector<WeightedEdge> edges,
                                               double initial_on,
                                               double stay_on, double stay_off)
    : vertex_count_(vertex_count),
      initial_on_(initial_on),
      stay_on_(stay_on),
      stay_off_(stay_off) {
  for (double p : {initial_on, stay_on, stay_off}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("link probabilities must lie in [0,1]");
    }
  }
  std::vector<std::vector<WeightedEdge>> single{edges};
  // Reuse the topology validation for symmetry, range and duplicates.
  TopologySet check = TopologySet::FromEdgeLists(vertex_count, single);
  union_edges_ = check.union_edges();
  edges_ = check.edges(0);
  on_.assign(edges_.size(), 0);
}

double IndependentLinkProcess::StationaryOnProbability() const {
  const double leave_on = 1.0 - stay_on_;
  const double leave_off = 1.0 - stay_off_;
  if (leave_on + leave_off == 0.0) return initial_on_;
  return leave_off / (leave_on + leave_off);
}

void IndependentLinkProcess::Start(RandomStream& rng) {
  for (auto& s : on_) s = rng.Bernoulli(initial_on_) ? 1 : 0;
  RebuildLive();
}

void IndependentLinkProcess::SampleStep(RandomStream& rng) {
  for (auto& s : on_) {
    const double stay = s ? stay_on_ : stay_off_;
    if (!rng.Bernoulli(stay)) s = s ? 0 : 1;
  }
  RebuildLive();
}

void IndependentLinkProcess::RebuildLive() {
  live_.clear();
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (on_[e]) live_.push_back(edges_[e]);
  }
}

CommunicationGraph::CommunicationGraph()
    : impl_(SwitchingGraphProcess(
          TopologySet(1, {Eigen::MatrixXd::Zero(1, 1)}),
          MarkovChain(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1)))) {}

int CommunicationGraph::vertex_count() const {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SwitchingGraphProcess>) {
          return p.topologies().vertex_count();
        } else {
          return p.vertex_count();
        }
      },
      impl_);
}

const std::vector<UndirectedEdge>& CommunicationGraph::union_edges() const {
  return std::visit(
      [](const auto& p) -> const std::vector<UndirectedEdge>& {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SwitchingGraphProcess>) {
          return p.topologies().union_edges();
        } else {
          return p.union_edges();
        }
      },
      impl_);
}

int CommunicationGraph::UnionEdgeIndex(int i, int j) const {
  const auto& edges = union_edges();
  const UndirectedEdge key = UndirectedEdge::Of(i, j);
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

std::vector<int> CommunicationGraph::UnionNeighbors(int i) const {
  std::vector<int> out;
  for (const auto& e : union_edges()) {
    if (e.i == i) out.push_back(e.j);
    if (e.j == i) out.push_back(e.i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool CommunicationGraph::IsUnionConnected() const {
  const int n = vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : union_edges()) {
    a(e.i, e.j) = 1.0;
    a(e.j, e.i) = 1.0;
  }
  const std::vector<int> level = BfsLevels(a, 0, false);
  return std::all_of(level.begin(), level.end(),
                     [](int l) { return l >= 0; });
}

double CommunicationGraph::StationaryEdgeProbability(int i, int j) const {
  if (UnionEdgeIndex(i, j) < 0) {
    throw DomainError("(" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + ") is not a union edge");
  }
  if (const auto* s = switching()) {
    const Eigen::VectorXd pi = StationaryDistribution(s->chain());
    double q = 0.0;
    for (int u : s->topologies().TopologiesContaining(i, j)) q += pi(u);
    return q;
  }
  return independent()->StationaryOnProbability();
}

bool CommunicationGraph::StartsStationary(double tol) const {
  if (const auto* s = switching()) {
    const Eigen::VectorXd pi = StationaryDistribution(s->chain());
    return (pi - s->chain().initial).cwiseAbs().maxCoeff() <= tol;
  }
  const auto* p = independent();
  return std::abs(p->initial_on() - p->StationaryOnProbability()) <= tol;
}

std::vector<double> CommunicationGraph::EdgeProbabilities(
    int i, int j, std::int64_t horizon) const {
  if (const auto* s = switching()) {
    return EdgeProbabilitySeries(*s, i, j, horizon);
  }
  if (UnionEdgeIndex(i, j) < 0) {
    throw DomainError("(" + std::to_string(i + 1) + "," +
                      std::to_string(j + 1) + ") is not a union edge");
  }
  const auto* p = independent();
  std::vector<double> q;
  double on = p->initial_on();
  for (std::int64_t k = 1; k <= horizon; ++k) {
    q.push_back(on);
    on = on * p->stay_on() + (1.0 - on) * (1.0 - p->stay_off());
  }
  return q;
}

void CommunicationGraph::Start(RandomStream& rng) {
  std::visit([&](auto& p) { p.Start(rng); }, impl_);
}

void CommunicationGraph::Advance(RandomStream& rng) {
  std::visit([&](auto& p) { p.SampleStep(rng); }, impl_);
}

const std::vector<WeightedEdge>& CommunicationGraph::LiveEdges() const {
  return std::visit(
      [](const auto& p) -> const std::vector<WeightedEdge>& {
        return p.LiveEdges();
      },
      impl_);
}

}  // namespace privest
