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

// Markovian switching communication graphs: a finite set of undirected
// weighted topologies visited according to a homogeneous Markov chain.
// Vertex ids are 0-based throughout the C++ API; configuration files and the
// CLI use 1-based ids.

#ifndef PRIVEST_GRAPH_MODEL_H_
#define PRIVEST_GRAPH_MODEL_H_

#include <compare>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "privest/random.h"

namespace privest {

// Unordered vertex pair stored with i < j.
struct UndirectedEdge {
  int i = 0;
  int j = 0;

  static UndirectedEdge Of(int a, int b) {
    return a < b ? UndirectedEdge{a, b} : UndirectedEdge{b, a};
  }
  auto operator<=>(const UndirectedEdge&) const = default;
};

// A live edge with its weight and its position in the union edge list.
struct WeightedEdge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
  int union_index = -1;
};

// The topology set G(1..M) on N vertices. Every adjacency is symmetric,
// nonnegative and has a zero diagonal; construction throws ValidationError
// naming the offending topology otherwise.
class TopologySet {
 public:
  TopologySet(int vertex_count, std::vector<Eigen::MatrixXd> adjacencies);

  // Builds adjacencies from per-topology edge lists (0-based ids). Listing an
  // edge twice in one topology is an error.
  static TopologySet FromEdgeLists(
      int vertex_count, const std::vector<std::vector<WeightedEdge>>& lists);

  int vertex_count() const { return vertex_count_; }
  int size() const { return static_cast<int>(adjacencies_.size()); }
  const Eigen::MatrixXd& adjacency(int u) const;

  // Sum of all adjacencies; its support is the union edge set.
  Eigen::MatrixXd UnionAdjacency() const;
  const std::vector<UndirectedEdge>& union_edges() const { return union_edges_; }
  // Index of {i, j} in union_edges(), or -1.
  int UnionEdgeIndex(int i, int j) const;
  // Neighbours of i in the union graph, ascending.
  std::vector<int> UnionNeighbors(int i) const;
  // The index set {u : (i,j) in E(u)}.
  std::vector<int> TopologiesContaining(int i, int j) const;
  // Edges of topology u, each tagged with its union index.
  const std::vector<WeightedEdge>& edges(int u) const;

 private:
  int vertex_count_;
  std::vector<Eigen::MatrixXd> adjacencies_;
  std::vector<UndirectedEdge> union_edges_;
  std::vector<std::vector<WeightedEdge>> edge_lists_;
};

// Homogeneous Markov chain over topology indices.
struct MarkovChain {
  MarkovChain(Eigen::MatrixXd transition, Eigen::VectorXd initial);

  int size() const { return static_cast<int>(transition.rows()); }

  Eigen::MatrixXd transition;
  Eigen::VectorXd initial;
};

// True iff the union graph is connected.
bool ValidateUnionConnected(const TopologySet& topologies);

// Stationary distribution of an irreducible aperiodic chain. Throws
// DomainError for reducible or periodic chains and NumericError when the
// solve cannot reach a 1e-10 residual.
Eigen::VectorXd StationaryDistribution(const MarkovChain& chain);

// L(u) = D(u) - A(u).
Eigen::MatrixXd Laplacian(const TopologySet& topologies, int u);

// Sum_u pi_u A(u).
Eigen::MatrixXd MeanAdjacency(const TopologySet& topologies,
                              const Eigen::VectorXd& pi);

// Draws the next state from row `state` of `transition`.
int SampleRow(const Eigen::MatrixXd& transition, int state,
              RandomStream& rng);

class SwitchingGraphProcess {
 public:
  SwitchingGraphProcess(TopologySet topologies, MarkovChain chain,
                        int current_state = 0);

  const TopologySet& topologies() const { return topologies_; }
  const MarkovChain& chain() const { return chain_; }
  int current_state() const { return state_; }

  // Draws the first state from the initial distribution.
  int Start(RandomStream& rng);
  // Advances one step along the chain and returns the new state.
  int SampleStep(RandomStream& rng);

  const std::vector<WeightedEdge>& LiveEdges() const {
    return topologies_.edges(state_);
  }

 private:
  TopologySet topologies_;
  MarkovChain chain_;
  int state_;
};

// q_{ij,1..horizon}: probability that {i,j} is present at each time, computed
// by propagating the state distribution from the chain's initial vector.
// Throws DomainError if {i,j} is not a union edge.
std::vector<double> EdgeProbabilitySeries(const SwitchingGraphProcess& process,
                                          int i, int j, std::int64_t horizon);

// Every union edge switches on and off according to its own two-state chain.
// Equivalent in law to a global chain on 2^|E| topologies.
class IndependentLinkProcess {
 public:
  IndependentLinkProcess(int vertex_count, std::vector<WeightedEdge> edges,
                         double initial_on, double stay_on, double stay_off);

  int vertex_count() const { return vertex_count_; }
  const std::vector<UndirectedEdge>& union_edges() const { return union_edges_; }
  double initial_on() const { return initial_on_; }
  double stay_on() const { return stay_on_; }
  double stay_off() const { return stay_off_; }
  // Long-run probability that a link is on.
  double StationaryOnProbability() const;

  void Start(RandomStream& rng);
  void SampleStep(RandomStream& rng);
  const std::vector<WeightedEdge>& LiveEdges() const { return live_; }

 private:
  void RebuildLive();

  int vertex_count_;
  std::vector<WeightedEdge> edges_;
  std::vector<UndirectedEdge> union_edges_;
  double initial_on_;
  double stay_on_;
  double stay_off_;
  std::vector<char> on_;
  std::vector<WeightedEdge> live_;
};

// The communication environment consumed by the estimator.
class CommunicationGraph {
 public:
  // A single isolated vertex.
  CommunicationGraph();
  CommunicationGraph(SwitchingGraphProcess process)  // NOLINT
      : impl_(std::move(process)) {}
  CommunicationGraph(IndependentLinkProcess process)  // NOLINT
      : impl_(std::move(process)) {}

  int vertex_count() const;
  const std::vector<UndirectedEdge>& union_edges() const;
  int UnionEdgeIndex(int i, int j) const;
  std::vector<int> UnionNeighbors(int i) const;
  bool IsUnionConnected() const;

  // Long-run probability that union edge {i,j} is live.
  double StationaryEdgeProbability(int i, int j) const;
  // True when the process starts in its stationary law, so q_{ij,k} is
  // constant in k.
  bool StartsStationary(double tol = 1e-12) const;
  // q_{ij,1..horizon}.
  std::vector<double> EdgeProbabilities(int i, int j,
                                        std::int64_t horizon) const;

  // Draws G_1.
  void Start(RandomStream& rng);
  // Draws G_{k+1} given G_k.
  void Advance(RandomStream& rng);
  const std::vector<WeightedEdge>& LiveEdges() const;

  const SwitchingGraphProcess* switching() const {
    return std::get_if<SwitchingGraphProcess>(&impl_);
  }
  const IndependentLinkProcess* independent() const {
    return std::get_if<IndependentLinkProcess>(&impl_);
  }

 private:
  std::variant<SwitchingGraphProcess, IndependentLinkProcess> impl_;
};

}  // namespace privest

#endif  // PRIVEST_GRAPH_MODEL_H_
