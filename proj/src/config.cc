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

#include "privest/config.h"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "privest/errors.h"
#include "privest/experiments.h"

namespace privest {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Node& at, const std::string& msg) const {
    std::string where = source_;
    if (at.IsDefined() && at.Mark().line >= 0) {
      where += ":" + std::to_string(at.Mark().line + 1);
    }
    throw ConfigError(where + ": " + msg);
  }

  YAML::Node Need(const YAML::Node& parent, const std::string& key,
                  const std::string& path) const {
    if (!parent.IsMap()) Fail(parent, "'" + path + "' must be a mapping");
    YAML::Node child = parent[key];
    if (!child.IsDefined() || child.IsNull()) {
      Fail(parent, "missing required key '" + Join(path, key) + "'");
    }
    return child;
  }

  template <typename T>
  T As(const YAML::Node& node, const std::string& path) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(node, "key '" + path + "' has the wrong type");
    }
  }

  template <typename T>
  T Get(const YAML::Node& parent, const std::string& key,
        const std::string& path) const {
    return As<T>(Need(parent, key, path), Join(path, key));
  }

  template <typename T>
  T GetOr(const YAML::Node& parent, const std::string& key,
          const std::string& path, T fallback) const {
    if (!parent.IsMap()) return fallback;
    YAML::Node child = parent[key];
    if (!child.IsDefined() || child.IsNull()) return fallback;
    return As<T>(child, Join(path, key));
  }

  Eigen::VectorXd Vector(const YAML::Node& node,
                         const std::string& path) const {
    if (!node.IsSequence()) Fail(node, "key '" + path + "' must be a list");
    Eigen::VectorXd v(node.size());
    for (std::size_t a = 0; a < node.size(); ++a) {
      v(a) = As<double>(node[a], path + "[" + std::to_string(a + 1) + "]");
    }
    return v;
  }

  Eigen::MatrixXd Matrix(const YAML::Node& node,
                         const std::string& path) const {
    if (!node.IsSequence() || node.size() == 0) {
      Fail(node, "key '" + path + "' must be a non-empty list of rows");
    }
    // A flat list is a single row.
    if (!node[0].IsSequence()) {
      return Vector(node, path).transpose();
    }
    const std::size_t rows = node.size();
    const std::size_t cols = node[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string rp = path + "[" + std::to_string(r + 1) + "]";
      if (!node[r].IsSequence() || node[r].size() != cols) {
        Fail(node[r], "key '" + rp + "' must have " + std::to_string(cols) +
                          " entries");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        m(r, c) = As<double>(node[r][c], rp);
      }
    }
    return m;
  }

  static std::string Join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::string source_;
};

int VertexId(const Reader& rd, const YAML::Node& node, const std::string& path,
             int vertices) {
  const int id = rd.As<int>(node, path);
  if (id < 1 || id > vertices) {
    rd.Fail(node, "key '" + path + "' = " + std::to_string(id) +
                      " is not a vertex id in 1.." + std::to_string(vertices));
  }
  return id - 1;
}

std::vector<WeightedEdge> EdgeList(const Reader& rd, const YAML::Node& node,
                                   const std::string& path, int vertices) {
  if (!node.IsSequence()) rd.Fail(node, "key '" + path + "' must be a list");
  std::vector<WeightedEdge> edges;
  for (std::size_t a = 0; a < node.size(); ++a) {
    const std::string ep = path + "[" + std::to_string(a + 1) + "]";
    const YAML::Node e = node[a];
    if (!e.IsSequence() || e.size() < 2 || e.size() > 3) {
      rd.Fail(e, "key '" + ep + "' must be [i, j] or [i, j, weight]");
    }
    WeightedEdge w;
    w.i = VertexId(rd, e[0], ep, vertices);
    w.j = VertexId(rd, e[1], ep, vertices);
    w.weight = e.size() == 3 ? rd.As<double>(e[2], ep) : 1.0;
    edges.push_back(w);
  }
  return edges;
}

CommunicationGraph ParseGraph(const Reader& rd, const YAML::Node& g) {
  const int vertices = rd.Get<int>(g, "vertices", "graph");
  if (vertices < 1) rd.Fail(g, "key 'graph.vertices' must be >= 1");
  if (g["independent_links"]) {
    const YAML::Node il = g["independent_links"];
    const std::string p = "graph.independent_links";
    return CommunicationGraph(IndependentLinkProcess(
        vertices, EdgeList(rd, rd.Need(il, "edges", p), p + ".edges", vertices),
        rd.Get<double>(il, "initial_on", p), rd.Get<double>(il, "stay_on", p),
        rd.Get<double>(il, "stay_off", p)));
  }
  const YAML::Node tops = rd.Need(g, "topologies", "graph");
  if (!tops.IsSequence() || tops.size() == 0) {
    rd.Fail(tops, "key 'graph.topologies' must be a non-empty list");
  }
  std::vector<Eigen::MatrixXd> adjacencies;
  std::vector<std::vector<WeightedEdge>> lists;
  bool by_matrix = false;
  for (std::size_t u = 0; u < tops.size(); ++u) {
    const std::string tp = "graph.topologies[" + std::to_string(u + 1) + "]";
    const YAML::Node t = tops[u];
    if (t.IsMap() && t["adjacency"]) {
      by_matrix = true;
      adjacencies.push_back(rd.Matrix(t["adjacency"], tp + ".adjacency"));
    } else {
      const YAML::Node e = t.IsMap() ? t["edges"] : t;
      if (!e.IsDefined() || e.IsNull()) {
        rd.Fail(t, "missing required key '" + tp + ".edges'");
      }
      lists.push_back(EdgeList(rd, e, tp + ".edges", vertices));
    }
  }
  if (by_matrix && !lists.empty()) {
    rd.Fail(tops, "topologies must all use 'edges' or all use 'adjacency'");
  }
  TopologySet set = by_matrix ? TopologySet(vertices, std::move(adjacencies))
                              : TopologySet::FromEdgeLists(vertices, lists);
  const Eigen::MatrixXd transition =
      rd.Matrix(rd.Need(g, "transition", "graph"), "graph.transition");
  if (transition.rows() != set.size() || transition.cols() != set.size()) {
    rd.Fail(g["transition"], "key 'graph.transition' must be " +
                                 std::to_string(set.size()) + "x" +
                                 std::to_string(set.size()));
  }
  Eigen::VectorXd initial;
  if (g["initial"] && !g["initial"].IsNull()) {
    initial = rd.Vector(g["initial"], "graph.initial");
  } else {
    const MarkovChain probe(transition,
                            Eigen::VectorXd::Constant(set.size(),
                                                      1.0 / set.size()));
    initial = StationaryDistribution(probe);
  }
  return CommunicationGraph(SwitchingGraphProcess(
      std::move(set), MarkovChain(transition, initial)));
}

SensorSpec ParseSensor(const Reader& rd, const YAML::Node& s,
                       const std::string& path) {
  const Eigen::MatrixXd mean =
      rd.Matrix(rd.Need(s, "mean_matrix", path), path + ".mean_matrix");
  const double fp = rd.GetOr<double>(s, "failure_probability", path, 0.0);
  Eigen::MatrixXd active;
  if (s["active_matrix"]) {
    active = rd.Matrix(s["active_matrix"], path + ".active_matrix");
  } else if (fp < 1.0) {
    active = mean / (1.0 - fp);
  } else {
    rd.Fail(s, "missing required key '" + path + ".active_matrix'");
  }
  const double std = rd.GetOr<double>(s, "obs_noise_std", path, 0.0);
  const std::string kind =
      rd.GetOr<std::string>(s, "kind", path, "linear_gaussian");
  ObservationKind k;
  if (kind == "linear_gaussian") {
    k = ObservationKind::kLinearGaussian;
  } else if (kind == "bernoulli_event") {
    k = ObservationKind::kBernoulliEvent;
  } else {
    rd.Fail(s["kind"], "key '" + path + ".kind' must be linear_gaussian or "
                                        "bernoulli_event");
  }
  return SensorSpec(mean, active, fp, std, k);
}

NoiseSchedule ParseNoise(const Reader& rd, const YAML::Node& n,
                         const std::string& path) {
  const std::string family = rd.Get<std::string>(n, "family", path);
  NoiseFamily f;
  try {
    f = ParseFamily(family);
  } catch (const Error& e) {
    rd.Fail(n["family"], e.what());
  }
  return NoiseSchedule(f, rd.Get<double>(n, "base_scale", path),
                       rd.GetOr<double>(n, "growth_exponent", path, 0.0));
}

EdgeStepSize ParseAlpha(const Reader& rd, const YAML::Node& n,
                        const std::string& path) {
  return {rd.Get<double>(n, "base", path), rd.Get<double>(n, "gamma", path)};
}

SensorStepSize ParseBeta(const Reader& rd, const YAML::Node& n,
                         const std::string& path) {
  SensorStepSize s;
  s.beta_base = rd.Get<double>(n, "base", path);
  s.delta = rd.Get<double>(n, "delta", path);
  if (!(s.beta_base > 0.0) || !(s.delta > 0.0)) {
    rd.Fail(n, "key '" + path + "' needs base > 0 and delta > 0");
  }
  s.warmup = rd.GetOr<double>(n, "k0", path,
                              DefaultWarmup(s.beta_base, s.delta));
  return s;
}

LoadedConfig Parse(const YAML::Node& root, const std::string& source) {
  const Reader rd(source);
  if (!root.IsMap()) rd.Fail(root, "top level must be a mapping");
  LoadedConfig out;
  out.source = source;
  AlgorithmConfig& cfg = out.algorithm;
  cfg.dimension = rd.Get<int>(root, "dimension", "");
  if (cfg.dimension < 1) rd.Fail(root["dimension"], "dimension must be >= 1");

  cfg.graph = ParseGraph(rd, rd.Need(root, "graph", ""));
  const int n_vertices = cfg.graph.vertex_count();

  const YAML::Node sensors = rd.Need(root, "sensors", "");
  if (!sensors.IsSequence()) rd.Fail(sensors, "key 'sensors' must be a list");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    cfg.sensors.push_back(
        ParseSensor(rd, sensors[i], "sensors[" + std::to_string(i + 1) + "]"));
  }
  if (static_cast<int>(cfg.sensors.size()) != n_vertices) {
    rd.Fail(sensors, "expected " + std::to_string(n_vertices) +
                         " sensors, found " +
                         std::to_string(cfg.sensors.size()));
  }

  const YAML::Node alg = rd.Need(root, "algorithm", "");
  cfg.use_compression =
      rd.GetOr<bool>(alg, "use_compression", "algorithm", true);
  const double c0 =
      rd.GetOr<double>(alg, "threshold_default", "algorithm", 0.0);
  const NoiseSchedule noise =
      ParseNoise(rd, rd.Need(alg, "noise", "algorithm"), "algorithm.noise");
  const EdgeStepSize alpha =
      ParseAlpha(rd, rd.Need(alg, "alpha", "algorithm"), "algorithm.alpha");
  const SensorStepSize beta =
      ParseBeta(rd, rd.Need(alg, "beta", "algorithm"), "algorithm.beta");

  const int m = cfg.edge_count();
  cfg.thresholds.assign(m, c0);
  cfg.noise.assign(m, noise);
  std::vector<EdgeStepSize> edge_steps(m, alpha);
  std::vector<SensorStepSize> sensor_steps(n_vertices, beta);

  if (const YAML::Node eo = alg["edges"]; eo && !eo.IsNull()) {
    if (!eo.IsSequence()) rd.Fail(eo, "key 'algorithm.edges' must be a list");
    for (std::size_t a = 0; a < eo.size(); ++a) {
      const std::string p = "algorithm.edges[" + std::to_string(a + 1) + "]";
      const YAML::Node e = eo[a];
      const YAML::Node id = rd.Need(e, "edge", p);
      if (!id.IsSequence() || id.size() != 2) {
        rd.Fail(id, "key '" + p + ".edge' must be [i, j]");
      }
      const int i = VertexId(rd, id[0], p + ".edge", n_vertices);
      const int j = VertexId(rd, id[1], p + ".edge", n_vertices);
      const int idx = cfg.graph.UnionEdgeIndex(i, j);
      if (idx < 0) {
        rd.Fail(id, "edge (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ") is not in the union graph");
      }
      if (e["threshold"]) {
        cfg.thresholds[idx] = rd.As<double>(e["threshold"], p + ".threshold");
      }
      if (e["noise"]) cfg.noise[idx] = ParseNoise(rd, e["noise"], p + ".noise");
      if (e["alpha"]) edge_steps[idx] = ParseAlpha(rd, e["alpha"], p + ".alpha");
    }
  }
  if (const YAML::Node so = alg["sensors"]; so && !so.IsNull()) {
    if (!so.IsSequence()) {
      rd.Fail(so, "key 'algorithm.sensors' must be a list");
    }
    for (std::size_t a = 0; a < so.size(); ++a) {
      const std::string p = "algorithm.sensors[" + std::to_string(a + 1) + "]";
      const int i = VertexId(rd, rd.Need(so[a], "sensor", p), p + ".sensor",
                             n_vertices);
      sensor_steps[i] = ParseBeta(rd, rd.Need(so[a], "beta", p), p + ".beta");
    }
  }
  cfg.steps = StepSizeSchedule(std::move(edge_steps), std::move(sensor_steps));

  if (const YAML::Node ie = alg["initial_estimates"]; ie && !ie.IsNull()) {
    const Eigen::MatrixXd m0 =
        rd.Matrix(ie, "algorithm.initial_estimates");
    if (m0.rows() == 1 && n_vertices > 1) {
      cfg.initial_estimates.assign(n_vertices, m0.row(0).transpose());
    } else {
      for (Eigen::Index r = 0; r < m0.rows(); ++r) {
        cfg.initial_estimates.push_back(m0.row(r).transpose());
      }
    }
  }

  const YAML::Node theta = rd.Need(root, "theta", "");
  if (theta.IsMap()) {
    const auto seed = rd.Get<std::uint64_t>(theta, "uniform_seed", "theta");
    out.theta = UniformTheta(cfg.dimension, seed);
  } else {
    out.theta = rd.Vector(theta, "theta");
  }
  if (out.theta.size() != cfg.dimension) {
    rd.Fail(theta, "key 'theta' must have " + std::to_string(cfg.dimension) +
                       " entries");
  }

  if (const YAML::Node ex = root["experiment"]; ex && !ex.IsNull()) {
    out.experiment.repeats =
        rd.GetOr<int>(ex, "repeats", "experiment", out.experiment.repeats);
    out.experiment.horizon = rd.GetOr<std::int64_t>(
        ex, "horizon", "experiment", out.experiment.horizon);
    if (ex["seed"] && !ex["seed"].IsNull()) {
      out.experiment.seed = rd.As<std::uint64_t>(ex["seed"], "experiment.seed");
    }
  }
  cfg.Validate();
  return out;
}

}  // namespace

LoadedConfig LoadConfigString(const std::string& text,
                              const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) +
                      ": syntax error: " + e.msg);
  }
  return Parse(root, source);
}

LoadedConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return LoadConfigString(text.str(), path);
}

}  // namespace privest
