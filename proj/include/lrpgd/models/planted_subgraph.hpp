#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

/// Undirected simple graph in compressed adjacency form (A_ii = 0).
struct Adjacency {
  Eigen::Index d = 0;
  std::vector<std::size_t> offsets;  // size d + 1
  std::vector<Eigen::Index> neighbors;

  static Adjacency from_edges(Eigen::Index d,
                              const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges) {
    Adjacency a;
    a.d = d;
    std::vector<std::size_t> degree(static_cast<std::size_t>(d), 0);
    for (const auto& [i, j] : edges) {
      ++degree[i];
      ++degree[j];
    }
    a.offsets.assign(static_cast<std::size_t>(d) + 1, 0);
    for (Eigen::Index i = 0; i < d; ++i) a.offsets[i + 1] = a.offsets[i] + degree[i];
    a.neighbors.resize(a.offsets.back());
    std::vector<std::size_t> fill(a.offsets.begin(), a.offsets.end() - 1);
    for (const auto& [i, j] : edges) {
      a.neighbors[fill[i]++] = j;
      a.neighbors[fill[j]++] = i;
    }
    for (Eigen::Index i = 0; i < d; ++i)
      std::sort(a.neighbors.begin() + static_cast<std::ptrdiff_t>(a.offsets[i]),
                a.neighbors.begin() + static_cast<std::ptrdiff_t>(a.offsets[i + 1]));
    return a;
  }

  std::size_t edge_count() const { return neighbors.size() / 2; }

  Vector multiply(const Vector& v) const {
    Vector out = Vector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) s += v(neighbors[e]);
      out(i) = s;
    }
    return out;
  }

  Matrix dense() const {
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) m(i, neighbors[e]) = 1.0;
    return m;
  }
};

/// S = A - ((p + q)/2) 11^T, applied matrix-free.
struct PlantedGraph {
  Adjacency adjacency;
  Eigen::Index k = 0;
  double p = 0.0;
  double q = 0.0;

  Eigen::Index d() const { return adjacency.d; }
  double shift() const { return 0.5 * (p + q); }
  Vector shifted_multiply(const Vector& v) const {
    return adjacency.multiply(v) - Vector::Constant(d(), shift() * v.sum());
  }
};

struct PlantedProblem {
  PlantedGraph graph;
  GroundTruth truth;  // cluster indicator, d x 1
};

/// In-cluster pairs i < j are edges with probability p, all other pairs with q.
inline PlantedProblem generate_planted(Eigen::Index d, Eigen::Index k, double p, double q,
                                       std::uint64_t seed) {
  detail::require_dims(k >= 1 && k <= d, "generate_planted: need 1 <= k <= d");
  if (!(p > q)) throw ParameterError("generate_planted: need p > q");
  detail::require(q >= 0.0 && p <= 1.0, "generate_planted: probabilities must lie in [0, 1]");
  Rng rng(seed);
  Factor theta = Factor::Zero(d, 1);
  for (std::size_t i : rng.sample_without_replacement(static_cast<std::size_t>(d),
                                                      static_cast<std::size_t>(k)))
    theta(static_cast<Eigen::Index>(i), 0) = 1.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j + 1; i < d; ++i) {
      const bool inside = theta(i, 0) > 0.0 && theta(j, 0) > 0.0;
      if (rng.bernoulli(inside ? p : q)) edges.emplace_back(i, j);
    }
  return {PlantedGraph{Adjacency::from_edges(d, edges), k, p, q},
          make_ground_truth(std::move(theta))};
}

/// Edge list with one "i j" pair per line (0-indexed, undirected). Self loops and
/// duplicate pairs are dropped. d defaults to max index + 1.
inline Adjacency load_edge_list(std::istream& in, Eigen::Index d = 0) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  std::string line;
  Eigen::Index max_index = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    long long i, j;
    if (!(ls >> i)) continue;
    if (!(ls >> j) || i < 0 || j < 0)
      throw ParameterError("edge list: malformed line " + std::to_string(lineno));
    if (i == j) continue;
    edges.emplace_back(std::max<Eigen::Index>(i, j), std::min<Eigen::Index>(i, j));
    max_index = std::max<Eigen::Index>(max_index, std::max<Eigen::Index>(i, j));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (d == 0) d = max_index + 1;
  if (max_index >= d) throw DimensionError("edge list: vertex index exceeds d");
  return Adjacency::from_edges(d, edges);
}

inline Adjacency load_edge_list(const std::string& path, Eigen::Index d = 0) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open edge list: " + path);
  return load_edge_list(in, d);
}

/// L(F) = -F^T S F over {F in [0,1]^d, sum F = k}; rank one only.
class PlantedSubgraph {
 public:
  explicit PlantedSubgraph(PlantedGraph graph) : graph_(std::move(graph)) {}

  LossGrad loss_grad(const Factor& f) const {
    if (f.cols() != 1) throw DimensionError("PlantedSubgraph: factor must have rank 1");
    detail::require_dims(f.rows() == graph_.d(), "PlantedSubgraph: shape mismatch");
    const Vector sf = graph_.shifted_multiply(f.col(0));
    return {-f.col(0).dot(sf), -2.0 * sf, 0};
  }

  Factor project(const Factor& f) const {
    if (f.cols() != 1) throw DimensionError("PlantedSubgraph: factor must have rank 1");
    return project_box_simplex(f.col(0), BoxSimplexSpec{static_cast<double>(graph_.k)});
  }

  double caption_step() const { return 0.1 / ((graph_.p - graph_.q) * static_cast<double>(graph_.k)); }
  double step_unit() const { return 1.0; }

  const PlantedGraph& graph() const { return graph_; }

 private:
  PlantedGraph graph_;
};

/// Leading singular vector of A - q 11^T by power iteration, oriented to a
/// nonnegative sum, scaled to the norm sqrt(k) of the indicator and projected.
inline Factor init_svd(const PlantedGraph& g, std::uint64_t seed, int max_iters = 1000,
                       double tol = 1e-6) {
  Rng rng(seed);
  Vector v(g.d());
  for (Eigen::Index i = 0; i < g.d(); ++i) v(i) = rng.normal();
  v.normalize();
  bool converged = false;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = g.adjacency.multiply(v) - Vector::Constant(g.d(), g.q * v.sum());
    const double nrm = w.norm();
    if (nrm == 0.0) throw DegenerateError("init_svd: A - qJ annihilates the iterate");
    w /= nrm;
    // A dominant negative eigenvalue flips the sign every step.
    const double change = std::min((w - v).norm(), (w + v).norm());
    v = std::move(w);
    if (change < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw DegenerateError("init_svd: power iteration did not converge");
  if (v.sum() < 0.0) v = -v;
  v *= std::sqrt(static_cast<double>(g.k));
  return project_box_simplex(v, BoxSimplexSpec{static_cast<double>(g.k)});
}

inline constexpr double kExactRecoveryTol = 2e-3;

inline bool exact_recovery(const Factor& f, const GroundTruth& gt) {
  return factor_dist(f, gt) <= kExactRecoveryTol;
}

}  // namespace lrpgd
