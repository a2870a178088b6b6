#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgcf/labeling.hpp"
#include "lgcf/matrix.hpp"
#include "lgcf/random.hpp"
#include "lgcf/subgraph.hpp"

namespace lgcf {

enum class Activation { Relu, Tanh, Identity };

std::string to_string(Activation act);
Activation parse_activation(const std::string& name);

struct GnnShape {
  std::size_t feature_width = 64;  // C, the one-hot label width
  std::size_t hidden = 32;         // h
  std::size_t layers = 3;          // L
  Activation activation = Activation::Relu;
};

// GCN weight stack (C x h, then h x h) and the scoring vector (length h).
// Hidden layers apply `activation`; the last layer is linear.
struct GnnParameters {
  std::vector<Matrix> weights;
  std::vector<double> scoring;
  Activation activation = Activation::Relu;
  // Bumped whenever values change; forward caches remember it.
  std::uint64_t generation = 0;

  // Glorot-uniform weights, Glorot-uniform scoring vector.
  static GnnParameters init(const GnnShape& shape, Rng& rng);
  static GnnParameters zeros(const GnnShape& shape);

  GnnShape shape() const;
  std::size_t count() const;
  void validate() const;  // throws ContractViolation

  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
};

// C*h + (L-1)*h^2 + h
std::size_t gnn_param_count(const GnnShape& shape);

struct GnnGradients {
  std::vector<Matrix> weights;
  std::vector<double> scoring;

  static GnnGradients zeros_like(const GnnParameters& params);
  void add(const GnnGradients& other);
  void scale(double factor);
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
};

// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
Matrix normalize_adjacency(const Matrix& adjacency);
Matrix normalize_adjacency(const LocalizedGraph& lg);

struct ForwardCache {
  Matrix a_norm;
  std::vector<Matrix> inputs;  // X_0 .. X_{L-1}
  std::vector<Matrix> pre;     // A X_l W_l, before the activation
  std::uint64_t generation = 0;
};

struct GcnForward {
  Matrix output;  // X_L
  ForwardCache cache;
};

GcnForward gcn_forward(const Matrix& features, const Matrix& a_norm, const GnnParameters& params);

// Column sums.
std::vector<double> sum_pool(const Matrix& reps);

double sigmoid(double x);
double dot(std::span<const double> a, std::span<const double> b);
// sigmoid(pooled . w)
double score(std::span<const double> pooled, std::span<const double> w);
// -ln sigmoid(pos - neg), evaluated as softplus(neg - pos)
double bpr_loss(double s_pos, double s_neg);

struct BprGrad {
  double loss = 0.0;
  double d_pos = 0.0;  // dloss / ds_pos
  double d_neg = 0.0;  // dloss / ds_neg
};
BprGrad bpr_with_grad(double s_pos, double s_neg);

// Accumulates dloss/dW_l into grads.weights given dloss/dpooled, where the
// pooled vector is sum_pool(output of the forward that produced `cache`).
// Throws ContractViolation if params changed since that forward.
void gcn_backward(const ForwardCache& cache, const GnnParameters& params,
                  std::span<const double> d_pooled, GnnGradients& grads);

// Full LGCF scoring of one labeled localized graph.
struct ScoredGraph {
  GcnForward gcn;
  std::vector<double> pooled;
  double logit = 0.0;
  double score = 0.0;
};

ScoredGraph score_graph(const LocalizedGraph& labeled, const GnnParameters& params,
                        const LabelEncoding& enc);

// Backpropagates dloss/dscore through the sigmoid, the scoring vector, the
// pooling and the GCN stack.
void backward_score(const ScoredGraph& scored, const GnnParameters& params, double d_score,
                    GnnGradients& grads);

}  // namespace lgcf
