#include "lgcf/gnn.hpp"

#include <cmath>

#include "lgcf/errors.hpp"

namespace lgcf {
namespace {

double activate(Activation act, double z) {
  switch (act) {
    case Activation::Relu:
      return z > 0.0 ? z : 0.0;
    case Activation::Tanh:
      return std::tanh(z);
    case Activation::Identity:
      return z;
  }
  return z;
}

// Derivative expressed through the pre-activation; ReLU'(0) = 0.
double activate_grad(Activation act, double z) {
  switch (act) {
    case Activation::Relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::Identity:
      return 1.0;
  }
  return 1.0;
}

void glorot(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : m.values()) v = dist(rng);
}

}  // namespace

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Relu:
      return "relu";
    case Activation::Tanh:
      return "tanh";
    case Activation::Identity:
      return "identity";
  }
  return "unknown";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw DomainError("unknown activation " + name);
}

GnnParameters GnnParameters::zeros(const GnnShape& shape) {
  if (shape.layers < 1 || shape.hidden < 1 || shape.feature_width < 2) {
    throw ContractViolation("GNN shape needs at least one layer, h >= 1 and C >= 2");
  }
  GnnParameters p;
  p.activation = shape.activation;
  p.weights.emplace_back(shape.feature_width, shape.hidden);
  for (std::size_t l = 1; l < shape.layers; ++l) p.weights.emplace_back(shape.hidden, shape.hidden);
  p.scoring.assign(shape.hidden, 0.0);
  return p;
}

GnnParameters GnnParameters::init(const GnnShape& shape, Rng& rng) {
  GnnParameters p = zeros(shape);
  for (auto& w : p.weights) glorot(w, rng);
  const double bound = std::sqrt(6.0 / static_cast<double>(shape.hidden + 1));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : p.scoring) v = dist(rng);
  return p;
}

GnnShape GnnParameters::shape() const {
  return {weights.empty() ? 0 : weights.front().rows(), scoring.size(), weights.size(),
          activation};
}

std::size_t GnnParameters::count() const {
  std::size_t n = scoring.size();
  for (const auto& w : weights) n += w.size();
  return n;
}

void GnnParameters::validate() const {
  if (weights.empty()) throw ContractViolation("GNN needs at least one layer");
  for (std::size_t l = 1; l < weights.size(); ++l) {
    if (weights[l - 1].cols() != weights[l].rows()) {
      throw ContractViolation("GNN layer dimensions do not chain");
    }
  }
  if (weights.back().cols() != scoring.size()) {
    throw ContractViolation("scoring vector length differs from the last layer width");
  }
  for (auto b : blocks()) {
    for (double v : b) {
      if (!std::isfinite(v)) throw ContractViolation("non-finite GNN parameter");
    }
  }
}

std::vector<std::span<double>> GnnParameters::blocks() {
  std::vector<std::span<double>> out;
  for (auto& w : weights) out.push_back(w.values());
  out.emplace_back(scoring);
  return out;
}

std::vector<std::span<const double>> GnnParameters::blocks() const {
  std::vector<std::span<const double>> out;
  for (const auto& w : weights) out.push_back(w.values());
  out.emplace_back(scoring);
  return out;
}

std::size_t gnn_param_count(const GnnShape& shape) {
  return shape.feature_width * shape.hidden +
         (shape.layers - 1) * shape.hidden * shape.hidden + shape.hidden;
}

GnnGradients GnnGradients::zeros_like(const GnnParameters& params) {
  GnnGradients g;
  for (const auto& w : params.weights) g.weights.emplace_back(w.rows(), w.cols());
  g.scoring.assign(params.scoring.size(), 0.0);
  return g;
}

void GnnGradients::add(const GnnGradients& other) {
  if (other.weights.size() != weights.size() || other.scoring.size() != scoring.size()) {
    throw ContractViolation("gradient shapes differ");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) axpy(1.0, other.weights[l], weights[l]);
  for (std::size_t j = 0; j < scoring.size(); ++j) scoring[j] += other.scoring[j];
}

void GnnGradients::scale(double factor) {
  for (auto b : blocks()) {
    for (auto& v : b) v *= factor;
  }
}

std::vector<std::span<double>> GnnGradients::blocks() {
  std::vector<std::span<double>> out;
  for (auto& w : weights) out.push_back(w.values());
  out.emplace_back(scoring);
  return out;
}

std::vector<std::span<const double>> GnnGradients::blocks() const {
  std::vector<std::span<const double>> out;
  for (const auto& w : weights) out.push_back(w.values());
  out.emplace_back(scoring);
  return out;
}

Matrix normalize_adjacency(const Matrix& adjacency) {
  const std::size_t k = adjacency.rows();
  if (adjacency.cols() != k) throw ContractViolation("adjacency must be square");
  std::vector<double> inv_sqrt(k);
  for (std::size_t p = 0; p < k; ++p) {
    double deg = 1.0;
    for (std::size_t q = 0; q < k; ++q) deg += adjacency(p, q);
    inv_sqrt[p] = 1.0 / std::sqrt(deg);
  }
  Matrix out(k, k);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < k; ++q) {
      const double a = adjacency(p, q) + (p == q ? 1.0 : 0.0);
      if (a != 0.0) out(p, q) = inv_sqrt[p] * a * inv_sqrt[q];
    }
  }
  return out;
}

Matrix normalize_adjacency(const LocalizedGraph& lg) {
  const std::size_t k = lg.size();
  Matrix a(k, k);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < k; ++q) a(p, q) = lg.edge(p, q) ? 1.0 : 0.0;
  }
  return normalize_adjacency(a);
}

GcnForward gcn_forward(const Matrix& features, const Matrix& a_norm, const GnnParameters& params) {
  if (params.weights.empty()) throw ContractViolation("GNN has no layers");
  if (a_norm.rows() != features.rows() || a_norm.cols() != features.rows()) {
    throw ContractViolation("normalized adjacency does not match the feature rows");
  }
  if (features.cols() != params.weights.front().rows()) {
    throw ContractViolation("feature width differs from the first layer input width");
  }
  GcnForward fwd;
  fwd.cache.a_norm = a_norm;
  fwd.cache.generation = params.generation;
  Matrix x = features;
  const std::size_t layers = params.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = matmul(a_norm, matmul(x, params.weights[l]));
    fwd.cache.inputs.push_back(std::move(x));
    x = z;
    if (l + 1 < layers) {
      for (auto& v : x.values()) v = activate(params.activation, v);
    }
    fwd.cache.pre.push_back(std::move(z));
  }
  fwd.output = std::move(x);
  return fwd;
}

std::vector<double> sum_pool(const Matrix& reps) {
  std::vector<double> out(reps.cols(), 0.0);
  for (std::size_t r = 0; r < reps.rows(); ++r) {
    auto row = reps.row(r);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[c];
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("dot: length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double score(std::span<const double> pooled, std::span<const double> w) {
  return sigmoid(dot(pooled, w));
}

namespace {
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}
}  // namespace

double bpr_loss(double s_pos, double s_neg) { return softplus(s_neg - s_pos); }

BprGrad bpr_with_grad(double s_pos, double s_neg) {
  const double z = s_pos - s_neg;
  const double dz = -sigmoid(-z);
  return {softplus(-z), dz, -dz};
}

void gcn_backward(const ForwardCache& cache, const GnnParameters& params,
                  std::span<const double> d_pooled, GnnGradients& grads) {
  const std::size_t layers = params.weights.size();
  if (cache.generation != params.generation || cache.inputs.size() != layers ||
      cache.pre.size() != layers) {
    throw ContractViolation("forward cache is stale for these parameters");
  }
  if (grads.weights.size() != layers) throw ContractViolation("gradient buffer shape mismatch");
  const std::size_t k = cache.a_norm.rows();
  const std::size_t width = params.weights.back().cols();
  if (d_pooled.size() != width) throw ContractViolation("pooled gradient length mismatch");

  // Sum pooling broadcasts the pooled gradient to every node row.
  Matrix d_out(k, width);
  for (std::size_t r = 0; r < k; ++r) {
    auto row = d_out.row(r);
    std::copy(d_pooled.begin(), d_pooled.end(), row.begin());
  }

  for (std::size_t l = layers; l-- > 0;) {
    Matrix dz = std::move(d_out);
    if (l + 1 < layers) {
      const auto pre = cache.pre[l].values();
      auto g = dz.values();
      for (std::size_t j = 0; j < g.size(); ++j) g[j] *= activate_grad(params.activation, pre[j]);
    }
    // Z = A (X W) with A symmetric: dW = X^T (A dZ), dX = (A dZ) W^T.
    Matrix a_dz = matmul(cache.a_norm, dz);
    axpy(1.0, matmul_tn(cache.inputs[l], a_dz), grads.weights[l]);
    if (l > 0) d_out = matmul_nt(a_dz, params.weights[l]);
  }
}

ScoredGraph score_graph(const LocalizedGraph& labeled, const GnnParameters& params,
                        const LabelEncoding& enc) {
  ScoredGraph s;
  const Matrix features = one_hot_features(labeled.labels, enc);
  s.gcn = gcn_forward(features, normalize_adjacency(labeled), params);
  s.pooled = sum_pool(s.gcn.output);
  s.logit = dot(s.pooled, params.scoring);
  s.score = sigmoid(s.logit);
  return s;
}

void backward_score(const ScoredGraph& scored, const GnnParameters& params, double d_score,
                    GnnGradients& grads) {
  const double d_logit = d_score * scored.score * (1.0 - scored.score);
  std::vector<double> d_pooled(params.scoring.size());
  for (std::size_t j = 0; j < d_pooled.size(); ++j) {
    grads.scoring[j] += d_logit * scored.pooled[j];
    d_pooled[j] = d_logit * params.scoring[j];
  }
  gcn_backward(scored.gcn.cache, params, d_pooled, grads);
}

}  // namespace lgcf
