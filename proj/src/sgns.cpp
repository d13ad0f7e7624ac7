// Negative-sampling objective: the double-precision reference step, the
// float SGD step used by training, and the noise distribution.
#include <algorithm>
#include <cmath>

#include "chainmwe/error.hpp"
#include "chainmwe/trainer.hpp"

namespace chainmwe {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

}  // namespace

SgnsGradients step_loss_and_grads(const SgnsSample& sample, const Matrix<double>& input,
                                  const Matrix<double>& output) {
  const std::size_t dim = input.cols;
  const double inv_ctx = 1.0 / static_cast<double>(sample.inputs.size());
  std::vector<double> h(dim, 0.0);
  for (auto r : sample.inputs) {
    auto v = input.row(r);
    for (std::size_t d = 0; d < dim; ++d) h[d] += v[d];
  }
  for (double& x : h) x *= inv_ctx;

  SgnsGradients g;
  g.grad_h.assign(dim, 0.0);
  auto visit = [&](std::uint32_t row, double label) {
    auto u = output.row(row);
    double x = 0.0;
    for (std::size_t d = 0; d < dim; ++d) x += u[d] * h[d];
    g.loss += label > 0.0 ? softplus(-x) : softplus(x);
    const double coeff = sigmoid(x) - label;  // dL/dx
    auto& gu = g.output_grads[row];
    gu.resize(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
      gu[d] += coeff * h[d];
      g.grad_h[d] += coeff * u[d];
    }
  };
  visit(sample.positive, 1.0);
  for (auto n : sample.negatives) visit(n, 0.0);

  for (auto r : sample.inputs) {
    auto& gi = g.input_grads[r];
    gi.resize(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) gi[d] += g.grad_h[d] * inv_ctx;
  }
  return g;
}

double sgd_update(const SgnsSample& sample, Matrix<float>& input, Matrix<float>& output, float lr,
                  SgdWorkspace& ws, const kernels::KernelTable& k) {
  const std::size_t dim = input.cols;
  float* h = ws.hidden.data();
  float* grad = ws.grad.data();
  std::fill_n(h, dim, 0.0f);
  std::fill_n(grad, dim, 0.0f);
  for (auto r : sample.inputs) k.axpy(1.0f, input.row(r).data(), h, dim);
  const float inv_ctx = 1.0f / static_cast<float>(sample.inputs.size());
  if (sample.inputs.size() > 1) k.scale(inv_ctx, h, dim);

  double loss = 0.0;
  auto visit = [&](std::uint32_t row, float label) {
    float* u = output.row(row).data();
    const float x = k.dot(u, h, dim);
    loss += label > 0.0f ? softplus(-static_cast<double>(x)) : softplus(static_cast<double>(x));
    const float step = (label - sigmoidf(x)) * lr;  // -lr * dL/dx
    k.axpy(step, u, grad, dim);
    k.axpy(step, h, u, dim);
  };
  visit(sample.positive, 1.0f);
  for (auto n : sample.negatives) visit(n, 0.0f);

  if (sample.inputs.size() > 1) k.scale(inv_ctx, grad, dim);
  for (auto r : sample.inputs) k.axpy(1.0f, grad, input.row(r).data(), dim);
  return loss;
}

UnigramTable::UnigramTable(const Vocabulary& vocab, double exponent, std::size_t table_size) {
  if (vocab.empty()) throw EmptyVocabularyError("cannot build a sampling table for an empty vocabulary");
  if (table_size == 0) throw ConfigError("table_size must be positive");
  std::vector<double> weight(vocab.size());
  double z = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    weight[i] = std::pow(static_cast<double>(vocab[i].count), exponent);
    z += weight[i];
  }
  // Word i owns [round(T*cum_{i-1}), round(T*cum_i)), so each share is within
  // one slot of its exact expectation.
  slots_.resize(table_size);
  double cum = 0.0;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    cum += weight[i];
    std::size_t end = i + 1 == vocab.size()
                          ? table_size
                          : std::min(table_size, static_cast<std::size_t>(std::llround(cum / z * table_size)));
    for (std::size_t s = begin; s < end; ++s) slots_[s] = static_cast<std::uint32_t>(i);
    begin = std::max(begin, end);
  }
}

std::size_t UnigramTable::share(std::uint32_t word) const {
  return static_cast<std::size_t>(std::count(slots_.begin(), slots_.end(), word));
}

}  // namespace chainmwe
