#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sentinel/core.hpp"

namespace sentinel {

/// Linear classifier w.x + b with the regularization weight it was trained
/// under. The bias is kept out of the regularizer.
struct LinearModel {
  std::vector<double> w;
  double b = 0.0;
  double lambda = 0.0;

  /// Separator margin 2/|w|. Only meaningful for |w| > 0.
  double margin() const;
};

/// Per-feature standardization statistics fitted on training data.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;  // population std; zero-variance features clamp to 1
};

/// Solver knobs. Identical (data, config) always yields an identical model.
struct SolverConfig {
  std::size_t epochs = 200;
  std::uint64_t seed = 1;
  /// Early-stop threshold on per-epoch improvement of the best objective
  /// seen so far; 0 disables early stopping.
  double tolerance = 1e-8;
  /// Epochs without sufficient improvement tolerated before stopping.
  std::size_t patience = 10;
  /// Shift t0 in the step size eta_t = 1 / (lambda * (t0 + t)).
  /// 0 selects t0 = 1/lambda, i.e. eta_t = 1 / (1 + lambda*t).
  double lr_shift = 0.0;
};

struct Prediction {
  int label = -1;   // +1 accept, -1 reject
  double score = 0; // w.x + b
};

/// Hinge loss max(1 - y*(w.x + b), 0). y must be +1 or -1.
double hinge_loss(const LinearModel& model, std::span<const double> x, int y);

/// Subgradient of hinge_loss at (x, y) with respect to (w, b); regularizer
/// excluded. grad_w must have the model's dimension.
void hinge_subgradient(const LinearModel& model, std::span<const double> x, int y,
                       std::span<double> grad_w, double& grad_b);

/// Regularized primal objective: (lambda/2)*|w|^2 + mean hinge loss.
/// Every vector must be labeled; throws on an empty dataset.
double objective(const LinearModel& model, const std::vector<FeatureVector>& data);

/// Fits per-feature mean and population std on >= 2 vectors.
/// Zero-variance features get std clamped to 1 (centering only).
Scaler fit_scaler(const std::vector<FeatureVector>& vectors);

/// Affine per-feature transform (x - mean) / std. Label passes through.
FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& v);
std::vector<FeatureVector> apply_scaler(const Scaler& scaler, std::vector<FeatureVector> vs);

/// Minimizes the primal objective by deterministic epoch-based stochastic
/// subgradient descent with seeded shuffling; the returned model is the
/// best-objective iterate observed at epoch boundaries (pocket rule).
/// Requires both labels present in `data` and lambda > 0.
LinearModel train(const std::vector<FeatureVector>& data, double lambda,
                  const SolverConfig& config = {});

/// score = w.x + b; label = sign(score) with ties (score == 0) rejected.
Prediction predict(const LinearModel& model, std::span<const double> x);

}  // namespace sentinel
