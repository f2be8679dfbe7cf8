#include "sentinel/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sentinel/rng.hpp"

namespace sentinel {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_labeled(const std::vector<FeatureVector>& data, const char* who) {
  if (data.empty()) throw error(std::string(who) + ": empty dataset");
  const std::size_t dim = data.front().values.size();
  for (const FeatureVector& v : data) {
    if (!v.label) throw error(std::string(who) + ": unlabeled vector in dataset");
    if (*v.label != 1 && *v.label != -1)
      throw error(std::string(who) + ": label must be +1 or -1");
    if (v.values.size() != dim)
      throw error(std::string(who) + ": inconsistent dimensions (" + std::to_string(dim) +
                  " vs " + std::to_string(v.values.size()) + ")");
  }
}

}  // namespace

double LinearModel::margin() const {
  const double norm = std::sqrt(dot(w, w));
  return 2.0 / norm;
}

double hinge_loss(const LinearModel& model, std::span<const double> x, int y) {
  if (x.size() != model.w.size())
    throw error("hinge_loss: dimension mismatch (" + std::to_string(model.w.size()) + " vs " +
                std::to_string(x.size()) + ")");
  if (y != 1 && y != -1) throw error("hinge_loss: label must be +1 or -1");
  return std::max(1.0 - static_cast<double>(y) * (dot(model.w, x) + model.b), 0.0);
}

void hinge_subgradient(const LinearModel& model, std::span<const double> x, int y,
                       std::span<double> grad_w, double& grad_b) {
  if (x.size() != model.w.size() || grad_w.size() != model.w.size())
    throw error("hinge_subgradient: dimension mismatch");
  const double margin = static_cast<double>(y) * (dot(model.w, x) + model.b);
  if (margin < 1.0) {
    for (std::size_t i = 0; i < x.size(); ++i) grad_w[i] = -static_cast<double>(y) * x[i];
    grad_b = -static_cast<double>(y);
  } else {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
  }
}

double objective(const LinearModel& model, const std::vector<FeatureVector>& data) {
  check_labeled(data, "objective");
  double loss_sum = 0.0;
  for (const FeatureVector& v : data) loss_sum += hinge_loss(model, v.values, *v.label);
  const double reg = 0.5 * model.lambda * dot(model.w, model.w);
  return reg + loss_sum / static_cast<double>(data.size());
}

Scaler fit_scaler(const std::vector<FeatureVector>& vectors) {
  if (vectors.size() < 2)
    throw error("fit_scaler: need at least 2 vectors, got " + std::to_string(vectors.size()));
  const std::size_t dim = vectors.front().values.size();
  for (const FeatureVector& v : vectors)
    if (v.values.size() != dim) throw error("fit_scaler: inconsistent dimensions");

  Scaler scaler;
  scaler.mean.assign(dim, 0.0);
  scaler.stddev.assign(dim, 0.0);
  const double n = static_cast<double>(vectors.size());
  for (const FeatureVector& v : vectors)
    for (std::size_t i = 0; i < dim; ++i) scaler.mean[i] += v.values[i];
  for (std::size_t i = 0; i < dim; ++i) scaler.mean[i] /= n;
  for (const FeatureVector& v : vectors)
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = v.values[i] - scaler.mean[i];
      scaler.stddev[i] += d * d;
    }
  for (std::size_t i = 0; i < dim; ++i) {
    scaler.stddev[i] = std::sqrt(scaler.stddev[i] / n);
    if (scaler.stddev[i] <= 0.0) scaler.stddev[i] = 1.0;  // constant feature: center only
  }
  return scaler;
}

FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& v) {
  if (v.values.size() != scaler.mean.size())
    throw error("apply_scaler: dimension mismatch (" + std::to_string(scaler.mean.size()) +
                " vs " + std::to_string(v.values.size()) + ")");
  FeatureVector out;
  out.label = v.label;
  out.values.resize(v.values.size());
  for (std::size_t i = 0; i < v.values.size(); ++i)
    out.values[i] = (v.values[i] - scaler.mean[i]) / scaler.stddev[i];
  return out;
}

std::vector<FeatureVector> apply_scaler(const Scaler& scaler, std::vector<FeatureVector> vs) {
  for (FeatureVector& v : vs) v = apply_scaler(scaler, v);
  return vs;
}

LinearModel train(const std::vector<FeatureVector>& data, double lambda,
                  const SolverConfig& config) {
  check_labeled(data, "train");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw error("train: lambda must be positive");
  bool has_pos = false, has_neg = false;
  for (const FeatureVector& v : data) (*v.label > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw error("train: single-class dataset");
  if (config.epochs == 0) throw error("train: epochs must be positive");

  const std::size_t n = data.size();
  const std::size_t dim = data.front().values.size();

  LinearModel current{std::vector<double>(dim, 0.0), 0.0, lambda};
  LinearModel best = current;
  double best_objective = objective(best, data);

  // eta_t = 1 / (lambda * (t0 + t)); the shift keeps the first steps at
  // scale ~1 instead of 1/lambda.
  const double t0 = config.lr_shift > 0.0 ? config.lr_shift : 1.0 / lambda;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);

  // t-weighted running average of the iterates; on tiny datasets the average
  // settles well inside the last-iterate noise ball, so it competes with the
  // epoch-end iterate for the pocket.
  LinearModel averaged = current;
  double weight_sum = 0.0;

  double t = 0.0;
  std::size_t stalled = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      t += 1.0;
      const double eta = 1.0 / (lambda * (t0 + t));
      const FeatureVector& v = data[idx];
      const double y = static_cast<double>(*v.label);
      const double score = dot(current.w, v.values) + current.b;
      const double shrink = 1.0 - eta * lambda;  // always in (0, 1)
      if (y * score < 1.0) {
        for (std::size_t i = 0; i < dim; ++i)
          current.w[i] = shrink * current.w[i] + eta * y * v.values[i];
        current.b += eta * y;
      } else {
        for (std::size_t i = 0; i < dim; ++i) current.w[i] *= shrink;
      }
      weight_sum += t;
      const double blend = t / weight_sum;
      for (std::size_t i = 0; i < dim; ++i)
        averaged.w[i] += (current.w[i] - averaged.w[i]) * blend;
      averaged.b += (current.b - averaged.b) * blend;
    }
    double improvement = 0.0;
    for (const LinearModel* candidate : {&current, &averaged}) {
      const double obj = objective(*candidate, data);
      if (obj < best_objective) {
        improvement = std::max(improvement, best_objective - obj);
        best = *candidate;
        best_objective = obj;
      }
    }
    if (config.tolerance > 0.0) {
      if (improvement < config.tolerance) {
        if (++stalled >= config.patience) break;
      } else {
        stalled = 0;
      }
    }
  }
  return best;
}

Prediction predict(const LinearModel& model, std::span<const double> x) {
  if (x.size() != model.w.size())
    throw error("predict: dimension mismatch (" + std::to_string(model.w.size()) + " vs " +
                std::to_string(x.size()) + ")");
  Prediction p;
  p.score = dot(model.w, x) + model.b;
  p.label = p.score > 0.0 ? 1 : -1;  // ties reject
  return p;
}

}  // namespace sentinel
