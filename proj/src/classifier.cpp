#include "shiftconv/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shiftconv/errors.hpp"
#include "shiftconv/rng.hpp"

namespace shiftconv {

namespace {

struct Subsets {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

void check_subsets(const Subsets& s) {
  if (s.train.empty() || s.validation.empty() || s.test.empty()) {
    throw InvalidSplitError("split produced an empty subset");
  }
}

std::size_t clamped_count(double fraction, std::size_t total) {
  const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  return std::min(std::max<std::size_t>(n, 1), total);
}

// Standardization fitted on the training subset; constant features pass
// through unscaled.
void fit_standardizer(const Matrix& features, const std::vector<std::size_t>& rows,
                      std::vector<double>& mean, std::vector<double>& scale) {
  const std::size_t dim = features.cols;
  mean.assign(dim, 0.0);
  scale.assign(dim, 1.0);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < dim; ++j) mean[j] += features(r, j);
  }
  for (double& m : mean) m /= static_cast<double>(rows.size());
  std::vector<double> var(dim, 0.0);
  for (std::size_t r : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = features(r, j) - mean[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(rows.size()));
    if (sd > 1e-12) scale[j] = sd;
  }
}

struct MLPWorkspace {
  std::vector<double> input;   // standardized features of one sample
  std::vector<double> hidden;  // tanh activations
  std::vector<double> logits;
  std::vector<double> probs;
};

void forward_mlp(const MLPClassifier& mlp, const double* raw, MLPWorkspace& ws) {
  const std::size_t dim = mlp.hidden_weights.cols;
  const std::size_t nh = mlp.hidden_weights.rows;
  const std::size_t nc = mlp.output_weights.rows;
  ws.input.resize(dim);
  ws.hidden.resize(nh);
  ws.logits.resize(nc);
  ws.probs.resize(nc);
  for (std::size_t j = 0; j < dim; ++j) {
    ws.input[j] = (raw[j] - mlp.feature_mean[j]) / mlp.feature_scale[j];
  }
  for (std::size_t i = 0; i < nh; ++i) {
    double acc = mlp.hidden_bias[i];
    const double* row = mlp.hidden_weights.data.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) acc += row[j] * ws.input[j];
    ws.hidden[i] = std::tanh(acc);
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nc; ++k) {
    double acc = mlp.output_bias[k];
    const double* row = mlp.output_weights.data.data() + k * nh;
    for (std::size_t i = 0; i < nh; ++i) acc += row[i] * ws.hidden[i];
    ws.logits[k] = acc;
    max_logit = std::max(max_logit, acc);
  }
  double z = 0.0;
  for (std::size_t k = 0; k < nc; ++k) {
    ws.probs[k] = std::exp(ws.logits[k] - max_logit);
    z += ws.probs[k];
  }
  for (double& p : ws.probs) p /= z;
}

double mean_cross_entropy(const MLPClassifier& mlp, const Matrix& features,
                          const std::vector<std::size_t>& labels,
                          const std::vector<std::size_t>& rows, MLPWorkspace& ws) {
  double ce = 0.0;
  for (std::size_t r : rows) {
    forward_mlp(mlp, features.data.data() + r * features.cols, ws);
    ce += -std::log(std::max(ws.probs[labels[r]], 1e-300));
  }
  return ce / static_cast<double>(rows.size());
}

double error_fraction(const MLPClassifier& mlp, const Matrix& features,
                      const std::vector<std::size_t>& labels,
                      const std::vector<std::size_t>& rows, MLPWorkspace& ws) {
  std::size_t wrong = 0;
  for (std::size_t r : rows) {
    forward_mlp(mlp, features.data.data() + r * features.cols, ws);
    std::size_t best = 0;
    for (std::size_t k = 1; k < ws.probs.size(); ++k) {
      if (ws.probs[k] > ws.probs[best]) best = k;
    }
    if (best != labels[r]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(rows.size());
}

MLPClassifier init_mlp(Rng& rng, std::size_t dim, std::size_t hidden, std::size_t classes) {
  MLPClassifier mlp;
  mlp.hidden_weights = Matrix(hidden, dim);
  mlp.hidden_bias.assign(hidden, 0.0);
  mlp.output_weights = Matrix(classes, hidden);
  mlp.output_bias.assign(classes, 0.0);
  for (double& v : mlp.hidden_weights.data) v = rng.uniform(-0.1, 0.1);
  for (double& v : mlp.output_weights.data) v = rng.uniform(-0.1, 0.1);
  mlp.feature_mean.assign(dim, 0.0);
  mlp.feature_scale.assign(dim, 1.0);
  return mlp;
}

// Full-batch gradient descent on mean cross-entropy over the training rows,
// keeping the parameters that scored best on the validation rows.
MLPClassifier fit_mlp(const Matrix& features, const std::vector<std::size_t>& labels,
                      std::size_t num_classes, const Subsets& subsets,
                      const MLPConfig& config, std::uint64_t seed) {
  const std::size_t dim = features.cols;
  Rng rng(seed);
  MLPClassifier mlp = init_mlp(rng, dim, config.hidden_units, num_classes);
  fit_standardizer(features, subsets.train, mlp.feature_mean, mlp.feature_scale);

  MLPWorkspace ws;
  MLPClassifier best = mlp;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  const double inv_n = 1.0 / static_cast<double>(subsets.train.size());

  Matrix g_w1(config.hidden_units, dim);
  std::vector<double> g_b1(config.hidden_units);
  Matrix g_w2(num_classes, config.hidden_units);
  std::vector<double> g_b2(num_classes);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::fill(g_w1.data.begin(), g_w1.data.end(), 0.0);
    std::fill(g_b1.begin(), g_b1.end(), 0.0);
    std::fill(g_w2.data.begin(), g_w2.data.end(), 0.0);
    std::fill(g_b2.begin(), g_b2.end(), 0.0);

    for (std::size_t r : subsets.train) {
      forward_mlp(mlp, features.data.data() + r * dim, ws);
      // d(mean CE)/d(logit k) = (p_k - 1[k == label]) / n
      std::vector<double> g_logit(num_classes);
      for (std::size_t k = 0; k < num_classes; ++k) {
        g_logit[k] = (ws.probs[k] - (labels[r] == k ? 1.0 : 0.0)) * inv_n;
      }
      for (std::size_t k = 0; k < num_classes; ++k) {
        g_b2[k] += g_logit[k];
        double* row = g_w2.data.data() + k * config.hidden_units;
        for (std::size_t i = 0; i < config.hidden_units; ++i) {
          row[i] += g_logit[k] * ws.hidden[i];
        }
      }
      for (std::size_t i = 0; i < config.hidden_units; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < num_classes; ++k) {
          acc += mlp.output_weights(k, i) * g_logit[k];
        }
        const double g_pre = acc * (1.0 - ws.hidden[i] * ws.hidden[i]);
        g_b1[i] += g_pre;
        double* row = g_w1.data.data() + i * dim;
        for (std::size_t j = 0; j < dim; ++j) row[j] += g_pre * ws.input[j];
      }
    }

    const double lr = config.learning_rate;
    for (std::size_t e = 0; e < mlp.hidden_weights.data.size(); ++e) {
      mlp.hidden_weights.data[e] -= lr * g_w1.data[e];
    }
    for (std::size_t i = 0; i < config.hidden_units; ++i) mlp.hidden_bias[i] -= lr * g_b1[i];
    for (std::size_t e = 0; e < mlp.output_weights.data.size(); ++e) {
      mlp.output_weights.data[e] -= lr * g_w2.data[e];
    }
    for (std::size_t k = 0; k < num_classes; ++k) mlp.output_bias[k] -= lr * g_b2[k];

    const double val = mean_cross_entropy(mlp, features, labels, subsets.validation, ws);
    if (val + 1e-12 < best_val) {
      best_val = val;
      best = mlp;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return best;
}

}  // namespace

std::size_t predict(const MLPClassifier& mlp, const double* features) {
  MLPWorkspace ws;
  forward_mlp(mlp, features, ws);
  std::size_t best = 0;
  for (std::size_t k = 1; k < ws.probs.size(); ++k) {
    if (ws.probs[k] > ws.probs[best]) best = k;
  }
  return best;
}

ClassifierResult train_classifier(const Matrix& features,
                                  const std::vector<std::size_t>& labels,
                                  std::size_t num_classes, const SplitSpec& split,
                                  const MLPConfig& config) {
  if (features.rows != labels.size()) {
    throw InvalidInputError("feature/label row count mismatch");
  }
  if (num_classes < 2) throw InvalidInputError("need at least two classes");
  for (std::size_t l : labels) {
    if (l >= num_classes) throw InvalidInputError("label out of range");
  }
  const std::size_t n = features.rows;
  if (n < 3) throw InvalidSplitError("too few samples to split");

  Rng rng(split.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  ClassifierResult result;
  MLPWorkspace ws;

  if (split.kind == SplitSpec::Kind::kHoldOut) {
    if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
      throw InvalidSplitError("train fraction must lie in (0, 1)");
    }
    const std::size_t n_train_total = clamped_count(split.train_fraction, n);
    if (n_train_total >= n) throw InvalidSplitError("hold-out test set is empty");
    Subsets subsets;
    // Validation for early stopping comes out of the training portion.
    const std::size_t n_val = clamped_count(0.15, n_train_total);
    if (n_val >= n_train_total) throw InvalidSplitError("hold-out training set too small");
    subsets.validation.assign(order.begin(), order.begin() + n_val);
    subsets.train.assign(order.begin() + n_val, order.begin() + n_train_total);
    subsets.test.assign(order.begin() + n_train_total, order.end());
    check_subsets(subsets);

    const MLPClassifier mlp =
        fit_mlp(features, labels, num_classes, subsets, config, split.seed + 1);
    result.error = error_fraction(mlp, features, labels, subsets.test, ws);
    result.fold_errors.push_back(result.error);
    return result;
  }

  // k-fold: fold f is the test set; validation comes from the remaining data.
  const std::size_t k = split.folds;
  if (k < 2) throw InvalidSplitError("k-fold needs k >= 2");
  if (k > n) throw InvalidSplitError("more folds than samples");
  if (!(split.validation_fraction > 0.0 && split.validation_fraction < 1.0)) {
    throw InvalidSplitError("validation fraction must lie in (0, 1)");
  }

  double error_sum = 0.0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    const std::size_t begin = fold * n / k;
    const std::size_t end = (fold + 1) * n / k;
    if (begin == end) throw InvalidSplitError("empty fold");
    Subsets subsets;
    subsets.test.assign(order.begin() + begin, order.begin() + end);
    std::vector<std::size_t> rest;
    rest.reserve(n - (end - begin));
    rest.insert(rest.end(), order.begin(), order.begin() + begin);
    rest.insert(rest.end(), order.begin() + end, order.end());
    const std::size_t n_val = clamped_count(split.validation_fraction, n);
    if (n_val >= rest.size()) throw InvalidSplitError("validation subset swallows the training data");
    subsets.validation.assign(rest.begin(), rest.begin() + n_val);
    subsets.train.assign(rest.begin() + n_val, rest.end());
    check_subsets(subsets);

    const MLPClassifier mlp =
        fit_mlp(features, labels, num_classes, subsets, config, split.seed + 1 + fold);
    const double err = error_fraction(mlp, features, labels, subsets.test, ws);
    result.fold_errors.push_back(err);
    error_sum += err;
  }
  result.error = error_sum / static_cast<double>(k);
  return result;
}

}  // namespace shiftconv
