#pragma once

#include <cstdint>
#include <vector>

#include "shiftconv/types.hpp"

namespace shiftconv {

// Single-hidden-layer tanh MLP with softmax outputs, trained by full-batch
// gradient descent on mean cross-entropy.
struct MLPClassifier {
  Matrix hidden_weights;             // hidden x features
  std::vector<double> hidden_bias;
  Matrix output_weights;             // classes x hidden
  std::vector<double> output_bias;
  // Feature standardization fitted on the training subset.
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
};

struct MLPConfig {
  std::size_t hidden_units = 30;
  double learning_rate = 0.5;
  std::size_t max_epochs = 500;
  std::size_t patience = 10;  // epochs without validation improvement
};

std::size_t predict(const MLPClassifier& mlp, const double* features);

struct SplitSpec {
  enum class Kind { kHoldOut, kKFold };
  Kind kind = Kind::kHoldOut;
  double train_fraction = 0.6;       // hold-out
  std::size_t folds = 10;            // k-fold
  double validation_fraction = 0.1;  // carved from the training portion
  std::uint64_t seed = 0;
};

struct ClassifierResult {
  double error = 0.0;                // test error fraction (mean over folds)
  std::vector<double> fold_errors;   // one entry for hold-out
};

// Trains the MLP on the training subset (with a validation subset for early
// stopping) and reports the test error fraction. Hold-out: one split by
// train_fraction, validation carved out of the training portion. K-fold: each
// fold is the test set once, validation taken from the remaining data.
// Throws InvalidSplitError when any subset comes out empty.
ClassifierResult train_classifier(const Matrix& features,
                                  const std::vector<std::size_t>& labels,
                                  std::size_t num_classes, const SplitSpec& split,
                                  const MLPConfig& config = {});

}  // namespace shiftconv
