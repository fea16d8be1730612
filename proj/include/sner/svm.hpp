#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sner/corpus.hpp"
#include "sner/crf.hpp"
#include "sner/features.hpp"

namespace sner {

struct SvmTrainConfig {
  double c = 1.0;
  double tolerance = 1e-4;
  int max_epochs = 1000;
  std::size_t window = kDefaultWindow;
  std::uint64_t seed = 1;
  ExecutionMode mode = ExecutionMode::Serial;
};

// One binary problem solved in the dual:
//   min_a  1/2 |sum_i a_i y_i x_i|^2 - sum_i a_i,  0 <= a_i <= C
// with x_i augmented by a constant 1 for the bias. Coordinates are visited in
// a PortableRng permutation per epoch, with liblinear-style shrinking.
struct BinarySvmSolution {
  std::vector<double> weights;
  double bias = 0.0;
  int epochs = 0;
  // Dual objective after each epoch; non-increasing.
  std::vector<double> dual_objective;
};

BinarySvmSolution solve_binary_svm(std::span<const SparseVector> x, std::span<const int> y,
                                   std::size_t dimension, double c, double tolerance,
                                   int max_epochs, std::uint64_t seed);

// Primal objective 1/2 |w|^2 + 1/2 b^2 + C * sum hinge.
double svm_primal_objective(std::span<const SparseVector> x, std::span<const int> y,
                            std::span<const double> w, double bias, double c);

// One-vs-rest linear classifier over the 11 scheme labels.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(FeatureIndex index, Scaler scaler, SvmTrainConfig config);

  std::size_t num_features() const { return index_.size(); }
  const FeatureIndex& index() const { return index_; }
  const Scaler& scaler() const { return scaler_; }
  const SvmTrainConfig& config() const { return config_; }

  std::span<double> weights(std::size_t label) { return weights_[label]; }
  std::span<const double> weights(std::size_t label) const { return weights_[label]; }
  double& bias(std::size_t label) { return bias_[label]; }
  double bias(std::size_t label) const { return bias_[label]; }

  // Decision values of all labels for an already scaled vector.
  std::vector<double> scores(const SparseVector& scaled) const;

  // Argmax per token, lowest label index on ties. No sequence constraint.
  std::vector<Label> predict(std::span<const std::string> surfaces) const;

 private:
  FeatureIndex index_;
  Scaler scaler_;
  SvmTrainConfig config_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
};

struct SvmTrainResult {
  LinearModel model;
  std::vector<BinarySvmSolution> solutions;  // per label, in index order
};

SvmTrainResult train_svm(const Corpus& train, const SvmTrainConfig& config = {});

// When repair is set, corpus-level BIO repair is applied to the output.
std::vector<Label> predict_tags(const LinearModel& model, std::span<const std::string> surfaces,
                                bool repair = false);

}  // namespace sner
