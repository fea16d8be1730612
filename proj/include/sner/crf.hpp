#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sner/corpus.hpp"
#include "sner/features.hpp"
#include "sner/lattice.hpp"
#include "sner/lbfgs.hpp"

namespace sner {

// Serial is the reference: per-instance terms are summed in corpus order.
// Parallel runs the same kernel under OpenMP with one accumulator per thread,
// reduced in thread order; results are reproducible for a fixed thread count
// and agree with Serial up to floating-point reassociation.
enum class ExecutionMode { Serial, Parallel };

struct CrfTrainConfig {
  double l1 = 0.1;
  double l2 = 0.1;
  int max_iterations = 200;
  double tolerance = 1e-5;
  int history = 6;
  std::size_t window = kDefaultWindow;
  ExecutionMode mode = ExecutionMode::Serial;
};

// One training sentence: active feature columns per position and gold label ids.
struct CrfInstance {
  std::vector<SparseVector> positions;
  std::vector<std::size_t> gold;
};

// Weights are stored flat: emission block [feature * L + label] followed by
// the transition block [prev * L + next].
class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(std::vector<std::string> labels, FeatureIndex index, CrfTrainConfig config = {});

  std::size_t num_labels() const { return labels_.size(); }
  std::size_t num_features() const { return index_.size(); }
  std::size_t num_weights() const { return weights_.size(); }
  std::size_t transition_offset() const { return num_features() * num_labels(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const FeatureIndex& index() const { return index_; }
  const CrfTrainConfig& config() const { return config_; }

  std::span<const double> weights() const { return weights_; }
  std::span<double> weights() { return weights_; }
  void set_weights(std::vector<double> weights);

  double& emission(std::size_t feature, std::size_t label) {
    return weights_[feature * num_labels() + label];
  }
  double& transition(std::size_t prev, std::size_t next) {
    return weights_[transition_offset() + prev * num_labels() + next];
  }

  // Labels of the scheme resolved from their names; nullopt for foreign labels.
  std::vector<std::optional<Label>> scheme_labels() const;

  // Extracts features for the surfaces, decodes, and maps ids to labels.
  // Throws DataError if a decoded label is not part of the tag scheme.
  std::vector<Label> tag(std::span<const std::string> surfaces, bool constrain_bio) const;

 private:
  std::vector<std::string> labels_;
  FeatureIndex index_;
  std::vector<double> weights_;
  CrfTrainConfig config_;
};

std::vector<SparseVector> vectorize_positions(const FeatureIndex& index,
                                              std::span<const FeatureSet> features);

Lattice build_lattice(const CrfModel& model, std::span<const SparseVector> positions);
Lattice build_lattice(const CrfModel& model, std::span<const FeatureSet> features);

// Negative log-likelihood of the gold path. The gradient (expected minus
// observed feature counts) is added into `gradient`, which must have
// model.num_weights() entries. No regularization.
double nll_and_gradient(const CrfModel& model, const CrfInstance& instance,
                        std::span<double> gradient);

// Sum over instances, gradient overwritten.
double corpus_nll_and_gradient(const CrfModel& model, std::span<const CrfInstance> instances,
                               std::span<double> gradient, ExecutionMode mode);

struct CrfTrainResult {
  CrfModel model;
  QuasiNewtonResult optimizer;
};

// Minimizes sum(nll) + l1 * |w|_1 + (l2 / 2) * |w|^2 from all-zero weights.
CrfTrainResult train_crf(CrfModel initial, std::span<const CrfInstance> instances);

// Builds the feature index from the corpus and trains over the 11 scheme labels.
CrfTrainResult train_crf(const Corpus& train, const CrfTrainConfig& config = {});

struct Decoded {
  std::vector<std::size_t> labels;
  double score = 0.0;
};

Decoded viterbi_decode(const CrfModel& model, std::span<const FeatureSet> features,
                       bool constrain_bio);

}  // namespace sner
