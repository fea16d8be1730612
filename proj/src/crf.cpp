#include "sner/crf.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

#include "sner/error.hpp"

namespace sner {

CrfModel::CrfModel(std::vector<std::string> labels, FeatureIndex index, CrfTrainConfig config)
    : labels_(std::move(labels)), index_(std::move(index)), config_(config) {
  index_.freeze();
  weights_.assign(num_features() * num_labels() + num_labels() * num_labels(), 0.0);
}

void CrfModel::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) {
    throw DataError("weight vector has " + std::to_string(weights.size()) + " entries, expected " +
                    std::to_string(weights_.size()));
  }
  weights_ = std::move(weights);
}

std::vector<std::optional<Label>> CrfModel::scheme_labels() const {
  std::vector<std::optional<Label>> out;
  out.reserve(labels_.size());
  for (const auto& name : labels_) out.push_back(Label::parse(name));
  return out;
}

std::vector<Label> CrfModel::tag(std::span<const std::string> surfaces, bool constrain_bio) const {
  if (surfaces.empty()) return {};
  const auto features = sentence_features(surfaces, config_.window);
  const auto decoded = viterbi_decode(*this, features, constrain_bio);
  const auto scheme = scheme_labels();
  std::vector<Label> out;
  out.reserve(decoded.labels.size());
  for (std::size_t id : decoded.labels) {
    if (!scheme[id]) throw DataError("model label '" + labels_[id] + "' is not a scheme tag");
    out.push_back(*scheme[id]);
  }
  return out;
}

std::vector<SparseVector> vectorize_positions(const FeatureIndex& index,
                                              std::span<const FeatureSet> features) {
  std::vector<SparseVector> out;
  out.reserve(features.size());
  for (const auto& fs : features) out.push_back(index.vectorize(fs));
  return out;
}

Lattice build_lattice(const CrfModel& model, std::span<const SparseVector> positions) {
  const std::size_t L = model.num_labels();
  Lattice lat(positions.size(), L);
  const auto w = model.weights();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (const auto& e : positions[i]) {
      const double* row = &w[static_cast<std::size_t>(e.index) * L];
      for (std::size_t y = 0; y < L; ++y) lat.emit(i, y) += e.value * row[y];
    }
  }
  std::copy(w.begin() + static_cast<std::ptrdiff_t>(model.transition_offset()), w.end(),
            lat.transition.begin());
  return lat;
}

Lattice build_lattice(const CrfModel& model, std::span<const FeatureSet> features) {
  const auto positions = vectorize_positions(model.index(), features);
  return build_lattice(model, positions);
}

double nll_and_gradient(const CrfModel& model, const CrfInstance& instance,
                        std::span<double> gradient) {
  const std::size_t n = instance.positions.size();
  if (n == 0) return 0.0;
  const std::size_t L = model.num_labels();
  const std::size_t toff = model.transition_offset();
  const Lattice lat = build_lattice(model, instance.positions);
  const Marginals m = marginals(lat);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t gold = instance.gold[i];
    for (const auto& e : instance.positions[i]) {
      double* row = &gradient[static_cast<std::size_t>(e.index) * L];
      for (std::size_t y = 0; y < L; ++y) row[y] += e.value * m.node_at(i, y);
      row[gold] -= e.value;
    }
    if (i == 0) continue;
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t b = 0; b < L; ++b) gradient[toff + a * L + b] += m.edge_at(i, a, b);
    }
    gradient[toff + instance.gold[i - 1] * L + gold] -= 1.0;
  }
  return m.log_z - path_score(lat, instance.gold);
}

double corpus_nll_and_gradient(const CrfModel& model, std::span<const CrfInstance> instances,
                               std::span<double> gradient, ExecutionMode mode) {
  std::fill(gradient.begin(), gradient.end(), 0.0);
  if (mode == ExecutionMode::Serial) {
    double total = 0.0;
    for (const auto& inst : instances) total += nll_and_gradient(model, inst, gradient);
    return total;
  }

  const int threads = omp_get_max_threads();
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(threads));
  std::vector<double> partial_nll(static_cast<std::size_t>(threads), 0.0);
  const auto count = static_cast<std::ptrdiff_t>(instances.size());
#pragma omp parallel num_threads(threads)
  {
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    partial[t].assign(gradient.size(), 0.0);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      partial_nll[t] += nll_and_gradient(model, instances[static_cast<std::size_t>(i)], partial[t]);
    }
  }
  double total = 0.0;
  for (std::size_t t = 0; t < partial.size(); ++t) {
    total += partial_nll[t];
    for (std::size_t k = 0; k < gradient.size(); ++k) gradient[k] += partial[t][k];
  }
  return total;
}

CrfTrainResult train_crf(CrfModel initial, std::span<const CrfInstance> instances) {
  if (instances.empty()) throw DataError("cannot train a CRF on an empty corpus");
  CrfModel model = std::move(initial);
  const CrfTrainConfig config = model.config();
  const double l2 = config.l2;

  const SmoothObjective objective = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), model.weights().begin());
    double value = corpus_nll_and_gradient(model, instances, grad, config.mode);
    if (l2 > 0.0) {
      double sq = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        sq += x[k] * x[k];
        grad[k] += l2 * x[k];
      }
      value += 0.5 * l2 * sq;
    }
    return value;
  };

  QuasiNewtonOptions options;
  options.l1 = config.l1;
  options.max_iterations = config.max_iterations;
  options.tolerance = config.tolerance;
  options.history = config.history;

  auto result = minimize_quasi_newton(objective, std::vector<double>(model.num_weights(), 0.0),
                                      options);
  model.set_weights(result.x);
  return CrfTrainResult{std::move(model), std::move(result)};
}

CrfTrainResult train_crf(const Corpus& train, const CrfTrainConfig& config) {
  if (train.empty()) throw DataError("cannot train a CRF on an empty corpus");
  std::vector<std::vector<FeatureSet>> features;
  features.reserve(train.sentence_count());
  FeatureIndex index;
  for (const auto& sentence : train.sentences) {
    const auto surfaces = sentence.surfaces();
    features.push_back(sentence_features(surfaces, config.window));
    for (const auto& fs : features.back()) index.fit(fs);
  }
  index.freeze();

  std::vector<CrfInstance> instances;
  instances.reserve(train.sentence_count());
  for (std::size_t s = 0; s < train.sentence_count(); ++s) {
    CrfInstance inst;
    inst.positions = vectorize_positions(index, features[s]);
    for (const auto& token : train.sentences[s].tokens) inst.gold.push_back(token.tag.index());
    instances.push_back(std::move(inst));
  }

  std::vector<std::string> labels;
  for (const auto& label : all_labels()) labels.push_back(label.str());
  return train_crf(CrfModel(std::move(labels), std::move(index), config), instances);
}

Decoded viterbi_decode(const CrfModel& model, std::span<const FeatureSet> features,
                       bool constrain_bio) {
  if (features.empty()) return {};
  Lattice lat = build_lattice(model, features);
  if (constrain_bio) {
    const auto scheme = model.scheme_labels();
    apply_bio_mask(lat, scheme);
  }
  auto path = viterbi(lat);
  return Decoded{std::move(path.labels), path.score};
}

}  // namespace sner
