#include "sner/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sner/error.hpp"
#include "sner/rng.hpp"

namespace sner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dual_objective(std::span<const double> w, double bias, std::span<const double> alpha) {
  double sq = bias * bias;
  for (double v : w) sq += v * v;
  double sum = 0.0;
  for (double a : alpha) sum += a;
  return 0.5 * sq - sum;
}

}  // namespace

BinarySvmSolution solve_binary_svm(std::span<const SparseVector> x, std::span<const int> y,
                                   std::size_t dimension, double c, double tolerance,
                                   int max_epochs, std::uint64_t seed) {
  const std::size_t l = x.size();
  BinarySvmSolution sol;
  sol.weights.assign(dimension, 0.0);
  std::vector<double> alpha(l, 0.0);
  std::vector<double> qd(l);
  std::vector<std::size_t> order(l);
  for (std::size_t i = 0; i < l; ++i) {
    double q = 1.0;  // bias column
    for (const auto& e : x[i]) q += e.value * e.value;
    qd[i] = q;
    order[i] = i;
  }

  PortableRng rng(seed);
  std::size_t active = l;
  double pg_max_old = kInf;
  double pg_min_old = -kInf;
  auto& w = sol.weights;

  while (sol.epochs < max_epochs) {
    double pg_max_new = -kInf;
    double pg_min_new = kInf;
    for (std::size_t i = 0; i + 1 < active; ++i) {
      std::swap(order[i], order[i + rng.bounded(active - i)]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = order[s];
      const double yi = y[i];
      const double g = yi * (dot(x[i], w) + sol.bias) - 1.0;

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          std::swap(order[s], order[--active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == c) {
        if (g < pg_min_old) {
          std::swap(order[s], order[--active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max_new = std::max(pg_max_new, pg);
      pg_min_new = std::min(pg_min_new, pg);

      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qd[i], 0.0), c);
        const double delta = (alpha[i] - old) * yi;
        for (const auto& e : x[i]) w[e.index] += delta * e.value;
        sol.bias += delta;
      }
    }
    ++sol.epochs;
    sol.dual_objective.push_back(dual_objective(w, sol.bias, alpha));

    if (pg_max_new - pg_min_new <= tolerance) {
      if (active == l) break;
      active = l;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max_new <= 0.0 ? kInf : pg_max_new;
    pg_min_old = pg_min_new >= 0.0 ? -kInf : pg_min_new;
  }
  return sol;
}

double svm_primal_objective(std::span<const SparseVector> x, std::span<const int> y,
                            std::span<const double> w, double bias, double c) {
  double sq = bias * bias;
  for (double v : w) sq += v * v;
  double hinge = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    hinge += std::max(0.0, 1.0 - y[i] * (dot(x[i], w) + bias));
  }
  return 0.5 * sq + c * hinge;
}

LinearModel::LinearModel(FeatureIndex index, Scaler scaler, SvmTrainConfig config)
    : index_(std::move(index)),
      scaler_(std::move(scaler)),
      config_(config),
      weights_(kNumLabels, std::vector<double>(index_.size(), 0.0)),
      bias_(kNumLabels, 0.0) {
  index_.freeze();
}

std::vector<double> LinearModel::scores(const SparseVector& scaled) const {
  std::vector<double> out(kNumLabels);
  for (std::size_t y = 0; y < kNumLabels; ++y) out[y] = dot(scaled, weights_[y]) + bias_[y];
  return out;
}

std::vector<Label> LinearModel::predict(std::span<const std::string> surfaces) const {
  std::vector<Label> out;
  out.reserve(surfaces.size());
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    const auto scaled = scaler_.apply(index_.vectorize(token_features(surfaces, i, config_.window)));
    const auto s = scores(scaled);
    std::size_t best = 0;
    for (std::size_t y = 1; y < s.size(); ++y) {
      if (s[y] > s[best]) best = y;
    }
    out.push_back(Label::from_index(best));
  }
  return out;
}

SvmTrainResult train_svm(const Corpus& train, const SvmTrainConfig& config) {
  if (train.empty()) throw DataError("cannot train an SVM on an empty corpus");
  if (!(config.c > 0.0)) throw UsageError("SVM C must be positive");

  std::vector<FeatureSet> features;
  std::vector<std::size_t> gold;
  features.reserve(train.token_count());
  FeatureIndex index;
  for (const auto& sentence : train.sentences) {
    const auto surfaces = sentence.surfaces();
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      features.push_back(token_features(surfaces, i, config.window));
      index.fit(features.back());
      gold.push_back(sentence.tokens[i].tag.index());
    }
  }
  index.freeze();

  std::vector<SparseVector> vectors;
  vectors.reserve(features.size());
  for (const auto& fs : features) vectors.push_back(index.vectorize(fs));
  features.clear();
  Scaler scaler = Scaler::fit(vectors, index.size());
  for (auto& v : vectors) v = scaler.apply(v);

  SvmTrainResult result{LinearModel(index, scaler, config),
                        std::vector<BinarySvmSolution>(kNumLabels)};
  const auto solve = [&](std::size_t label) {
    std::vector<int> y(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) y[i] = gold[i] == label ? 1 : -1;
    result.solutions[label] = solve_binary_svm(vectors, y, index.size(), config.c,
                                               config.tolerance, config.max_epochs,
                                               config.seed + label);
  };
  if (config.mode == ExecutionMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t label = 0; label < kNumLabels; ++label) solve(label);
  } else {
    for (std::size_t label = 0; label < kNumLabels; ++label) solve(label);
  }

  for (std::size_t label = 0; label < kNumLabels; ++label) {
    auto& sol = result.solutions[label];
    std::copy(sol.weights.begin(), sol.weights.end(), result.model.weights(label).begin());
    result.model.bias(label) = sol.bias;
  }
  return result;
}

std::vector<Label> predict_tags(const LinearModel& model, std::span<const std::string> surfaces,
                                bool repair) {
  auto tags = model.predict(surfaces);
  return repair ? repair_bio(std::move(tags)) : tags;
}

}  // namespace sner
