#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sner/tags.hpp"

namespace sner {

// Score assigned to IOB2-illegal starts and transitions when decoding with the
// BIO constraint. Finite, so all arithmetic stays exception-free.
inline constexpr double kMaskedScore = -1e4;

// Log-space scores of a linear-chain CRF over one sentence.
struct Lattice {
  std::size_t length = 0;
  std::size_t num_labels = 0;
  std::vector<double> emission;    // length x num_labels, row-major
  std::vector<double> transition;  // [prev * num_labels + next]
  std::vector<double> start;       // per label; zero unless masked

  Lattice() = default;
  Lattice(std::size_t n, std::size_t labels)
      : length(n),
        num_labels(labels),
        emission(n * labels, 0.0),
        transition(labels * labels, 0.0),
        start(labels, 0.0) {}

  double& emit(std::size_t i, std::size_t y) { return emission[i * num_labels + y]; }
  double emit(std::size_t i, std::size_t y) const { return emission[i * num_labels + y]; }
  double& trans(std::size_t prev, std::size_t next) { return transition[prev * num_labels + next]; }
  double trans(std::size_t prev, std::size_t next) const {
    return transition[prev * num_labels + next];
  }
};

// Unnormalized log score of one label path.
double path_score(const Lattice& lattice, std::span<const std::size_t> path);

double forward_logZ(const Lattice& lattice);

struct Marginals {
  std::size_t length = 0;
  std::size_t num_labels = 0;
  std::vector<double> node;  // length x L: P(y_i = y | x)
  std::vector<double> edge;  // (length-1) x L x L: P(y_{i-1} = a, y_i = b | x)
  double log_z = 0.0;

  double node_at(std::size_t i, std::size_t y) const { return node[i * num_labels + y]; }
  // i >= 1 indexes the edge entering position i.
  double edge_at(std::size_t i, std::size_t a, std::size_t b) const {
    return edge[((i - 1) * num_labels + a) * num_labels + b];
  }
};

Marginals marginals(const Lattice& lattice);

struct ViterbiPath {
  std::vector<std::size_t> labels;
  double score = 0.0;
};

// Ties go to the lowest label index, both at backpointers and at the end.
ViterbiPath viterbi(const Lattice& lattice);

// Masks IOB2-illegal starts and transitions. Labels that are not part of the
// scheme (nullopt) are left unconstrained.
void apply_bio_mask(Lattice& lattice, std::span<const std::optional<Label>> labels);

}  // namespace sner
