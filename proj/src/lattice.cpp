#include "sner/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sner {

namespace {

double log_sum_exp(std::span<const double> values) {
  const double top = *std::max_element(values.begin(), values.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

// alpha[i][y] = log sum over prefixes ending in y at position i.
std::vector<double> forward_table(const Lattice& lat) {
  const std::size_t n = lat.length;
  const std::size_t L = lat.num_labels;
  std::vector<double> alpha(n * L);
  std::vector<double> terms(L);
  for (std::size_t y = 0; y < L; ++y) alpha[y] = lat.start[y] + lat.emit(0, y);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p) terms[p] = alpha[(i - 1) * L + p] + lat.trans(p, y);
      alpha[i * L + y] = log_sum_exp(terms) + lat.emit(i, y);
    }
  }
  return alpha;
}

// beta[i][y] = log sum over suffixes after position i given y at i.
std::vector<double> backward_table(const Lattice& lat) {
  const std::size_t n = lat.length;
  const std::size_t L = lat.num_labels;
  std::vector<double> beta(n * L, 0.0);
  std::vector<double> terms(L);
  for (std::size_t i = n - 1; i-- > 0;) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t q = 0; q < L; ++q) {
        terms[q] = lat.trans(y, q) + lat.emit(i + 1, q) + beta[(i + 1) * L + q];
      }
      beta[i * L + y] = log_sum_exp(terms);
    }
  }
  return beta;
}

}  // namespace

double path_score(const Lattice& lat, std::span<const std::size_t> path) {
  double score = lat.start[path[0]];
  for (std::size_t i = 0; i < path.size(); ++i) {
    score += lat.emit(i, path[i]);
    if (i > 0) score += lat.trans(path[i - 1], path[i]);
  }
  return score;
}

double forward_logZ(const Lattice& lat) {
  const auto alpha = forward_table(lat);
  return log_sum_exp(std::span<const double>(alpha).subspan((lat.length - 1) * lat.num_labels,
                                                            lat.num_labels));
}

Marginals marginals(const Lattice& lat) {
  const std::size_t n = lat.length;
  const std::size_t L = lat.num_labels;
  const auto alpha = forward_table(lat);
  const auto beta = backward_table(lat);

  Marginals m;
  m.length = n;
  m.num_labels = L;
  m.log_z = log_sum_exp(std::span<const double>(alpha).subspan((n - 1) * L, L));
  m.node.resize(n * L);
  for (std::size_t k = 0; k < n * L; ++k) m.node[k] = std::exp(alpha[k] + beta[k] - m.log_z);
  m.edge.resize(n > 1 ? (n - 1) * L * L : 0);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t a = 0; a < L; ++a) {
      const double left = alpha[(i - 1) * L + a] - m.log_z;
      for (std::size_t b = 0; b < L; ++b) {
        m.edge[((i - 1) * L + a) * L + b] =
            std::exp(left + lat.trans(a, b) + lat.emit(i, b) + beta[i * L + b]);
      }
    }
  }
  return m;
}

ViterbiPath viterbi(const Lattice& lat) {
  const std::size_t n = lat.length;
  const std::size_t L = lat.num_labels;
  std::vector<double> best(n * L);
  std::vector<std::size_t> back(n * L, 0);
  for (std::size_t y = 0; y < L; ++y) best[y] = lat.start[y] + lat.emit(0, y);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < L; ++y) {
      std::size_t arg = 0;
      double top = best[(i - 1) * L] + lat.trans(0, y);
      for (std::size_t p = 1; p < L; ++p) {
        const double s = best[(i - 1) * L + p] + lat.trans(p, y);
        if (s > top) {
          top = s;
          arg = p;
        }
      }
      best[i * L + y] = top + lat.emit(i, y);
      back[i * L + y] = arg;
    }
  }
  ViterbiPath out;
  out.labels.assign(n, 0);
  std::size_t last = 0;
  for (std::size_t y = 1; y < L; ++y) {
    if (best[(n - 1) * L + y] > best[(n - 1) * L + last]) last = y;
  }
  out.score = best[(n - 1) * L + last];
  out.labels[n - 1] = last;
  for (std::size_t i = n - 1; i > 0; --i) out.labels[i - 1] = back[i * L + out.labels[i]];
  return out;
}

void apply_bio_mask(Lattice& lat, std::span<const std::optional<Label>> labels) {
  const std::size_t L = lat.num_labels;
  for (std::size_t y = 0; y < L; ++y) {
    if (labels[y] && !start_allowed(*labels[y])) lat.start[y] = kMaskedScore;
    for (std::size_t p = 0; p < L; ++p) {
      if (labels[p] && labels[y] && !transition_allowed(*labels[p], *labels[y])) {
        lat.trans(p, y) = kMaskedScore;
      }
    }
  }
}

}  // namespace sner
