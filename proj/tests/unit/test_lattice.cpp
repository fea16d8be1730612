#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sner/corpus.hpp"
#include "sner/lattice.hpp"

using namespace sner;

TEST_CASE("forward_logZ on zero lattices") {
  CHECK(forward_logZ(Lattice(1, 11)) == doctest::Approx(std::log(11.0)).epsilon(1e-14));
  CHECK(forward_logZ(Lattice(2, 11)) == doctest::Approx(std::log(121.0)).epsilon(1e-14));
}

TEST_CASE("forward_logZ matches path enumeration") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const std::size_t L = 1 + rng() % 4;
    const Lattice lat = oracle::random_lattice(rng, n, L);
    CHECK(std::abs(forward_logZ(lat) - oracle::brute_log_z(lat)) <= 1e-8);
  }
}

TEST_CASE("path probabilities are normalized") {
  std::mt19937_64 rng(5);
  const Lattice lat = oracle::random_lattice(rng, 4, 3);
  const double log_z = forward_logZ(lat);
  double total = 0.0;
  oracle::for_each_path(4, 3, [&](const auto& p) {
    const double prob = std::exp(path_score(lat, p) - log_z);
    CHECK(prob > 0.0);
    CHECK(prob <= 1.0);
    total += prob;
  });
  CHECK(std::abs(total - 1.0) <= 1e-8);
}

TEST_CASE("marginals") {
  SUBCASE("zero lattice is uniform") {
    const auto m = marginals(Lattice(3, 11));
    for (double p : m.node) CHECK(p == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  }
  SUBCASE("match enumeration and are consistent") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t n = 1 + rng() % 5;
      const std::size_t L = 1 + rng() % 4;
      const Lattice lat = oracle::random_lattice(rng, n, L);
      const auto m = marginals(lat);
      const auto ref = oracle::brute_marginals(lat);
      for (std::size_t k = 0; k < m.node.size(); ++k) CHECK(std::abs(m.node[k] - ref.node[k]) <= 1e-8);
      for (std::size_t k = 0; k < m.edge.size(); ++k) CHECK(std::abs(m.edge[k] - ref.edge[k]) <= 1e-8);
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t y = 0; y < L; ++y) row += m.node_at(i, y);
        CHECK(std::abs(row - 1.0) <= 1e-10);
      }
      for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t a = 0; a < L; ++a) {
          double out = 0.0;
          for (std::size_t b = 0; b < L; ++b) out += m.edge_at(i, a, b);
          CHECK(std::abs(out - m.node_at(i - 1, a)) <= 1e-10);
        }
        for (std::size_t b = 0; b < L; ++b) {
          double in = 0.0;
          for (std::size_t a = 0; a < L; ++a) in += m.edge_at(i, a, b);
          CHECK(std::abs(in - m.node_at(i, b)) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("viterbi matches enumeration argmax") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t L = 1 + rng() % 4;
    const Lattice lat = oracle::random_lattice(rng, n, L);
    const auto path = viterbi(lat);
    CHECK(path.labels == oracle::brute_argmax(lat));
    CHECK(path.score == doctest::Approx(oracle::direct_score(lat, path.labels)).epsilon(1e-12));
  }
}

TEST_CASE("shifting one position's emissions shifts logZ and keeps the argmax") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    Lattice lat = oracle::random_lattice(rng, 5, 4);
    const double before = forward_logZ(lat);
    const auto path = viterbi(lat).labels;
    const double c = 3.25;
    const std::size_t pos = rng() % 5;
    for (std::size_t y = 0; y < 4; ++y) lat.emit(pos, y) += c;
    CHECK(forward_logZ(lat) == doctest::Approx(before + c).epsilon(1e-12));
    CHECK(viterbi(lat).labels == path);
  }
}

TEST_CASE("ties break towards the lowest label index") {
  const auto path = viterbi(Lattice(4, 3));
  CHECK(path.labels == std::vector<std::size_t>{0, 0, 0, 0});
}

TEST_CASE("BIO mask") {
  std::vector<std::optional<Label>> scheme;
  for (const auto& l : all_labels()) scheme.push_back(l);

  SUBCASE("zero lattice decodes to all O") {
    Lattice lat(5, 11);
    apply_bio_mask(lat, scheme);
    const auto path = viterbi(lat);
    CHECK(path.labels == std::vector<std::size_t>(5, 0));
  }
  SUBCASE("masked entries use the documented constant") {
    Lattice lat(2, 11);
    apply_bio_mask(lat, scheme);
    const auto b_loc = Label::begin(EntityType::Location).index();
    const auto i_per = Label::inside(EntityType::Person).index();
    const auto b_per = Label::begin(EntityType::Person).index();
    CHECK(lat.trans(b_loc, i_per) == kMaskedScore);
    CHECK(lat.trans(b_per, i_per) == 0.0);
    CHECK(lat.start[i_per] == kMaskedScore);
    CHECK(lat.start[b_per] == 0.0);
  }
  SUBCASE("constrained decoding never violates IOB2") {
    std::mt19937_64 rng(505);
    for (int trial = 0; trial < 300; ++trial) {
      Lattice lat = oracle::random_lattice(rng, 1 + rng() % 10, 11, 5.0);
      apply_bio_mask(lat, scheme);
      const auto path = viterbi(lat);
      std::vector<Label> tags;
      for (std::size_t id : path.labels) tags.push_back(Label::from_index(id));
      CHECK(validate_bio(tags).empty());
    }
  }
}
