#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sner/corpus.hpp"

namespace sner {

// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const { return f1_score(precision(), recall()); }
};

using TagSequences = std::vector<std::vector<Label>>;

// Token-level, per BIO tag. Aggregates exclude O unless include_o is set.
// Macro averages run over the tags that occur in gold or predictions.
struct TagReport {
  std::array<Counts, kNumLabels> per_tag{};
  bool include_o = false;
  Counts micro;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;

  const Counts& tag(Label l) const { return per_tag[l.index()]; }
};

// Throws DataError naming the first sentence whose lengths disagree.
TagReport tag_metrics(const Corpus& gold, const TagSequences& pred, bool include_o = false);

// Exact-match entity spans (IOB2 chunks, a stray I-X opens a new span).
struct SpanReport {
  std::array<Counts, kNumEntityTypes> per_type{};
  Counts micro;
};

struct Span {
  std::size_t begin;
  std::size_t end;  // exclusive
  EntityType type;

  friend bool operator==(const Span&, const Span&) = default;
};

std::vector<Span> extract_spans(std::span<const Label> tags);
SpanReport span_metrics(const Corpus& gold, const TagSequences& pred);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
};

Summary summarize(std::span<const double> values);

struct CvReport {
  std::vector<TagReport> folds;
  Summary precision;
  Summary recall;
  Summary f1;
  std::size_t best_fold = 0;  // highest micro F1, lowest index on ties

  std::vector<double> fold_f1() const;
};

// Trains on `train` and returns predicted tags for every sentence of `test`.
using Trainer = std::function<TagSequences(const Corpus& train, const Corpus& test)>;

// Folds come from split_kfold(corpus, k, seed) and are evaluated in order.
CvReport cross_validate(const Corpus& corpus, const Trainer& trainer, std::size_t k,
                        std::uint64_t seed, bool include_o = false);
CvReport summarize_folds(std::vector<TagReport> folds);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
};

// Two-sided paired t-test. All-zero differences give t = 0, p = 1; constant
// nonzero differences give t = +-inf, p = 0.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b);

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double df);

struct KappaReport {
  double observed = 0.0;
  double expected = 0.0;
  double kappa = 0.0;
};

KappaReport cohen_kappa(std::span<const Label> a, std::span<const Label> b);

}  // namespace sner
