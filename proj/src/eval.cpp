#include "sner/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sner/error.hpp"

namespace sner {

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

double Counts::precision() const {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Counts::recall() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

namespace {

void check_alignment(const Corpus& gold, const TagSequences& pred) {
  if (gold.sentence_count() != pred.size()) {
    throw DataError("prediction has " + std::to_string(pred.size()) + " sentences, gold has " +
                    std::to_string(gold.sentence_count()));
  }
  for (std::size_t s = 0; s < pred.size(); ++s) {
    if (gold.sentences[s].size() != pred[s].size()) {
      throw DataError("sentence " + std::to_string(s + 1) + ": gold has " +
                      std::to_string(gold.sentences[s].size()) + " tokens, prediction has " +
                      std::to_string(pred[s].size()));
    }
  }
}

}  // namespace

TagReport tag_metrics(const Corpus& gold, const TagSequences& pred, bool include_o) {
  check_alignment(gold, pred);
  TagReport report;
  report.include_o = include_o;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    for (std::size_t i = 0; i < pred[s].size(); ++i) {
      const Label g = gold.sentences[s].tokens[i].tag;
      const Label p = pred[s][i];
      if (g == p) {
        ++report.per_tag[g.index()].tp;
      } else {
        ++report.per_tag[p.index()].fp;
        ++report.per_tag[g.index()].fn;
      }
    }
  }
  std::size_t present = 0;
  for (const auto& label : all_labels()) {
    if (label == Label::outside() && !include_o) continue;
    const Counts& c = report.per_tag[label.index()];
    report.micro.tp += c.tp;
    report.micro.fp += c.fp;
    report.micro.fn += c.fn;
    if (c.tp + c.fp + c.fn == 0) continue;
    ++present;
    report.macro_precision += c.precision();
    report.macro_recall += c.recall();
    report.macro_f1 += c.f1();
  }
  if (present > 0) {
    report.macro_precision /= static_cast<double>(present);
    report.macro_recall /= static_cast<double>(present);
    report.macro_f1 /= static_cast<double>(present);
  }
  return report;
}

std::vector<Span> extract_spans(std::span<const Label> tags) {
  std::vector<Span> spans;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const auto type = tags[i].entity();
    if (!type) continue;
    const bool continues = tags[i].kind() == TagKind::Inside && i > 0 &&
                           tags[i - 1].entity() == type && !spans.empty() &&
                           spans.back().end == i;
    if (continues) {
      spans.back().end = i + 1;
    } else {
      spans.push_back(Span{i, i + 1, *type});
    }
  }
  return spans;
}

SpanReport span_metrics(const Corpus& gold, const TagSequences& pred) {
  check_alignment(gold, pred);
  SpanReport report;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    const auto gold_tags = gold.sentences[s].tags();
    const auto g = extract_spans(gold_tags);
    const auto p = extract_spans(pred[s]);
    for (const auto& span : p) {
      auto& c = report.per_type[static_cast<std::size_t>(span.type)];
      if (std::find(g.begin(), g.end(), span) != g.end()) {
        ++c.tp;
      } else {
        ++c.fp;
      }
    }
    for (const auto& span : g) {
      if (std::find(p.begin(), p.end(), span) == p.end()) {
        ++report.per_type[static_cast<std::size_t>(span.type)].fn;
      }
    }
  }
  for (const auto& c : report.per_type) {
    report.micro.tp += c.tp;
    report.micro.fp += c.fp;
    report.micro.fn += c.fn;
  }
  return report;
}

Summary summarize(std::span<const double> values) {
  Summary out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::vector<double> CvReport::fold_f1() const {
  std::vector<double> out;
  for (const auto& f : folds) out.push_back(f.micro.f1());
  return out;
}

CvReport summarize_folds(std::vector<TagReport> folds) {
  CvReport report;
  report.folds = std::move(folds);
  std::vector<double> p, r, f;
  for (const auto& fold : report.folds) {
    p.push_back(fold.micro.precision());
    r.push_back(fold.micro.recall());
    f.push_back(fold.micro.f1());
  }
  report.precision = summarize(p);
  report.recall = summarize(r);
  report.f1 = summarize(f);
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k] > f[report.best_fold]) report.best_fold = k;
  }
  return report;
}

CvReport cross_validate(const Corpus& corpus, const Trainer& trainer, std::size_t k,
                        std::uint64_t seed, bool include_o) {
  const auto folds = split_kfold(corpus, k, seed);
  std::vector<TagReport> reports;
  reports.reserve(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    try {
      const auto pred = trainer(folds[f].train, folds[f].test);
      reports.push_back(tag_metrics(folds[f].test, pred, include_o));
    } catch (const NumericalError& e) {
      throw NumericalError("fold " + std::to_string(f + 1) + " of " + std::to_string(k) +
                           " failed: " + e.what());
    } catch (const std::exception& e) {
      throw DataError("fold " + std::to_string(f + 1) + " of " + std::to_string(k) +
                      " failed: " + e.what());
    }
  }
  return summarize_folds(std::move(reports));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // the continued fraction converges fast for x < (a + 1) / (a + b + 2)
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_front) * h / a;
}

double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  if (std::isnan(t)) return 1.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("paired t-test needs equal lengths (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw DataError("paired t-test needs at least 2 pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const Summary s = summarize(diff);
  TTestResult out;
  out.df = a.size() - 1;
  const bool all_zero = std::all_of(diff.begin(), diff.end(), [](double d) { return d == 0.0; });
  if (all_zero) return out;
  if (s.stddev == 0.0) {
    out.t = s.mean > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    return out;
  }
  out.t = s.mean / (s.stddev / std::sqrt(static_cast<double>(a.size())));
  out.p = student_t_two_sided_p(out.t, static_cast<double>(out.df));
  return out;
}

KappaReport cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    throw DataError("annotations differ in length (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DataError("cannot compute kappa over zero tokens");
  std::array<std::size_t, kNumLabels> ma{}, mb{};
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ma[a[i].index()];
    ++mb[b[i].index()];
    if (a[i] == b[i]) ++agree;
  }
  const double n = static_cast<double>(a.size());
  KappaReport out;
  out.observed = static_cast<double>(agree) / n;
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    out.expected += (static_cast<double>(ma[l]) / n) * (static_cast<double>(mb[l]) / n);
  }
  if (agree == a.size()) {
    out.kappa = 1.0;
  } else {
    out.kappa = (out.observed - out.expected) / (1.0 - out.expected);
  }
  return out;
}

}  // namespace sner
