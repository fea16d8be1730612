#include "sner/report.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace sner {

namespace {

using nlohmann::ordered_json;

ordered_json record(std::string_view kind) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["record"] = kind;
  return j;
}

ordered_json counts_json(const Counts& c) {
  ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["precision"] = c.precision();
  j["recall"] = c.recall();
  j["f1"] = c.f1();
  return j;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  // count code points so Arabic-script cells still line up
  std::size_t cps = 0;
  for (char c : s) cps += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  if (cps < width) out.append(width - cps, ' ');
  return out;
}

std::string lines(const std::vector<ordered_json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

std::string render_evaluation(const TagReport& tags, const SpanReport& spans, const RunInfo& run,
                              ReportFormat format) {
  if (format == ReportFormat::Structured) {
    std::vector<ordered_json> out;
    auto summary = record("evaluation");
    summary["model"] = run.model;
    summary["split"] = run.split;
    summary["include_o"] = tags.include_o;
    summary["micro"] = counts_json(tags.micro);
    summary["macro"] = {{"precision", tags.macro_precision},
                        {"recall", tags.macro_recall},
                        {"f1", tags.macro_f1}};
    out.push_back(std::move(summary));
    for (const auto& label : all_labels()) {
      auto r = record("tag");
      r["tag"] = label.str();
      r.update(counts_json(tags.tag(label)));
      out.push_back(std::move(r));
    }
    auto s = record("spans");
    s["micro"] = counts_json(spans.micro);
    for (std::size_t e = 0; e < kNumEntityTypes; ++e) {
      s["types"][std::string(entity_code(static_cast<EntityType>(e)))] =
          counts_json(spans.per_type[e]);
    }
    out.push_back(std::move(s));
    return lines(out);
  }

  std::ostringstream os;
  os << "Token-level scores (aggregate " << (tags.include_o ? "includes" : "excludes") << " O)\n";
  os << pad("Model", 8) << pad("Split", 10) << pad("Precision", 11) << pad("Recall", 10)
     << "F1-score\n";
  os << pad(run.model.empty() ? "-" : run.model, 8) << pad(run.split.empty() ? "-" : run.split, 10)
     << pad(fixed(tags.micro.precision()), 11) << pad(fixed(tags.micro.recall()), 10)
     << fixed(tags.micro.f1()) << "\n";
  os << "macro F1 " << fixed(tags.macro_f1) << "\n\n";
  os << pad("Tag", 9) << pad("TP", 8) << pad("FP", 8) << pad("FN", 8) << pad("Precision", 11)
     << pad("Recall", 10) << "F1-score\n";
  for (const auto& label : all_labels()) {
    const auto& c = tags.tag(label);
    os << pad(label.str(), 9) << pad(std::to_string(c.tp), 8) << pad(std::to_string(c.fp), 8)
       << pad(std::to_string(c.fn), 8) << pad(fixed(c.precision()), 11)
       << pad(fixed(c.recall()), 10) << fixed(c.f1()) << "\n";
  }
  os << "\nEntity spans (exact match)\n";
  os << pad("Type", 9) << pad("Precision", 11) << pad("Recall", 10) << "F1-score\n";
  for (std::size_t e = 0; e < kNumEntityTypes; ++e) {
    const auto& c = spans.per_type[e];
    os << pad(entity_code(static_cast<EntityType>(e)), 9) << pad(fixed(c.precision()), 11)
       << pad(fixed(c.recall()), 10) << fixed(c.f1()) << "\n";
  }
  os << pad("micro", 9) << pad(fixed(spans.micro.precision()), 11)
     << pad(fixed(spans.micro.recall()), 10) << fixed(spans.micro.f1()) << "\n";
  return os.str();
}

std::string render_distribution(const EntityDistribution& dist, ReportFormat format) {
  if (format == ReportFormat::Structured) {
    std::vector<ordered_json> out;
    auto r = record("distribution");
    for (std::size_t e = 0; e < kNumEntityTypes; ++e) {
      const auto type = static_cast<EntityType>(e);
      r["entities"][std::string(entity_name(type))] = {{"count", dist.count(type)},
                                                       {"percentage", dist.percentage(type)}};
    }
    r["outside"] = {{"count", dist.outside}, {"percentage", dist.outside_percentage()}};
    r["total"] = dist.total;
    out.push_back(std::move(r));
    return lines(out);
  }
  std::ostringstream os;
  os << pad("Entity Type", 16) << pad("Occurrences", 13) << "Percentage (%)\n";
  for (std::size_t e = 0; e < kNumEntityTypes; ++e) {
    const auto type = static_cast<EntityType>(e);
    os << pad(entity_name(type), 16) << pad(std::to_string(dist.count(type)), 13)
       << fixed(dist.percentage(type), 2) << "\n";
  }
  os << pad("OUTSIDE", 16) << pad(std::to_string(dist.outside), 13)
     << fixed(dist.outside_percentage(), 2) << "\n";
  os << pad("Total", 16) << pad(std::to_string(dist.total), 13)
     << fixed(dist.total == 0 ? 0.0 : 100.0, 2) << "\n";
  return os.str();
}

std::string render_crossval(const CvReport& cv, const RunInfo& run, ReportFormat format) {
  if (format == ReportFormat::Structured) {
    std::vector<ordered_json> out;
    auto r = record("crossval");
    r["model"] = run.model;
    r["folds"] = cv.folds.size();
    r["precision"] = {{"mean", cv.precision.mean}, {"std", cv.precision.stddev}};
    r["recall"] = {{"mean", cv.recall.mean}, {"std", cv.recall.stddev}};
    r["f1"] = {{"mean", cv.f1.mean}, {"std", cv.f1.stddev}};
    r["best_fold"] = cv.best_fold + 1;
    out.push_back(std::move(r));
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
      auto fr = record("fold");
      fr["model"] = run.model;
      fr["fold"] = f + 1;
      fr.update(counts_json(cv.folds[f].micro));
      out.push_back(std::move(fr));
    }
    return lines(out);
  }
  std::ostringstream os;
  os << cv.folds.size() << "-fold cross-validation, model " << run.model << "\n";
  os << pad("Fold", 6) << pad("Precision", 11) << pad("Recall", 10) << "F1-score\n";
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const auto& c = cv.folds[f].micro;
    os << pad(std::to_string(f + 1), 6) << pad(fixed(c.precision()), 11)
       << pad(fixed(c.recall()), 10) << fixed(c.f1()) << "\n";
  }
  os << pad("Model", 8) << pad("Precision", 20) << pad("Recall", 20) << "F1-score\n";
  os << pad(run.model, 8) << pad(fixed(cv.precision.mean) + " ± " + fixed(cv.precision.stddev), 20)
     << pad(fixed(cv.recall.mean) + " ± " + fixed(cv.recall.stddev), 20)
     << fixed(cv.f1.mean) << " ± " << fixed(cv.f1.stddev) << "\n";
  os << "best fold " << cv.best_fold + 1 << "\n";
  return os.str();
}

std::string render_ttest(const TTestResult& t, std::string_view a, std::string_view b,
                         ReportFormat format) {
  if (format == ReportFormat::Structured) {
    auto r = record("ttest");
    r["a"] = a;
    r["b"] = b;
    r["t"] = std::isinf(t.t) ? ordered_json(t.t > 0 ? "inf" : "-inf") : ordered_json(t.t);
    r["p"] = t.p;
    r["df"] = t.df;
    return lines({r});
  }
  std::ostringstream os;
  os << "paired t-test " << a << " vs " << b << ": t = " << fixed(t.t) << ", df = " << t.df
     << ", p = " << fixed(t.p, 6) << "\n";
  return os.str();
}

std::string render_kappa(const KappaReport& kappa, std::size_t tokens, ReportFormat format) {
  if (format == ReportFormat::Structured) {
    auto r = record("kappa");
    r["tokens"] = tokens;
    r["observed"] = kappa.observed;
    r["expected"] = kappa.expected;
    r["kappa"] = kappa.kappa;
    return lines({r});
  }
  std::ostringstream os;
  os << "tokens " << tokens << "\nobserved agreement " << fixed(kappa.observed)
     << "\nexpected agreement " << fixed(kappa.expected) << "\nCohen's kappa "
     << fixed(kappa.kappa) << "\n";
  return os.str();
}

std::string render_violations(const std::vector<Violation>& violations, std::string_view check,
                              ReportFormat format) {
  if (format == ReportFormat::Structured) {
    std::vector<ordered_json> out;
    auto r = record("validation");
    r["check"] = check;
    r["violations"] = violations.size();
    out.push_back(std::move(r));
    for (const auto& v : violations) {
      auto vr = record("violation");
      vr["check"] = check;
      vr["sentence"] = v.sentence + 1;
      vr["token"] = v.token + 1;
      vr["description"] = v.description;
      out.push_back(std::move(vr));
    }
    return lines(out);
  }
  std::ostringstream os;
  os << check << ": " << violations.size() << " violation(s)\n";
  for (const auto& v : violations) {
    os << "  sentence " << v.sentence + 1 << ", token " << v.token + 1 << ": " << v.description
       << "\n";
  }
  return os.str();
}

}  // namespace sner
