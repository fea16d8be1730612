#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sner/corpus.hpp"
#include "sner/eval.hpp"

namespace sner {

// Table: aligned plain text laid out like the usual result tables.
// Structured: newline-delimited JSON, one record per line, every record
// carrying "schema": kReportSchema and a "record" kind.
enum class ReportFormat { Table, Structured };

inline constexpr std::string_view kReportSchema = "sner.report/1";

struct RunInfo {
  std::string model;  // "crf", "svm", or "" when not applicable
  std::string split;  // e.g. "80/20", "10-fold", "given"
};

std::string render_evaluation(const TagReport& tags, const SpanReport& spans, const RunInfo& run,
                              ReportFormat format);
std::string render_distribution(const EntityDistribution& dist, ReportFormat format);
std::string render_crossval(const CvReport& cv, const RunInfo& run, ReportFormat format);
std::string render_ttest(const TTestResult& t, std::string_view a, std::string_view b,
                         ReportFormat format);
std::string render_kappa(const KappaReport& kappa, std::size_t tokens, ReportFormat format);
std::string render_violations(const std::vector<Violation>& violations, std::string_view check,
                              ReportFormat format);

}  // namespace sner
