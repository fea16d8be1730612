#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sner/tags.hpp"

namespace sner {

struct Token {
  std::string surface;  // non-empty, no whitespace
  Label tag;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;  // non-empty

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> surfaces() const;
  std::vector<Label> tags() const;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::optional<std::string> provenance;

  std::size_t sentence_count() const { return sentences.size(); }
  std::size_t token_count() const;
  bool empty() const { return sentences.empty(); }

  // Structural equality: provenance is not compared.
  friend bool operator==(const Corpus& a, const Corpus& b) { return a.sentences == b.sentences; }
};

// Token-level occurrence counts per entity type (B- and I- tokens both count).
struct EntityDistribution {
  std::array<std::size_t, kNumEntityTypes> entity_counts{};
  std::size_t outside = 0;
  std::size_t total = 0;

  std::size_t count(EntityType e) const { return entity_counts[static_cast<std::size_t>(e)]; }
  double percentage(EntityType e) const;
  double outside_percentage() const;
};

struct Violation {
  std::size_t sentence;  // 0-based
  std::size_t token;     // 0-based
  std::string description;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Parses two-column CoNLL text. Columns are separated by any run of spaces or
// tabs; blank lines (possibly repeated) end sentences; CRLF is accepted.
// Throws DataError carrying the 1-based line number.
Corpus parse_conll(std::string_view text);
Corpus read_conll_file(const std::string& path);

// Canonical form: "<token> <tag>\n" per token, one blank line between sentences.
std::string serialize_conll(const Corpus& corpus);
void write_conll_file(const std::string& path, const Corpus& corpus);

std::vector<Violation> validate_bio(const Corpus& corpus);
std::vector<Violation> validate_bio(const std::vector<Label>& tags, std::size_t sentence_index = 0);

// Rewrites every I-X that does not continue an X entity into B-X.
Corpus repair_bio(Corpus corpus);
std::vector<Label> repair_bio(std::vector<Label> tags);

// Optional lint: sentences whose final token is not a period tagged O.
std::vector<Violation> lint_final_period(const Corpus& corpus);

EntityDistribution corpus_stats(const Corpus& corpus);

// Sentence-level splits using the PortableRng shuffle. Within each part the
// original corpus order is kept.
std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, double train_fraction,
                                        std::uint64_t seed);

struct Fold {
  Corpus train;
  Corpus test;
};

// Folds differ in size by at most one sentence; the first (N mod k) folds get
// the extra sentence.
std::vector<Fold> split_kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed);

// Test-fold membership (indices into corpus.sentences) for each fold.
std::vector<std::vector<std::size_t>> kfold_assignment(std::size_t sentence_count,
                                                       std::size_t k, std::uint64_t seed);

}  // namespace sner
