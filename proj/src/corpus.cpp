#include "sner/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sner/error.hpp"
#include "sner/rng.hpp"
#include "sner/utf8.hpp"

namespace sner {

std::vector<std::string> Sentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<Label> Sentence::tags() const {
  std::vector<Label> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.tag);
  return out;
}

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

double EntityDistribution::percentage(EntityType e) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count(e)) / static_cast<double>(total);
}

double EntityDistribution::outside_percentage() const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(outside) / static_cast<double>(total);
}

namespace {

bool is_column_space(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> split_columns(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_column_space(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !is_column_space(line[j])) ++j;
    cols.push_back(line.substr(i, j - i));
    i = j;
  }
  return cols;
}

std::string line_error(std::size_t line_no, const std::string& what) {
  return "line " + std::to_string(line_no) + ": " + what;
}

}  // namespace

Corpus parse_conll(std::string_view text) {
  Corpus corpus;
  Sentence current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  // UTF-8 byte order mark
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto cols = split_columns(line);
    if (cols.empty()) {
      if (!current.tokens.empty()) {
        corpus.sentences.push_back(std::move(current));
        current = Sentence{};
      }
      continue;
    }
    if (cols.size() != 2) {
      throw DataError(line_error(line_no, "expected 2 columns (token, tag), found " +
                                              std::to_string(cols.size())));
    }
    try {
      utf8::decode(cols[0]);
    } catch (const DataError& e) {
      throw DataError(line_error(line_no, e.what()));
    }
    const auto tag = Label::parse(cols[1]);
    if (!tag) throw DataError(line_error(line_no, "unknown tag '" + std::string(cols[1]) + "'"));
    current.tokens.push_back(Token{std::string(cols[0]), *tag});
  }
  if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
  return corpus;
}

Corpus read_conll_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    Corpus corpus = parse_conll(buf.str());
    corpus.provenance = path;
    return corpus;
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string serialize_conll(const Corpus& corpus) {
  std::string out;
  bool first = true;
  for (const auto& sentence : corpus.sentences) {
    if (!first) out += '\n';
    first = false;
    for (const auto& token : sentence.tokens) {
      out += token.surface;
      out += ' ';
      out += token.tag.str();
      out += '\n';
    }
  }
  return out;
}

void write_conll_file(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << serialize_conll(corpus);
}

std::vector<Violation> validate_bio(const std::vector<Label>& tags, std::size_t sentence_index) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const bool ok = i == 0 ? start_allowed(tags[i]) : transition_allowed(tags[i - 1], tags[i]);
    if (ok) continue;
    std::string desc = tags[i].str() + (i == 0 ? " opens the sentence"
                                               : " follows " + tags[i - 1].str());
    out.push_back(Violation{sentence_index, i, std::move(desc)});
  }
  return out;
}

std::vector<Violation> validate_bio(const Corpus& corpus) {
  std::vector<Violation> out;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    auto v = validate_bio(corpus.sentences[s].tags(), s);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<Label> repair_bio(std::vector<Label> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const bool ok = i == 0 ? start_allowed(tags[i]) : transition_allowed(tags[i - 1], tags[i]);
    if (!ok) tags[i] = Label::begin(*tags[i].entity());
  }
  return tags;
}

Corpus repair_bio(Corpus corpus) {
  for (auto& sentence : corpus.sentences) {
    const auto fixed = repair_bio(sentence.tags());
    for (std::size_t i = 0; i < fixed.size(); ++i) sentence.tokens[i].tag = fixed[i];
  }
  return corpus;
}

std::vector<Violation> lint_final_period(const Corpus& corpus) {
  std::vector<Violation> out;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const auto& last = corpus.sentences[s].tokens.back();
    if (last.surface == "." && last.tag == Label::outside()) continue;
    out.push_back(Violation{s, corpus.sentences[s].size() - 1,
                            "sentence does not end with '.' tagged O"});
  }
  return out;
}

EntityDistribution corpus_stats(const Corpus& corpus) {
  EntityDistribution dist;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence.tokens) {
      ++dist.total;
      if (auto e = token.tag.entity()) {
        ++dist.entity_counts[static_cast<std::size_t>(*e)];
      } else {
        ++dist.outside;
      }
    }
  }
  return dist;
}

namespace {

Corpus subset(const Corpus& corpus, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Corpus out;
  out.provenance = corpus.provenance;
  out.sentences.reserve(indices.size());
  for (std::size_t i : indices) out.sentences.push_back(corpus.sentences[i]);
  return out;
}

}  // namespace

std::pair<Corpus, Corpus> split_holdout(const Corpus& corpus, double train_fraction,
                                        std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw UsageError("train fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = corpus.sentence_count();
  if (n < 2) throw DataError("holdout split needs at least 2 sentences");
  const auto perm = shuffled_indices(n, seed);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {subset(corpus, std::move(train)), subset(corpus, std::move(test))};
}

std::vector<std::vector<std::size_t>> kfold_assignment(std::size_t sentence_count,
                                                       std::size_t k, std::uint64_t seed) {
  if (k < 2) throw UsageError("k must be at least 2");
  if (k > sentence_count) {
    throw DataError("k = " + std::to_string(k) + " exceeds sentence count " +
                    std::to_string(sentence_count));
  }
  const auto perm = shuffled_indices(sentence_count, seed);
  const std::size_t base = sentence_count / k;
  const std::size_t extra = sentence_count % k;
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(offset),
                    perm.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return folds;
}

std::vector<Fold> split_kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  const auto assignment = kfold_assignment(corpus.sentence_count(), k, seed);
  std::vector<Fold> folds;
  folds.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train.insert(train.end(), assignment[g].begin(), assignment[g].end());
    }
    folds.push_back(Fold{subset(corpus, std::move(train)), subset(corpus, assignment[f])});
  }
  return folds;
}

}  // namespace sner
