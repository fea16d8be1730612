#include "sner/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sner/error.hpp"
#include "sner/utf8.hpp"

namespace sner {

namespace {

char shape_symbol(char32_t c) {
  if (utf8::is_latin_upper(c)) return 'X';
  if (utf8::is_latin_lower(c)) return 'x';
  if (utf8::is_digit(c)) return '#';
  if (utf8::is_arabic_letter(c)) return 'a';
  return '-';
}

std::string offset_name(long offset) {
  return "w[" + std::string(offset > 0 ? "+" : "") + std::to_string(offset) + "]";
}

}  // namespace

std::string word_shape(std::string_view token) {
  if (token.empty()) throw DataError("word_shape: empty token");
  std::string shape;
  for (char32_t c : utf8::decode(token)) {
    const char s = shape_symbol(c);
    if (shape.empty() || shape.back() != s) shape.push_back(s);
  }
  return shape;
}

FeatureSet token_features(std::span<const std::string> sentence, std::size_t i,
                          std::size_t window) {
  if (i >= sentence.size()) {
    throw std::out_of_range("token position " + std::to_string(i) + " outside sentence of " +
                            std::to_string(sentence.size()));
  }
  const std::u32string word = utf8::decode(sentence[i]);
  std::u32string lower = word;
  for (char32_t& c : lower) c = utf8::fold_case(c);

  FeatureSet fs;
  fs.reserve(13 + 2 * window);
  fs.push_back({"bias", 1.0});
  fs.push_back({"w", utf8::encode(lower)});
  for (std::size_t k = 1; k <= 3; ++k) {
    const std::size_t len = std::min(k, lower.size());
    fs.push_back({"p" + std::to_string(k), utf8::encode(lower.substr(0, len))});
  }
  for (std::size_t k = 1; k <= 3; ++k) {
    const std::size_t len = std::min(k, lower.size());
    fs.push_back({"s" + std::to_string(k), utf8::encode(lower.substr(lower.size() - len))});
  }
  const bool all_digits =
      !word.empty() && std::all_of(word.begin(), word.end(), [](char32_t c) { return utf8::is_digit(c); });
  fs.push_back({"digit", all_digits ? 1.0 : 0.0});
  fs.push_back({"shape", word_shape(sentence[i])});
  fs.push_back({"len", static_cast<double>(word.size())});
  fs.push_back({"upper", !word.empty() && utf8::is_latin_upper(word.front()) ? 1.0 : 0.0});
  const bool has_symbol = std::any_of(word.begin(), word.end(), [](char32_t c) {
    return !utf8::is_letter(c) && !utf8::is_digit(c);
  });
  fs.push_back({"symbol", has_symbol ? 1.0 : 0.0});

  const auto n = static_cast<long>(sentence.size());
  const auto pos = static_cast<long>(i);
  for (long k = 1; k <= static_cast<long>(window); ++k) {
    for (long offset : {-k, k}) {
      const long j = pos + offset;
      std::string value;
      if (j < 0) {
        value = kBosSentinel;
      } else if (j >= n) {
        value = kEosSentinel;
      } else {
        value = utf8::fold_case(sentence[static_cast<std::size_t>(j)]);
      }
      fs.push_back({offset_name(offset), std::move(value)});
    }
  }
  return fs;
}

std::vector<FeatureSet> sentence_features(std::span<const std::string> sentence,
                                          std::size_t window) {
  std::vector<FeatureSet> out;
  out.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    out.push_back(token_features(sentence, i, window));
  }
  return out;
}

std::string feature_key(const Feature& f) {
  if (const auto* s = std::get_if<std::string>(&f.value)) return f.name + "=" + *s;
  return f.name;
}

double dot(const SparseVector& x, std::span<const double> dense) {
  double sum = 0.0;
  for (const auto& e : x) sum += e.value * dense[e.index];
  return sum;
}

FeatureIndex FeatureIndex::from_keys(std::vector<std::string> keys) {
  FeatureIndex index;
  for (auto& key : keys) {
    const auto id = static_cast<std::uint32_t>(index.keys_.size());
    if (!index.ids_.emplace(key, id).second) {
      throw DataError("duplicate feature key '" + key + "'");
    }
    index.keys_.push_back(std::move(key));
  }
  index.fitted_ = true;
  index.frozen_ = true;
  return index;
}

void FeatureIndex::fit(const FeatureSet& features) {
  if (frozen_) throw std::logic_error("FeatureIndex::fit called after freeze");
  fitted_ = true;
  for (const auto& f : features) {
    std::string key = feature_key(f);
    const auto id = static_cast<std::uint32_t>(keys_.size());
    if (ids_.emplace(key, id).second) keys_.push_back(std::move(key));
  }
}

std::optional<std::uint32_t> FeatureIndex::find(std::string_view key) const {
  const auto it = ids_.find(std::string(key));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

SparseVector FeatureIndex::vectorize(const FeatureSet& features) const {
  if (!fitted_) throw std::logic_error("FeatureIndex::vectorize called before fit");
  SparseVector out;
  out.reserve(features.size());
  for (const auto& f : features) {
    const auto id = find(feature_key(f));
    if (!id) continue;
    const double value = std::holds_alternative<double>(f.value) ? std::get<double>(f.value) : 1.0;
    if (value != 0.0) out.push_back({*id, value});
  }
  std::sort(out.begin(), out.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  // repeated keys are summed
  SparseVector merged;
  merged.reserve(out.size());
  for (const auto& e : out) {
    if (!merged.empty() && merged.back().index == e.index) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const SparseEntry& e) { return e.value == 0.0; });
  return merged;
}

Scaler Scaler::fit(std::span<const SparseVector> vectors, std::size_t dimension) {
  std::vector<double> factors(dimension, 0.0);
  for (const auto& v : vectors) {
    for (const auto& e : v) {
      if (e.index < dimension) factors[e.index] = std::max(factors[e.index], std::abs(e.value));
    }
  }
  return Scaler(std::move(factors));
}

SparseVector Scaler::apply(const SparseVector& v) const {
  SparseVector out = v;
  for (auto& e : out) {
    if (e.index < factors_.size() && factors_[e.index] > 0.0) e.value /= factors_[e.index];
  }
  return out;
}

}  // namespace sner
