#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace sner {

// A feature is categorical (string value, one-hot encoded as "name=value")
// or numeric (one column "name" carrying the value).
using FeatureValue = std::variant<std::string, double>;

struct Feature {
  std::string name;
  FeatureValue value;

  friend bool operator==(const Feature&, const Feature&) = default;
};

using FeatureSet = std::vector<Feature>;

inline constexpr std::size_t kDefaultWindow = 2;
inline constexpr std::string_view kBosSentinel = "__BOS__";
inline constexpr std::string_view kEosSentinel = "__EOS__";

// Shape alphabet: Latin upper 'X', Latin lower 'x', any digit '#',
// Arabic-script letter 'a', anything else '-'; runs collapse to one symbol.
std::string word_shape(std::string_view token);

// Features of position i. Reads only the surfaces, never tags.
//   bias=1, w, p1..p3, s1..s3 (clamped to token length), digit, shape, len,
//   upper (Latin capitalization), symbol, and w[-k]/w[+k] for k in 1..window.
FeatureSet token_features(std::span<const std::string> sentence, std::size_t i,
                          std::size_t window = kDefaultWindow);

std::vector<FeatureSet> sentence_features(std::span<const std::string> sentence,
                                          std::size_t window = kDefaultWindow);

std::string feature_key(const Feature& f);

struct SparseEntry {
  std::uint32_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Strictly increasing indices, no explicit zeros.
using SparseVector = std::vector<SparseEntry>;

double dot(const SparseVector& x, std::span<const double> dense);

// Dense ids 0..N-1 over feature keys.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  // Builds a frozen index with the given key order.
  static FeatureIndex from_keys(std::vector<std::string> keys);

  // Registers every key of the set. Throws std::logic_error once frozen.
  void fit(const FeatureSet& features);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::size_t size() const { return keys_.size(); }
  const std::vector<std::string>& keys() const { return keys_; }
  std::optional<std::uint32_t> find(std::string_view key) const;

  // Unseen features are dropped. Throws std::logic_error if nothing was fitted.
  SparseVector vectorize(const FeatureSet& features) const;

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> keys_;
  bool frozen_ = false;
  bool fitted_ = false;
};

// Max-abs scaling. Columns with factor 0 (never seen at fit time, or all
// zeros) pass through unchanged.
class Scaler {
 public:
  Scaler() = default;
  explicit Scaler(std::vector<double> factors) : factors_(std::move(factors)) {}

  static Scaler fit(std::span<const SparseVector> vectors, std::size_t dimension);

  SparseVector apply(const SparseVector& v) const;
  const std::vector<double>& factors() const { return factors_; }

 private:
  std::vector<double> factors_;
};

}  // namespace sner
