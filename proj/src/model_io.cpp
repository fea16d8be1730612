#include "sner/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sner/error.hpp"

namespace sner {

namespace {

constexpr std::string_view kMagic = "SNERMODL";

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.append(s);
  }
  void raw(std::string_view s) { bytes_.append(s); }
  const std::string& bytes() const { return bytes_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int k = 0; k < width; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
  }
  std::string bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw DataError("model file is truncated");
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::uint64_t get(int width) {
    const auto chunk = take(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int k = width - 1; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(chunk[k]);
    return v;
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string wrap(ModelType type, const std::string& payload) {
  ByteWriter out;
  out.raw(kMagic);
  out.u32(kModelFormatVersion);
  out.u32(static_cast<std::uint32_t>(type));
  out.u64(payload.size());
  out.raw(payload);
  out.u64(fnv1a64(payload));
  return out.bytes();
}

void write_keys(ByteWriter& out, const FeatureIndex& index) {
  out.u32(static_cast<std::uint32_t>(index.size()));
  for (const auto& key : index.keys()) out.str(key);
}

FeatureIndex read_keys(ByteReader& in) {
  const std::uint32_t n = in.u32();
  std::vector<std::string> keys;
  keys.reserve(n);
  for (std::uint32_t k = 0; k < n; ++k) keys.push_back(in.str());
  return FeatureIndex::from_keys(std::move(keys));
}

CrfModel decode_crf(ByteReader& in) {
  CrfTrainConfig config;
  config.window = in.u32();
  config.l1 = in.f64();
  config.l2 = in.f64();
  config.max_iterations = static_cast<int>(in.u32());
  config.tolerance = in.f64();
  config.history = static_cast<int>(in.u32());
  const std::uint32_t n_labels = in.u32();
  std::vector<std::string> labels;
  for (std::uint32_t k = 0; k < n_labels; ++k) labels.push_back(in.str());
  FeatureIndex index = read_keys(in);
  CrfModel model(std::move(labels), std::move(index), config);
  const std::uint64_t n_weights = in.u64();
  if (n_weights != model.num_weights()) throw DataError("model weight count is inconsistent");
  std::vector<double> weights(n_weights);
  for (auto& w : weights) w = in.f64();
  model.set_weights(std::move(weights));
  return model;
}

LinearModel decode_svm(ByteReader& in) {
  SvmTrainConfig config;
  config.window = in.u32();
  config.c = in.f64();
  config.tolerance = in.f64();
  config.max_epochs = static_cast<int>(in.u32());
  config.seed = in.u64();
  const std::uint32_t n_labels = in.u32();
  if (n_labels != kNumLabels) throw DataError("SVM model must carry 11 labels");
  for (std::uint32_t k = 0; k < n_labels; ++k) {
    if (in.str() != Label::from_index(k).str()) throw DataError("SVM label order mismatch");
  }
  FeatureIndex index = read_keys(in);
  std::vector<double> factors(index.size());
  for (auto& f : factors) f = in.f64();
  LinearModel model(std::move(index), Scaler(std::move(factors)), config);
  for (std::size_t y = 0; y < kNumLabels; ++y) {
    for (auto& w : model.weights(y)) w = in.f64();
    model.bias(y) = in.f64();
  }
  return model;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string encode_model(const CrfModel& model) {
  ByteWriter out;
  const auto& config = model.config();
  out.u32(static_cast<std::uint32_t>(config.window));
  out.f64(config.l1);
  out.f64(config.l2);
  out.u32(static_cast<std::uint32_t>(config.max_iterations));
  out.f64(config.tolerance);
  out.u32(static_cast<std::uint32_t>(config.history));
  out.u32(static_cast<std::uint32_t>(model.num_labels()));
  for (const auto& label : model.labels()) out.str(label);
  write_keys(out, model.index());
  out.u64(model.num_weights());
  for (double w : model.weights()) out.f64(w);
  return wrap(ModelType::Crf, out.bytes());
}

std::string encode_model(const LinearModel& model) {
  ByteWriter out;
  const auto& config = model.config();
  out.u32(static_cast<std::uint32_t>(config.window));
  out.f64(config.c);
  out.f64(config.tolerance);
  out.u32(static_cast<std::uint32_t>(config.max_epochs));
  out.u64(config.seed);
  out.u32(static_cast<std::uint32_t>(kNumLabels));
  for (const auto& label : all_labels()) out.str(label.str());
  write_keys(out, model.index());
  for (double f : model.scaler().factors()) out.f64(f);
  for (std::size_t y = 0; y < kNumLabels; ++y) {
    for (double w : model.weights(y)) out.f64(w);
    out.f64(model.bias(y));
  }
  return wrap(ModelType::Svm, out.bytes());
}

AnyModel decode_model(std::string_view bytes) {
  ByteReader header(bytes);
  if (bytes.size() < kMagic.size() || header.take(kMagic.size()) != kMagic) {
    throw DataError("not a model file (bad magic bytes)");
  }
  const std::uint32_t version = header.u32();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version) +
                    " (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  const std::uint32_t type = header.u32();
  const std::uint64_t length = header.u64();
  const std::string_view payload = header.take(length);
  const std::uint64_t checksum = header.u64();
  if (!header.at_end()) throw DataError("trailing bytes after model checksum");
  if (checksum != fnv1a64(payload)) throw DataError("model checksum mismatch");

  ByteReader in(payload);
  AnyModel model;
  switch (static_cast<ModelType>(type)) {
    case ModelType::Crf:
      model = decode_crf(in);
      break;
    case ModelType::Svm:
      model = decode_svm(in);
      break;
    default:
      throw DataError("unknown model type tag " + std::to_string(type));
  }
  if (!in.at_end()) throw DataError("model payload has trailing bytes");
  return model;
}

void save_model(const std::string& path, const CrfModel& model) {
  write_file(path, encode_model(model));
}

void save_model(const std::string& path, const LinearModel& model) {
  write_file(path, encode_model(model));
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return decode_model(buf.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace sner
