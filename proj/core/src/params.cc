#include "gparse/params.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gparse/errors.h"
#include "gparse/vocab.h"

namespace gparse {

namespace {

constexpr char kMagic[8] = {'G', 'P', 'A', 'R', 'S', 'E', 'M', 'D'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(ErrorCode::kBadFormat, "truncated model file");
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
      for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string get_string(size_t n) {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kBadFormat, "truncated model file");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
};

void put_tensor(std::string& out, const std::string& name, const Tensor& t, Precision p) {
  put<uint32_t>(out, static_cast<uint32_t>(name.size()));
  out += name;
  put<uint64_t>(out, t.rows());
  put<uint64_t>(out, t.cols());
  for (double v : t.values()) {
    if (p == Precision::kFloat64) {
      put<double>(out, v);
    } else {
      put<float>(out, static_cast<float>(v));
    }
  }
}

Tensor vector_tensor(std::initializer_list<double> values) {
  Tensor t(values.size(), 1);
  size_t i = 0;
  for (double v : values) t(i++, 0) = v;
  return t;
}

}  // namespace

ModelParams ModelParams::create(const Dims& dims, int num_words, int num_tag_columns, int num_bioes,
                                double p_drop, Rng& rng) {
  if (dims.word < 1 || dims.tag < 1 || dims.hidden < 1 || dims.window < 1 || dims.max_arity < 2 ||
      dims.window % 2 == 0) {
    throw Error(ErrorCode::kShapeMismatch,
                "dimensions must be positive, the window odd and max arity at least 2");
  }
  if (!(p_drop >= 0.0 && p_drop < 1.0)) {
    throw Error(ErrorCode::kShapeMismatch, "dropout probability must lie in [0, 1)");
  }
  ModelParams p;
  p.dims = dims;
  p.p_drop = p_drop;
  const size_t d = dims.word;
  const size_t f = dims.feature();

  p.words = Tensor(d, num_words);
  init_uniform(p.words, kLookupInitBound, rng);
  p.tags = Tensor(dims.tag, num_tag_columns);
  init_uniform(p.tags, kLookupInitBound, rng);
  for (int k = 1; k <= dims.max_arity; ++k) {
    Tensor m(d, k * f);
    init_uniform(m, 1.0 / std::sqrt(static_cast<double>(p.compose_fan_in(k))), rng);
    p.compose.push_back(std::move(m));
  }
  p.hidden = Tensor(dims.hidden, dims.window * f);
  init_uniform(p.hidden, 1.0 / std::sqrt(static_cast<double>(p.hidden_fan_in())), rng);
  p.output = Tensor(num_bioes, dims.hidden);
  init_uniform(p.output, 1.0 / std::sqrt(static_cast<double>(p.output_fan_in())), rng);
  p.pad = Tensor(f, 1);
  init_uniform(p.pad, kLookupInitBound, rng);
  return p;
}

ModelParams ModelParams::create(const Dims& dims, const TagSet& tagset, double p_drop, Rng& rng) {
  return create(dims, tagset.num_words(), tagset.num_tag_columns(), tagset.num_bioes(), p_drop, rng);
}

void ModelParams::check_compatible(const TagSet& tagset) const {
  if (static_cast<int>(words.cols()) != tagset.num_words() ||
      static_cast<int>(tags.cols()) != tagset.num_tag_columns() ||
      num_bioes() != tagset.num_bioes()) {
    std::ostringstream msg;
    msg << "model has " << words.cols() << " words, " << tags.cols() << " tag columns, "
        << num_bioes() << " output tags; tagset has " << tagset.num_words() << ", "
        << tagset.num_tag_columns() << ", " << tagset.num_bioes();
    throw Error(ErrorCode::kTagsetMismatch, msg.str());
  }
}

bool ModelParams::bit_equal(const ModelParams& o) const {
  if (!(dims == o.dims) || std::memcmp(&p_drop, &o.p_drop, sizeof(double)) != 0) return false;
  if (compose.size() != o.compose.size()) return false;
  for (size_t k = 0; k < compose.size(); ++k) {
    if (!compose[k].bit_equal(o.compose[k])) return false;
  }
  return words.bit_equal(o.words) && tags.bit_equal(o.tags) && hidden.bit_equal(o.hidden) &&
         output.bit_equal(o.output) && pad.bit_equal(o.pad);
}

std::string ModelParams::serialize(Precision precision) const {
  std::string out(kMagic, sizeof(kMagic));
  put<uint32_t>(out, kFormatVersion);
  put<uint32_t>(out, precision == Precision::kFloat64 ? 64 : 32);
  put<uint32_t>(out, static_cast<uint32_t>(7 + compose.size()));
  put_tensor(out, "dims",
             vector_tensor({double(dims.word), double(dims.tag), double(dims.hidden),
                            double(dims.window), double(dims.max_arity)}),
             precision);
  put_tensor(out, "dropout", vector_tensor({p_drop}), precision);
  put_tensor(out, "W", words, precision);
  put_tensor(out, "T", tags, precision);
  for (size_t k = 0; k < compose.size(); ++k) {
    put_tensor(out, "C" + std::to_string(k + 1), compose[k], precision);
  }
  put_tensor(out, "M1", hidden, precision);
  put_tensor(out, "M2", output, precision);
  put_tensor(out, "pad", pad, precision);
  return out;
}

ModelParams ModelParams::deserialize(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw Error(ErrorCode::kBadFormat, "not a gparse model file");
  }
  if (const auto v = in.get<uint32_t>(); v != kFormatVersion) {
    throw Error(ErrorCode::kBadFormat, "unsupported model format version " + std::to_string(v));
  }
  const auto bits = in.get<uint32_t>();
  if (bits != 64 && bits != 32) throw Error(ErrorCode::kBadFormat, "bad precision flag");
  const auto count = in.get<uint32_t>();

  std::map<std::string, Tensor> named;
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = in.get_string(in.get<uint32_t>());
    const auto rows = in.get<uint64_t>();
    const auto cols = in.get<uint64_t>();
    Tensor t(rows, cols);
    for (double& v : t.values()) v = bits == 64 ? in.get<double>() : double(in.get<float>());
    named[name] = std::move(t);
  }
  if (!in.done()) throw Error(ErrorCode::kBadFormat, "trailing bytes in model file");

  auto take = [&named](const std::string& name) {
    auto it = named.find(name);
    if (it == named.end()) throw Error(ErrorCode::kBadFormat, "model file lacks tensor " + name);
    return std::move(it->second);
  };
  ModelParams p;
  const Tensor dims = take("dims");
  if (dims.size() != 5) throw Error(ErrorCode::kBadFormat, "bad dims tensor");
  p.dims = {int(dims(0, 0)), int(dims(1, 0)), int(dims(2, 0)), int(dims(3, 0)), int(dims(4, 0))};
  p.p_drop = take("dropout")(0, 0);
  p.words = take("W");
  p.tags = take("T");
  for (int k = 1; k <= p.dims.max_arity; ++k) p.compose.push_back(take("C" + std::to_string(k)));
  p.hidden = take("M1");
  p.output = take("M2");
  p.pad = take("pad");

  const size_t d = p.dims.word;
  const size_t f = p.dims.feature();
  bool ok = p.words.rows() == d && p.tags.rows() == size_t(p.dims.tag) &&
            p.hidden.rows() == size_t(p.dims.hidden) && p.hidden.cols() == p.dims.window * f &&
            p.output.cols() == size_t(p.dims.hidden) && p.pad.rows() == f && p.pad.cols() == 1;
  for (int k = 1; k <= p.dims.max_arity; ++k) {
    ok = ok && p.compose[k - 1].rows() == d && p.compose[k - 1].cols() == k * f;
  }
  if (!ok) throw Error(ErrorCode::kShapeMismatch, "model tensors disagree with stored dims");
  return p;
}

void ModelParams::save(const std::filesystem::path& path, Precision precision) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  const std::string bytes = serialize(precision);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ModelParams ModelParams::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

ParamGrads::ParamGrads(const ModelParams& params)
    : word_dim(params.words.rows()),
      tag_dim(params.tags.rows()),
      compose_touched(params.compose.size(), false),
      hidden(params.hidden.rows(), params.hidden.cols()),
      output(params.output.rows(), params.output.cols()),
      pad(params.pad.rows(), params.pad.cols()) {
  for (const auto& m : params.compose) compose.emplace_back(m.rows(), m.cols());
}

Vec& ParamGrads::word_column(int index) {
  auto [it, inserted] = words.try_emplace(index);
  if (inserted) it->second.assign(word_dim, 0.0);
  return it->second;
}

Vec& ParamGrads::tag_column(int index) {
  auto [it, inserted] = tags.try_emplace(index);
  if (inserted) it->second.assign(tag_dim, 0.0);
  return it->second;
}

void ParamGrads::clear() {
  words.clear();
  tags.clear();
  for (size_t k = 0; k < compose.size(); ++k) {
    if (compose_touched[k]) compose[k].fill(0.0);
    compose_touched[k] = false;
  }
  hidden.fill(0.0);
  output.fill(0.0);
  pad.fill(0.0);
}

void apply_gradients(ModelParams& params, const ParamGrads& grads, double base_lr) {
  for (const auto& [index, g] : grads.words) sgd_update(params.words.col(index), g, base_lr, 1);
  for (const auto& [index, g] : grads.tags) sgd_update(params.tags.col(index), g, base_lr, 1);
  for (size_t k = 0; k < params.compose.size(); ++k) {
    if (grads.compose_touched[k]) {
      sgd_update(params.compose[k], grads.compose[k], base_lr, params.compose_fan_in(int(k) + 1));
    }
  }
  sgd_update(params.hidden, grads.hidden, base_lr, params.hidden_fan_in());
  sgd_update(params.output, grads.output, base_lr, params.output_fan_in());
  sgd_update(params.pad, grads.pad, base_lr, 1);
}

}  // namespace gparse
