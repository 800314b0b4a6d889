#include "igcn/params_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace igcn {

namespace {

constexpr char kMagic[8] = {'I', 'G', 'C', 'N', 'P', 'R', 'M', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64() {
    require(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
              << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  void magic() {
    require(8);
    if (std::memcmp(bytes_.data() + pos_, kMagic, 8) != 0) {
      throw std::runtime_error("load_params: bad magic bytes");
    }
    pos_ += 8;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  void require(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw std::runtime_error("load_params: truncated file");
    }
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_params(const ModelParams& params, const std::string& path) {
  std::string out;
  out.append(kMagic, 8);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(params.variant));
  put_u32(out, static_cast<std::uint32_t>(params.gcn_weights.size()));
  put_u32(out, static_cast<std::uint32_t>(params.hidden_width()));
  put_u32(out, static_cast<std::uint32_t>(params.num_classes()));
  for (const DenseMatrix& w : params.gcn_weights) {
    put_u32(out, static_cast<std::uint32_t>(w.rows()));
  }
  put_u32(out, static_cast<std::uint32_t>(params.head_weights.size()));
  for (const DenseMatrix& w : params.gcn_weights) {
    for (double v : w.data()) put_f64(out, v);
  }
  for (double v : params.attn_weight.data()) put_f64(out, v);
  put_f64(out, params.attn_bias);
  for (const DenseMatrix& w : params.head_weights) {
    for (double v : w.data()) put_f64(out, v);
  }

  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << out)) {
    throw std::runtime_error("save_params: cannot write " + path);
  }
}

ModelParams load_params(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("load_params: cannot open " + path);
  }
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  Reader reader(std::move(bytes));

  reader.magic();
  const std::uint32_t version = reader.u32();
  if (version != kVersion) {
    throw std::runtime_error("load_params: unsupported version " + std::to_string(version));
  }
  const std::uint32_t variant_raw = reader.u32();
  if (variant_raw > 2) {
    throw std::runtime_error("load_params: unknown variant tag");
  }
  ModelParams params;
  params.variant = static_cast<Variant>(variant_raw);
  const std::uint32_t p = reader.u32();
  const std::uint32_t hidden = reader.u32();
  const std::uint32_t classes = reader.u32();
  std::vector<std::uint32_t> dims(p);
  for (auto& d : dims) d = reader.u32();
  const std::uint32_t head_count = reader.u32();
  const std::uint32_t expected_heads = params.variant == Variant::mlp_head ? 1 : p;
  if (p == 0 || hidden == 0 || classes < 2 || head_count != expected_heads) {
    throw std::runtime_error("load_params: inconsistent shape table");
  }

  for (std::uint32_t i = 0; i < p; ++i) {
    DenseMatrix w(dims[i], hidden);
    for (double& v : w.data()) v = reader.f64();
    params.gcn_weights.push_back(std::move(w));
  }
  params.attn_weight = DenseMatrix(hidden, 1);
  for (double& v : params.attn_weight.data()) v = reader.f64();
  params.attn_bias = reader.f64();
  for (std::uint32_t i = 0; i < head_count; ++i) {
    DenseMatrix w(hidden, classes);
    for (double& v : w.data()) v = reader.f64();
    params.head_weights.push_back(std::move(w));
  }
  if (!reader.exhausted()) {
    throw std::runtime_error("load_params: trailing bytes");
  }
  return params;
}

}  // namespace igcn
