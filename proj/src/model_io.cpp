#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "wlda/errors.hpp"
#include "wlda/model.hpp"

namespace wlda {

namespace {

constexpr std::array<char, 8> kMagic = {'W', 'L', 'D', 'A', 'M', 'O', 'D', 'L'};
constexpr std::uint64_t kMaxDim = 1ull << 32;

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path.string()), in_(path, std::ios::binary) {
    if (!in_) throw ParseError(path_, 0, "cannot open model file");
  }

  template <typename T>
  T get(const char* what) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!in_.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
      throw ParseError(path_, 0, std::string("truncated model file while reading ") + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
  }

  void read_doubles(std::span<double> dst, const char* what) {
    for (double& d : dst) d = get<double>(what);
  }

  void expect_eof() {
    if (in_.peek() != std::char_traits<char>::eof()) throw ParseError(path_, 0, "trailing bytes after model data");
  }

  std::ifstream& stream() { return in_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace

void save_model(const std::filesystem::path& path, const WldaModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string(), 0, "cannot open model file for writing");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kModelFormatVersion);
  put<std::uint32_t>(out, model.encoder.activation == nn::Activation::softplus ? 0u : 1u);
  put<std::uint64_t>(out, model.vocab_size());
  put<std::uint64_t>(out, model.num_topics());
  const auto sizes = model.encoder.layer_sizes();
  put<std::uint64_t>(out, sizes.size());
  for (auto s : sizes) put<std::uint64_t>(out, s);
  for (const auto& l : model.encoder.layers) {
    for (double d : l.weight.data()) put(out, d);
    for (double d : l.bias) put(out, d);
  }
  for (double d : model.topics.data()) put(out, d);
  for (double d : model.offset) put(out, d);
  if (!out) throw ParseError(path.string(), 0, "write failed");
}

WldaModel load_model(const std::filesystem::path& path) {
  Reader r(path);
  std::array<char, 8> magic{};
  if (!r.stream().read(magic.data(), magic.size()) || magic != kMagic)
    throw ParseError(r.path(), 0, "not a W-LDA model file (bad magic)");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kModelFormatVersion)
    throw ParseError(r.path(), 0,
                     "unsupported model format version " + std::to_string(version) + " (expected " +
                         std::to_string(kModelFormatVersion) + ")");
  const auto act = r.get<std::uint32_t>("activation");
  if (act > 1) throw ParseError(r.path(), 0, "unknown activation code " + std::to_string(act));
  const auto V = r.get<std::uint64_t>("vocab size");
  const auto K = r.get<std::uint64_t>("topic count");
  const auto n_sizes = r.get<std::uint64_t>("layer count");
  if (V < 2 || K < 2 || V > kMaxDim || K > kMaxDim || n_sizes < 2 || n_sizes > 64)
    throw ParseError(r.path(), 0, "implausible model dimensions");
  std::vector<std::size_t> sizes(n_sizes);
  for (auto& s : sizes) {
    s = r.get<std::uint64_t>("layer width");
    if (s == 0 || s > kMaxDim) throw ParseError(r.path(), 0, "implausible layer width");
  }
  if (sizes.front() != V || sizes.back() != K)
    throw ParseError(r.path(), 0, "encoder widths do not match the V/K header");

  WldaModel m;
  m.encoder.activation = act == 0 ? nn::Activation::softplus : nn::Activation::leaky_relu;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    nn::Layer l{Matrix(sizes[i + 1], sizes[i]), Vector(sizes[i + 1])};
    r.read_doubles(l.weight.data(), "encoder weights");
    r.read_doubles(l.bias, "encoder bias");
    m.encoder.layers.push_back(std::move(l));
  }
  m.topics = Matrix(V, K);
  r.read_doubles(m.topics.data(), "topic matrix");
  m.offset.assign(V, 0.0);
  r.read_doubles(m.offset, "offset");
  r.expect_eof();
  return m;
}

}  // namespace wlda
