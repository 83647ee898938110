#include "opde/nn/weights_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "opde/error.hpp"

namespace opde::nn {

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'O', 'P', 'D', 'E'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

struct Reader {
  const std::string& data;
  std::size_t pos = 0;

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
  void need(std::size_t n) const {
    if (pos + n > data.size()) throw DataError("tensor file is truncated");
  }
};

}  // namespace

const Parameter<float>* TensorFile::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void write_tensor_file(const std::filesystem::path& path, const TensorFile& file) {
  const std::string meta = file.metadata.dump();
  std::string header;
  header.append(kMagic, 4);
  put<std::uint32_t>(header, kVersion);
  put<std::uint32_t>(header, static_cast<std::uint32_t>(meta.size()));
  header += meta;
  put<std::uint32_t>(header, static_cast<std::uint32_t>(file.tensors.size()));

  // Table size is known up front, so payload offsets can be absolute.
  std::size_t table = 0;
  for (const auto& t : file.tensors) table += 4 + t.name.size() + 4 + 2 * 4 + 8;
  std::uint64_t offset = header.size() + table;
  std::string body;
  for (const auto& t : file.tensors) {
    put<std::uint32_t>(header, static_cast<std::uint32_t>(t.name.size()));
    header += t.name;
    put<std::uint32_t>(header, 2);
    put<std::uint32_t>(header, static_cast<std::uint32_t>(t.value.rows()));
    put<std::uint32_t>(header, static_cast<std::uint32_t>(t.value.cols()));
    put<std::uint64_t>(header, offset);
    const auto n = static_cast<std::size_t>(t.value.size()) * sizeof(float);
    body.append(reinterpret_cast<const char*>(t.value.data()), n);
    offset += n;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r{data};
  if (r.bytes(4) != std::string(kMagic, 4)) throw DataError(path.string() + " is not a tensor file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw DataError("unsupported tensor file version " + std::to_string(version));
  TensorFile file;
  const auto meta_len = r.get<std::uint32_t>();
  try {
    file.metadata = nlohmann::json::parse(r.bytes(meta_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("tensor file metadata: ") + e.what());
  }
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    Parameter<float> t;
    t.name = r.bytes(r.get<std::uint32_t>());
    const auto rank = r.get<std::uint32_t>();
    if (rank < 1 || rank > 2) throw DataError("tensor " + t.name + " has unsupported rank");
    std::uint32_t dims[2] = {1, 1};
    for (std::uint32_t d = 0; d < rank; ++d) dims[d] = r.get<std::uint32_t>();
    if (rank == 1) std::swap(dims[0], dims[1]);  // vectors load as a single row
    const auto offset = r.get<std::uint64_t>();
    const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1];
    if (offset + n * sizeof(float) > data.size()) throw DataError("tensor " + t.name + " runs past end of file");
    t.value.resize(dims[0], dims[1]);
    std::memcpy(t.value.data(), data.data() + offset, n * sizeof(float));
    t.zero_grad();
    file.tensors.push_back(std::move(t));
  }
  return file;
}

}  // namespace opde::nn
