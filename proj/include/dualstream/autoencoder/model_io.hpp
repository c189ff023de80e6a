#ifndef DUALSTREAM_AUTOENCODER_MODEL_IO_HPP
#define DUALSTREAM_AUTOENCODER_MODEL_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "../error.hpp"
#include "../text.hpp"
#include "model.hpp"

// Model file layout (little endian):
//   "LSAE" | u32 version | u32 input_dim | u32 n_layers | u32 width[n_layers]
//   | f64 mean[input_dim] | f64 stddev[input_dim]
//   | f64 tensors in Parameters::tensors() order (matrices row-major)
//   | u64 FNV-1a of every preceding byte

namespace dualstream::ae {

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

inline constexpr char kModelMagic[4] = {'L', 'S', 'A', 'E'};

namespace detail {

class ByteWriter {
public:
  template <class T>
  void put(T value) {
    const auto* p = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<char>& bytes() { return bytes_; }

private:
  std::vector<char> bytes_;
};

class ByteReader {
public:
  ByteReader(const char* data, std::size_t size) : data_(data), size_(size) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > size_)
      throw ModelFormatError(ModelFormatErrorKind::ChecksumMismatch, "model file is truncated");
    T value;
    std::memcpy(&value, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::size_t position() const { return pos_; }

private:
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

inline std::uint64_t checksum(const char* data, std::size_t n) {
  text::Fnv1a64 h;
  h.update(data, n);
  return h.digest();
}

} // namespace detail

inline std::vector<char> serialize_model(const AutoencoderModel& model) {
  detail::ByteWriter w;
  w.put_bytes(kModelMagic, 4);
  w.put<std::uint32_t>(model.format_version);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.topology.input_dim));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.topology.encoder_hidden.size()));
  for (int width : model.topology.encoder_hidden) w.put<std::uint32_t>(static_cast<std::uint32_t>(width));
  for (double m : model.norm.mean) w.put<double>(m);
  for (double s : model.norm.stddev) w.put<double>(s);
  for (auto t : model.params.tensors())
    for (double x : t) w.put<double>(x);
  auto& bytes = w.bytes();
  const auto sum = detail::checksum(bytes.data(), bytes.size());
  w.put<std::uint64_t>(sum);
  return std::move(bytes);
}

/// Validates magic, version and checksum before decoding anything else; a file
/// that was cut short fails the checksum.
inline AutoencoderModel deserialize_model(const std::vector<char>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kModelMagic, 4) != 0)
    throw ModelFormatError(ModelFormatErrorKind::BadMagic, "not an LSAE model file");
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + 4, sizeof(version));
  if (version != kModelFormatVersion)
    throw ModelFormatError(ModelFormatErrorKind::UnsupportedVersion,
                           "unsupported model format version " + std::to_string(version));
  if (bytes.size() < 16)
    throw ModelFormatError(ModelFormatErrorKind::ChecksumMismatch, "model file is truncated");
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, sizeof(stored));
  if (stored != detail::checksum(bytes.data(), body))
    throw ModelFormatError(ModelFormatErrorKind::ChecksumMismatch, "model checksum mismatch");

  detail::ByteReader r(bytes.data(), body);
  r.get<std::uint32_t>(); // magic
  r.get<std::uint32_t>(); // version
  AutoencoderModel model;
  model.format_version = version;
  model.topology.input_dim = static_cast<int>(r.get<std::uint32_t>());
  const auto layers = r.get<std::uint32_t>();
  if (layers == 0 || layers > 64 || model.topology.input_dim < 1 || model.topology.input_dim > 1024)
    throw ModelFormatError(ModelFormatErrorKind::ChecksumMismatch, "implausible topology block");
  model.topology.encoder_hidden.clear();
  for (std::uint32_t i = 0; i < layers; ++i) {
    const auto width = r.get<std::uint32_t>();
    if (width == 0 || width > 65536)
      throw ModelFormatError(ModelFormatErrorKind::ChecksumMismatch, "implausible layer width");
    model.topology.encoder_hidden.push_back(static_cast<int>(width));
  }
  const auto d = static_cast<std::size_t>(model.topology.input_dim);
  model.norm.mean.resize(d);
  model.norm.stddev.resize(d);
  for (auto& m : model.norm.mean) m = r.get<double>();
  for (auto& s : model.norm.stddev) s = r.get<double>();
  model.params = Parameters::zeros(model.topology);
  for (auto t : model.params.tensors())
    for (double& x : t) x = r.get<double>();
  if (r.position() != body)
    throw ModelFormatError(ModelFormatErrorKind::ChecksumMismatch, "trailing bytes in model file");
  return model;
}

inline void save_model(const AutoencoderModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelFormatError(ModelFormatErrorKind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelFormatError(ModelFormatErrorKind::Io, "write failed: " + path.string());
}

inline AutoencoderModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError(ModelFormatErrorKind::Io, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

} // namespace dualstream::ae

#endif // DUALSTREAM_AUTOENCODER_MODEL_IO_HPP
