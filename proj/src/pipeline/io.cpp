#include "spectralift/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "spectralift/error.hpp"

namespace spectralift::io {
namespace {

using Bytes = std::vector<unsigned char>;

template <class T>
void put_le(Bytes& out, T value) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>,
                                                    std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>, T>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <class U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

template <class U>
U get_be(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v = static_cast<U>((v << 8) | p[i]);
  return v;
}

Bytes read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_all(const std::filesystem::path& path, const Bytes& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

std::uint64_t checked_product(std::initializer_list<std::uint64_t> factors, const std::string& what) {
  std::uint64_t p = 1;
  for (std::uint64_t f : factors) {
    if (f != 0 && p > std::numeric_limits<std::uint64_t>::max() / f) throw FormatError(what + ": dimensions overflow");
    p *= f;
  }
  return p;
}

std::uint32_t to_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw DimensionError(std::string(what) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_cube_file(const std::filesystem::path& path, const CubeShape& shape, std::span<const float> data) {
  detail::check_length(shape, data.size());
  Bytes out;
  out.reserve(kCubeHeaderBytes + data.size() * 4);
  for (char ch : {'S', 'L', 'C', '1'}) out.push_back(static_cast<unsigned char>(ch));
  put_le(out, to_u32(shape.height, "height"));
  put_le(out, to_u32(shape.width, "width"));
  put_le(out, to_u32(shape.bands, "bands"));
  out.push_back(1);  // float32
  out.push_back(0);  // little-endian
  put_le(out, std::uint16_t{0});
  for (float v : data) put_le(out, v);
  write_all(path, out);
}

RawCube read_cube_file(const std::filesystem::path& path) {
  const Bytes bytes = read_all(path);
  if (bytes.size() < kCubeHeaderBytes) {
    throw FormatError("'" + path.string() + "': truncated header (" + std::to_string(bytes.size()) + " of " +
                      std::to_string(kCubeHeaderBytes) + " bytes)");
  }
  if (std::memcmp(bytes.data(), "SLC1", 4) != 0) throw FormatError("'" + path.string() + "': bad magic, not a cube file");
  const CubeShape shape{get_le<std::uint32_t>(&bytes[4]), get_le<std::uint32_t>(&bytes[8]),
                        get_le<std::uint32_t>(&bytes[12])};
  if (bytes[16] != 1) throw FormatError("'" + path.string() + "': unsupported dtype code " + std::to_string(bytes[16]));
  if (bytes[17] != 0) throw FormatError("'" + path.string() + "': unsupported endianness flag");
  const std::uint64_t payload = checked_product({shape.height, shape.width, shape.bands, 4}, path.string());
  const std::uint64_t have = bytes.size() - kCubeHeaderBytes;
  if (have < payload) {
    throw FormatError("'" + path.string() + "': truncated payload, expected " + std::to_string(payload) +
                      " bytes, found " + std::to_string(have));
  }
  if (have > payload) {
    throw FormatError("'" + path.string() + "': " + std::to_string(have - payload) + " trailing bytes after payload");
  }
  RawCube raw{shape, std::vector<float>(shape.size())};
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    raw.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(&bytes[kCubeHeaderBytes + 4 * i]));
  }
  return raw;
}

HsiCube import_raw(const std::filesystem::path& payload, const std::filesystem::path& sidecar) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_text(sidecar));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("sidecar '" + sidecar.string() + "': " + e.what());
  }
  for (const char* key : {"height", "width", "bands"}) {
    if (!meta.contains(key) || !meta[key].is_number_unsigned()) {
      throw FormatError("sidecar '" + sidecar.string() + "': missing or invalid '" + key + "'");
    }
  }
  const CubeShape shape{meta["height"].get<std::size_t>(), meta["width"].get<std::size_t>(),
                        meta["bands"].get<std::size_t>()};
  const std::string dtype = meta.value("dtype", "float32");
  const std::string interleave = meta.value("interleave", "bip");
  const bool big_endian = meta.value("byte_order", "little") == "big";
  const std::size_t offset = meta.value("header_offset", std::size_t{0});

  std::size_t width_bytes = 0;
  if (dtype == "float32") width_bytes = 4;
  else if (dtype == "float64") width_bytes = 8;
  else if (dtype == "uint16" || dtype == "int16") width_bytes = 2;
  else if (dtype == "uint8") width_bytes = 1;
  else throw FormatError("sidecar '" + sidecar.string() + "': unsupported dtype '" + dtype + "'");
  if (interleave != "bip" && interleave != "bil" && interleave != "bsq") {
    throw FormatError("sidecar '" + sidecar.string() + "': unsupported interleave '" + interleave + "'");
  }

  const Bytes bytes = read_all(payload);
  const std::uint64_t expected = checked_product({shape.height, shape.width, shape.bands, width_bytes}, payload.string());
  if (bytes.size() < offset || bytes.size() - offset != expected) {
    throw DimensionError("raw import: sidecar describes " + to_string(shape) + " " + dtype + " (" +
                         std::to_string(expected) + " bytes) but payload has " +
                         std::to_string(bytes.size() < offset ? 0 : bytes.size() - offset) + " bytes");
  }

  auto sample = [&](std::size_t index) -> double {
    const unsigned char* p = bytes.data() + offset + index * width_bytes;
    auto u16 = [&] { return big_endian ? get_be<std::uint16_t>(p) : get_le<std::uint16_t>(p); };
    auto u32 = [&] { return big_endian ? get_be<std::uint32_t>(p) : get_le<std::uint32_t>(p); };
    auto u64 = [&] { return big_endian ? get_be<std::uint64_t>(p) : get_le<std::uint64_t>(p); };
    if (dtype == "float32") return std::bit_cast<float>(u32());
    if (dtype == "float64") return std::bit_cast<double>(u64());
    if (dtype == "uint16") return u16();
    if (dtype == "int16") return static_cast<std::int16_t>(u16());
    return *p;
  };

  std::vector<float> data(shape.size());
  const std::size_t H = shape.height, W = shape.width, C = shape.bands;
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      for (std::size_t b = 0; b < C; ++b) {
        std::size_t src = 0;
        if (interleave == "bip") src = (i * W + j) * C + b;
        else if (interleave == "bil") src = (i * C + b) * W + j;
        else src = (b * H + i) * W + j;
        data[(i * W + j) * C + b] = static_cast<float>(sample(src));
      }
    }
  }
  return HsiCube(shape, std::move(data));
}

SrfMatrix read_srf_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<double> weights;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        weights.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError("SRF CSV '" + path.string() + "' row " + std::to_string(rows + 1) + ": bad value '" + cell + "'");
      }
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) {
      throw FormatError("SRF CSV '" + path.string() + "' row " + std::to_string(rows + 1) + " has " +
                        std::to_string(n) + " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("SRF CSV '" + path.string() + "' is empty");
  return SrfMatrix(rows, cols, std::move(weights));
}

void write_srf_csv(const SrfMatrix& srf, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t n = 0; n < srf.rows(); ++n) {
    for (std::size_t m = 0; m < srf.cols(); ++m) out << (m ? "," : "") << srf(n, m);
    out << '\n';
  }
  write_text(path, out.str());
}

void save_params(const SinParams& params, const std::filesystem::path& path) {
  const Architecture& a = params.arch();
  Bytes out;
  for (char ch : {'S', 'L', 'P', '1'}) out.push_back(static_cast<unsigned char>(ch));
  put_le(out, kParamsVersion);
  put_le(out, to_u32(a.in_bands, "in_bands"));
  put_le(out, to_u32(a.out_bands, "out_bands"));
  put_le(out, to_u32(a.hidden_width, "hidden_width"));
  put_le(out, to_u32(a.hidden_layers, "hidden_layers"));
  out.push_back(static_cast<unsigned char>(a.activation));
  out.push_back(a.skip ? 1 : 0);
  put_le(out, std::uint16_t{0});
  put_le(out, a.leaky_slope);
  put_le(out, static_cast<std::uint64_t>(params.size()));
  for (double v : params.values()) put_le(out, static_cast<float>(v));
  write_all(path, out);
}

SinParams load_params(const std::filesystem::path& path) {
  const Bytes bytes = read_all(path);
  constexpr std::size_t kHeader = 44;
  if (bytes.size() < kHeader) throw FormatError("'" + path.string() + "': truncated parameter header");
  if (std::memcmp(bytes.data(), "SLP1", 4) != 0) throw FormatError("'" + path.string() + "': bad magic, not a parameter file");
  const auto version = get_le<std::uint32_t>(&bytes[4]);
  if (version != kParamsVersion) throw FormatError("'" + path.string() + "': unsupported version " + std::to_string(version));
  Architecture a;
  a.in_bands = get_le<std::uint32_t>(&bytes[8]);
  a.out_bands = get_le<std::uint32_t>(&bytes[12]);
  a.hidden_width = get_le<std::uint32_t>(&bytes[16]);
  a.hidden_layers = get_le<std::uint32_t>(&bytes[20]);
  if (bytes[24] > static_cast<unsigned char>(Activation::Gelu)) throw FormatError("'" + path.string() + "': bad activation code");
  a.activation = static_cast<Activation>(bytes[24]);
  a.skip = bytes[25] != 0;
  a.leaky_slope = std::bit_cast<double>(get_le<std::uint64_t>(&bytes[28]));
  const auto count = get_le<std::uint64_t>(&bytes[36]);
  if (count != a.parameter_count()) throw FormatError("'" + path.string() + "': parameter count does not match architecture");
  const std::uint64_t need = checked_product({count, 4}, path.string());
  if (bytes.size() - kHeader != need) {
    throw FormatError("'" + path.string() + "': truncated parameters, expected " + std::to_string(need) +
                      " bytes, found " + std::to_string(bytes.size() - kHeader));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_le<std::uint32_t>(&bytes[kHeader + 4 * i]));
  }
  return SinParams(a, std::move(values));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_all(path, Bytes(text.begin(), text.end()));
}

std::string read_text(const std::filesystem::path& path) {
  const Bytes b = read_all(path);
  return std::string(b.begin(), b.end());
}

}  // namespace spectralift::io
