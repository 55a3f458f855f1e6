#include "tat/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace tat {

namespace {

constexpr char kMagic[8] = {'T', 'A', 'T', 'B', '1', '\n', '\0', '\0'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  static thread_local std::mt19937_64 rng(std::random_device{}());
  std::ostringstream os;
  os << path.filename().string() << ".tmp" << std::hex << rng();
  return path.parent_path() / os.str();
}

template <class Writer>
void atomic_write(const std::filesystem::path& path, Writer&& write) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    write(os);
    os.flush();
    if (!os) {
      os.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  return n;
}

}  // namespace

void write_tatb(const std::filesystem::path& path, const TatbArray& a) {
  if (a.dtype != "f64" && a.dtype != "f32") throw IoError("unsupported dtype " + a.dtype);
  if (element_count(a.shape) != a.data.size()) throw IoError("shape does not match payload size");
  nlohmann::json h{{"dtype", a.dtype}, {"shape", a.shape}, {"kind", a.kind}, {"meta", a.meta}};
  const std::string header = h.dump();
  atomic_write(path, [&](std::ofstream& os) {
    os.write(kMagic, sizeof(kMagic));
    const std::uint32_t len = to_little(static_cast<std::uint32_t>(header.size()));
    os.write(reinterpret_cast<const char*>(&len), sizeof(len));
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    if (a.dtype == "f64") {
      std::vector<double> buf(a.data.size());
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_little(a.data[i]);
      os.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(double)));
    } else {
      std::vector<float> buf(a.data.size());
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_little(static_cast<float>(a.data[i]));
      os.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
  });
}

TatbArray read_tatb(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError(path.string() + ": not a TATB1 file");
  std::uint32_t len = 0;
  is.read(reinterpret_cast<char*>(&len), sizeof(len));
  len = to_little(len);
  if (!is || len > (1u << 26)) throw IoError(path.string() + ": bad header length");
  std::string header(len, '\0');
  is.read(header.data(), len);
  if (!is) throw IoError(path.string() + ": truncated header");
  TatbArray a;
  try {
    const auto h = nlohmann::json::parse(header);
    a.dtype = h.at("dtype").get<std::string>();
    a.shape = h.at("shape").get<std::vector<std::size_t>>();
    a.kind = h.value("kind", "");
    a.meta = h.value("meta", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": malformed header: " + e.what());
  }
  const std::size_t n = element_count(a.shape);
  a.data.resize(n);
  if (a.dtype == "f64") {
    is.read(reinterpret_cast<char*>(a.data.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw IoError(path.string() + ": truncated payload");
    for (auto& v : a.data) v = to_little(v);
  } else if (a.dtype == "f32") {
    std::vector<float> buf(n);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (!is) throw IoError(path.string() + ": truncated payload");
    for (std::size_t i = 0; i < n; ++i) a.data[i] = to_little(buf[i]);
  } else {
    throw IoError(path.string() + ": unsupported dtype " + a.dtype);
  }
  is.peek();
  if (!is.eof()) throw IoError(path.string() + ": trailing bytes after payload");
  return a;
}

void save_image(const std::filesystem::path& path, const ImageGrid& f, const nlohmann::json& meta) {
  TatbArray a;
  a.kind = "image";
  a.shape = {f.values.rows(), f.values.cols()};
  a.meta = meta.is_object() ? meta : nlohmann::json::object();
  a.meta["spacing"] = f.spacing;
  a.data.assign(f.values.flat().begin(), f.values.flat().end());
  write_tatb(path, a);
}

ImageGrid load_image(const std::filesystem::path& path) {
  const auto a = read_tatb(path);
  if (a.kind != "image" || a.shape.size() != 2 || a.shape[0] != a.shape[1])
    throw IoError(path.string() + ": not a square image");
  ImageGrid f(static_cast<int>(a.shape[0]), a.meta.value("spacing", 0.0));
  if (!(f.spacing > 0)) throw IoError(path.string() + ": missing spacing");
  std::copy(a.data.begin(), a.data.end(), f.values.data());
  return f;
}

void save_sinogram(const std::filesystem::path& path, const Sinogram& g,
                   const nlohmann::json& meta) {
  TatbArray a;
  a.kind = "sinogram";
  a.shape = {g.values.rows(), g.values.cols()};
  a.meta = meta.is_object() ? meta : nlohmann::json::object();
  a.meta["dt"] = g.dt;
  std::vector<int> mask(g.arc_mask.begin(), g.arc_mask.end());
  a.meta["arc_mask"] = mask;
  a.data.assign(g.values.flat().begin(), g.values.flat().end());
  write_tatb(path, a);
}

Sinogram load_sinogram(const std::filesystem::path& path) {
  const auto a = read_tatb(path);
  if (a.kind != "sinogram" || a.shape.size() != 2) throw IoError(path.string() + ": not a sinogram");
  const int nt = static_cast<int>(a.shape[0]);
  const int nth = static_cast<int>(a.shape[1]);
  std::vector<std::uint8_t> mask(nth, 1);
  if (a.meta.contains("arc_mask")) {
    const auto m = a.meta.at("arc_mask").get<std::vector<int>>();
    if (static_cast<int>(m.size()) != nth) throw IoError(path.string() + ": arc mask length mismatch");
    for (int l = 0; l < nth; ++l) mask[l] = m[l] ? 1 : 0;
  }
  Sinogram g(nt, nth, a.meta.value("dt", 0.0), mask);
  if (!(g.dt > 0)) throw IoError(path.string() + ": missing dt");
  std::copy(a.data.begin(), a.data.end(), g.values.data());
  return g;
}

void export_pgm(const std::filesystem::path& path, const Array2D<double>& a) {
  double lo = 0.0, hi = 0.0;
  if (a.size() > 0) {
    lo = hi = a.data()[0];
    for (double v : a.flat()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  atomic_write(path, [&](std::ofstream& os) {
    os << "P5\n" << a.cols() << ' ' << a.rows() << "\n65535\n";
    std::vector<unsigned char> buf(a.size() * 2);
    std::size_t i = 0;
    for (double v : a.flat()) {
      const auto q = static_cast<std::uint16_t>(std::lround((v - lo) / span * 65535.0));
      buf[i++] = static_cast<unsigned char>(q >> 8);  // PGM is big-endian
      buf[i++] = static_cast<unsigned char>(q & 0xff);
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  });
  nlohmann::json side{{"min", lo}, {"max", hi}, {"maxval", 65535},
                      {"rows", a.rows()}, {"cols", a.cols()}};
  write_text_atomic(path.string() + ".json", side.dump(2) + "\n");
}

void export_csv(const std::filesystem::path& path, const Array2D<double>& a) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (c) os << ',';
      os << a(r, c);
    }
    os << '\n';
  }
  write_text_atomic(path, os.str());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  atomic_write(path, [&](std::ofstream& os) { os << text; });
}

}  // namespace tat
