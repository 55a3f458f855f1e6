#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tat/geometry.hpp"

namespace tat {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Container layout: 8-byte magic "TATB1\n\0\0", little-endian u32 header
/// length, UTF-8 JSON header {dtype, shape, kind, meta}, row-major
/// little-endian payload.
struct TatbArray {
  std::string dtype = "f64";  // "f64" or "f32"
  std::vector<std::size_t> shape;
  std::string kind;  // "image", "sinogram" or "table"
  nlohmann::json meta = nlohmann::json::object();
  std::vector<double> data;
};

/// Writes to a sibling temporary file and renames it into place.
void write_tatb(const std::filesystem::path& path, const TatbArray& a);
TatbArray read_tatb(const std::filesystem::path& path);

void save_image(const std::filesystem::path& path, const ImageGrid& f,
                const nlohmann::json& meta = nlohmann::json::object());
ImageGrid load_image(const std::filesystem::path& path);

void save_sinogram(const std::filesystem::path& path, const Sinogram& g,
                   const nlohmann::json& meta = nlohmann::json::object());
Sinogram load_sinogram(const std::filesystem::path& path);

/// 16-bit binary PGM scaled from [min, max]; the range goes to `path`.json.
void export_pgm(const std::filesystem::path& path, const Array2D<double>& a);
void export_csv(const std::filesystem::path& path, const Array2D<double>& a);

/// Writes `text` atomically (temporary file + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace tat
