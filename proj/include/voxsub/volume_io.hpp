#pragma once

// Raw-volume file IO and slice export.
//
// A volume on disk is a pair of files: `<name>.raw` holds the payload in
// little-endian order with x fastest, and `<name>.meta` is a small UTF-8
// text header with explicit keys:
//
//   dims = <nx> <ny> <nz>
//   dtype = u8 | u16le | f32le
//   voxel_size = <edge length in micrometres>   (optional)
//   value_scale = <factor applied on load>      (optional)
//
// Integer payloads are widened to the internal floating representation on
// load; on write, values are clamped to the dtype range and rounded
// half-to-even. Slices export as binary 8-bit portable graymaps.

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "voxsub/volume.hpp"

namespace voxsub {

enum class VolumeDtype { U8, U16LE, F32LE };

struct VolumeHeader {
  IVec3 dims{0, 0, 0};
  VolumeDtype dtype = VolumeDtype::F32LE;
  std::optional<double> voxel_size;
  std::optional<double> value_scale;
};

namespace detail {

inline std::string strip_volume_suffix(const std::string& path) {
  for (const char* suffix : {".raw", ".meta"}) {
    const std::string s = suffix;
    if (path.size() > s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0)
      return path.substr(0, path.size() - s.size());
  }
  return path;
}

inline std::string dtype_name(VolumeDtype t) {
  switch (t) {
    case VolumeDtype::U8: return "u8";
    case VolumeDtype::U16LE: return "u16le";
    case VolumeDtype::F32LE: return "f32le";
  }
  throw std::invalid_argument("unknown dtype");
}

inline VolumeDtype dtype_from_name(const std::string& s) {
  if (s == "u8") return VolumeDtype::U8;
  if (s == "u16le") return VolumeDtype::U16LE;
  if (s == "f32le") return VolumeDtype::F32LE;
  throw std::runtime_error("unknown dtype '" + s + "'");
}

inline std::size_t dtype_size(VolumeDtype t) {
  return t == VolumeDtype::U8 ? 1 : t == VolumeDtype::U16LE ? 2 : 4;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parse `<name>.meta`. Accepts the stem, the .raw or the .meta path.
inline VolumeHeader read_header(const std::string& path) {
  const std::string meta_path = detail::strip_volume_suffix(path) + ".meta";
  std::ifstream in(meta_path);
  if (!in) throw std::runtime_error("cannot open header '" + meta_path + "'");
  VolumeHeader h;
  bool have_dims = false, have_dtype = false;
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed header line '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "dims") {
      std::istringstream iss(val);
      if (!(iss >> h.dims[0] >> h.dims[1] >> h.dims[2]))
        throw std::runtime_error("malformed dims '" + val + "'");
      have_dims = true;
    } else if (key == "dtype") {
      h.dtype = detail::dtype_from_name(val);
      have_dtype = true;
    } else if (key == "voxel_size") {
      h.voxel_size = std::stod(val);
    } else if (key == "value_scale") {
      h.value_scale = std::stod(val);
    } else {
      throw std::runtime_error("unknown header key '" + key + "'");
    }
  }
  if (!have_dims || !have_dtype) throw std::runtime_error("header misses dims or dtype");
  for (index_t d : h.dims)
    if (d < 1) throw std::runtime_error("header dims must be positive");
  return h;
}

/// Load `<name>.raw` + `<name>.meta` into a Volume.
inline Volume read_volume(const std::string& path) {
  const std::string stem = detail::strip_volume_suffix(path);
  const VolumeHeader h = read_header(stem);
  const std::string raw_path = stem + ".raw";
  std::ifstream in(raw_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open payload '" + raw_path + "'");
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0, std::ios::beg);

  Volume v = create_volume(h.dims, 0.0);
  v.voxel_size = h.voxel_size;
  const std::uint64_t expect =
      static_cast<std::uint64_t>(v.size()) * detail::dtype_size(h.dtype);
  if (file_size != expect)
    throw std::runtime_error("payload size mismatch: '" + raw_path + "' has " +
                             std::to_string(file_size) + " bytes, header implies " +
                             std::to_string(expect));

  std::vector<unsigned char> buf(static_cast<std::size_t>(expect));
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
    throw std::runtime_error("short read on '" + raw_path + "'");

  const double scale = h.value_scale.value_or(1.0);
  const unsigned char* p = buf.data();
  for (double& out : v.data) {
    double val = 0.0;
    switch (h.dtype) {
      case VolumeDtype::U8:
        val = static_cast<double>(*p);
        p += 1;
        break;
      case VolumeDtype::U16LE:
        val = static_cast<double>(static_cast<std::uint16_t>(p[0]) |
                                  (static_cast<std::uint16_t>(p[1]) << 8));
        p += 2;
        break;
      case VolumeDtype::F32LE: {
        const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                                   (static_cast<std::uint32_t>(p[1]) << 8) |
                                   (static_cast<std::uint32_t>(p[2]) << 16) |
                                   (static_cast<std::uint32_t>(p[3]) << 24);
        val = static_cast<double>(std::bit_cast<float>(bits));
        p += 4;
        break;
      }
    }
    out = val * scale;
    if (!std::isfinite(out))
      throw std::runtime_error("payload '" + raw_path + "' contains non-finite values");
  }
  return v;
}

/// Write `<name>.raw` + `<name>.meta`. Integer dtypes clamp to the dtype
/// range and round half-to-even; f32le round-trips 32-bit floats exactly.
inline void write_volume(const Volume& v, const std::string& path, VolumeDtype dtype) {
  if (!all_finite(v)) throw std::invalid_argument("write_volume: non-finite values");
  const std::string stem = detail::strip_volume_suffix(path);

  std::vector<unsigned char> buf(v.data.size() * detail::dtype_size(dtype));
  unsigned char* p = buf.data();
  for (const double val : v.data) {
    switch (dtype) {
      case VolumeDtype::U8: {
        const double c = std::nearbyint(std::min(255.0, std::max(0.0, val)));
        *p++ = static_cast<unsigned char>(c);
        break;
      }
      case VolumeDtype::U16LE: {
        const double c = std::nearbyint(std::min(65535.0, std::max(0.0, val)));
        const auto u = static_cast<std::uint16_t>(c);
        *p++ = static_cast<unsigned char>(u & 0xffu);
        *p++ = static_cast<unsigned char>(u >> 8);
        break;
      }
      case VolumeDtype::F32LE: {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(val));
        *p++ = static_cast<unsigned char>(bits & 0xffu);
        *p++ = static_cast<unsigned char>((bits >> 8) & 0xffu);
        *p++ = static_cast<unsigned char>((bits >> 16) & 0xffu);
        *p++ = static_cast<unsigned char>((bits >> 24) & 0xffu);
        break;
      }
    }
  }

  const std::string raw_path = stem + ".raw";
  std::ofstream raw(raw_path, std::ios::binary | std::ios::trunc);
  if (!raw) throw std::runtime_error("cannot open '" + raw_path + "' for writing");
  raw.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!raw) throw std::runtime_error("write failed on '" + raw_path + "'");

  std::string meta = "dims = " + std::to_string(v.dims[0]) + " " + std::to_string(v.dims[1]) +
                     " " + std::to_string(v.dims[2]) + "\n" +
                     "dtype = " + detail::dtype_name(dtype) + "\n";
  if (v.voxel_size) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.10g", *v.voxel_size);
    meta += std::string("voxel_size = ") + tmp + "\n";
  }
  const std::string meta_path = stem + ".meta";
  std::ofstream mf(meta_path, std::ios::trunc);
  if (!mf) throw std::runtime_error("cannot open '" + meta_path + "' for writing");
  mf << meta;
  if (!mf) throw std::runtime_error("write failed on '" + meta_path + "'");
}

/// Export one slice as a binary 8-bit portable graymap. Values map by
/// t = (v - min) / (max - min) over the whole volume and
/// pixel = round(255 * t^gamma); a constant volume maps to 0.
/// Slice plane axes keep xyz order: axis z -> (x, y) image, axis y ->
/// (x, z), axis x -> (y, z); the first plane axis runs along image rows.
inline void export_slice(const Volume& v, int axis, index_t index, const std::string& out_path,
                         double gamma = 1.0) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("export_slice: axis must be 0, 1 or 2");
  if (index < 0 || index >= v.dims[axis])
    throw std::out_of_range("export_slice: slice index out of range");
  if (!(gamma > 0.0)) throw std::invalid_argument("export_slice: gamma must be > 0");

  double lo = v.data[0], hi = v.data[0];
  for (double x : v.data) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double range = hi - lo;

  const int u = axis == 0 ? 1 : 0;           // horizontal image axis
  const int w = axis == 2 ? 1 : 2;           // vertical image axis
  const index_t width = v.dims[u], height = v.dims[w];

  std::vector<unsigned char> pix(static_cast<std::size_t>(width * height));
  IVec3 p{0, 0, 0};
  p[axis] = index;
  std::size_t k = 0;
  for (index_t row = 0; row < height; ++row)
    for (index_t col = 0; col < width; ++col) {
      p[u] = col;
      p[w] = row;
      double t = range > 0.0 ? (v.at(p[0], p[1], p[2]) - lo) / range : 0.0;
      pix[k++] = static_cast<unsigned char>(std::lround(255.0 * std::pow(t, gamma)));
    }

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pix.data()), static_cast<std::streamsize>(pix.size()));
  if (!out) throw std::runtime_error("write failed on '" + out_path + "'");
}

}  // namespace voxsub
