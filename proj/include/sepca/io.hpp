#ifndef SEPCA_IO_HPP
#define SEPCA_IO_HPP

// Matrix file formats.
//   CSV:    one matrix row per line, comma-separated decimals, written with 17
//           significant digits.
//   Binary: magic "SEPCA1", little-endian u64 rows, u64 cols, then rows*cols
//           IEEE-754 float64 values in row-major order, little-endian.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "sepca/error.hpp"
#include "sepca/matrix.hpp"

namespace sepca::io {

inline constexpr std::string_view kBinaryMagic = "SEPCA1";

enum class Format { csv, binary };

/// Binary for ".bin", CSV otherwise.
inline Format format_for_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0 ? Format::binary : Format::csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

inline std::uint64_t get_u64(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace detail

/// Parses CSV text. `name` labels error messages (usually the path).
inline DataMatrix read_csv(std::istream& in, const std::string& name = "<csv>") {
  std::vector<Vector> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = detail::trim(line);
    if (sv.empty()) {
      // Only trailing blank lines are tolerated.
      std::string rest;
      while (std::getline(in, rest)) {
        ++line_no;
        if (!detail::trim(rest).empty()) throw IoError(name + ": line " + std::to_string(line_no - 1) + ": empty row");
      }
      break;
    }
    Vector row;
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = sv.find(',');
      const std::string_view cell = detail::trim(sv.substr(0, comma));
      ++col;
      double value = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        throw IoError(name + ": line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                      ": not a finite number: '" + std::string(cell) + "'");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      sv.remove_prefix(comma + 1);
    }
    if (rows.empty()) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw IoError(name + ": line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                    " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(name + ": no data rows");
  return DataMatrix::from_rows(rows);
}

inline void write_csv(std::ostream& out, const DataMatrix& m) {
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out.put(',');
      const int len = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out.write(buf, len);
    }
    out.put('\n');
  }
}

inline DataMatrix read_binary(std::istream& in, const std::string& name = "<binary>") {
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t header = kBinaryMagic.size() + 16;
  if (bytes.size() < kBinaryMagic.size() || std::string_view(bytes).substr(0, kBinaryMagic.size()) != kBinaryMagic)
    throw IoError(name + ": byte 0: missing SEPCA1 magic");
  if (bytes.size() < header)
    throw IoError(name + ": byte " + std::to_string(bytes.size()) + ": truncated header (need " +
                  std::to_string(header) + " bytes)");
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = detail::get_u64(raw + 6);
  const std::uint64_t cols = detail::get_u64(raw + 14);
  if (cols != 0 && rows > (std::numeric_limits<std::uint64_t>::max() / 8) / cols)
    throw IoError(name + ": byte 6: dimensions " + std::to_string(rows) + "x" + std::to_string(cols) + " overflow");
  const std::uint64_t count = rows * cols;
  if (bytes.size() - header < count * 8) {
    throw IoError(name + ": byte " + std::to_string(bytes.size()) + ": truncated payload, expected " +
                  std::to_string(header + count * 8) + " bytes");
  }
  if (bytes.size() - header > count * 8)
    throw IoError(name + ": byte " + std::to_string(header + count * 8) + ": trailing data after payload");
  Vector values(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    values[k] = std::bit_cast<double>(detail::get_u64(raw + header + 8 * k));
    if (!std::isfinite(values[k]))
      throw IoError(name + ": byte " + std::to_string(header + 8 * k) + ": non-finite value");
  }
  return DataMatrix(rows, cols, std::move(values));
}

inline void write_binary(std::ostream& out, const DataMatrix& m) {
  out.write(kBinaryMagic.data(), static_cast<std::streamsize>(kBinaryMagic.size()));
  detail::put_u64(out, m.rows());
  detail::put_u64(out, m.cols());
  for (double v : m.values()) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline DataMatrix read_matrix(const std::string& path, std::optional<Format> format = std::nullopt) {
  const Format f = format.value_or(format_for_path(path));
  std::ifstream in(path, f == Format::binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError(path + ": cannot open for reading");
  return f == Format::binary ? read_binary(in, path) : read_csv(in, path);
}

inline void write_matrix(const std::string& path, const DataMatrix& m, std::optional<Format> format = std::nullopt) {
  const Format f = format.value_or(format_for_path(path));
  std::ofstream out(path, f == Format::binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  if (f == Format::binary)
    write_binary(out, m);
  else
    write_csv(out, m);
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace sepca::io

#endif  // SEPCA_IO_HPP
