#include "stengrid/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace stengrid {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'G', '1'};

void put_u32le(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64le(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("read_snapshot: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("read_snapshot: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_snapshot(const Grid2D& g, std::ostream& out) {
  out.write(kMagic, 4);
  put_u32le(out, static_cast<std::uint32_t>(g.nx));
  put_u32le(out, static_cast<std::uint32_t>(g.ny));
  put_f64le(out, g.dx);
  put_f64le(out, g.dy);
  const double* v = g.data();
  for (std::ptrdiff_t k = 0; k < g.size(); ++k) put_f64le(out, v[k]);
  if (!out) throw std::runtime_error("write_snapshot: stream failure");
}

void write_snapshot(const Grid2D& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  write_snapshot(g, out);
  out.flush();
  if (!out) throw std::runtime_error("write_snapshot: failed writing " + path);
}

Grid2D read_snapshot(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_snapshot: not a CSG1 file");
  const auto nx = static_cast<int>(get_u32le(in));
  const auto ny = static_cast<int>(get_u32le(in));
  const double dx = get_f64le(in);
  const double dy = get_f64le(in);
  if (nx < 1 || ny < 1 || !(dx > 0.0) || !(dy > 0.0))
    throw std::runtime_error("read_snapshot: invalid header");
  Grid2D g(nx, ny, dx, dy);
  double* v = g.data();
  for (std::ptrdiff_t k = 0; k < g.size(); ++k) v[k] = get_f64le(in);
  return g;
}

Grid2D read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  return read_snapshot(in);
}

const char* const kDiagnosticsCsvHeader = "t,s,k1_inv";

std::string format_diagnostics_row(const Diagnostics& d) {
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", d.t, d.s, d.k1Inv);
  return buf;
}

void write_diagnostics_csv(const std::vector<Diagnostics>& rows, std::ostream& out) {
  out << kDiagnosticsCsvHeader << '\n';
  for (const Diagnostics& d : rows) out << format_diagnostics_row(d) << '\n';
}

void write_diagnostics_csv(const std::vector<Diagnostics>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_diagnostics_csv: cannot open " + path);
  write_diagnostics_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write_diagnostics_csv: failed writing " + path);
}

}  // namespace stengrid
