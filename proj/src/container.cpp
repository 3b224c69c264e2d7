#include "kahler/container.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace kahler {

namespace {

constexpr char kMagic[4] = {'K', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw InvalidInput("truncated field container");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

template <class U, class F>
void put_float(std::ostream& os, F x) {
  U bits;
  std::memcpy(&bits, &x, sizeof(U));
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<char*>(b), sizeof(U));
}

template <class U, class F>
F get_float(std::istream& is) {
  unsigned char b[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(U))) throw InvalidInput("truncated field payload");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= U(b[i]) << (8 * i);
  F x;
  std::memcpy(&x, &bits, sizeof(U));
  return x;
}

std::string join_shape(const std::vector<std::size_t>& s) {
  std::string r;
  for (std::size_t i = 0; i < s.size(); ++i) r += (i ? "x" : "") + std::to_string(s[i]);
  return r;
}

std::string header_text(const FieldHeader& h) {
  std::ostringstream os;
  os << "manifold=" << h.manifold << "\n"
     << "m=" << h.m << "\n"
     << "shape=" << join_shape(h.shape) << "\n"
     << "field=" << h.field << "\n"
     << "dtype=" << h.dtype << "\n"
     << "count=" << h.count << "\n";
  for (const auto& [k, v] : h.extra) os << k << "=" << v << "\n";
  return os.str();
}

FieldHeader parse_header(const std::string& text) {
  FieldHeader h;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("malformed container header line: " + line);
    std::string k = line.substr(0, eq), v = line.substr(eq + 1);
    if (k == "manifold") h.manifold = v;
    else if (k == "m") h.m = std::stoi(v);
    else if (k == "field") h.field = v;
    else if (k == "dtype") h.dtype = v;
    else if (k == "count") h.count = std::stoull(v);
    else if (k == "shape") {
      std::istringstream ss(v);
      std::string part;
      while (std::getline(ss, part, 'x')) h.shape.push_back(std::stoull(part));
    } else h.extra[k] = v;
  }
  return h;
}

FieldHeader make_header(const ScalarField& f, const std::string& name, const std::string& dtype,
                        const std::map<std::string, std::string>& extra) {
  FieldHeader h;
  const Grid& g = f.grid();
  h.manifold = g.tag();
  h.m = g.dim();
  h.shape = g.shape();
  h.field = name;
  h.dtype = dtype;
  h.count = f.size();
  h.extra = extra;
  if (f.is_real()) h.extra["real"] = "1";
  if (g.kind() == ManifoldKind::CP1 && !g.full_sphere()) {
    std::ostringstream os;
    os.precision(17);
    os << g.radius();
    h.extra["radius"] = os.str();
  }
  return h;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f, const std::string& name, const std::string& dtype,
                 const std::map<std::string, std::string>& extra) {
  if (dtype != "complex64" && dtype != "complex128") throw InvalidInput("unsupported dtype " + dtype);
  FieldHeader h = make_header(f, name, dtype, extra);
  std::string text = header_text(h);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(text.size()));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& v : f.values()) {
    if (dtype == "complex64") {
      put_float<std::uint32_t>(os, static_cast<float>(v.real()));
      put_float<std::uint32_t>(os, static_cast<float>(v.imag()));
    } else {
      put_float<std::uint64_t>(os, v.real());
      put_float<std::uint64_t>(os, v.imag());
    }
  }
  std::ofstream meta(path + ".meta");
  meta << header_text(h);
}

FieldHeader read_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open field container " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidInput(path + " is not a field container");
  if (get_u32(is) != kVersion) throw InvalidInput("unsupported container version in " + path);
  std::uint32_t len = get_u32(is);
  std::string text(len, '\0');
  if (!is.read(text.data(), len)) throw InvalidInput("truncated container header");
  return parse_header(text);
}

ScalarField read_field(const std::string& path, const Grid& grid, FieldHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open field container " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidInput(path + " is not a field container");
  if (get_u32(is) != kVersion) throw InvalidInput("unsupported container version in " + path);
  std::uint32_t len = get_u32(is);
  std::string text(len, '\0');
  if (!is.read(text.data(), len)) throw InvalidInput("truncated container header");
  FieldHeader h = parse_header(text);
  if (h.manifold != grid.tag() || h.m != grid.dim() || h.shape != grid.shape() || h.count != grid.size())
    throw InvalidInput("container " + path + " does not match the configured grid");
  std::vector<cxd> v(h.count);
  for (auto& x : v) {
    if (h.dtype == "complex64") {
      float re = get_float<std::uint32_t, float>(is);
      float im = get_float<std::uint32_t, float>(is);
      x = cxd(re, im);
    } else if (h.dtype == "complex128") {
      double re = get_float<std::uint64_t, double>(is);
      double im = get_float<std::uint64_t, double>(is);
      x = cxd(re, im);
    } else {
      throw InvalidInput("unsupported dtype " + h.dtype);
    }
  }
  if (header) *header = h;
  auto it = h.extra.find("real");
  return ScalarField(grid, std::move(v), it != h.extra.end() && it->second == "1");
}

Grid grid_from_header(const FieldHeader& h) {
  if (h.manifold == "torus") {
    if (h.shape.empty()) throw InvalidInput("torus container without shape");
    return Grid::torus(h.m, static_cast<int>(h.shape[0]));
  }
  if (h.manifold == "cp1") {
    if (h.shape.size() != 2) throw InvalidInput("cp1 container needs a 2-d shape");
    double R = std::numeric_limits<double>::infinity();
    if (auto it = h.extra.find("radius"); it != h.extra.end()) R = std::stod(it->second);
    return Grid::cp1(static_cast<int>(h.shape[0]), static_cast<int>(h.shape[1]), R);
  }
  if (h.manifold == "cp2-analytic") {
    if (h.shape.size() != 4) throw InvalidInput("cp2 container needs a 4-d shape");
    return Grid::cp2_analytic(static_cast<int>(h.shape[0]), static_cast<int>(h.shape[2]));
  }
  throw InvalidInput("unknown manifold tag " + h.manifold);
}

}  // namespace kahler
