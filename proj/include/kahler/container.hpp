#pragma once

#include <map>
#include <string>

#include "kahler/fields.hpp"

namespace kahler {

// Binary field snapshot: "KFLD", u32 version, u32 header length, a key=value
// text header, then little-endian (re, im) pairs in node order.
struct FieldHeader {
  std::string manifold;
  int m = 0;
  std::vector<std::size_t> shape;
  std::string field;
  std::string dtype = "complex64";  // or complex128
  std::size_t count = 0;
  std::map<std::string, std::string> extra;
};

void write_field(const std::string& path, const ScalarField& f, const std::string& name,
                 const std::string& dtype = "complex64",
                 const std::map<std::string, std::string>& extra = {});
FieldHeader read_header(const std::string& path);
ScalarField read_field(const std::string& path, const Grid& grid, FieldHeader* header = nullptr);
// Rebuilds the grid described by a header.
Grid grid_from_header(const FieldHeader& h);

}  // namespace kahler
