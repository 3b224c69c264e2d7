#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kahler/container.hpp"
#include "kahler/manifold.hpp"

using namespace kahler;

namespace {

std::string tmp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "kahler_container_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("container") {

TEST_CASE("round trip in both precisions") {
  Grid g = Grid::torus(2, 8);
  auto phi = random_potential(g, 3, 0.2, 2);
  std::string p = tmp_path("phi.kfld");
  write_field(p, phi, "phi", "complex128", {{"seed", "3"}});
  FieldHeader h;
  auto back = read_field(p, g, &h);
  CHECK((back - phi).sup_norm() == 0.0);
  CHECK(back.is_real());
  CHECK(h.manifold == "torus");
  CHECK(h.m == 2);
  CHECK(h.shape == std::vector<std::size_t>{8, 8, 8, 8});
  CHECK(h.field == "phi");
  CHECK(h.count == g.size());
  CHECK(h.extra.at("seed") == "3");
  CHECK(grid_from_header(read_header(p)) == g);

  write_field(p, phi, "phi");
  auto single = read_field(p, g);
  CHECK((single - phi).sup_norm() <= 1e-7 * phi.sup_norm());
}

TEST_CASE("byte layout and sidecar") {
  Grid g = Grid::torus(1, 4);
  ScalarField f(g, std::vector<cxd>(g.size(), cxd(1.0, -2.0)));
  std::string p = tmp_path("layout.kfld");
  write_field(p, f, "f");
  std::ifstream is(p, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), {});
  REQUIRE(bytes.size() > 12);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "KFLD");
  CHECK(bytes[4] == 1);
  std::uint32_t len = bytes[8] | bytes[9] << 8 | bytes[10] << 16 | bytes[11] << 24;
  CHECK(bytes.size() == 12 + len + g.size() * 8);
  // first payload value: 1.0f little-endian is 00 00 80 3f
  std::size_t off = 12 + len;
  CHECK(bytes[off + 2] == 0x80);
  CHECK(bytes[off + 3] == 0x3f);
  std::ifstream meta(p + ".meta");
  std::string text((std::istreambuf_iterator<char>(meta)), {});
  CHECK(text.find("manifold=torus\n") != std::string::npos);
  CHECK(text.find("dtype=complex64\n") != std::string::npos);
}

TEST_CASE("cp1 truncated radius survives") {
  Grid g = Grid::cp1(16, 8, 3.5);
  auto f = ScalarField::sample(g, [](std::span<const cxd> z) { return std::norm(z[0]); }, true);
  std::string p = tmp_path("cp1.kfld");
  write_field(p, f, "r2", "complex128");
  Grid back = grid_from_header(read_header(p));
  CHECK(back == g);
  CHECK(back.radius() == 3.5);
}

TEST_CASE("rejections") {
  Grid g = Grid::torus(1, 8);
  ScalarField f(g);
  std::string p = tmp_path("bad.kfld");
  CHECK_THROWS_AS(write_field(p, f, "f", "float16"), InvalidInput);
  write_field(p, f, "f");
  CHECK_THROWS_AS(read_field(p, Grid::torus(1, 16)), InvalidInput);
  CHECK_THROWS_AS(read_field(tmp_path("missing.kfld"), g), InvalidInput);
  {
    std::ofstream os(p, std::ios::binary);
    os << "JUNKJUNKJUNK";
  }
  CHECK_THROWS_AS(read_header(p), InvalidInput);
  {
    std::ofstream os(p, std::ios::binary);
    os << "KFLD";
  }
  CHECK_THROWS_AS(read_header(p), InvalidInput);
}

}  // TEST_SUITE
