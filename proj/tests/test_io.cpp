#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gcops/error.hpp"
#include "gcops/io/image_io.hpp"
#include "gcops/io/report.hpp"
#include "gcops/simulators.hpp"

using namespace gcops;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gcops_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

io::Stack ramp(std::size_t w, std::size_t h, std::size_t pages, double scale) {
  io::Stack st;
  st.width = w;
  st.height = h;
  st.pages = pages;
  for (std::size_t i = 0; i < w * h * pages; ++i) st.values.push_back(double(i % 251) * scale);
  return st;
}

// Hand-built big-endian 16-bit TIFF with two strips.
std::string big_endian_tiff() {
  std::string b = {'M', 'M', 0, 42, 0, 0, 0, 8};
  auto u16 = [&](int v) {
    b += char(v >> 8);
    b += char(v & 255);
  };
  auto u32 = [&](long v) {
    for (int i = 3; i >= 0; --i) b += char((v >> (8 * i)) & 255);
  };
  auto entry = [&](int tag, int type, long count, long value) {
    u16(tag);
    u16(type);
    u32(count);
    if (type == 3 && count == 1) {
      u16(int(value));
      u16(0);
    } else {
      u32(value);
    }
  };
  // 3x2 image, rows per strip 1.
  const long ifd_end = 8 + 2 + 9 * 12 + 4;
  const long offsets_at = ifd_end, counts_at = ifd_end + 8, pixels_at = ifd_end + 16;
  u16(9);
  entry(256, 3, 1, 3);
  entry(257, 3, 1, 2);
  entry(258, 3, 1, 16);
  entry(259, 3, 1, 1);
  entry(262, 3, 1, 1);
  entry(273, 4, 2, offsets_at);
  entry(277, 3, 1, 1);
  entry(278, 3, 1, 1);
  entry(279, 4, 2, counts_at);
  u32(0);
  u32(pixels_at);
  u32(pixels_at + 6);
  u32(6);
  u32(6);
  for (int v : {1, 2, 300, 40000, 5, 65535}) u16(v);
  return b;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("TIFF round trip for every sample type and several pages") {
    TempDir dir;
    for (auto type : {io::SampleType::U8, io::SampleType::U16, io::SampleType::F32}) {
      const double scale = type == io::SampleType::U8 ? 1.0 : type == io::SampleType::U16 ? 200.0 : 0.37;
      const auto st = ramp(17, 9, 4, scale);
      const auto path = dir.path / "stack.tif";
      io::write_tiff(path, st, type, "gcops test stack");
      const auto back = io::read_tiff(path);
      CHECK(back.width == 17);
      CHECK(back.height == 9);
      CHECK(back.pages == 4);
      CHECK(back.type == type);
      for (std::size_t i = 0; i < st.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(st.values[i]).epsilon(1e-7));
    }
  }

  TEST_CASE("big-endian multi-strip TIFF") {
    TempDir dir;
    const auto path = dir.path / "be.tiff";
    io::write_file_atomic(path, big_endian_tiff());
    const auto st = io::read_image(path);
    CHECK(st.width == 3);
    CHECK(st.height == 2);
    CHECK(st.type == io::SampleType::U16);
    CHECK(st.values == std::vector<double>{1, 2, 300, 40000, 5, 65535});
  }

  TEST_CASE("PNG round trip, 8 and 16 bit") {
    TempDir dir;
    for (auto type : {io::SampleType::U8, io::SampleType::U16}) {
      const auto st = ramp(31, 7, 1, type == io::SampleType::U8 ? 1.0 : 250.0);
      const auto path = dir.path / "plane.png";
      io::write_png_gray(path, st, type);
      const auto back = io::read_image(path);
      CHECK(back.type == type);
      CHECK(back.values == st.values);
    }
    std::vector<std::uint8_t> rgb(4 * 3 * 3, 200);
    io::write_png_rgb(dir.path / "rgb.png", 4, 3, rgb);
    const auto grey = io::read_png(dir.path / "rgb.png");
    CHECK(grey.values.size() == 12);
    CHECK(grey.values[0] == doctest::Approx(200).epsilon(0.01));
  }

  TEST_CASE("reading failures are I/O errors naming the path") {
    TempDir dir;
    const auto missing = dir.path / "nope.tif";
    try {
      io::read_image(missing);
      FAIL("expected Io");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
      CHECK(std::string(e.what()).find("nope.tif") != std::string::npos);
    }
    io::write_file_atomic(dir.path / "junk.tif", "not an image");
    CHECK_THROWS_AS(io::read_image(dir.path / "junk.tif"), Error);
    CHECK_THROWS_AS(io::read_image(dir.path / "x.bmp"), Error);
  }

  TEST_CASE("frames, fields and sidecars") {
    TempDir dir;
    const auto st = ramp(5, 4, 6, 1.0);
    const auto planes = io::split_frames(st, 1);
    CHECK(planes.size() == 6);
    CHECK(planes[2].shape == Shape(5, 4));
    CHECK(planes[2].values[0] == st.values[40]);
    const auto vols = io::split_frames(st, 3);
    CHECK(vols.size() == 2);
    CHECK(vols[1].shape == Shape(5, 4, 3));
    CHECK_THROWS_AS(io::split_frames(st, 4), Error);
    CHECK(io::to_field(st).shape == Shape(5, 4, 6));
    CHECK(io::from_field(io::to_field(st)).values == st.values);

    const auto img = dir.path / "a.tif";
    CHECK_FALSE(io::read_sidecar(img));
    io::write_sidecar(img, {{"layout", "zstack"}, {"depth", "6"}});
    const auto meta = io::read_sidecar(img);
    REQUIRE(meta);
    CHECK(meta->at("layout") == "zstack");
    CHECK(meta->at("depth") == "6");
  }

  TEST_CASE("CSV parse and print") {
    io::Csv t;
    t.header = {"a", "b"};
    t.rows = {{"1", "x, \"quoted\""}, {"2.5", ""}};
    const auto back = io::Csv::parse(t.str());
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("b") == 1);
    CHECK_THROWS_AS(back.column("c"), Error);
    CHECK(io::format_float(1.0 / 3.0) == "0.333333333");
  }

  TEST_CASE("test reports round-trip through the CSV record") {
    LevelSetParams p;
    p.shape = Shape(80, 80);
    p.alpha_x = p.alpha_y = p.alpha_eps = 3.0;
    p.rho0 = 0.3;
    const auto s = simulate_level_sets(p);
    auto r = colocalization_test(s.first, s.second);
    r.warnings.push_back("extra, with comma");
    io::Csv t;
    t.header = io::report_columns();
    t.rows.push_back(io::report_row(r));
    const auto parsed = io::report_from_row(io::Csv::parse(t.str()), 0);
    CHECK(io::same_record(parsed, r));
    auto other = parsed;
    other.t *= 1.001;
    CHECK_FALSE(io::same_record(other, r));

    const std::string kv = io::to_key_value(r);
    CHECK(kv.find("p_coloc=") != std::string::npos);
    CHECK(kv.find("warning.0=") != std::string::npos);
  }

  TEST_CASE("tiny p-values print as a bound in the text report") {
    TestReport r;
    r.p_coloc = 0.0;
    r.p_bilateral = 1e-20;
    const std::string kv = io::to_key_value(r);
    CHECK(kv.find("p_coloc=<1e-15") != std::string::npos);
    CHECK(kv.find("p_bilateral=<1e-15") != std::string::npos);
  }
}
