#include "doctest.h"

#include <fstream>

#include "fftdeblur/io.hpp"
#include "oracles.hpp"
#include "tmpdir.hpp"

using namespace fftdeblur;
namespace fs = std::filesystem;

namespace {

ImageTensor rgb(std::size_t h, std::size_t w, std::uint64_t seed) {
  return ImageTensor(std::vector<ImagePlane>{oracle::random_plane(h, w, seed),
                                             oracle::random_plane(h, w, seed + 1),
                                             oracle::random_plane(h, w, seed + 2)});
}

double max_error(const ImageTensor& a, const ImageTensor& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  return m;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("16-bit PNG round trip") {
  TempDir dir;
  const ImageTensor img = rgb(13, 17, 1);
  io::write_image(dir / "a.png", img, 16);
  const auto back = io::read_image(dir / "a.png");
  CHECK(back.bit_depth == 16);
  REQUIRE(back.image.same_shape(img));
  CHECK(max_error(back.image, img) <= 1.0 / 65535.0);
}

TEST_CASE("8-bit and float round trips keep channel order") {
  TempDir dir;
  const ImageTensor img = rgb(9, 11, 4);
  io::write_image(dir / "a.png", img, 8);
  const auto eight = io::read_image(dir / "a.png");
  CHECK(eight.bit_depth == 8);
  CHECK(max_error(eight.image, img) <= 0.5 / 255.0 + 1e-12);

  io::write_image(dir / "a.pfm", img, 32);
  const auto flt = io::read_image(dir / "a.pfm");
  CHECK(flt.bit_depth == 32);
  CHECK(max_error(flt.image, img) <= 1e-7);

  io::write_image(dir / "g.tif", ImageTensor(oracle::random_plane(6, 6, 2)), 16);
  CHECK(io::read_image(dir / "g.tif").image.channels() == 1);
}

TEST_CASE("JPEG output is forced to 8 bits") {
  TempDir dir;
  io::write_image(dir / "a.jpg", ImageTensor(ImagePlane(16, 16, 0.5)), 16);
  const auto back = io::read_image(dir / "a.jpg");
  CHECK(back.bit_depth == 8);
  CHECK(back.image[0][0] == doctest::Approx(128.0 / 255.0).epsilon(0.02));
}

TEST_CASE("decode failures are I/O errors") {
  TempDir dir;
  try {
    io::read_image(dir / "missing.png");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
  }
  std::ofstream(dir / "junk.png") << "not an image";
  CHECK_THROWS_AS(io::read_image(dir / "junk.png"), Error);
  CHECK_THROWS_AS(io::write_image(dir / "a.png", ImageTensor(ImagePlane(2, 2)), 12), Error);
}

TEST_CASE("kernel text format round trip") {
  TempDir dir;
  const Kernel k = oracle::random_kernel(5, 3);
  io::write_kernel_text(dir / "k.txt", k);
  const std::string text = io::format_kernel_text(k);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  const Kernel back = io::read_kernel(dir / "k.txt");
  for (std::size_t i = 0; i < 25; ++i) CHECK(back.weights()[i] == doctest::Approx(k.weights()[i]).epsilon(1e-15));
}

TEST_CASE("kernel files are normalized on load and validated") {
  TempDir dir;
  std::ofstream(dir / "k.txt") << "0 1 0\n1 4 1\n0 1 0\n";
  const Kernel k = io::read_kernel(dir / "k.txt");
  CHECK(k(1, 1) == doctest::Approx(0.5));
  CHECK(k.is_normalized());

  std::ofstream(dir / "even.txt") << "1 1\n1 1\n";
  std::ofstream(dir / "ragged.txt") << "1 1 1\n1 1\n1 1 1\n";
  std::ofstream(dir / "bad.txt") << "1 x 1\n";
  std::ofstream(dir / "empty.txt") << "\n";
  for (const char* name : {"even.txt", "ragged.txt"}) {
    try {
      io::read_kernel(dir / name);
      FAIL("expected InvalidParameter");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidParameter);
    }
  }
  for (const char* name : {"bad.txt", "empty.txt", "none.txt"}) {
    try {
      io::read_kernel(dir / name);
      FAIL("expected Io");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Io);
    }
  }
}

TEST_CASE("kernel image scales the peak to white and reads back") {
  TempDir dir;
  Kernel k(3);
  k(1, 1) = 0.5;
  k(1, 2) = 0.25;
  k(0, 0) = 0.25;
  io::write_kernel_image(dir / "k.png", k);
  const auto img = io::read_image(dir / "k.png");
  CHECK(img.bit_depth == 8);
  CHECK(img.image[0](1, 1) == 1.0);
  CHECK(img.image[0](1, 2) == doctest::Approx(128.0 / 255.0));
  const Kernel back = io::read_kernel(dir / "k.png");
  CHECK(back.is_normalized(1e-12));
  CHECK(back(1, 1) == doctest::Approx(255.0 / (255.0 + 2 * 128.0)));

  io::write_image(dir / "wide.png", ImageTensor(ImagePlane(3, 5, 1.0)), 8);
  CHECK_THROWS_AS(io::read_kernel(dir / "wide.png"), Error);
}

TEST_CASE("staged outputs appear only on commit") {
  TempDir dir;
  {
    io::StagedOutputs staged;
    const fs::path tmp = staged.stage(dir / "out.png");
    CHECK(tmp.extension() == ".png");
    CHECK(tmp.parent_path() == dir.path());
    std::ofstream(tmp) << "x";
  }
  CHECK(fs::is_empty(dir.path()));

  io::StagedOutputs staged;
  std::ofstream(staged.stage(dir / "a.txt")) << "a";
  std::ofstream(staged.stage(dir / "b.txt")) << "b";
  staged.commit();
  CHECK(fs::exists(dir / "a.txt"));
  CHECK(fs::exists(dir / "b.txt"));
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  CHECK(files == 2);

  io::write_text_atomic(dir / "c.txt", "hello\n");
  std::ifstream in(dir / "c.txt");
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
}

}
