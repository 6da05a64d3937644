#include <unistd.h>

#include <fstream>

#include "helpers.hpp"
#include "mimicmark/color.hpp"
#include "mimicmark/image_io.hpp"
#include "mimicmark/metrics.hpp"

using namespace mimicmark;
using namespace testutil;

TEST_CASE("image buffer construction validates shape") {
  CHECK_THROWS_CODE(ImageBuffer(0, 4, 3), Errc::DimensionMismatch);
  CHECK_THROWS_CODE(ImageBuffer(4, 4, 2), Errc::WrongChannelCount);
  CHECK_THROWS_CODE(ImageBuffer(2, 2, 1, std::vector<std::uint8_t>(3)), Errc::DimensionMismatch);
  ImageBuffer img(3, 2, 3, 7);
  CHECK(img.data.size() == 18);
  img.at(2, 1, 2) = 9;
  CHECK(img.data.back() == 9);
}

TEST_CASE("watermarkable size gate") {
  CHECK_NOTHROW(require_watermarkable(ImageBuffer(64, 64, 3)));
  CHECK_THROWS_CODE(require_watermarkable(ImageBuffer(63, 200, 3)), Errc::TooSmall);
}

TEST_CASE("psnr against hand-computed values") {
  ImageBuffer a(2, 2, 1, 100), b = a;
  CHECK(psnr(a, b) == kPsnrIdentical);
  b.at(1, 1) = 110;  // MSE = 100 / 4
  CHECK(mse(a, b) == doctest::Approx(25.0));
  CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 25.0)));
  CHECK_THROWS_CODE(psnr(a, ImageBuffer(2, 2, 3)), Errc::DimensionMismatch);
}

TEST_CASE("quantize_sample rounds and saturates") {
  CHECK(quantize_sample(-3.0) == 0);
  CHECK(quantize_sample(std::nan("")) == 0);
  CHECK(quantize_sample(254.5) == 255);
  CHECK(quantize_sample(300.0) == 255);
  CHECK(quantize_sample(12.49) == 12);
}

TEST_CASE("colour conversion") {
  SUBCASE("gray pixels have neutral chroma") {
    ImageBuffer g(4, 4, 3);
    for (int i = 0; i < 16; ++i)
      for (int c = 0; c < 3; ++c) g.data[3 * i + c] = static_cast<std::uint8_t>(i * 16);
    const YuvPlanes p = rgb_to_yuv(g);
    for (int i = 0; i < 16; ++i) {
      CHECK(p.y.data[i] == doctest::Approx(i * 16.0));
      CHECK(p.u.data[i] == doctest::Approx(kChromaZero));
      CHECK(p.v.data[i] == doctest::Approx(kChromaZero));
    }
  }
  SUBCASE("luma weights") {
    ImageBuffer px(1, 1, 3, std::vector<std::uint8_t>{200, 10, 60});
    CHECK(rgb_to_yuv(px).y.data[0] == doctest::Approx(kLumaR * 200 + kLumaG * 10 + kLumaB * 60));
  }
  SUBCASE("round trip of random colours is exact") {
    const ImageBuffer img = noise_image(32, 17, 3, 4);
    CHECK(yuv_to_rgb(rgb_to_yuv(img)) == img);
    CHECK(with_luma(img, luma_plane(img)) == img);
  }
  SUBCASE("gray images pass through") {
    const ImageBuffer img = noise_image(8, 8, 1, 5);
    const PlanarF64 y = luma_plane(img);
    CHECK(y.data[5] == img.data[5]);
    CHECK(with_luma(img, y) == img);
    CHECK_THROWS_CODE(rgb_to_yuv(img), Errc::WrongChannelCount);
  }
}

TEST_CASE("lossless image io") {
  const auto dir = scratch_dir("io");
  for (int c : {1, 3}) {
    const ImageBuffer img = noise_image(23, 11, c, 10 + c);
    save_image(img, dir / "a.png");
    CHECK(load_image(dir / "a.png") == img);
    CHECK(decode_image(encode_image(img, {})) == img);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("jpeg is lossy but close at high quality") {
  const ImageBuffer img = noise_image(64, 64, 3, 3);
  const ImageBuffer q95 = jpeg_roundtrip(img, 95), q20 = jpeg_roundtrip(img, 20);
  CHECK(q95.same_shape(img));
  CHECK(psnr(img, q95) > psnr(img, q20));
  CHECK_THROWS_CODE(encode_image(img, {ImageFormat::Jpeg, 0}), Errc::UnsupportedFormat);
}

TEST_CASE("io errors") {
  const auto dir = scratch_dir("ioerr");
  CHECK_THROWS_CODE(load_image(dir / "missing.png"), Errc::FileNotFound);
  {
    std::ofstream(dir / "junk.png") << "definitely not an image";
  }
  CHECK_THROWS_CODE(load_image(dir / "junk.png"), Errc::UnsupportedFormat);
  std::vector<std::uint8_t> png = encode_image(noise_image(16, 16, 3, 1), {});
  png.resize(png.size() / 2);
  CHECK_THROWS_CODE(decode_image(png), Errc::CorruptImage);
  CHECK(format_from_extension("x.JPG") == ImageFormat::Jpeg);
  CHECK(format_from_extension("x.png") == ImageFormat::Png);
  CHECK_THROWS_CODE(format_from_extension("x.gif"), Errc::UnsupportedFormat);
  std::filesystem::remove_all(dir);
}
