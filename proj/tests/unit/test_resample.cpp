/*
  Copyright 2026 The eco-sr Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#include <doctest.h>

#include "eco/error.hpp"
#include "eco/resample.hpp"
#include "support.hpp"

using namespace eco;

TEST_CASE("cubic kernel values") {
  const double a = -0.5;
  CHECK(cubic_kernel(0.0, a) == 1.0);
  CHECK(cubic_kernel(1.0, a) == doctest::Approx(0.0));
  CHECK(cubic_kernel(2.0, a) == 0.0);
  CHECK(cubic_kernel(-0.5, a) == doctest::Approx(0.5625));
  CHECK(cubic_kernel(1.5, a) == doctest::Approx(-0.0625));
  // Integer-shifted samples form a partition of unity.
  for (double f : {0.0, 0.1, 0.37, 0.5, 0.93}) {
    double s = 0.0;
    for (int k = -2; k <= 2; ++k) s += cubic_kernel(f - k, a);
    CHECK(s == doctest::Approx(1.0));
  }
}

TEST_CASE("scale parsing and output extents") {
  const ResizeSpec half = ResizeSpec::parse("1/2");
  CHECK(half.num == 1);
  CHECK(half.den == 2);
  const ResizeSpec two = ResizeSpec::parse("2");
  CHECK(two.num == 2);
  CHECK(two.den == 1);
  const ResizeSpec third = ResizeSpec::parse("0.3333333333");
  CHECK(third.num == 1);
  CHECK(third.den == 3);
  CHECK(ResizeSpec::parse("4/6").den == 3);
  CHECK_THROWS_AS(ResizeSpec::parse("x"), Error);
  CHECK_THROWS_AS(ResizeSpec::parse("-1/2"), Error);
  CHECK(half.output_extent(9) == 5);
  CHECK(third.output_extent(16) == 5);
  CHECK(two.output_extent(7) == 14);
}

TEST_CASE("taps are normalized") {
  for (const char* s : {"1/2", "1/3", "2", "3/4"}) {
    for (bool aa : {true, false}) {
      const ResizeSpec spec = ResizeSpec::parse(s, aa);
      const ResampleTaps taps = resample_taps(13, spec.output_extent(13), spec);
      REQUIRE(taps.weights.size() == static_cast<std::size_t>(spec.output_extent(13)));
      for (const auto& w : taps.weights) {
        double total = 0.0;
        for (double v : w) total += v;
        CHECK(total == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("scale 1 is the identity") {
  Rng rng(1);
  const Image img = eco::testing::random_image(rng, 7, 9, 3);
  CHECK(resize(img, ResizeSpec::parse("1")) == img);
}

TEST_CASE("constant images stay constant") {
  const Image img(10, 12, 3, 0.3f);
  for (const char* s : {"1/2", "1/3", "2", "3/2"}) {
    const Image out = resize(img, ResizeSpec::parse(s));
    for (float v : out.data()) CHECK(v == doctest::Approx(0.3f).epsilon(1e-6));
  }
}

TEST_CASE("separable resize agrees with the double-sum oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Image img = eco::testing::random_image(rng, 6 + trial, 9 - trial, 3);
    for (const char* s : {"1/2", "2", "2/3"}) {
      for (bool aa : {true, false}) {
        const ResizeSpec spec = ResizeSpec::parse(s, aa);
        int oh = 0, ow = 0;
        const std::vector<double> ref = eco::testing::ref_resize(img, spec, &oh, &ow);
        const Image out = resize(img, spec);
        REQUIRE(out.height() == oh);
        REQUIRE(out.width() == ow);
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(out.data()[i] == doctest::Approx(ref[i]).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("antialias changes downscaling only") {
  Rng rng(4);
  const Image img = eco::testing::random_image(rng, 12, 12, 1);
  CHECK(resize(img, ResizeSpec::parse("2", true)) == resize(img, ResizeSpec::parse("2", false)));
  CHECK_FALSE(resize(img, ResizeSpec::parse("1/2", true)) == resize(img, ResizeSpec::parse("1/2", false)));
}

TEST_CASE("resize clamps to the unit range once at the end") {
  Image img(1, 8, 1, 0.0f);
  for (int x = 4; x < 8; ++x) img.at(0, x, 0) = 1.0f;
  const ResizeSpec spec = ResizeSpec::parse("3");
  const Image raw = resize_unclamped(img, spec);
  const Image out = resize(img, spec);
  float lo = 0, hi = 1;
  for (float v : raw.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo < 0.0f);
  CHECK(hi > 1.0f);
  CHECK(out == raw.clamped());
}

TEST_CASE("rgb_to_y") {
  const Image black(1, 1, 3, 0.0f), white(1, 1, 3, 1.0f);
  CHECK(rgb_to_y(black).at(0, 0, 0) == doctest::Approx(16.0 / 255.0));
  CHECK(rgb_to_y(white).at(0, 0, 0) == doctest::Approx(235.0 / 255.0));
  Image red(1, 1, 3, 0.0f);
  red.at(0, 0, 0) = 1.0f;
  CHECK(rgb_to_y(red).at(0, 0, 0) == doctest::Approx((16.0 + 65.481) / 255.0));
  CHECK(rgb_to_y(red).channels() == 1);
}
