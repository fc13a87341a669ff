#include <catch_amalgamated.hpp>

#include "adacore/container.hpp"
#include "adacore/synthetic.hpp"

using namespace adacore;

TEST_CASE("silent fixture is all zeros") {
  synthetic::FixtureSpec spec;
  spec.length = 500;
  spec.channels = 3;
  const auto fx = synthetic::generate(spec);
  for (float v : fx.segment.data()) CHECK(v == 0.0f);
}

TEST_CASE("fixtures are deterministic in the seed") {
  synthetic::FixtureSpec spec;
  spec.length = 1000;
  spec.channels = 2;
  spec.noise_level = 0.5;
  spec.seed = 12;
  spec.events = {{4.0, 1.0, 13.0, 1.0}};
  const auto a = container::encode_raw(synthetic::generate(spec).segment);
  const auto b = container::encode_raw(synthetic::generate(spec).segment);
  CHECK(a == b);
  spec.seed = 13;
  CHECK(container::encode_raw(synthetic::generate(spec).segment) != a);
}

TEST_CASE("events land where requested") {
  synthetic::FixtureSpec spec;
  spec.length = 1000;
  spec.events = {{5.0, 1.0, 13.0, 2.0}};
  const auto fx = synthetic::generate(spec);
  REQUIRE(fx.events.size() == 1);
  CHECK(fx.events[0].begin == 450);
  CHECK(fx.events[0].end == 550);
  float peak = 0.0f;
  for (std::size_t i = 0; i < 1000; ++i) {
    if (i < 450 || i >= 550) CHECK(fx.segment.at(0, i) == 0.0f);
    peak = std::max(peak, std::abs(fx.segment.at(0, i)));
  }
  CHECK(peak > 1.5f);
}

TEST_CASE("events outside the segment are rejected") {
  synthetic::FixtureSpec spec;
  spec.length = 1000;
  spec.events = {{9.8, 1.0, 13.0, 1.0}};
  CHECK_THROWS_AS(synthetic::generate(spec), ParameterError);
}
