#include <doctest.h>

#include "sentinel/core.hpp"
#include "sentinel/rng.hpp"

using namespace sentinel;

namespace {

FeatureVector nine(std::initializer_list<double> values) {
  FeatureVector v;
  v.values = values;
  return v;
}

}  // namespace

TEST_CASE("project keeps enabled triples in canonical order") {
  const FeatureVector v = nine({1, 2, 3, 4, 5, 6, 7, 8, 9});

  CHECK(project(v, SensorSet(true, true, true)).values ==
        std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(project(v, SensorSet(true, false, false)).values == std::vector<double>{1, 2, 3});
  CHECK(project(v, SensorSet(true, false, true)).values ==
        std::vector<double>{1, 2, 3, 7, 8, 9});
  CHECK(project(v, SensorSet(false, true, false)).values == std::vector<double>{4, 5, 6});
}

TEST_CASE("project rejects non-9-dim input") {
  FeatureVector bad;
  bad.values = {1, 2, 3};
  CHECK_THROWS_AS(project(bad, SensorSet::all()), error);
}

TEST_CASE("project is linear and preserves component values") {
  Rng rng(42);
  for (int iter = 0; iter < 50; ++iter) {
    FeatureVector a, b, sum;
    a.values.resize(9);
    b.values.resize(9);
    sum.values.resize(9);
    for (std::size_t i = 0; i < 9; ++i) {
      a.values[i] = rng.uniform(-50, 50);
      b.values[i] = rng.uniform(-50, 50);
      sum.values[i] = a.values[i] + b.values[i];
    }
    for (const SensorSet& s : SensorSet::all_combinations()) {
      const auto pa = project(a, s), pb = project(b, s), psum = project(sum, s);
      REQUIRE(pa.values.size() == s.dimension());
      for (std::size_t i = 0; i < pa.values.size(); ++i)
        CHECK(psum.values[i] == pa.values[i] + pb.values[i]);
    }
  }
}

TEST_CASE("sensor sets: dimension, naming, parsing") {
  CHECK(SensorSet(true, false, false).dimension() == 3);
  CHECK(SensorSet(true, true, false).dimension() == 6);
  CHECK(SensorSet::all().dimension() == 9);
  CHECK_THROWS_AS(SensorSet(false, false, false), error);

  CHECK(SensorSet::all_combinations().size() == 7);
  for (const SensorSet& s : SensorSet::all_combinations())
    CHECK(SensorSet::parse(s.to_string()) == s);

  CHECK(SensorSet::parse("mag,acc") == SensorSet(true, false, true));
  CHECK(SensorSet::parse("acc+ori+mag") == SensorSet::all());
  CHECK_THROWS_AS(SensorSet::parse("gps"), error);
  CHECK_THROWS_AS(SensorSet::parse(""), error);
}

TEST_CASE("trace validation catches the documented violations") {
  Trace t;
  t.user_id = "u";
  t.native_rate_hz = 5.0;
  t.samples.push_back({0.0, {1, 2, 3}, {0, 0, 0}, {0, 0, 0}});
  t.samples.push_back({0.2, {1, 2, 3}, {0, 0, 0}, {0, 0, 0}});
  CHECK_NOTHROW(validate_trace(t));

  Trace equal_ts = t;
  equal_ts.samples.push_back({0.2, {}, {}, {}});
  CHECK_THROWS_AS(validate_trace(equal_ts), error);

  Trace nan_val = t;
  nan_val.samples[0].mag[2] = std::nan("");
  CHECK_THROWS_AS(validate_trace(nan_val), error);

  Trace no_id = t;
  no_id.user_id.clear();
  CHECK_THROWS_AS(validate_trace(no_id), error);

  Trace bad_rate = t;
  bad_rate.native_rate_hz = 0.0;
  CHECK_THROWS_AS(validate_trace(bad_rate), error);
}

TEST_CASE("truncate_trace keeps the strict prefix") {
  Trace t;
  t.user_id = "u";
  t.native_rate_hz = 1.0;
  for (int i = 0; i < 10; ++i) t.samples.push_back({static_cast<double>(i), {}, {}, {}});
  CHECK(truncate_trace(t, 5.0).samples.size() == 5);  // t = 5 excluded
  CHECK(truncate_trace(t, 100.0).samples.size() == 10);
  CHECK(truncate_trace(t, 0.0).samples.empty());
}
