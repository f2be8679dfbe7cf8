#include <doctest.h>

#include <cmath>

#include "sentinel/ingest.hpp"
#include "sentinel/rng.hpp"
#include "test_util.hpp"

using namespace sentinel;
using testutil::TempDir;

namespace {

const std::string kHeader = std::string(kTraceCsvHeader) + "\n";

}  // namespace

TEST_CASE("parse_trace: header only gives an empty trace") {
  const Trace t = parse_trace(kHeader, "u", 5.0);
  CHECK(t.samples.empty());
  CHECK(t.user_id == "u");
  CHECK(t.native_rate_hz == 5.0);
}

TEST_CASE("parse_trace: direct field mapping") {
  const Trace t = parse_trace(kHeader + "0.0,0,0,9.8,0,0,0,30,0,-40\n", "u", 5.0);
  REQUIRE(t.samples.size() == 1);
  CHECK(t.samples[0].t == 0.0);
  CHECK(t.samples[0].acc == std::array<double, 3>{0, 0, 9.8});
  CHECK(t.samples[0].ori == std::array<double, 3>{0, 0, 0});
  CHECK(t.samples[0].mag == std::array<double, 3>{30, 0, -40});
}

TEST_CASE("parse_trace: non-increasing timestamp reported at line 4") {
  const std::string text = kHeader + "0.0,0,0,0,0,0,0,0,0,0\n" + "0.2,0,0,0,0,0,0,0,0,0\n" +
                           "0.2,0,0,0,0,0,0,0,0,0\n";
  try {
    parse_trace(text, "u", 5.0);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("parse_trace: malformed rows name their line") {
  // wrong arity
  try {
    parse_trace(kHeader + "0.0,1,2\n", "u", 5.0);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 2);
  }
  // non-numeric field
  try {
    parse_trace(kHeader + "0.0,a,0,0,0,0,0,0,0,0\n", "u", 5.0);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("acc_x") != std::string::npos);
  }
  // non-finite value
  CHECK_THROWS_AS(parse_trace(kHeader + "0.0,nan,0,0,0,0,0,0,0,0\n", "u", 5.0), parse_error);
  CHECK_THROWS_AS(parse_trace(kHeader + "0.0,inf,0,0,0,0,0,0,0,0\n", "u", 5.0), parse_error);
  // bad header
  CHECK_THROWS_AS(parse_trace("time,a,b\n", "u", 5.0), parse_error);
  // negative timestamp
  CHECK_THROWS_AS(parse_trace(kHeader + "-1,0,0,0,0,0,0,0,0,0\n", "u", 5.0), parse_error);
}

TEST_CASE("write_trace: empty trace is header-only, n samples give n+1 lines") {
  Trace t;
  t.user_id = "u";
  t.native_rate_hz = 5.0;
  CHECK(write_trace(t) == kHeader);

  const Trace ramp = testutil::ramp_trace(100, 5.0);
  const std::string text = write_trace(ramp);
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 101);
}

TEST_CASE("round trip: parse(write(t)) == t within 9 significant digits") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(rng.below(200));
    const Trace t = testutil::random_gap_trace(seed, n);
    const Trace back = parse_trace(write_trace(t), t.user_id, t.native_rate_hz);
    REQUIRE(back.samples.size() == t.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = flatten(t.samples[i]);
      const auto b = flatten(back.samples[i]);
      CHECK(std::abs(back.samples[i].t - t.samples[i].t) <=
            1e-8 * std::max(1.0, std::abs(t.samples[i].t)));
      for (std::size_t j = 0; j < 9; ++j)
        CHECK(std::abs(a[j] - b[j]) <= 1e-8 * std::max(1.0, std::abs(a[j])));
    }
  }
}

TEST_CASE("manifest + dataset loading") {
  TempDir dir("ingest");
  DatasetManifest m;
  m.root = dir.path;
  m.native_rate_hz = 5.0;
  for (int u = 0; u < 4; ++u) {
    const std::string id = "user" + std::to_string(u);
    Trace t = testutil::ramp_trace(25, 5.0, static_cast<double>(u));
    t.user_id = id;
    save_trace(t, dir.path / (id + ".csv"));
    m.users.push_back({id, id + ".csv"});
  }
  save_manifest(m, dir.path / "manifest.json");

  const DatasetManifest loaded = load_manifest(dir.path / "manifest.json");
  CHECK(loaded.native_rate_hz == 5.0);
  REQUIRE(loaded.users.size() == 4);

  const auto dataset = load_dataset(loaded);
  CHECK(dataset.size() == 4);
  CHECK(dataset.at("user2").samples.size() == 25);

  SUBCASE("single user rejected") {
    DatasetManifest one = loaded;
    one.users.resize(1);
    CHECK_THROWS_WITH_AS(load_dataset(one), doctest::Contains("insufficient users"), error);
  }
  SUBCASE("duplicate user rejected") {
    DatasetManifest dup = loaded;
    dup.users.push_back(dup.users.front());
    CHECK_THROWS_WITH_AS(load_dataset(dup), doctest::Contains("duplicate"), error);
  }
  SUBCASE("missing file named in the error") {
    DatasetManifest missing = loaded;
    missing.users[0].path = "absent.csv";
    CHECK_THROWS_WITH_AS(load_dataset(missing), doctest::Contains("absent.csv"), error);
  }
}
