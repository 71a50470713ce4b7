// Copyright 2026 The swingup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <string>

#include "doctest.h"
#include "swingup/error.hpp"
#include "swingup/grid.hpp"

using namespace swingup;

TEST_CASE("uniform grid indexing") {
  const UniformGrid g(-1.0, 0.25, 9);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(g.span() == 2.0);
  CHECK(g[4] == 0.0);
  CHECK(g.contains(0.3));
  CHECK_FALSE(g.contains(1.5));
  CHECK(g.values().size() == 9);
}

TEST_CASE("centered grid puts the middle sample on the center") {
  for (std::size_t n : {8u, 9u, 1024u}) {
    const auto g = UniformGrid::centered(3.5, 0.1, n);
    CHECK(g.size() == n);
    CHECK(g[n / 2] == doctest::Approx(3.5).epsilon(1e-15));
  }
}

TEST_CASE("grid rejects degenerate spacing") {
  CHECK_THROWS_AS(UniformGrid(0.0, 0.0, 4), Error);
  CHECK_THROWS_AS(UniformGrid(0.0, -1.0, 4), Error);
  CHECK_THROWS_AS(UniformGrid(0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(UniformGrid(NAN, 1.0, 4), Error);
}

TEST_CASE("unit conversion") {
  CHECK(ghz_to_rad_per_ps(1000.0) == doctest::Approx(2.0 * M_PI));
  CHECK(kPsPerNs == 1000.0);
}

TEST_CASE("error kinds carry their category") {
  try {
    fail(ErrorKind::kUndefinedRatio, "zero denominator");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefinedRatio);
    CHECK(std::string(e.what()).find("zero denominator") != std::string::npos);
  }
  CHECK(std::string(to_string(ErrorKind::kFitRange)) == "fit-range");
  CHECK_NOTHROW(require(true, ErrorKind::kShape, "unused"));
  CHECK_THROWS_AS(require(false, ErrorKind::kShape, "bad"), Error);
}

TEST_CASE("config errors keep their line") {
  const ConfigError e(12, "unknown key");
  CHECK(e.line() == 12);
  CHECK(e.kind() == ErrorKind::kConfig);
}
