// Copyright 2026 The tagcl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdio>
#include <string>

#include "tagcl/graph.hpp"
#include "tagcl/kv.hpp"

TEST_CASE("kv parses keys in order with comments and blanks") {
  auto kv = tagcl::parse_kv_text("# header\n\nalpha = 0.5\n beta=x y \n", "cfg");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0].first == "alpha");
  CHECK(kv[0].second == "0.5");
  CHECK(kv[1].first == "beta");
  CHECK(kv[1].second == "x y");
}

TEST_CASE("kv rejects duplicate keys with the line number") {
  try {
    tagcl::parse_kv_text("a=1\nb=2\na=3\n", "cfg");
    FAIL("expected ValidationError");
  } catch (const tagcl::ValidationError& e) {
    CHECK(std::string(e.what()).find("cfg:3") != std::string::npos);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
}

TEST_CASE("kv rejects lines without '='") {
  CHECK_THROWS_AS(tagcl::parse_kv_text("notakv\n", "cfg"), tagcl::ValidationError);
}

TEST_CASE("kv rejects empty keys") {
  CHECK_THROWS_AS(tagcl::parse_kv_text("=3\n", "cfg"), tagcl::ValidationError);
}

TEST_CASE("kv file round trip") {
  std::string path = "kv_roundtrip.cfg";
  tagcl::KvEntries kv{{"seed", "7"}, {"name", "run one"}};
  tagcl::write_kv_file(path, kv);
  auto back = tagcl::parse_kv_file(path);
  CHECK(back == kv);
  std::remove(path.c_str());
}

TEST_CASE("kv missing file reports the path") {
  try {
    tagcl::parse_kv_file("no_such_file.cfg");
    FAIL("expected ValidationError");
  } catch (const tagcl::ValidationError& e) {
    CHECK(std::string(e.what()).find("no_such_file.cfg") != std::string::npos);
  }
}
