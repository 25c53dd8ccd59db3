//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <set>

#include "chemscreen/csv.hpp"
#include "chemscreen/hash.hpp"
#include "chemscreen/rng.hpp"

using namespace chemscreen;

TEST_CASE("csv: round trip with CRLF tolerance") {
  const csv::Table table = csv::read_string("a,b,c\r\n1,2,3\nx,,z\n");
  CHECK(table.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1][1].empty());
  CHECK(table.column("b") == 1);
  CHECK(table.column("nope") == -1);
  CHECK(csv::to_string(table) == "a,b,c\n1,2,3\nx,,z\n");
}

TEST_CASE("csv: shortest round-trip double formatting") {
  CHECK(csv::format_double(6.0) == "6");
  CHECK(csv::format_double(0.1) == "0.1");
  const double value = 9.096910013008056;
  CHECK(csv::format_double(value) == "9.096910013008056");
  CHECK(*csv::parse_double(csv::format_double(value)) == value);
  CHECK_FALSE(csv::parse_double("12x").has_value());
  CHECK_FALSE(csv::parse_double("").has_value());
  CHECK(*csv::parse_int("42") == 42);
  CHECK_FALSE(csv::parse_int("4.2").has_value());
}

TEST_CASE("rng: identical seeds replay identical streams") {
  SeededRng a(42);
  SeededRng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("rng: uniform draws stay in range and cover (statistically)") {
  SeededRng rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.uniform_below(10);
    CHECK(v < 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("rng: normal has roughly unit variance") {
  SeededRng rng(11);
  double sum = 0.0;
  double ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    ss += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(ss / n - 1.0) < 0.02);
}

TEST_CASE("rng: shuffle is a permutation and seed-stable") {
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<int> w = v;
  SeededRng a(3);
  SeededRng b(3);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::sort(w.begin(), w.end());
  CHECK(w == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("hash: mix and file hashing are stable") {
  CHECK(mix64(0) == mix64(0));
  CHECK(mix64(1) != mix64(2));
  CHECK(fnv1a64("chemscreen") == fnv1a64("chemscreen"));
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(to_hex(0) == "0000000000000000");
  CHECK(to_hex(0xdeadbeefULL) == "00000000deadbeef");
  const std::vector<std::uint64_t> words{1, 2, 3};
  const std::vector<std::uint64_t> swapped{1, 3, 2};
  CHECK(hash_words(words) != hash_words(swapped));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
}
