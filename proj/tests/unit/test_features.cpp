//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/features.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>
#include <stdexcept>

#include "chemscreen/rng.hpp"
#include "testutil.hpp"

using namespace chemscreen;

namespace {

chem::MoleculeGraph mol(const std::string &smiles) {
  auto result = chem::parse(smiles);
  REQUIRE_MESSAGE(result.ok(), smiles, ": ", result.first_error());
  return std::move(*result.graph);
}

}  // namespace

TEST_CASE("morgan: methane radius 0 sets exactly one bit") {
  const auto fp = features::morgan_fingerprint(mol("C"), 0, 2048);
  CHECK(fp.popcount() == 1);
  CHECK(fp.width() == 2048);
}

TEST_CASE("morgan: benzene symmetry collapses to <= 3 bits at radius 2") {
  // One symmetry class, so at most one distinct environment per radius.
  const auto fp = features::morgan_fingerprint(mol("c1ccccc1"), 2, 2048);
  CHECK(fp.popcount() <= 3);
  CHECK(fp.popcount() >= 1);
}

TEST_CASE("morgan: invariant under atom permutation, 100 trials") {
  SeededRng rng(99);
  for (const char *smiles : {"CCC(C)(C#C)O", "c1ccc2ccccc2c1", "CC(N)C(=O)O"}) {
    const auto g = mol(smiles);
    const auto reference = features::morgan_fingerprint(g, 2, 2048);
    for (int trial = 0; trial < 100; ++trial) {
      const auto perm = testutil::random_permutation(g.atoms.size(), rng);
      const auto permuted =
          features::morgan_fingerprint(testutil::permute_graph(g, perm), 2,
                                       2048);
      CHECK(permuted == reference);
    }
  }
}

TEST_CASE("morgan: set-bit count is monotone in the radius") {
  for (const char *smiles :
       {"CCO", "c1ccccc1", "CC(=O)Nc1ccccc1", "C1CN2CCC1CC2"}) {
    const auto g = mol(smiles);
    int previous = 0;
    for (int radius = 0; radius <= 3; ++radius) {
      const int bits =
          features::morgan_fingerprint(g, radius, 2048).popcount();
      CHECK(bits >= previous);
      previous = bits;
    }
  }
}

TEST_CASE("tanimoto: identity, disjoint, arithmetic") {
  const auto a = features::morgan_fingerprint(mol("CCO"), 2, 2048);
  CHECK(features::tanimoto(a, a) == 1.0);

  features::Fingerprint x(64);
  features::Fingerprint y(64);
  x.set(0);
  x.set(1);
  y.set(2);
  CHECK(features::tanimoto(x, y) == 0.0);

  // |and| = 2, |or| = 5 -> 0.4
  features::Fingerprint p(64);
  features::Fingerprint q(64);
  for (int b : {0, 1, 2, 3}) p.set(b);
  for (int b : {2, 3, 4}) q.set(b);
  CHECK(features::tanimoto(p, q) == 0.4);

  // both empty -> 1.0 by definition
  CHECK(features::tanimoto(features::Fingerprint(64),
                           features::Fingerprint(64)) == 1.0);

  CHECK_THROWS_AS(features::tanimoto(features::Fingerprint(64),
                                     features::Fingerprint(128)),
                  std::invalid_argument);
}

TEST_CASE("tanimoto: symmetric, reflexive, bounded on random pairs") {
  SeededRng rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    features::Fingerprint a(256);
    features::Fingerprint b(256);
    for (int k = 0; k < 40; ++k) {
      a.set(static_cast<int>(rng.uniform_below(256)));
      b.set(static_cast<int>(rng.uniform_below(256)));
    }
    const double ab = features::tanimoto(a, b);
    CHECK(ab == features::tanimoto(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(features::tanimoto(a, a) == 1.0);
  }
}

TEST_CASE("descriptors: methane, benzene, ethanol hand counts") {
  const auto d_methane = features::descriptors(mol("C"));
  REQUIRE(d_methane.names == features::descriptor_names());
  CHECK(d_methane.values(0) == doctest::Approx(16.043));  // CH4
  CHECK(d_methane.values(1) == 1);                        // heavy atoms
  CHECK(d_methane.values(2) == 0);                        // rings

  const auto d_benzene = features::descriptors(mol("c1ccccc1"));
  CHECK(d_benzene.values(2) == 1);  // ring count
  CHECK(d_benzene.values(3) == 6);  // aromatic atoms
  CHECK(d_benzene.values(5) == 0);  // donors
  CHECK(d_benzene.values(6) == 0);  // acceptors

  const auto d_ethanol = features::descriptors(mol("CCO"));
  CHECK(d_ethanol.values(5) == 1);  // O-H donor
  CHECK(d_ethanol.values(6) == 1);  // O acceptor
  CHECK(d_ethanol.values(7) == 0);  // terminal O excluded by degree rule
  CHECK(d_ethanol.values(0) == doctest::Approx(46.069));

  const auto d_butane = features::descriptors(mol("CCCC"));
  CHECK(d_butane.values(7) == 1);  // one interior rotatable bond

  const auto d_nitro = features::descriptors(mol("[O-][N+](=O)C"));
  CHECK(d_nitro.values(8) == 0);  // net formal charge
}

TEST_CASE("standardize: z-scores fit rows with population stddev") {
  features::FeatureMatrix m;
  m.ids = {"a", "b", "c"};
  m.column_names = {"x"};
  m.values.resize(3, 1);
  m.values << 1.0, 2.0, 3.0;

  const std::vector<int> all{0, 1, 2};
  const auto z = features::standardize(m, all);
  CHECK(z.values(0, 0) == doctest::Approx(-1.224744871391589));
  CHECK(z.values(1, 0) == doctest::Approx(0.0));
  CHECK(z.values(2, 0) == doctest::Approx(1.224744871391589));
  CHECK(z.standardized);
  REQUIRE(z.scaler.has_value());
  CHECK(z.scaler->mean(0) == doctest::Approx(2.0));

  // Re-fitting already z-scored values changes nothing.
  features::FeatureMatrix fresh = z;
  fresh.standardized = false;
  fresh.scaler.reset();
  const auto z2 = features::standardize(fresh, all);
  for (int r = 0; r < 3; ++r) {
    CHECK(z2.values(r, 0) == doctest::Approx(z.values(r, 0)));
  }

  // Standardizing twice violates the precondition.
  CHECK_THROWS_AS((void)features::standardize(z, all), std::invalid_argument);

  // Applying the scaler to an unseen row equal to the train mean gives 0.
  features::FeatureMatrix unseen;
  unseen.ids = {"u"};
  unseen.column_names = {"x"};
  unseen.values.resize(1, 1);
  unseen.values << 2.0;
  const auto applied = features::apply_scaler(unseen, *z.scaler);
  CHECK(applied.values(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("standardize: train-fitted columns hit mean 0 / stddev 1 to 1e-9") {
  SeededRng rng(5);
  features::FeatureMatrix m;
  m.column_names = {"a", "b", "c"};
  m.values.resize(50, 3);
  for (int r = 0; r < 50; ++r) {
    m.ids.push_back("id" + std::to_string(r));
    for (int c = 0; c < 3; ++c) {
      m.values(r, c) = rng.uniform_real(-3.0, 9.0);
    }
  }
  std::vector<int> fit_rows;
  for (int r = 0; r < 30; ++r) fit_rows.push_back(r);
  const auto z = features::standardize(m, fit_rows);
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (int r : fit_rows) mean += z.values(r, c);
    mean /= static_cast<double>(fit_rows.size());
    double var = 0.0;
    for (int r : fit_rows) {
      var += (z.values(r, c) - mean) * (z.values(r, c) - mean);
    }
    var /= static_cast<double>(fit_rows.size());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("standardize: zero-variance column must be dropped first") {
  features::FeatureMatrix m;
  m.ids = {"a", "b"};
  m.column_names = {"const", "ok"};
  m.values.resize(2, 2);
  m.values << 5.0, 1.0, 5.0, 2.0;
  const std::vector<int> all{0, 1};
  CHECK_THROWS_AS((void)features::standardize(m, all), std::invalid_argument);

  const auto [kept, dropped] = features::drop_zero_variance(m, all);
  CHECK(dropped == std::vector<std::string>{"const"});
  CHECK(kept.column_names == std::vector<std::string>{"ok"});
  CHECK_NOTHROW((void)features::standardize(kept, all));
}

TEST_CASE("drop_zero_variance: no-op when nothing is constant") {
  features::FeatureMatrix m;
  m.ids = {"a", "b"};
  m.column_names = {"x", "y"};
  m.values.resize(2, 2);
  m.values << 1.0, 2.0, 3.0, 4.0;
  const std::vector<int> all{0, 1};
  const auto [kept, dropped] = features::drop_zero_variance(m, all);
  CHECK(dropped.empty());
  CHECK(kept.values == m.values);
}

TEST_CASE("drop_zero_variance: fit rows decide, not the full matrix") {
  // Bit never set in train but set in test: dropped.
  features::FeatureMatrix m;
  m.ids = {"train", "test"};
  m.column_names = {"fp_0", "fp_1"};
  m.values.resize(2, 2);
  m.values << 0.0, 1.0, 1.0, 1.0;
  const std::vector<int> train{0};
  CHECK_THROWS(features::drop_zero_variance(m, train));  // all cols constant on 1 row

  features::FeatureMatrix m2;
  m2.ids = {"t0", "t1", "test"};
  m2.column_names = {"fp_0", "fp_1"};
  m2.values.resize(3, 2);
  m2.values << 0.0, 1.0, 0.0, 0.0, 1.0, 1.0;
  const std::vector<int> train2{0, 1};
  const auto [kept, dropped] = features::drop_zero_variance(m2, train2);
  CHECK(dropped == std::vector<std::string>{"fp_0"});
  CHECK(kept.n_cols() == 1);
}

TEST_CASE("feature matrix: parallel build equals sequential and CSV round-trips") {
  std::vector<std::string> ids;
  std::vector<chem::MoleculeGraph> mols;
  const auto lines =
      testutil::read_lines(testutil::fixture_path("smiles_valid.txt"));
  for (std::size_t i = 0; i < 40 && i < lines.size(); ++i) {
    auto parsed = chem::parse(lines[i]);
    REQUIRE(parsed.ok());
    ids.push_back(lines[i]);
    mols.push_back(std::move(*parsed.graph));
  }
  // Threaded build must be byte-identical to sequential (threshold is 64
  // molecules, so duplicate the list to cross it).
  std::vector<std::string> big_ids;
  std::vector<chem::MoleculeGraph> big_mols;
  for (int rep = 0; rep < 4; ++rep) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      big_ids.push_back(ids[i] + "#" + std::to_string(rep));
      big_mols.push_back(mols[i]);
    }
  }
  const auto seq = features::build_feature_matrix(
      big_ids, big_mols, features::FeatureMode::kBoth, 2, 512, 1);
  const auto par = features::build_feature_matrix(
      big_ids, big_mols, features::FeatureMode::kBoth, 2, 512, 4);
  CHECK(seq.values == par.values);
  CHECK(seq.column_names == par.column_names);
  CHECK(seq.column_names.size() == 512 + 9);

  const std::string path =
      (std::filesystem::temp_directory_path() / "chemscreen_features_test.csv")
          .string();
  features::write_csv(path, seq);
  const auto loaded = features::read_csv(path);
  CHECK(loaded.ids == seq.ids);
  CHECK(loaded.column_names == seq.column_names);
  CHECK(loaded.values == seq.values);
  std::filesystem::remove(path);
}

TEST_CASE("select_columns: reorders and validates") {
  features::FeatureMatrix m;
  m.ids = {"a"};
  m.column_names = {"x", "y", "z"};
  m.values.resize(1, 3);
  m.values << 1.0, 2.0, 3.0;
  const auto sub = features::select_columns(m, {"z", "x"});
  CHECK(sub.values(0, 0) == 3.0);
  CHECK(sub.values(0, 1) == 1.0);
  CHECK_THROWS_AS((void)features::select_columns(m, {"missing"}),
                  std::invalid_argument);
}
