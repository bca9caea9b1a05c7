#include <doctest.h>

#include <cmath>
#include <random>

#include "lavs/divergence.hpp"
#include "lavs/error.hpp"
#include "testutil.hpp"

using namespace lavs;
using lavs_test::close_rel;
using lavs_test::kl_oracle;
using lavs_test::make_vocab;
using lavs_test::stats_from_counts;

namespace {

// counts A {a:3, b:1}, B {a:1, b:3}, |V| = 2, add-one: KL = ln(2)/3.
struct TwoTokenFixture {
  Vocabulary vocab = make_vocab({"aa", "bb"}, {"a", "b"});
  TokenDistribution da = distribution(stats_from_counts(0, {3, 1}), vocab);
  TokenDistribution db = distribution(stats_from_counts(1, {1, 3}), vocab);
};

}  // namespace

TEST_CASE("kl of identical distributions is exactly zero") {
  const Vocabulary v = make_vocab({"aa"}, {"a", "b", "c"});
  const auto d = distribution(stats_from_counts(0, {4, 2, 9}), v);
  CHECK(kl(d, d) == 0.0);
}

TEST_CASE("kl matches the hand-derived two-token value") {
  TwoTokenFixture fx;
  const double expected = std::log(2.0) / 3.0;  // 0.23104906...
  CHECK(kl(fx.da, fx.db) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(kl(fx.db, fx.da) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(kl(fx.da, fx.db) == doctest::Approx(0.23105).epsilon(1e-4));
}

TEST_CASE("kl of two uniform distributions is zero") {
  const Vocabulary v = make_vocab({"aa", "bb"}, {"a", "b", "c", "d", "e"});
  const auto d0 = distribution(stats_from_counts(0, {0, 0, 0, 0, 0}), v);
  auto d1 = distribution(stats_from_counts(1, {0, 0, 0, 0, 0}), v);
  CHECK(kl(d0, d1) == 0.0);
}

TEST_CASE("kl agrees with the naive summation oracle on random fixtures") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 5000;
    std::vector<std::uint64_t> ca(n), cb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ca[i] = rng() % 500;
      cb[i] = rng() % 500;
    }
    std::vector<std::string> surfaces;
    surfaces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) surfaces.push_back("t" + std::to_string(i));
    const Vocabulary v = make_vocab({"aa", "bb"}, surfaces);
    const auto da = distribution(stats_from_counts(0, ca), v);
    const auto db = distribution(stats_from_counts(1, cb), v);
    const double got = kl(da, db);
    CHECK(got >= 0.0);
    CHECK(close_rel(got, kl_oracle(da.probs, db.probs), 1e-12));
  }
}

TEST_CASE("pairwise matrix matches individual calls and is asymmetric") {
  const Vocabulary v = make_vocab({"aa", "bb", "cc"}, {"a", "b", "c"});
  const LanguageSet& langs = v.languages();
  std::vector<TokenDistribution> dists;
  dists.push_back(distribution(stats_from_counts(0, {9, 1, 1}), v));
  dists.push_back(distribution(stats_from_counts(1, {1, 9, 1}), v));
  dists.push_back(distribution(stats_from_counts(2, {1, 2, 30}), v));
  const KlMatrix m = pairwise_kl(dists, langs);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(m.at(a, b) == kl(dists[a], dists[b]));
    }
  }
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(0, 2) != m.at(2, 0));
}

TEST_CASE("pairwise matrix of identical distributions is zero") {
  const Vocabulary v = make_vocab({"aa", "bb"}, {"a", "b"});
  std::vector<TokenDistribution> dists;
  dists.push_back(distribution(stats_from_counts(0, {3, 3}), v));
  dists.push_back(distribution(stats_from_counts(1, {3, 3}), v));
  const KlMatrix m = pairwise_kl(dists, v.languages());
  for (double value : m.values) CHECK(value == 0.0);
}

TEST_CASE("pairwise matrix is identical across thread counts") {
  std::mt19937_64 rng(23);
  const std::size_t n = 4000;
  std::vector<std::string> surfaces;
  for (std::size_t i = 0; i < n; ++i) surfaces.push_back("t" + std::to_string(i));
  const Vocabulary v = make_vocab({"aa", "bb", "cc", "dd"}, surfaces);
  std::vector<TokenDistribution> dists;
  for (std::uint32_t l = 0; l < 4; ++l) {
    std::vector<std::uint64_t> counts(n);
    for (auto& c : counts) c = rng() % 1000;
    dists.push_back(distribution(stats_from_counts(l, counts), v));
  }
  const KlMatrix m1 = pairwise_kl(dists, v.languages(), 1);
  const KlMatrix m2 = pairwise_kl(dists, v.languages(), 2);
  const KlMatrix m7 = pairwise_kl(dists, v.languages(), 7);
  CHECK(m1.values == m2.values);
  CHECK(m1.values == m7.values);
}

TEST_CASE("objective is the mean over all ordered pairs") {
  TwoTokenFixture fx;
  std::vector<TokenDistribution> dists{fx.da, fx.db};
  const double value = objective(fx.vocab, dists);
  const double expected = (2.0 * std::log(2.0) / 3.0) / 4.0;  // 0.115524...
  CHECK(value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(value == doctest::Approx(0.11552).epsilon(1e-4));
  CHECK(objective(pairwise_kl(dists, fx.vocab.languages())) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("objective is zero for identical distributions") {
  const Vocabulary v = make_vocab({"aa", "bb", "cc"}, {"a", "b"});
  std::vector<TokenDistribution> dists;
  for (std::uint32_t l = 0; l < 3; ++l) {
    dists.push_back(distribution(stats_from_counts(l, {2, 5}), v));
  }
  CHECK(objective(v, dists) == 0.0);
}

TEST_CASE("objective is invariant under language permutation") {
  const Vocabulary v = make_vocab({"aa", "bb", "cc"}, {"a", "b", "c"});
  std::vector<std::vector<std::uint64_t>> counts = {
      {9, 1, 1}, {1, 9, 1}, {1, 2, 30}};
  std::vector<TokenDistribution> order1, order2;
  const std::vector<std::size_t> perm = {2, 0, 1};
  for (std::uint32_t l = 0; l < 3; ++l) {
    order1.push_back(distribution(stats_from_counts(l, counts[l]), v));
    order2.push_back(distribution(stats_from_counts(l, counts[perm[l]]), v));
  }
  CHECK(objective(v, order1) ==
        doctest::Approx(objective(v, order2)).epsilon(1e-13));
}

TEST_CASE("split increment fixture values") {
  const auto equal = split_kl_increment(0.2, 0.2);
  CHECK(equal.mass_term == 0.0);

  const auto skewed = split_kl_increment(0.4, 0.1);
  CHECK(skewed.mass_term ==
        doctest::Approx(0.3 * std::log(0.25)).epsilon(1e-14));
  CHECK(skewed.mass_term == doctest::Approx(-0.41589).epsilon(1e-4));

  const auto swapped = split_kl_increment(0.1, 0.4);
  CHECK(swapped.mass_term == doctest::Approx(skewed.mass_term).epsilon(1e-14));
}

TEST_CASE("split increment mass term is never positive") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(1e-9, 1.0 - 1e-9);
  for (int i = 0; i < 10000; ++i) {
    const double a = uni(rng);
    const double b = uni(rng);
    const auto inc = split_kl_increment(a, b);
    CHECK(inc.mass_term <= 0.0);
    if (a == b) CHECK(inc.mass_term == 0.0);
  }
}

TEST_CASE("split increment rejects out-of-domain probabilities") {
  CHECK_THROWS_AS(split_kl_increment(0.0, 0.5), Error);
  CHECK_THROWS_AS(split_kl_increment(0.5, 1.0), Error);
  CHECK_THROWS_AS(split_kl_increment(-0.1, 0.5), Error);
}

TEST_CASE("kl rejects distributions over different vocabularies") {
  const Vocabulary v2 = make_vocab({"aa"}, {"a", "b"});
  const Vocabulary v3 = make_vocab({"aa"}, {"a", "b", "c"});
  const auto d2 = distribution(stats_from_counts(0, {1, 1}), v2);
  const auto d3 = distribution(stats_from_counts(0, {1, 1, 1}), v3);
  CHECK_THROWS_AS(kl(d2, d3), Error);
}

TEST_CASE("kl matrix CSV round-trips through the loader") {
  const Vocabulary v = make_vocab({"aa", "bb"}, {"a", "b"});
  std::vector<TokenDistribution> dists;
  dists.push_back(distribution(stats_from_counts(0, {3, 1}), v));
  dists.push_back(distribution(stats_from_counts(1, {1, 3}), v));
  const KlMatrix m = pairwise_kl(dists, v.languages());

  std::stringstream csv;
  export_kl_csv(m, csv);
  const std::string text = csv.str();
  CHECK(text.find("0.231049") != std::string::npos);

  const KlMatrix back = load_kl_csv(csv);
  REQUIRE(back.langs == m.langs);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    CHECK(close_rel(back.values[i], m.values[i], 1e-11));
  }
}
