#include <doctest.h>

#include <random>
#include <sstream>

#include "lavs/corpus.hpp"
#include "lavs/error.hpp"
#include "testutil.hpp"

using namespace lavs;
using lavs_test::make_vocab;
using lavs_test::stats_from_counts;

namespace {

CorpusStats ingest_text(const std::string& text, const Vocabulary& vocab,
                        UnkPolicy policy = UnkPolicy::Strict,
                        std::uint32_t lang = 0) {
  std::stringstream in(text);
  return ingest_corpus(in, vocab.languages().at(lang), vocab, policy);
}

}  // namespace

TEST_CASE("ingest counts occurrences") {
  const Vocabulary v = make_vocab({"en"}, {"a", "b"});
  const CorpusStats stats = ingest_text("a b\na\n", v);
  CHECK(stats.counts[0] == 2);
  CHECK(stats.counts[1] == 1);
  CHECK(stats.total == 3);
  CHECK(stats.lines == 2);
}

TEST_CASE("ingest of an empty stream") {
  const Vocabulary v = make_vocab({"en"}, {"a", "b"});
  const CorpusStats stats = ingest_text("", v);
  CHECK(stats.total == 0);
  CHECK(stats.lines == 0);
  CHECK(stats.counts == std::vector<std::uint64_t>{0, 0});
}

TEST_CASE("strict policy errors on unknown surfaces, naming them") {
  const Vocabulary v = make_vocab({"en"}, {"a"});
  try {
    ingest_text("a zzz\n", v);
    FAIL("expected UNKNOWN_TOKEN");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownToken);
    CHECK(std::string(e.what()).find("zzz") != std::string::npos);
  }
}

TEST_CASE("drop policy tallies unknown surfaces") {
  const Vocabulary v = make_vocab({"en"}, {"a"});
  const CorpusStats stats = ingest_text("a zzz a\n", v, UnkPolicy::Drop);
  CHECK(stats.counts[0] == 2);
  CHECK(stats.total == 2);
  CHECK(stats.dropped == 1);
}

TEST_CASE("embedded NUL is malformed") {
  const Vocabulary v = make_vocab({"en"}, {"a"});
  std::string text = "a";
  text += '\0';
  text += "\n";
  CHECK_THROWS_AS(ingest_text(text, v), Error);
}

TEST_CASE("distribution applies add-one smoothing") {
  const Vocabulary v = make_vocab({"en"}, {"a", "b"});
  const auto d = distribution(stats_from_counts(0, {3, 1}), v);
  CHECK(d.probs[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(d.probs[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-15));

  const Vocabulary v3 = make_vocab({"en"}, {"a", "b", "c"});
  const auto d3 = distribution(stats_from_counts(0, {0, 0, 6}), v3);
  CHECK(d3.probs[0] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(d3.probs[1] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(d3.probs[2] == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("all-zero counts smooth to the uniform distribution") {
  const Vocabulary v = make_vocab({"en"}, {"a", "b", "c", "d"});
  const auto d = distribution(stats_from_counts(0, {0, 0, 0, 0}), v);
  for (double p : d.probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("distributions are positive and normalized") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    std::vector<std::string> surfaces;
    for (std::size_t i = 0; i < n; ++i) surfaces.push_back("t" + std::to_string(i));
    const Vocabulary v = make_vocab({"en"}, surfaces);
    std::vector<std::uint64_t> counts(n);
    for (auto& c : counts) c = rng() % 1000;
    const auto d = distribution(stats_from_counts(0, counts), v);
    double sum = 0;
    for (double p : d.probs) {
      CHECK(p > 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("counting is line-order insensitive and additive") {
  const Vocabulary v = make_vocab({"en"}, {"a", "b", "c"});
  const auto s1 = ingest_text("a b\nc c a\n", v);
  const auto s2 = ingest_text("c c a\na b\n", v);
  CHECK(s1.counts == s2.counts);

  const auto part1 = ingest_text("a b\n", v);
  const auto part2 = ingest_text("c c a\n", v);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s1.counts[i] == part1.counts[i] + part2.counts[i]);
  }
  CHECK(s1.total == part1.total + part2.total);
}

TEST_CASE("size mismatch is rejected") {
  const Vocabulary v = make_vocab({"en"}, {"a", "b"});
  CHECK_THROWS_AS(distribution(stats_from_counts(0, {1, 2, 3}), v), Error);
}

TEST_CASE("transfer_counts moves shared mass onto specific twins") {
  const LanguageSet langs({"aa", "bb"});
  const Vocabulary base = make_vocab({"aa", "bb"}, {"x", "y"});
  Vocabulary::Builder b(langs);
  b.add_shared("x").add_shared("y").add_specific("x", 0).add_specific("x", 1);
  const Vocabulary lavs_vocab = b.build();

  const auto moved =
      transfer_counts(stats_from_counts(0, {5, 7}), base, lavs_vocab);
  CHECK(moved.counts == std::vector<std::uint64_t>{0, 7, 5, 0});
  CHECK(moved.total == 12);

  const auto moved_b =
      transfer_counts(stats_from_counts(1, {2, 3}), base, lavs_vocab);
  CHECK(moved_b.counts == std::vector<std::uint64_t>{0, 3, 0, 2});
}

TEST_CASE("usage_from_stats reports languages with positive counts") {
  const Vocabulary v = make_vocab({"aa", "bb"}, {"x", "y"});
  std::vector<CorpusStats> stats;
  stats.push_back(stats_from_counts(0, {1, 0}));
  stats.push_back(stats_from_counts(1, {2, 0}));
  const TokenUsage usage = usage_from_stats(v, stats);
  CHECK(usage[0] == std::vector<std::uint32_t>{0, 1});
  CHECK(usage[1].empty());
}

TEST_CASE("stats JSON export is sorted by count then surface") {
  const Vocabulary v = make_vocab({"en"}, {"b", "a", "c"});
  std::stringstream out;
  export_stats_json(stats_from_counts(0, {2, 2, 5}, 3), v, out);
  const std::string text = out.str();
  const auto pos_c = text.find("\"c\"");
  const auto pos_a = text.find("\"a\"");
  const auto pos_b = text.find("\"b\"");
  CHECK(pos_c < pos_a);
  CHECK(pos_a < pos_b);
  CHECK(text.find("\"total\": 9") != std::string::npos);
  CHECK(text.find("\"lines\": 3") != std::string::npos);
}
