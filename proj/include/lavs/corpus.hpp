#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lavs/language.hpp"
#include "lavs/vocab.hpp"

namespace lavs {

enum class UnkPolicy : std::uint8_t {
  Strict,  // unknown surface is an error
  Drop,    // unknown surface is ignored and tallied
};

// Raw 1-gram counts for one language over a vocabulary.
struct CorpusStats {
  std::uint32_t lang = 0;
  std::vector<std::uint64_t> counts;  // indexed by TokenId
  std::uint64_t total = 0;
  std::uint64_t lines = 0;
  std::uint64_t dropped = 0;  // unknown occurrences skipped under Drop
};

// Add-one-smoothed probability vector for one language.
struct TokenDistribution {
  std::uint32_t lang = 0;
  std::vector<double> probs;
  bool add_one_smoothed = true;
};

// Reads pre-tokenized text: one sentence per line, tokens separated by
// single U+0020. Embedded NUL bytes are malformed. A trailing '\r' on a line
// is stripped.
CorpusStats ingest_corpus(std::istream& in, const LanguageId& lang,
                          const Vocabulary& vocab,
                          UnkPolicy policy = UnkPolicy::Strict);
CorpusStats ingest_corpus_file(const std::filesystem::path& path,
                               const LanguageId& lang, const Vocabulary& vocab,
                               UnkPolicy policy = UnkPolicy::Strict);

// probs[i] = (counts[i] + 1) / (total + |vocab|). Strictly positive and
// normalized for every input, including all-zero counts.
TokenDistribution distribution(const CorpusStats& stats,
                               const Vocabulary& vocab);

// Wraps an explicit probability vector (fixture helper). Probabilities must
// be in (0,1] and sum to 1 within 1e-9.
TokenDistribution make_distribution(std::uint32_t lang,
                                    std::vector<double> probs);

// Moves counts from a vocabulary onto a derived one without re-ingesting:
// a Shared token's count lands on the language's own Specific twin when the
// derived vocabulary has one, otherwise on the surviving Shared entry.
// Equals re-ingesting the retagged corpus against the derived vocabulary.
CorpusStats transfer_counts(const CorpusStats& stats,
                            const Vocabulary& from_vocab,
                            const Vocabulary& to_vocab);

// usage[id] = languages whose corpus count for `id` is positive.
TokenUsage usage_from_stats(const Vocabulary& vocab,
                            std::span<const CorpusStats> stats);

// {"lang","total","lines","dropped","counts":[[surface,count],...]} with
// counts sorted by descending count then ascending surface.
void export_stats_json(const CorpusStats& stats, const Vocabulary& vocab,
                       std::ostream& out);

}  // namespace lavs
