#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lavs/corpus.hpp"
#include "lavs/vocab.hpp"

namespace lavs {

// One (shared token, language pair) split option. freq is the smaller of the
// two languages' probabilities for the token.
struct SplitCandidate {
  double freq = 0.0;
  std::uint32_t lang_a = 0;  // lang_a < lang_b
  std::uint32_t lang_b = 0;
  TokenId token = 0;
};

// Drain order: descending freq, then ascending (lang_a, lang_b), then
// ascending token surface. Strict total order over distinct candidates.
bool candidate_precedes(const SplitCandidate& x, const SplitCandidate& y,
                        const Vocabulary& vocab);

// Yields one candidate per Shared token per unordered language pair,
// |Shared| * C(|L|,2) in total. dists[i].lang must equal i; at least two
// distributions are required.
void enumerate_candidates(const Vocabulary& vocab,
                          std::span<const TokenDistribution> dists,
                          const std::function<void(const SplitCandidate&)>& fn);
std::vector<SplitCandidate> enumerate_candidates(
    const Vocabulary& vocab, std::span<const TokenDistribution> dists);

struct SplitPlan {
  std::size_t budget = 0;
  // Candidates that contributed at least one realized entry, in drain order.
  std::vector<SplitCandidate> selections;
  // (base surface, language index) in realization order; exactly `budget`
  // entries, no duplicates.
  std::vector<std::pair<std::string, std::uint32_t>> realized;
  std::uint64_t vocab_fingerprint = 0;
};

// Greedy selection: drains candidates best-first and realizes the candidate's
// two (token, language) entries minus anything already realized (entries the
// vocabulary already carries count as realized), stopping exactly at
// `budget`. A final candidate may contribute only one of its two entries.
SplitPlan select_splits(const Vocabulary& vocab,
                        std::span<const TokenDistribution> dists,
                        std::size_t budget, unsigned threads = 1);

// Appends plan.realized as Specific entries after all existing entries, in
// realization order. Output size = input size + plan.budget.
Vocabulary apply_splits(const Vocabulary& vocab, const SplitPlan& plan);

// distributions -> select -> apply; equivalent to the staged calls.
// stats[i].lang must equal i.
Vocabulary lavs(const Vocabulary& vocab, std::span<const CorpusStats> stats,
                std::size_t budget, unsigned threads = 1,
                SplitPlan* plan_out = nullptr);

void export_plan_json(const SplitPlan& plan, const Vocabulary& vocab,
                      std::ostream& out);

}  // namespace lavs
