#include "lavs/select.hpp"

#include <algorithm>
#include <mutex>
#include <ostream>
#include <queue>
#include <set>
#include <utility>

#include <json.hpp>

#include "lavs/error.hpp"
#include "lavs/util.hpp"

namespace lavs {

namespace {

struct CandidateOrder {
  const Vocabulary* vocab;
  bool operator()(const SplitCandidate& x, const SplitCandidate& y) const {
    return candidate_precedes(x, y, *vocab);
  }
};

std::vector<TokenId> shared_ids(const Vocabulary& vocab) {
  std::vector<TokenId> ids;
  ids.reserve(vocab.base_size());
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (vocab.entry(id).kind == TokenKind::Shared) ids.push_back(id);
  }
  return ids;
}

void check_inputs(const Vocabulary& vocab,
                  std::span<const TokenDistribution> dists) {
  if (dists.size() < 2) {
    raise(ErrorCode::TooFewLanguages,
          "split selection needs at least two languages, got " +
              std::to_string(dists.size()));
  }
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].probs.size() != vocab.size()) {
      raise(ErrorCode::SizeMismatch,
            "distribution does not align with the vocabulary");
    }
    if (dists[i].lang != i) {
      raise(ErrorCode::SizeMismatch,
            "distributions must be ordered by language index");
    }
  }
}

// Keeps the `limit` best candidates seen so far. With "precedes" as the
// ordering, top() is the worst candidate kept.
class BoundedHeap {
 public:
  BoundedHeap(std::size_t limit, const Vocabulary& vocab)
      : limit_(limit), order_{&vocab}, heap_(order_) {}

  void offer(const SplitCandidate& cand) {
    if (limit_ == 0) return;
    if (heap_.size() < limit_) {
      heap_.push(cand);
    } else if (order_(cand, heap_.top())) {
      heap_.pop();
      heap_.push(cand);
    }
  }

  std::vector<SplitCandidate> drain() {
    std::vector<SplitCandidate> out;
    out.reserve(heap_.size());
    while (!heap_.empty()) {
      out.push_back(heap_.top());
      heap_.pop();
    }
    std::reverse(out.begin(), out.end());  // best first
    return out;
  }

 private:
  std::size_t limit_;
  CandidateOrder order_;
  std::priority_queue<SplitCandidate, std::vector<SplitCandidate>,
                      CandidateOrder>
      heap_;
};

// Top `limit` candidates in drain order, enumerated by token shard.
std::vector<SplitCandidate> top_candidates(
    const Vocabulary& vocab, std::span<const TokenDistribution> dists,
    const std::vector<TokenId>& tokens, std::size_t limit, unsigned threads) {
  const std::size_t lang_count = dists.size();
  std::vector<std::vector<SplitCandidate>> shard_tops;
  std::mutex mu;
  parallel_blocks(tokens.size(), threads,
                  [&](std::size_t begin, std::size_t end) {
    BoundedHeap heap(limit, vocab);
    for (std::size_t t = begin; t < end; ++t) {
      const TokenId id = tokens[t];
      for (std::uint32_t a = 0; a + 1 < lang_count; ++a) {
        for (std::uint32_t b = a + 1; b < lang_count; ++b) {
          heap.offer(SplitCandidate{
              std::min(dists[a].probs[id], dists[b].probs[id]), a, b, id});
        }
      }
    }
    auto top = heap.drain();
    std::lock_guard<std::mutex> lock(mu);
    shard_tops.push_back(std::move(top));
  });

  std::vector<SplitCandidate> all;
  for (auto& shard : shard_tops) {
    all.insert(all.end(), shard.begin(), shard.end());
  }
  std::sort(all.begin(), all.end(), CandidateOrder{&vocab});
  if (all.size() > limit) all.resize(limit);
  return all;
}

}  // namespace

bool candidate_precedes(const SplitCandidate& x, const SplitCandidate& y,
                        const Vocabulary& vocab) {
  if (x.freq != y.freq) return x.freq > y.freq;
  if (x.lang_a != y.lang_a) return x.lang_a < y.lang_a;
  if (x.lang_b != y.lang_b) return x.lang_b < y.lang_b;
  return vocab.entry(x.token).surface < vocab.entry(y.token).surface;
}

void enumerate_candidates(
    const Vocabulary& vocab, std::span<const TokenDistribution> dists,
    const std::function<void(const SplitCandidate&)>& fn) {
  check_inputs(vocab, dists);
  const std::size_t lang_count = dists.size();
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (vocab.entry(id).kind != TokenKind::Shared) continue;
    for (std::uint32_t a = 0; a + 1 < lang_count; ++a) {
      for (std::uint32_t b = a + 1; b < lang_count; ++b) {
        fn(SplitCandidate{std::min(dists[a].probs[id], dists[b].probs[id]),
                          a, b, id});
      }
    }
  }
}

std::vector<SplitCandidate> enumerate_candidates(
    const Vocabulary& vocab, std::span<const TokenDistribution> dists) {
  std::vector<SplitCandidate> out;
  enumerate_candidates(vocab, dists,
                       [&out](const SplitCandidate& c) { out.push_back(c); });
  return out;
}

SplitPlan select_splits(const Vocabulary& vocab,
                        std::span<const TokenDistribution> dists,
                        std::size_t budget, unsigned threads) {
  check_inputs(vocab, dists);

  SplitPlan plan;
  plan.budget = budget;
  plan.vocab_fingerprint = vocab.fingerprint();
  if (budget == 0) return plan;

  const std::vector<TokenId> tokens = shared_ids(vocab);
  const std::size_t lang_count = dists.size();
  const std::size_t pair_count = lang_count * (lang_count - 1) / 2;
  const std::size_t total_candidates = tokens.size() * pair_count;
  if (budget > tokens.size() * lang_count) {
    raise(ErrorCode::BudgetUnreachable,
          "budget " + std::to_string(budget) + " exceeds the " +
              std::to_string(tokens.size() * lang_count) +
              " realizable specific entries");
  }

  // Entries the vocabulary already carries never count against the budget.
  std::set<std::pair<std::string, std::uint32_t>> seen;
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const TokenEntry& e = vocab.entry(id);
    if (e.kind == TokenKind::Specific) seen.emplace(e.surface, e.lang);
  }
  const auto seen_baseline = seen;

  // The queue length is adaptive: most candidates realize two new entries,
  // so `budget` is plenty; heavy deduplication re-streams with a larger cap.
  std::size_t limit = std::min(total_candidates,
                               std::max<std::size_t>(budget, 64));
  for (;;) {
    const auto top = top_candidates(vocab, dists, tokens, limit, threads);
    plan.selections.clear();
    plan.realized.clear();
    seen = seen_baseline;
    for (const SplitCandidate& cand : top) {
      if (plan.realized.size() == budget) break;
      const std::string& surface = vocab.entry(cand.token).surface;
      bool contributed = false;
      for (std::uint32_t lang : {cand.lang_a, cand.lang_b}) {
        if (plan.realized.size() == budget) break;
        if (seen.emplace(surface, lang).second) {
          plan.realized.emplace_back(surface, lang);
          contributed = true;
        }
      }
      if (contributed) plan.selections.push_back(cand);
    }
    if (plan.realized.size() == budget) return plan;
    if (limit >= total_candidates) {
      raise(ErrorCode::BudgetUnreachable,
            "candidates exhausted with " +
                std::to_string(plan.realized.size()) + " of " +
                std::to_string(budget) + " entries realized");
    }
    limit = std::min(total_candidates, limit * 4);
  }
}

Vocabulary apply_splits(const Vocabulary& vocab, const SplitPlan& plan) {
  if (plan.vocab_fingerprint != vocab.fingerprint()) {
    raise(ErrorCode::PlanMismatch,
          "plan was built against a different vocabulary");
  }
  Vocabulary::Builder builder(vocab.languages());
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const TokenEntry& e = vocab.entry(id);
    if (e.kind == TokenKind::Shared) {
      builder.add_shared(e.surface);
    } else {
      builder.add_specific(e.surface, e.lang);
    }
  }
  for (const auto& [surface, lang] : plan.realized) {
    if (!vocab.has_shared(surface)) {
      raise(ErrorCode::PlanMismatch,
            "realized entry \"" + surface + "\" is not a shared token");
    }
    builder.add_specific(surface, lang);
  }
  return builder.build();
}

Vocabulary lavs(const Vocabulary& vocab, std::span<const CorpusStats> stats,
                std::size_t budget, unsigned threads, SplitPlan* plan_out) {
  std::vector<TokenDistribution> dists;
  dists.reserve(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (stats[i].lang != i) {
      raise(ErrorCode::SizeMismatch,
            "corpus stats must be ordered by language index");
    }
    dists.push_back(distribution(stats[i], vocab));
  }
  SplitPlan plan = select_splits(vocab, dists, budget, threads);
  Vocabulary out = apply_splits(vocab, plan);
  if (plan_out != nullptr) *plan_out = std::move(plan);
  return out;
}

void export_plan_json(const SplitPlan& plan, const Vocabulary& vocab,
                      std::ostream& out) {
  const LanguageSet& langs = vocab.languages();
  nlohmann::json doc;
  doc["budget"] = plan.budget;
  char fp[32];
  std::snprintf(fp, sizeof(fp), "%016llx",
                static_cast<unsigned long long>(plan.vocab_fingerprint));
  doc["vocab_fingerprint"] = fp;
  nlohmann::json selections = nlohmann::json::array();
  for (const SplitCandidate& cand : plan.selections) {
    nlohmann::json item;
    item["surface"] = vocab.entry(cand.token).surface;
    item["lang_a"] = langs.code(cand.lang_a);
    item["lang_b"] = langs.code(cand.lang_b);
    item["freq"] = round_sig12(cand.freq);
    selections.push_back(std::move(item));
  }
  doc["selections"] = std::move(selections);
  nlohmann::json realized = nlohmann::json::array();
  for (const auto& [surface, lang] : plan.realized) {
    realized.push_back(nlohmann::json::array({surface, langs.code(lang)}));
  }
  doc["realized"] = std::move(realized);
  out << doc.dump(2) << '\n';
}

}  // namespace lavs
