#include "lavs/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "lavs/error.hpp"
#include "lavs/util.hpp"

namespace lavs {

CorpusStats ingest_corpus(std::istream& in, const LanguageId& lang,
                          const Vocabulary& vocab, UnkPolicy policy) {
  CorpusStats stats;
  stats.lang = lang.index;
  stats.counts.assign(vocab.size(), 0);

  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find('\0') != std::string::npos) {
      raise(ErrorCode::MalformedLine,
            "embedded NUL byte at line " + std::to_string(line_no));
    }
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(' ', pos);
      if (next == std::string::npos) next = line.size();
      if (next > pos) {
        const std::string_view token(line.data() + pos, next - pos);
        if (auto id = vocab.find(token)) {
          ++stats.counts[*id];
          ++stats.total;
        } else if (policy == UnkPolicy::Strict) {
          raise(ErrorCode::UnknownToken,
                "unknown token \"" + std::string(token) + "\" at line " +
                    std::to_string(line_no));
        } else {
          ++stats.dropped;
        }
      }
      pos = next + 1;
    }
    ++stats.lines;
  }
  if (in.bad()) {
    raise(ErrorCode::IoError, "read failure while ingesting corpus");
  }
  return stats;
}

CorpusStats ingest_corpus_file(const std::filesystem::path& path,
                               const LanguageId& lang, const Vocabulary& vocab,
                               UnkPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open corpus file " + path.string());
  }
  return ingest_corpus(in, lang, vocab, policy);
}

TokenDistribution distribution(const CorpusStats& stats,
                               const Vocabulary& vocab) {
  if (stats.counts.size() != vocab.size()) {
    raise(ErrorCode::SizeMismatch,
          "stats cover " + std::to_string(stats.counts.size()) +
              " tokens, vocabulary has " + std::to_string(vocab.size()));
  }
  TokenDistribution dist;
  dist.lang = stats.lang;
  dist.probs.resize(stats.counts.size());
  const double denom =
      static_cast<double>(stats.total) + static_cast<double>(vocab.size());
  for (std::size_t i = 0; i < stats.counts.size(); ++i) {
    dist.probs[i] = (static_cast<double>(stats.counts[i]) + 1.0) / denom;
  }
  return dist;
}

TokenDistribution make_distribution(std::uint32_t lang,
                                    std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0) || !(p <= 1.0)) {
      raise(ErrorCode::Domain, "probability " + format_sig12(p) +
                                   " outside (0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    raise(ErrorCode::Domain,
          "probabilities sum to " + format_sig12(sum) + ", expected 1");
  }
  TokenDistribution dist;
  dist.lang = lang;
  dist.probs = std::move(probs);
  return dist;
}

CorpusStats transfer_counts(const CorpusStats& stats,
                            const Vocabulary& from_vocab,
                            const Vocabulary& to_vocab) {
  if (stats.counts.size() != from_vocab.size()) {
    raise(ErrorCode::SizeMismatch,
          "stats cover " + std::to_string(stats.counts.size()) +
              " tokens, source vocabulary has " +
              std::to_string(from_vocab.size()));
  }
  CorpusStats out;
  out.lang = stats.lang;
  out.lines = stats.lines;
  out.dropped = stats.dropped;
  out.counts.assign(to_vocab.size(), 0);
  for (TokenId id = 0; id < from_vocab.size(); ++id) {
    const std::uint64_t count = stats.counts[id];
    const TokenEntry& e = from_vocab.entry(id);
    std::optional<TokenId> target;
    if (e.kind == TokenKind::Shared) {
      // The language's own Specific twin captures the mass when present.
      target = to_vocab.find_specific(e.surface, stats.lang);
      if (!target) target = to_vocab.find(e.surface);
    } else {
      target = to_vocab.find(from_vocab.rendered(id));
    }
    if (!target) {
      if (count == 0) continue;
      raise(ErrorCode::UnknownToken,
            "token \"" + from_vocab.rendered(id) +
                "\" has no home in the target vocabulary");
    }
    out.counts[*target] += count;
    out.total += count;
  }
  return out;
}

TokenUsage usage_from_stats(const Vocabulary& vocab,
                            std::span<const CorpusStats> stats) {
  TokenUsage usage(vocab.size());
  for (const CorpusStats& s : stats) {
    if (s.counts.size() != vocab.size()) {
      raise(ErrorCode::SizeMismatch,
            "stats for language index " + std::to_string(s.lang) +
                " do not align with the vocabulary");
    }
    for (TokenId id = 0; id < vocab.size(); ++id) {
      if (s.counts[id] > 0) usage[id].push_back(s.lang);
    }
  }
  return usage;
}

void export_stats_json(const CorpusStats& stats, const Vocabulary& vocab,
                       std::ostream& out) {
  if (stats.counts.size() != vocab.size()) {
    raise(ErrorCode::SizeMismatch, "stats do not align with the vocabulary");
  }
  std::vector<std::pair<std::string, std::uint64_t>> rows;
  rows.reserve(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id) {
    rows.emplace_back(vocab.rendered(id), stats.counts[id]);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  nlohmann::json doc;
  doc["lang"] = vocab.languages().code(stats.lang);
  doc["total"] = stats.total;
  doc["lines"] = stats.lines;
  doc["dropped"] = stats.dropped;
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& [surface, count] : rows) {
    counts.push_back(nlohmann::json::array({surface, count}));
  }
  doc["counts"] = std::move(counts);
  out << doc.dump(2) << '\n';
}

}  // namespace lavs
