#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lavs/corpus.hpp"
#include "lavs/language.hpp"
#include "lavs/vocab.hpp"

namespace lavs {

// Per-language rewrite table derived from a vocabulary: base surface ->
// tagged surface wherever the language owns a Specific twin. Self-contained
// so it can outlive the vocabulary it was built from.
class RetagMap {
 public:
  explicit RetagMap(const Vocabulary& vocab);

  std::size_t language_count() const { return maps_.size(); }
  std::uint64_t vocab_fingerprint() const { return fingerprint_; }

  // Tagged surface for (base, lang), or nullopt when the language keeps the
  // shared form.
  std::optional<std::string_view> lookup(std::uint32_t lang,
                                         std::string_view base) const;
  bool known_surface(std::string_view rendered) const;

 private:
  std::vector<std::unordered_map<std::string, std::string>> maps_;
  std::unordered_set<std::string> known_;
  std::uint64_t fingerprint_ = 0;
};

// Rewrites one sentence for `lang`. Length-preserving; tokens without a
// Specific twin pass through. Strict policy errors on surfaces missing from
// the vocabulary; Drop passes them through and tallies into `unknown`.
std::vector<std::string> retag_line(std::span<const std::string> tokens,
                                    const LanguageId& lang,
                                    const RetagMap& map,
                                    UnkPolicy policy = UnkPolicy::Strict,
                                    std::uint64_t* unknown = nullptr);

// Strips the language tag from every tagged surface; untagged surfaces pass
// through. The registry-free form strips any code-shaped "@@" suffix; the
// registry form strips registered codes only.
std::vector<std::string> detag_line(std::span<const std::string> tokens);
std::vector<std::string> detag_line(std::span<const std::string> tokens,
                                    const LanguageSet& langs);

struct StreamReport {
  std::uint64_t lines = 0;
  std::uint64_t tokens = 0;
  std::uint64_t changed = 0;
  std::uint64_t unknown = 0;
};

// Line filters with identical line count in and out. Token boundaries are
// single spaces; runs of spaces are preserved byte-for-byte. Lines are
// processed in parallel batches with order-preserving output.
StreamReport retag_stream(std::istream& in, std::ostream& out,
                          const RetagMap& map, const LanguageId& lang,
                          UnkPolicy policy = UnkPolicy::Strict,
                          unsigned threads = 1);
StreamReport detag_stream(std::istream& in, std::ostream& out,
                          const LanguageSet* langs = nullptr,
                          unsigned threads = 1);

}  // namespace lavs
