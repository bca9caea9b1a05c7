#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lavs/language.hpp"

namespace lavs {

using TokenId = std::uint32_t;

enum class TokenKind : std::uint8_t { Shared, Specific };

// One vocabulary entry. `surface` is the bare token text without any
// language tag; a Specific entry renders as surface + "@@" + code.
struct TokenEntry {
  std::string surface;
  TokenKind kind = TokenKind::Shared;
  std::uint32_t lang = 0;  // valid when kind == Specific
};

inline constexpr std::string_view kTagDelimiter = "@@";

// Tag encoding for language-specific tokens. Rejects bases that already
// contain the reserved delimiter so stripping stays unambiguous.
std::string make_specific_surface(std::string_view base, const LanguageId& lang);

// Splits "base@@tail" at the last delimiter when the tail is shaped like a
// language code; otherwise returns (surface, empty). Never fails.
std::pair<std::string_view, std::string_view> split_tag(std::string_view surface);

// Inverse of make_specific_surface for suffixes whose code is registered in
// `langs`; all other surfaces pass through as (surface, nullopt).
std::pair<std::string_view, std::optional<LanguageId>> strip_specific_surface(
    std::string_view surface, const LanguageSet& langs);

class Vocabulary {
 public:
  class Builder;

  std::size_t size() const { return entries_.size(); }
  const TokenEntry& entry(TokenId id) const;
  const std::vector<TokenEntry>& entries() const { return entries_; }
  std::string rendered(TokenId id) const;

  // Lookup by rendered surface (tagged form for Specific entries).
  std::optional<TokenId> find(std::string_view rendered_surface) const;
  TokenId require(std::string_view rendered_surface) const;
  std::optional<TokenId> find_specific(std::string_view base,
                                       std::uint32_t lang) const;
  bool has_shared(std::string_view surface) const;

  std::size_t base_size() const { return base_size_; }
  std::size_t specific_size() const { return entries_.size() - base_size_; }
  bool fully_separated() const { return fully_separated_; }
  const LanguageSet& languages() const { return langs_; }

  // Stable content hash over rendered entries, used to detect plans or
  // retag maps applied to the wrong vocabulary.
  std::uint64_t fingerprint() const { return fingerprint_; }

  void save_text(std::ostream& out) const;
  void save_json(std::ostream& out) const;
  static Vocabulary load_text(std::istream& in, const LanguageSet& langs);
  static Vocabulary load_json(std::istream& in, const LanguageSet& langs);

  // Dispatches on extension: ".json" loads the JSON form, anything else the
  // one-entry-per-line text form. Both forms load to identical vocabularies.
  static Vocabulary load_file(const std::filesystem::path& path,
                              const LanguageSet& langs);
  void save_file(const std::filesystem::path& path) const;

 private:
  friend class Builder;
  Vocabulary() = default;

  std::vector<TokenEntry> entries_;
  std::unordered_map<std::string, TokenId> by_rendered_;
  std::unordered_set<std::string> shared_surfaces_;
  LanguageSet langs_;
  std::size_t base_size_ = 0;
  bool fully_separated_ = false;
  std::uint64_t fingerprint_ = 0;
};

class Vocabulary::Builder {
 public:
  explicit Builder(LanguageSet langs);

  Builder& add_shared(std::string surface);
  Builder& add_specific(std::string base, std::uint32_t lang);

  // Parses a rendered line: a "@@code" suffix with a registered code loads
  // as a Specific entry; any other use of the delimiter is rejected.
  Builder& add_rendered(std::string_view line);

  Builder& mark_fully_separated();
  Vocabulary build();

 private:
  Vocabulary vocab_;
  bool built_ = false;
};

// usage[id] lists the language indices observed using token `id`. The vector
// must cover the whole vocabulary (entries for Specific ids are ignored).
using TokenUsage = std::vector<std::vector<std::uint32_t>>;

// Complete separation: every Shared token used by two or more languages is
// replaced, in place, by one Specific entry per using language (ascending
// language index); tokens used by at most one language are kept.
Vocabulary split_all(const Vocabulary& vocab, const TokenUsage& usage);

}  // namespace lavs
