#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lavs {

// Dense identifier for one language in a run. `index` is the position of the
// code inside the LanguageSet it was registered with.
struct LanguageId {
  std::uint32_t index = 0;
  std::string code;

  friend bool operator==(const LanguageId&, const LanguageId&) = default;
};

// Ordered registry of language codes. Immutable once constructed; indices
// follow construction order.
class LanguageSet {
 public:
  LanguageSet() = default;
  explicit LanguageSet(const std::vector<std::string>& codes);

  // Codes are lowercase ASCII drawn from [a-z0-9_-], non-empty, and may not
  // contain the reserved "@@" delimiter (excluded by the charset).
  static bool valid_code(std::string_view code);

  std::size_t size() const { return langs_.size(); }
  bool empty() const { return langs_.empty(); }
  const LanguageId& at(std::size_t index) const;
  const std::string& code(std::size_t index) const { return at(index).code; }
  std::optional<std::uint32_t> find(std::string_view code) const;
  const LanguageId& require(std::string_view code) const;
  const std::vector<LanguageId>& all() const { return langs_; }
  std::vector<std::string> codes() const;

  friend bool operator==(const LanguageSet&, const LanguageSet&) = default;

 private:
  std::vector<LanguageId> langs_;
};

}  // namespace lavs
