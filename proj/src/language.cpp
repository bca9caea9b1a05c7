#include "lavs/language.hpp"

#include "lavs/error.hpp"

namespace lavs {

namespace {

bool code_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

}  // namespace

bool LanguageSet::valid_code(std::string_view code) {
  if (code.empty()) return false;
  for (char c : code) {
    if (!code_char(c)) return false;
  }
  return true;
}

LanguageSet::LanguageSet(const std::vector<std::string>& codes) {
  langs_.reserve(codes.size());
  for (const auto& code : codes) {
    if (!valid_code(code)) {
      raise(ErrorCode::ConfigInvalid, "invalid language code \"" + code + "\"");
    }
    if (find(code)) {
      raise(ErrorCode::ConfigInvalid,
            "duplicate language code \"" + code + "\"");
    }
    langs_.push_back(
        LanguageId{static_cast<std::uint32_t>(langs_.size()), code});
  }
}

const LanguageId& LanguageSet::at(std::size_t index) const {
  if (index >= langs_.size()) {
    raise(ErrorCode::ConfigInvalid,
          "language index " + std::to_string(index) + " out of range");
  }
  return langs_[index];
}

std::optional<std::uint32_t> LanguageSet::find(std::string_view code) const {
  for (const auto& lang : langs_) {
    if (lang.code == code) return lang.index;
  }
  return std::nullopt;
}

const LanguageId& LanguageSet::require(std::string_view code) const {
  auto index = find(code);
  if (!index) {
    raise(ErrorCode::ConfigInvalid,
          "language code \"" + std::string(code) + "\" is not registered");
  }
  return langs_[*index];
}

std::vector<std::string> LanguageSet::codes() const {
  std::vector<std::string> out;
  out.reserve(langs_.size());
  for (const auto& lang : langs_) out.push_back(lang.code);
  return out;
}

}  // namespace lavs
