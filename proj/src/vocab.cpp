#include "lavs/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "lavs/error.hpp"
#include "lavs/util.hpp"

namespace lavs {

namespace {

void check_surface(std::string_view surface, bool allow_delimiter) {
  if (surface.empty()) {
    raise(ErrorCode::ConfigInvalid, "empty token surface");
  }
  if (surface.find('\n') != std::string_view::npos ||
      surface.find('\r') != std::string_view::npos ||
      surface.find('\0') != std::string_view::npos) {
    raise(ErrorCode::ConfigInvalid,
          "token surface contains a newline or NUL byte");
  }
  if (!allow_delimiter && surface.find(kTagDelimiter) != std::string_view::npos) {
    raise(ErrorCode::ReservedDelimiter,
          "surface \"" + std::string(surface) + "\" contains the reserved \"" +
              std::string(kTagDelimiter) + "\" delimiter");
  }
}

}  // namespace

std::string make_specific_surface(std::string_view base,
                                  const LanguageId& lang) {
  if (base.find(kTagDelimiter) != std::string_view::npos) {
    raise(ErrorCode::ReservedDelimiter,
          "base \"" + std::string(base) + "\" contains the reserved \"" +
              std::string(kTagDelimiter) + "\" delimiter");
  }
  std::string out;
  out.reserve(base.size() + kTagDelimiter.size() + lang.code.size());
  out.append(base);
  out.append(kTagDelimiter);
  out.append(lang.code);
  return out;
}

std::pair<std::string_view, std::string_view> split_tag(
    std::string_view surface) {
  const auto pos = surface.rfind(kTagDelimiter);
  if (pos == std::string_view::npos || pos == 0) {
    return {surface, std::string_view{}};
  }
  const auto tail = surface.substr(pos + kTagDelimiter.size());
  if (!LanguageSet::valid_code(tail)) {
    return {surface, std::string_view{}};
  }
  return {surface.substr(0, pos), tail};
}

std::pair<std::string_view, std::optional<LanguageId>> strip_specific_surface(
    std::string_view surface, const LanguageSet& langs) {
  const auto [base, code] = split_tag(surface);
  if (!code.empty()) {
    if (auto index = langs.find(code)) {
      return {base, langs.at(*index)};
    }
  }
  return {surface, std::nullopt};
}

const TokenEntry& Vocabulary::entry(TokenId id) const {
  if (id >= entries_.size()) {
    raise(ErrorCode::UnknownToken,
          "token id " + std::to_string(id) + " out of range");
  }
  return entries_[id];
}

std::string Vocabulary::rendered(TokenId id) const {
  const TokenEntry& e = entry(id);
  if (e.kind == TokenKind::Shared) return e.surface;
  return make_specific_surface(e.surface, langs_.at(e.lang));
}

std::optional<TokenId> Vocabulary::find(std::string_view rendered_surface) const {
  auto it = by_rendered_.find(std::string(rendered_surface));
  if (it == by_rendered_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::require(std::string_view rendered_surface) const {
  auto id = find(rendered_surface);
  if (!id) {
    raise(ErrorCode::UnknownToken,
          "unknown token \"" + std::string(rendered_surface) + "\"");
  }
  return *id;
}

std::optional<TokenId> Vocabulary::find_specific(std::string_view base,
                                                 std::uint32_t lang) const {
  if (lang >= langs_.size()) return std::nullopt;
  std::string key(base);
  key.append(kTagDelimiter);
  key.append(langs_.at(lang).code);
  return find(key);
}

bool Vocabulary::has_shared(std::string_view surface) const {
  return shared_surfaces_.count(std::string(surface)) != 0;
}

Vocabulary::Builder::Builder(LanguageSet langs) {
  vocab_.langs_ = std::move(langs);
}

Vocabulary::Builder& Vocabulary::Builder::add_shared(std::string surface) {
  check_surface(surface, /*allow_delimiter=*/false);
  vocab_.entries_.push_back(
      TokenEntry{std::move(surface), TokenKind::Shared, 0});
  return *this;
}

Vocabulary::Builder& Vocabulary::Builder::add_specific(std::string base,
                                                       std::uint32_t lang) {
  check_surface(base, /*allow_delimiter=*/false);
  if (lang >= vocab_.langs_.size()) {
    raise(ErrorCode::ConfigInvalid,
          "specific entry \"" + base + "\" names language index " +
              std::to_string(lang) + " outside the registry");
  }
  vocab_.entries_.push_back(
      TokenEntry{std::move(base), TokenKind::Specific, lang});
  return *this;
}

Vocabulary::Builder& Vocabulary::Builder::add_rendered(std::string_view line) {
  const auto [base, code] = split_tag(line);
  if (!code.empty()) {
    if (auto index = vocab_.langs_.find(code)) {
      return add_specific(std::string(base), *index);
    }
  }
  // Fails with RESERVED_DELIMITER when the delimiter is present but does not
  // parse as a registered language tag.
  return add_shared(std::string(line));
}

Vocabulary::Builder& Vocabulary::Builder::mark_fully_separated() {
  vocab_.fully_separated_ = true;
  return *this;
}

Vocabulary Vocabulary::Builder::build() {
  if (built_) {
    raise(ErrorCode::ConfigInvalid, "vocabulary builder reused after build");
  }
  built_ = true;

  Vocabulary out = std::move(vocab_);
  out.by_rendered_.reserve(out.entries_.size());
  out.shared_surfaces_.reserve(out.entries_.size());
  std::uint64_t hash = fnv1a64("lavs-vocab");
  for (TokenId id = 0; id < out.entries_.size(); ++id) {
    const std::string rendered = out.rendered(id);
    if (!out.by_rendered_.emplace(rendered, id).second) {
      raise(ErrorCode::ConfigInvalid,
            "duplicate vocabulary entry \"" + rendered + "\"");
    }
    if (out.entries_[id].kind == TokenKind::Shared) {
      ++out.base_size_;
      out.shared_surfaces_.insert(out.entries_[id].surface);
    }
    hash = fnv1a64(rendered, hash);
    hash = fnv1a64("\n", hash);
  }
  for (const auto& e : out.entries_) {
    if (e.kind == TokenKind::Specific && !out.has_shared(e.surface)) {
      out.fully_separated_ = true;
      break;
    }
  }
  out.fingerprint_ = hash;
  return out;
}

void Vocabulary::save_text(std::ostream& out) const {
  for (TokenId id = 0; id < entries_.size(); ++id) {
    out << rendered(id) << '\n';
  }
}

void Vocabulary::save_json(std::ostream& out) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json item;
    item["surface"] = e.surface;
    if (e.kind == TokenKind::Shared) {
      item["lang"] = nullptr;
    } else {
      item["lang"] = langs_.code(e.lang);
    }
    arr.push_back(std::move(item));
  }
  out << arr.dump(2) << '\n';
}

Vocabulary Vocabulary::load_text(std::istream& in, const LanguageSet& langs) {
  Builder builder(langs);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    builder.add_rendered(line);
  }
  if (in.bad()) raise(ErrorCode::IoError, "read failure while loading vocabulary");
  return builder.build();
}

Vocabulary Vocabulary::load_json(std::istream& in, const LanguageSet& langs) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigInvalid,
          std::string("vocabulary JSON parse error: ") + e.what());
  }
  if (!doc.is_array()) {
    raise(ErrorCode::ConfigInvalid, "vocabulary JSON must be an array");
  }
  Builder builder(langs);
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("surface") ||
        !item["surface"].is_string() || !item.contains("lang")) {
      raise(ErrorCode::ConfigInvalid,
            "vocabulary JSON entries need a \"surface\" string and a \"lang\" "
            "code or null");
    }
    const std::string surface = item["surface"].get<std::string>();
    if (item["lang"].is_null()) {
      builder.add_shared(surface);
    } else if (item["lang"].is_string()) {
      builder.add_specific(surface,
                           langs.require(item["lang"].get<std::string>()).index);
    } else {
      raise(ErrorCode::ConfigInvalid, "vocabulary JSON \"lang\" must be a "
                                      "string or null");
    }
  }
  return builder.build();
}

Vocabulary Vocabulary::load_file(const std::filesystem::path& path,
                                 const LanguageSet& langs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open vocabulary file " + path.string());
  }
  if (path.extension() == ".json") return load_json(in, langs);
  return load_text(in, langs);
}

void Vocabulary::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    raise(ErrorCode::IoError, "cannot write vocabulary file " + path.string());
  }
  if (path.extension() == ".json") {
    save_json(out);
  } else {
    save_text(out);
  }
  if (!out) {
    raise(ErrorCode::IoError, "write failure on " + path.string());
  }
}

Vocabulary split_all(const Vocabulary& vocab, const TokenUsage& usage) {
  if (usage.size() != vocab.size()) {
    raise(ErrorCode::MissingUsage,
          "usage covers " + std::to_string(usage.size()) + " tokens, vocabulary has " +
              std::to_string(vocab.size()));
  }
  Vocabulary::Builder builder(vocab.languages());
  const std::size_t lang_count = vocab.languages().size();
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const TokenEntry& e = vocab.entry(id);
    if (e.kind == TokenKind::Specific) {
      builder.add_specific(e.surface, e.lang);
      continue;
    }
    std::vector<std::uint32_t> users(usage[id]);
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    for (std::uint32_t lang : users) {
      if (lang >= lang_count) {
        raise(ErrorCode::MissingUsage,
              "usage for \"" + e.surface + "\" names language index " +
                  std::to_string(lang) + " outside the registry");
      }
    }
    if (users.size() >= 2) {
      for (std::uint32_t lang : users) builder.add_specific(e.surface, lang);
    } else {
      builder.add_shared(e.surface);
    }
  }
  builder.mark_fully_separated();
  return builder.build();
}

}  // namespace lavs
