#include "lavs/retag.hpp"

#include <istream>
#include <ostream>

#include "lavs/error.hpp"
#include "lavs/util.hpp"

namespace lavs {

RetagMap::RetagMap(const Vocabulary& vocab)
    : maps_(vocab.languages().size()), fingerprint_(vocab.fingerprint()) {
  known_.reserve(vocab.size());
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const TokenEntry& e = vocab.entry(id);
    const std::string rendered = vocab.rendered(id);
    if (e.kind == TokenKind::Specific) {
      maps_[e.lang].emplace(e.surface, rendered);
    }
    known_.insert(rendered);
  }
}

std::optional<std::string_view> RetagMap::lookup(std::uint32_t lang,
                                                 std::string_view base) const {
  if (lang >= maps_.size()) return std::nullopt;
  auto it = maps_[lang].find(std::string(base));
  if (it == maps_[lang].end()) return std::nullopt;
  return std::string_view(it->second);
}

bool RetagMap::known_surface(std::string_view rendered) const {
  return known_.count(std::string(rendered)) != 0;
}

std::vector<std::string> retag_line(std::span<const std::string> tokens,
                                    const LanguageId& lang,
                                    const RetagMap& map, UnkPolicy policy,
                                    std::uint64_t* unknown) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    if (auto tagged = map.lookup(lang.index, token)) {
      out.emplace_back(*tagged);
      continue;
    }
    if (!map.known_surface(token)) {
      if (policy == UnkPolicy::Strict) {
        raise(ErrorCode::UnknownToken, "unknown token \"" + token + "\"");
      }
      if (unknown != nullptr) ++*unknown;
    }
    out.push_back(token);
  }
  return out;
}

namespace {

std::string detag_surface(std::string_view surface, const LanguageSet* langs) {
  const auto [base, code] = split_tag(surface);
  if (code.empty()) return std::string(surface);
  if (langs != nullptr && !langs->find(code)) return std::string(surface);
  return std::string(base);
}

}  // namespace

std::vector<std::string> detag_line(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    out.push_back(detag_surface(token, nullptr));
  }
  return out;
}

std::vector<std::string> detag_line(std::span<const std::string> tokens,
                                    const LanguageSet& langs) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) {
    out.push_back(detag_surface(token, &langs));
  }
  return out;
}

namespace {

// Rewrites the space-separated tokens of one raw line, leaving the byte
// layout (runs of spaces, empty segments) untouched.
template <typename Fn>
std::string rewrite_line(const std::string& line, StreamReport& report,
                         Fn&& rewrite_token) {
  std::string out;
  out.reserve(line.size() + 16);
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(' ', pos);
    if (next == std::string::npos) next = line.size();
    if (next > pos) {
      const std::string_view token(line.data() + pos, next - pos);
      ++report.tokens;
      std::string replaced = rewrite_token(token);
      if (replaced != token) ++report.changed;
      out.append(replaced);
    }
    if (next < line.size()) out.push_back(' ');
    pos = next + 1;
  }
  return out;
}

constexpr std::size_t kBatchLines = 4096;

// Reads up to kBatchLines lines. Sets *final_no_newline when the last line of
// the whole stream is unterminated, so the filter can reproduce it exactly.
std::size_t read_batch(std::istream& in, std::vector<std::string>& batch,
                       bool* final_no_newline) {
  batch.clear();
  std::string line;
  while (batch.size() < kBatchLines && std::getline(in, line)) {
    if (in.eof()) *final_no_newline = true;
    batch.push_back(std::move(line));
  }
  if (in.bad()) raise(ErrorCode::IoError, "read failure on token stream");
  return batch.size();
}

template <typename Fn>
StreamReport filter_stream(std::istream& in, std::ostream& out,
                           unsigned threads, Fn&& per_line) {
  StreamReport report;
  std::vector<std::string> batch;
  std::vector<std::string> rewritten;
  std::vector<StreamReport> partial;
  bool final_no_newline = false;
  while (read_batch(in, batch, &final_no_newline) > 0) {
    rewritten.assign(batch.size(), {});
    partial.assign(batch.size(), {});
    parallel_blocks(batch.size(), threads,
                    [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        rewritten[i] = per_line(batch[i], partial[i]);
      }
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      report.tokens += partial[i].tokens;
      report.changed += partial[i].changed;
      report.unknown += partial[i].unknown;
      ++report.lines;
      out << rewritten[i];
      const bool last_line_of_stream =
          final_no_newline && in.eof() && i + 1 == batch.size();
      if (!last_line_of_stream) out << '\n';
    }
  }
  if (!out) raise(ErrorCode::IoError, "write failure on token stream");
  return report;
}

}  // namespace

StreamReport retag_stream(std::istream& in, std::ostream& out,
                          const RetagMap& map, const LanguageId& lang,
                          UnkPolicy policy, unsigned threads) {
  return filter_stream(in, out, threads,
                       [&](const std::string& line, StreamReport& r) {
    return rewrite_line(line, r, [&](std::string_view token) -> std::string {
      if (auto tagged = map.lookup(lang.index, token)) {
        return std::string(*tagged);
      }
      if (!map.known_surface(token)) {
        if (policy == UnkPolicy::Strict) {
          raise(ErrorCode::UnknownToken,
                "unknown token \"" + std::string(token) + "\"");
        }
        ++r.unknown;
      }
      return std::string(token);
    });
  });
}

StreamReport detag_stream(std::istream& in, std::ostream& out,
                          const LanguageSet* langs, unsigned threads) {
  return filter_stream(in, out, threads,
                       [&](const std::string& line, StreamReport& r) {
    return rewrite_line(line, r, [&](std::string_view token) {
      return detag_surface(token, langs);
    });
  });
}

}  // namespace lavs
