#include "lavs/mask.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "lavs/error.hpp"

namespace lavs {

namespace {

void set_bit(std::vector<std::uint8_t>& bits, TokenId id) {
  bits[id / 8] |= static_cast<std::uint8_t>(1u << (id % 8));
}

std::size_t popcount(const std::vector<std::uint8_t>& bits) {
  std::size_t n = 0;
  for (std::uint8_t b : bits) n += std::popcount(b);
  return n;
}

}  // namespace

TargetMask build_mask(const LanguageId& lang, const CorpusStats& stats,
                      const Vocabulary& vocab,
                      const std::vector<std::string>& control_surfaces,
                      std::uint64_t threshold) {
  if (stats.counts.size() != vocab.size()) {
    raise(ErrorCode::SizeMismatch, "stats do not align with the vocabulary");
  }
  TargetMask mask;
  mask.lang = lang.index;
  mask.vocab_size = static_cast<std::uint32_t>(vocab.size());
  mask.bits.assign((vocab.size() + 7) / 8, 0);
  for (TokenId id = 0; id < vocab.size(); ++id) {
    const TokenEntry& e = vocab.entry(id);
    const bool evidenced = stats.counts[id] > threshold;
    const bool own_specific =
        e.kind == TokenKind::Specific && e.lang == lang.index;
    if (evidenced || own_specific) set_bit(mask.bits, id);
  }
  for (const std::string& surface : control_surfaces) {
    const TokenId id = vocab.require(surface);
    set_bit(mask.bits, id);
    mask.always_allowed.push_back(id);
  }
  std::sort(mask.always_allowed.begin(), mask.always_allowed.end());
  mask.always_allowed.erase(
      std::unique(mask.always_allowed.begin(), mask.always_allowed.end()),
      mask.always_allowed.end());
  mask.size = popcount(mask.bits);
  return mask;
}

std::vector<std::pair<std::uint32_t, std::size_t>> mask_report(
    std::span<const TargetMask> masks) {
  std::vector<std::pair<std::uint32_t, std::size_t>> rows;
  rows.reserve(masks.size());
  for (const TargetMask& mask : masks) rows.emplace_back(mask.lang, mask.size);
  std::sort(rows.begin(), rows.end());
  return rows;
}

void save_mask_text(const TargetMask& mask, const Vocabulary& vocab,
                    std::ostream& out) {
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (mask.test(id)) out << vocab.rendered(id) << '\n';
  }
}

void save_mask_binary(const TargetMask& mask, std::ostream& out) {
  const std::uint32_t vocab_size = mask.vocab_size;
  out.write("LVSM", 4);
  unsigned char size_le[4] = {
      static_cast<unsigned char>(vocab_size & 0xff),
      static_cast<unsigned char>((vocab_size >> 8) & 0xff),
      static_cast<unsigned char>((vocab_size >> 16) & 0xff),
      static_cast<unsigned char>((vocab_size >> 24) & 0xff),
  };
  out.write(reinterpret_cast<const char*>(size_le), 4);
  out.write(reinterpret_cast<const char*>(mask.bits.data()),
            static_cast<std::streamsize>(mask.bits.size()));
  if (!out) raise(ErrorCode::IoError, "write failure on mask file");
}

MaskBits load_mask_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "LVSM") {
    raise(ErrorCode::MalformedLine, "missing LVSM magic");
  }
  unsigned char size_le[4];
  if (!in.read(reinterpret_cast<char*>(size_le), 4)) {
    raise(ErrorCode::MalformedLine, "truncated mask header");
  }
  MaskBits out;
  out.vocab_size = static_cast<std::uint32_t>(size_le[0]) |
                   (static_cast<std::uint32_t>(size_le[1]) << 8) |
                   (static_cast<std::uint32_t>(size_le[2]) << 16) |
                   (static_cast<std::uint32_t>(size_le[3]) << 24);
  out.bits.resize((out.vocab_size + 7) / 8);
  if (!in.read(reinterpret_cast<char*>(out.bits.data()),
               static_cast<std::streamsize>(out.bits.size()))) {
    raise(ErrorCode::MalformedLine, "truncated mask payload");
  }
  return out;
}

void export_mask_report_json(std::span<const TargetMask> masks,
                             const LanguageSet& langs, std::ostream& out) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [lang, size] : mask_report(masks)) {
    nlohmann::json item;
    item["lang"] = langs.code(lang);
    item["size"] = size;
    arr.push_back(std::move(item));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace lavs
