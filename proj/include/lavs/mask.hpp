#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lavs/corpus.hpp"
#include "lavs/language.hpp"
#include "lavs/vocab.hpp"

namespace lavs {

// Per-target-language vocabulary mask for constrained decoding. Bits are
// packed LSB-first: token id i lives in byte i/8, bit i%8.
struct TargetMask {
  std::uint32_t lang = 0;
  std::uint32_t vocab_size = 0;
  std::vector<std::uint8_t> bits;          // ceil(vocab_size / 8) bytes
  std::size_t size = 0;                    // popcount
  std::vector<TokenId> always_allowed;     // control tokens, sorted

  bool test(TokenId id) const {
    return id / 8 < bits.size() && (bits[id / 8] >> (id % 8)) & 1;
  }
};

// Allows tokens with corpus count > threshold, every Specific entry of
// `lang`, and the caller-supplied control tokens (which must exist in the
// vocabulary).
TargetMask build_mask(const LanguageId& lang, const CorpusStats& stats,
                      const Vocabulary& vocab,
                      const std::vector<std::string>& control_surfaces = {},
                      std::uint64_t threshold = 0);

// (language index, mask size) ordered by language index.
std::vector<std::pair<std::uint32_t, std::size_t>> mask_report(
    std::span<const TargetMask> masks);

// Human-auditable form: allowed rendered surfaces, one per line, ascending id.
void save_mask_text(const TargetMask& mask, const Vocabulary& vocab,
                    std::ostream& out);

// Dense binary form: magic "LVSM", u32 little-endian vocabulary size, then
// the packed bits.
void save_mask_binary(const TargetMask& mask, std::ostream& out);

struct MaskBits {
  std::uint32_t vocab_size = 0;
  std::vector<std::uint8_t> bits;
};
MaskBits load_mask_binary(std::istream& in);

void export_mask_report_json(std::span<const TargetMask> masks,
                             const LanguageSet& langs, std::ostream& out);

}  // namespace lavs
