#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lavs/corpus.hpp"
#include "lavs/language.hpp"
#include "lavs/vocab.hpp"

namespace lavs {

// KL divergence in nats, summed in ascending TokenId order with compensated
// accumulation so results do not depend on thread count.
double kl(const TokenDistribution& a, const TokenDistribution& b);

struct KlMatrix {
  std::vector<std::string> langs;  // codes, row/column order
  std::vector<double> values;      // row-major |L| x |L|, nats

  double at(std::size_t m, std::size_t n) const {
    return values[m * langs.size() + n];
  }
  double& at(std::size_t m, std::size_t n) {
    return values[m * langs.size() + n];
  }
};

// values[m][n] = kl(dists[m], dists[n]); asymmetric in general, zero
// diagonal. dists[i].lang must equal i and index into `langs`.
KlMatrix pairwise_kl(std::span<const TokenDistribution> dists,
                     const LanguageSet& langs, unsigned threads = 1);

// Mean of the full ordered-pair double sum, diagonal included.
double objective(const Vocabulary& vocab,
                 std::span<const TokenDistribution> dists);
double objective(const KlMatrix& matrix);

// Closed-form mass term of the pairwise KL change from splitting one shared
// token whose probabilities in the two languages are prob_a and prob_b:
// (prob_a - prob_b) * ln(prob_b / prob_a). Always <= 0, zero iff equal; the
// additive smoothing remainder is constant across candidates and is reported
// symbolically, never as a number.
struct SplitIncrement {
  double prob_a = 0.0;
  double prob_b = 0.0;
  double mass_term = 0.0;
  std::optional<TokenId> token;

  static constexpr std::string_view kSmoothingNote =
      "plus a smoothing remainder, constant across candidates";
};

SplitIncrement split_kl_increment(double prob_a, double prob_b,
                                  std::optional<TokenId> token = std::nullopt);

// CSV: header row/column of language codes, values with 12 significant
// digits. JSON mirrors the matrix and carries the mean objective.
void export_kl_csv(const KlMatrix& matrix, std::ostream& out);
void export_kl_json(const KlMatrix& matrix, std::ostream& out);
KlMatrix load_kl_csv(std::istream& in);

}  // namespace lavs
