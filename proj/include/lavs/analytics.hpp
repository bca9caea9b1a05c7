#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lavs/divergence.hpp"
#include "lavs/language.hpp"

namespace lavs {

// One detected-language row. `detected` is a registry index; nullopt stands
// for `other` (including detected codes outside the registry, which the
// loader folds into `other`).
struct DetectionRecord {
  std::uint32_t src = 0;
  std::uint32_t tgt = 0;
  std::optional<std::uint32_t> detected;
};

struct DetectionTable {
  std::vector<DetectionRecord> records;
  std::uint64_t folded_other = 0;  // detected codes outside the registry
};

// TSV: src<TAB>tgt<TAB>detected with an optional fourth column; "copied" or
// "1" there folds the row into detected = src. src and tgt must be
// registered and distinct.
DetectionTable load_detections_tsv(std::istream& in, const LanguageSet& langs);

// Fraction of records whose detected language differs from the target.
double otr(std::span<const DetectionRecord> records);

struct OtrMatrix {
  std::vector<std::string> langs;        // codes, row/column order
  std::vector<double> values;            // NaN where counts == 0 or diagonal
  std::vector<std::uint64_t> counts;     // records per direction
  std::vector<std::uint64_t> off_counts; // off-target records per direction
  std::vector<std::uint8_t> zero_shot;   // direction excludes the pivot
  std::optional<std::uint32_t> pivot;

  // Grand means over zero-shot directions with counts > 0; NaN when none.
  double zero_shot_mean_unweighted = 0.0;
  double zero_shot_mean_weighted = 0.0;

  std::size_t idx(std::size_t s, std::size_t t) const {
    return s * langs.size() + t;
  }
  bool defined(std::size_t s, std::size_t t) const {
    return s != t && counts[idx(s, t)] > 0;
  }
};

// Per-direction rates plus both grand means (the direction-unweighted mean
// and the record-weighted mean) over zero-shot cells. A direction is
// zero-shot when neither endpoint is the pivot; without a pivot every
// off-diagonal direction counts.
OtrMatrix otr_matrix(std::span<const DetectionRecord> records,
                     const LanguageSet& langs,
                     std::optional<std::uint32_t> pivot = std::nullopt);

enum class Tier : std::uint8_t { High, Mid, Low };

// tiers[lang index] -> tier; must cover every language that appears in a
// defined zero-shot direction.
using TierSpec = std::vector<std::optional<Tier>>;

struct TierAggregate {
  // Unweighted means of direction rates; NaN when a bucket is empty.
  double high_high = 0.0, high_low = 0.0, low_high = 0.0, low_low = 0.0;
  std::size_t n_high_high = 0, n_high_low = 0, n_low_high = 0, n_low_low = 0;
};

// Means over zero-shot defined directions bucketed by endpoint tiers; Mid
// languages are excluded from all four buckets.
TierAggregate tier_aggregate(const OtrMatrix& matrix, const TierSpec& tiers);

// Share of each detected language among off-target records. Keys are "src"
// (copies of the input language), "other", or a language code.
struct DeviationDistribution {
  std::uint64_t off_target_records = 0;
  std::vector<std::pair<std::string, double>> shares;  // key-ascending
};

DeviationDistribution deviation_distribution(
    std::span<const DetectionRecord> records, const LanguageSet& langs);

// Sample Pearson correlation; requires two or more points and nonzero
// variance on both sides.
double pearson(std::span<const double> xs, std::span<const double> ys);

enum class KlOrientation : std::uint8_t {
  TargetToSource,  // KL(target || source) against OTR(source -> target)
  SourceToTarget,
};

struct SourceCorrelation {
  std::uint32_t src = 0;
  std::optional<double> r;  // nullopt when degenerate
  std::size_t n = 0;
  std::string note;
};

struct CorrelationReport {
  KlOrientation orientation = KlOrientation::TargetToSource;
  std::vector<SourceCorrelation> per_source;
  std::size_t usable_sources = 0;
  double mean = 0.0;  // over usable sources; NaN when none
  double sd = 0.0;    // sample sd; 0 for a single source
};

// Per-source-language correlation between KL divergence (oriented per flag)
// and the off-target rate over that source's zero-shot targets.
CorrelationReport correlate_kl_otr(const OtrMatrix& matrix,
                                   const KlMatrix& kl_matrix,
                                   KlOrientation orientation);

void export_otr_csv(const OtrMatrix& matrix, std::ostream& out);
void export_otr_json(const OtrMatrix& matrix, std::ostream& out);
void export_tier_json(const TierAggregate& agg, std::ostream& out);
void export_deviation_json(const DeviationDistribution& dist,
                           std::ostream& out);
void export_correlation_json(const CorrelationReport& report,
                             const OtrMatrix& matrix, std::ostream& out);
// (src, tgt, kl, otr) rows for external plotting, zero-shot cells only.
void export_scatter_csv(const OtrMatrix& matrix, const KlMatrix& kl_matrix,
                        KlOrientation orientation, std::ostream& out);

}  // namespace lavs
