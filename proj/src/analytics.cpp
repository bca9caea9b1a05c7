#include "lavs/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lavs/error.hpp"
#include "lavs/util.hpp"

namespace lavs {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number_or_null(double value) {
  if (std::isnan(value)) return nullptr;
  return round_sig12(value);
}

}  // namespace

DetectionTable load_detections_tsv(std::istream& in,
                                   const LanguageSet& langs) {
  DetectionTable table;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, '\t')) fields.push_back(cell);
    if (fields.size() < 3 || fields.size() > 4) {
      raise(ErrorCode::MalformedLine,
            "expected 3 or 4 tab-separated fields at line " +
                std::to_string(line_no));
    }
    const auto src = langs.find(fields[0]);
    const auto tgt = langs.find(fields[1]);
    if (!src || !tgt) {
      raise(ErrorCode::MalformedLine,
            "unregistered language \"" + (!src ? fields[0] : fields[1]) +
                "\" at line " + std::to_string(line_no));
    }
    if (*src == *tgt) {
      raise(ErrorCode::MalformedLine,
            "source equals target at line " + std::to_string(line_no));
    }
    DetectionRecord record;
    record.src = *src;
    record.tgt = *tgt;
    if (fields[2] == "other") {
      record.detected = std::nullopt;
    } else if (auto detected = langs.find(fields[2])) {
      record.detected = *detected;
    } else {
      record.detected = std::nullopt;
      ++table.folded_other;
    }
    if (fields.size() == 4 && !fields[3].empty() && fields[3] != "0") {
      if (fields[3] == "copied" || fields[3] == "1") {
        record.detected = record.src;
      } else {
        raise(ErrorCode::MalformedLine,
              "unrecognized copy flag \"" + fields[3] + "\" at line " +
                  std::to_string(line_no));
      }
    }
    table.records.push_back(record);
  }
  if (in.bad()) raise(ErrorCode::IoError, "read failure on detection TSV");
  return table;
}

double otr(std::span<const DetectionRecord> records) {
  if (records.empty()) {
    raise(ErrorCode::EmptyDirection, "no records for direction");
  }
  std::uint64_t off = 0;
  for (const DetectionRecord& r : records) {
    if (!r.detected || *r.detected != r.tgt) ++off;
  }
  return static_cast<double>(off) / static_cast<double>(records.size());
}

OtrMatrix otr_matrix(std::span<const DetectionRecord> records,
                     const LanguageSet& langs,
                     std::optional<std::uint32_t> pivot) {
  const std::size_t n = langs.size();
  OtrMatrix matrix;
  matrix.langs = langs.codes();
  matrix.values.assign(n * n, kNan);
  matrix.counts.assign(n * n, 0);
  matrix.off_counts.assign(n * n, 0);
  matrix.zero_shot.assign(n * n, 0);
  matrix.pivot = pivot;

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      const bool zs = !pivot || (s != *pivot && t != *pivot);
      matrix.zero_shot[matrix.idx(s, t)] = zs ? 1 : 0;
    }
  }
  for (const DetectionRecord& r : records) {
    if (r.src >= n || r.tgt >= n || r.src == r.tgt) {
      raise(ErrorCode::MalformedLine, "record direction outside the registry");
    }
    const std::size_t cell = matrix.idx(r.src, r.tgt);
    ++matrix.counts[cell];
    if (!r.detected || *r.detected != r.tgt) ++matrix.off_counts[cell];
  }

  double sum = 0.0;
  std::size_t directions = 0;
  std::uint64_t total = 0, off_total = 0;
  for (std::size_t cell = 0; cell < n * n; ++cell) {
    if (matrix.counts[cell] == 0) continue;
    matrix.values[cell] = static_cast<double>(matrix.off_counts[cell]) /
                          static_cast<double>(matrix.counts[cell]);
    if (matrix.zero_shot[cell]) {
      sum += matrix.values[cell];
      ++directions;
      total += matrix.counts[cell];
      off_total += matrix.off_counts[cell];
    }
  }
  matrix.zero_shot_mean_unweighted =
      directions > 0 ? sum / static_cast<double>(directions) : kNan;
  matrix.zero_shot_mean_weighted =
      total > 0 ? static_cast<double>(off_total) / static_cast<double>(total)
                : kNan;
  return matrix;
}

TierAggregate tier_aggregate(const OtrMatrix& matrix, const TierSpec& tiers) {
  const std::size_t n = matrix.langs.size();
  auto tier_of = [&](std::size_t lang) {
    if (lang >= tiers.size() || !tiers[lang]) {
      raise(ErrorCode::UncoveredLanguage,
            "language \"" + matrix.langs[lang] + "\" has no tier");
    }
    return *tiers[lang];
  };

  double sums[2][2] = {{0, 0}, {0, 0}};
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t cell = matrix.idx(s, t);
      if (s == t || matrix.counts[cell] == 0 || !matrix.zero_shot[cell]) {
        continue;
      }
      const Tier ts = tier_of(s);
      const Tier tt = tier_of(t);
      if (ts == Tier::Mid || tt == Tier::Mid) continue;
      const int a = ts == Tier::High ? 0 : 1;
      const int b = tt == Tier::High ? 0 : 1;
      sums[a][b] += matrix.values[cell];
      ++counts[a][b];
    }
  }
  auto mean = [](double sum, std::size_t count) {
    return count > 0 ? sum / static_cast<double>(count) : kNan;
  };
  TierAggregate agg;
  agg.high_high = mean(sums[0][0], counts[0][0]);
  agg.high_low = mean(sums[0][1], counts[0][1]);
  agg.low_high = mean(sums[1][0], counts[1][0]);
  agg.low_low = mean(sums[1][1], counts[1][1]);
  agg.n_high_high = counts[0][0];
  agg.n_high_low = counts[0][1];
  agg.n_low_high = counts[1][0];
  agg.n_low_low = counts[1][1];
  return agg;
}

DeviationDistribution deviation_distribution(
    std::span<const DetectionRecord> records, const LanguageSet& langs) {
  std::map<std::string, std::uint64_t> buckets;
  std::uint64_t off_total = 0;
  for (const DetectionRecord& r : records) {
    if (r.detected && *r.detected == r.tgt) continue;  // on target
    ++off_total;
    std::string key;
    if (r.detected && *r.detected == r.src) {
      key = "src";
    } else if (!r.detected) {
      key = "other";
    } else {
      key = langs.code(*r.detected);
    }
    ++buckets[key];
  }
  DeviationDistribution dist;
  dist.off_target_records = off_total;
  for (const auto& [key, count] : buckets) {
    dist.shares.emplace_back(
        key, static_cast<double>(count) / static_cast<double>(off_total));
  }
  return dist;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    raise(ErrorCode::SizeMismatch, "series lengths differ");
  }
  const std::size_t n = xs.size();
  if (n < 2) {
    raise(ErrorCode::DegenerateVariance, "need at least two points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    raise(ErrorCode::DegenerateVariance, "a series has zero variance");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationReport correlate_kl_otr(const OtrMatrix& matrix,
                                   const KlMatrix& kl_matrix,
                                   KlOrientation orientation) {
  if (matrix.langs != kl_matrix.langs) {
    raise(ErrorCode::SizeMismatch,
          "OTR and KL matrices cover different language lists");
  }
  const std::size_t n = matrix.langs.size();
  CorrelationReport report;
  report.orientation = orientation;

  double sum = 0.0;
  std::vector<double> rs;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> xs, ys;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t cell = matrix.idx(s, t);
      if (s == t || matrix.counts[cell] == 0 || !matrix.zero_shot[cell]) {
        continue;
      }
      xs.push_back(orientation == KlOrientation::TargetToSource
                       ? kl_matrix.at(t, s)
                       : kl_matrix.at(s, t));
      ys.push_back(matrix.values[cell]);
    }
    if (xs.empty()) continue;  // source has no zero-shot targets
    SourceCorrelation sc;
    sc.src = static_cast<std::uint32_t>(s);
    sc.n = xs.size();
    try {
      sc.r = pearson(xs, ys);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateVariance) throw;
      sc.note = e.what();
    }
    if (sc.r) {
      sum += *sc.r;
      rs.push_back(*sc.r);
    }
    report.per_source.push_back(std::move(sc));
  }
  report.usable_sources = rs.size();
  if (rs.empty()) {
    report.mean = kNan;
    report.sd = kNan;
  } else {
    report.mean = sum / static_cast<double>(rs.size());
    double ss = 0.0;
    for (double r : rs) ss += (r - report.mean) * (r - report.mean);
    report.sd = rs.size() > 1
                    ? std::sqrt(ss / static_cast<double>(rs.size() - 1))
                    : 0.0;
  }
  return report;
}

void export_otr_csv(const OtrMatrix& matrix, std::ostream& out) {
  const std::size_t n = matrix.langs.size();
  for (const auto& code : matrix.langs) out << ',' << code;
  out << '\n';
  for (std::size_t s = 0; s < n; ++s) {
    out << matrix.langs[s];
    for (std::size_t t = 0; t < n; ++t) {
      out << ',';
      const double v = matrix.values[matrix.idx(s, t)];
      if (!std::isnan(v)) out << format_sig12(v);
    }
    out << '\n';
  }
}

void export_otr_json(const OtrMatrix& matrix, std::ostream& out) {
  const std::size_t n = matrix.langs.size();
  nlohmann::json doc;
  doc["langs"] = matrix.langs;
  doc["pivot"] = matrix.pivot ? nlohmann::json(matrix.langs[*matrix.pivot])
                              : nlohmann::json(nullptr);
  nlohmann::json values = nlohmann::json::array();
  nlohmann::json counts = nlohmann::json::array();
  nlohmann::json off = nlohmann::json::array();
  for (std::size_t s = 0; s < n; ++s) {
    nlohmann::json vrow = nlohmann::json::array();
    nlohmann::json crow = nlohmann::json::array();
    nlohmann::json orow = nlohmann::json::array();
    for (std::size_t t = 0; t < n; ++t) {
      vrow.push_back(number_or_null(matrix.values[matrix.idx(s, t)]));
      crow.push_back(matrix.counts[matrix.idx(s, t)]);
      orow.push_back(matrix.off_counts[matrix.idx(s, t)]);
    }
    values.push_back(std::move(vrow));
    counts.push_back(std::move(crow));
    off.push_back(std::move(orow));
  }
  doc["values"] = std::move(values);
  doc["counts"] = std::move(counts);
  doc["off_target"] = std::move(off);
  doc["zero_shot_mean_unweighted"] =
      number_or_null(matrix.zero_shot_mean_unweighted);
  doc["zero_shot_mean_weighted"] =
      number_or_null(matrix.zero_shot_mean_weighted);
  out << doc.dump(2) << '\n';
}

void export_tier_json(const TierAggregate& agg, std::ostream& out) {
  nlohmann::json doc;
  auto bucket = [](double mean, std::size_t n) {
    nlohmann::json b;
    b["mean"] = number_or_null(mean);
    b["directions"] = n;
    return b;
  };
  doc["high_high"] = bucket(agg.high_high, agg.n_high_high);
  doc["high_low"] = bucket(agg.high_low, agg.n_high_low);
  doc["low_high"] = bucket(agg.low_high, agg.n_low_high);
  doc["low_low"] = bucket(agg.low_low, agg.n_low_low);
  out << doc.dump(2) << '\n';
}

void export_deviation_json(const DeviationDistribution& dist,
                           std::ostream& out) {
  nlohmann::json doc;
  doc["off_target_records"] = dist.off_target_records;
  nlohmann::json shares = nlohmann::json::object();
  for (const auto& [key, share] : dist.shares) {
    shares[key] = round_sig12(share);
  }
  doc["shares"] = std::move(shares);
  out << doc.dump(2) << '\n';
}

void export_correlation_json(const CorrelationReport& report,
                             const OtrMatrix& matrix, std::ostream& out) {
  nlohmann::json doc;
  doc["orientation"] = report.orientation == KlOrientation::TargetToSource
                           ? "t2s"
                           : "s2t";
  nlohmann::json rows = nlohmann::json::array();
  for (const SourceCorrelation& sc : report.per_source) {
    nlohmann::json row;
    row["lang"] = matrix.langs[sc.src];
    row["r"] = sc.r ? nlohmann::json(round_sig12(*sc.r))
                    : nlohmann::json(nullptr);
    row["n"] = sc.n;
    if (!sc.note.empty()) row["note"] = sc.note;
    rows.push_back(std::move(row));
  }
  doc["per_source"] = std::move(rows);
  doc["usable_sources"] = report.usable_sources;
  doc["mean"] = number_or_null(report.mean);
  doc["sd"] = number_or_null(report.sd);
  out << doc.dump(2) << '\n';
}

void export_scatter_csv(const OtrMatrix& matrix, const KlMatrix& kl_matrix,
                        KlOrientation orientation, std::ostream& out) {
  if (matrix.langs != kl_matrix.langs) {
    raise(ErrorCode::SizeMismatch,
          "OTR and KL matrices cover different language lists");
  }
  const std::size_t n = matrix.langs.size();
  out << "src,tgt,kl,otr\n";
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t cell = matrix.idx(s, t);
      if (s == t || matrix.counts[cell] == 0 || !matrix.zero_shot[cell]) {
        continue;
      }
      const double k = orientation == KlOrientation::TargetToSource
                           ? kl_matrix.at(t, s)
                           : kl_matrix.at(s, t);
      out << matrix.langs[s] << ',' << matrix.langs[t] << ','
          << format_sig12(k) << ',' << format_sig12(matrix.values[cell])
          << '\n';
    }
  }
}

}  // namespace lavs
