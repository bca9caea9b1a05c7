#include "lavs/divergence.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lavs/error.hpp"
#include "lavs/util.hpp"

namespace lavs {

namespace {

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double term) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

void check_aligned(std::span<const TokenDistribution> dists) {
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].probs.size() != dists[0].probs.size()) {
      raise(ErrorCode::SizeMismatch,
            "distributions disagree on vocabulary size");
    }
    if (dists[i].lang != i) {
      raise(ErrorCode::SizeMismatch,
            "distributions must be ordered by language index");
    }
  }
}

}  // namespace

double kl(const TokenDistribution& a, const TokenDistribution& b) {
  if (a.probs.size() != b.probs.size()) {
    raise(ErrorCode::SizeMismatch,
          "distributions cover " + std::to_string(a.probs.size()) + " and " +
              std::to_string(b.probs.size()) + " tokens");
  }
  KahanSum acc;
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    acc.add(a.probs[i] * std::log(a.probs[i] / b.probs[i]));
  }
  return acc.sum;
}

KlMatrix pairwise_kl(std::span<const TokenDistribution> dists,
                     const LanguageSet& langs, unsigned threads) {
  if (dists.size() != langs.size()) {
    raise(ErrorCode::SizeMismatch,
          "got " + std::to_string(dists.size()) + " distributions for " +
              std::to_string(langs.size()) + " languages");
  }
  check_aligned(dists);

  KlMatrix matrix;
  matrix.langs = langs.codes();
  const std::size_t n = dists.size();
  matrix.values.assign(n * n, 0.0);

  // Each cell is a self-contained compensated sum, so evaluating cells in
  // parallel cannot change any value.
  parallel_blocks(n * n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t cell = begin; cell < end; ++cell) {
      const std::size_t m = cell / n;
      const std::size_t k = cell % n;
      if (m == k) continue;
      matrix.values[cell] = kl(dists[m], dists[k]);
    }
  });
  return matrix;
}

double objective(const KlMatrix& matrix) {
  const std::size_t n = matrix.langs.size();
  if (n == 0) raise(ErrorCode::SizeMismatch, "empty matrix");
  KahanSum acc;
  for (double v : matrix.values) acc.add(v);
  return acc.sum / static_cast<double>(n * n);
}

double objective(const Vocabulary& vocab,
                 std::span<const TokenDistribution> dists) {
  if (dists.empty()) raise(ErrorCode::SizeMismatch, "no distributions");
  for (const auto& d : dists) {
    if (d.probs.size() != vocab.size()) {
      raise(ErrorCode::SizeMismatch,
            "distribution does not align with the vocabulary");
    }
  }
  check_aligned(dists);
  KahanSum acc;
  for (std::size_t m = 0; m < dists.size(); ++m) {
    for (std::size_t k = 0; k < dists.size(); ++k) {
      if (m == k) continue;  // exact zeros
      acc.add(kl(dists[m], dists[k]));
    }
  }
  return acc.sum / static_cast<double>(dists.size() * dists.size());
}

SplitIncrement split_kl_increment(double prob_a, double prob_b,
                                  std::optional<TokenId> token) {
  if (!(prob_a > 0.0) || !(prob_a < 1.0) || !(prob_b > 0.0) ||
      !(prob_b < 1.0)) {
    raise(ErrorCode::Domain, "probabilities must lie in (0, 1), got " +
                                 format_sig12(prob_a) + " and " +
                                 format_sig12(prob_b));
  }
  SplitIncrement inc;
  inc.prob_a = prob_a;
  inc.prob_b = prob_b;
  inc.token = token;
  inc.mass_term = (prob_a - prob_b) * std::log(prob_b / prob_a);
  return inc;
}

void export_kl_csv(const KlMatrix& matrix, std::ostream& out) {
  const std::size_t n = matrix.langs.size();
  for (const auto& code : matrix.langs) out << ',' << code;
  out << '\n';
  for (std::size_t m = 0; m < n; ++m) {
    out << matrix.langs[m];
    for (std::size_t k = 0; k < n; ++k) {
      out << ',' << format_sig12(matrix.at(m, k));
    }
    out << '\n';
  }
}

void export_kl_json(const KlMatrix& matrix, std::ostream& out) {
  nlohmann::json doc;
  doc["langs"] = matrix.langs;
  nlohmann::json rows = nlohmann::json::array();
  const std::size_t n = matrix.langs.size();
  for (std::size_t m = 0; m < n; ++m) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < n; ++k) {
      row.push_back(round_sig12(matrix.at(m, k)));
    }
    rows.push_back(std::move(row));
  }
  doc["values_nats"] = std::move(rows);
  doc["objective_mean_nats"] = round_sig12(objective(matrix));
  out << doc.dump(2) << '\n';
}

KlMatrix load_kl_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::IoError, "empty KL matrix file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  KlMatrix matrix;
  {
    std::stringstream header(line);
    std::string cell;
    bool first = true;
    while (std::getline(header, cell, ',')) {
      if (first) {
        first = false;  // leading empty corner cell
        continue;
      }
      matrix.langs.push_back(cell);
    }
  }
  const std::size_t n = matrix.langs.size();
  if (n == 0) raise(ErrorCode::MalformedLine, "KL matrix header has no codes");
  matrix.values.assign(n * n, 0.0);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) raise(ErrorCode::MalformedLine, "KL matrix has extra rows");
    std::stringstream cells(line);
    std::string cell;
    std::size_t col = 0;
    bool first = true;
    while (std::getline(cells, cell, ',')) {
      if (first) {
        first = false;
        if (cell != matrix.langs[row]) {
          raise(ErrorCode::MalformedLine,
                "row label \"" + cell + "\" does not match header order");
        }
        continue;
      }
      if (col >= n) {
        raise(ErrorCode::MalformedLine, "KL matrix row has extra cells");
      }
      matrix.at(row, col) = std::strtod(cell.c_str(), nullptr);
      ++col;
    }
    if (col != n) {
      raise(ErrorCode::MalformedLine, "KL matrix row is too short");
    }
    ++row;
  }
  if (row != n) raise(ErrorCode::MalformedLine, "KL matrix is missing rows");
  return matrix;
}

}  // namespace lavs
