// Command-line front end: corpus statistics, KL divergence matrices, greedy
// vocabulary splitting, stream retagging, decoding masks, and off-target
// analytics over pre-tokenized corpora.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lavs/analytics.hpp"
#include "lavs/corpus.hpp"
#include "lavs/divergence.hpp"
#include "lavs/error.hpp"
#include "lavs/mask.hpp"
#include "lavs/retag.hpp"
#include "lavs/select.hpp"
#include "lavs/util.hpp"
#include "lavs/vocab.hpp"

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::vector<std::string> langs;
  std::vector<std::string> corpus;  // "code=path"
  std::string vocab_path;
  std::uint64_t budget = 0;
  std::string unk = "strict";
  unsigned threads = 1;
  std::string out_dir;
  std::string orientation = "t2s";
  std::uint64_t mask_threshold = 0;
  std::vector<std::string> controls;
  std::string detections;
  std::string tiers;
  std::string pivot = "auto";
  std::string stream_lang;
  std::string input = "-";
  std::string output = "-";
  std::string kl_matrix_path;
};

[[noreturn]] void config_error(const std::string& message) {
  lavs::raise(lavs::ErrorCode::ConfigInvalid, message);
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) lavs::raise(lavs::ErrorCode::IoError, "cannot open config " + path);
  try {
    nlohmann::json doc;
    in >> doc;
    if (!doc.is_object()) config_error("config must be a JSON object");

    auto str = [&](const char* key, std::string& out) {
      if (doc.contains(key)) out = doc[key].get<std::string>();
    };
    if (doc.contains("langs")) {
      cfg.langs = doc["langs"].get<std::vector<std::string>>();
    }
    if (doc.contains("corpus")) {
      cfg.corpus.clear();
      for (const auto& [code, corpus_path] : doc["corpus"].items()) {
        cfg.corpus.push_back(code + "=" + corpus_path.get<std::string>());
      }
    }
    if (doc.contains("controls")) {
      cfg.controls = doc["controls"].get<std::vector<std::string>>();
    }
    if (doc.contains("budget")) cfg.budget = doc["budget"].get<std::uint64_t>();
    if (doc.contains("threads")) cfg.threads = doc["threads"].get<unsigned>();
    if (doc.contains("mask_threshold")) {
      cfg.mask_threshold = doc["mask_threshold"].get<std::uint64_t>();
    }
    str("vocab", cfg.vocab_path);
    str("unk", cfg.unk);
    str("out", cfg.out_dir);
    str("orientation", cfg.orientation);
    str("detections", cfg.detections);
    str("tiers", cfg.tiers);
    str("pivot", cfg.pivot);
    str("lang", cfg.stream_lang);
    str("input", cfg.input);
    str("output", cfg.output);
    str("kl_matrix", cfg.kl_matrix_path);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config error: ") + e.what());
  }
}

lavs::LanguageSet make_langs(const RunConfig& cfg) {
  if (cfg.langs.empty()) {
    config_error("--langs is required (comma-separated language codes)");
  }
  std::vector<std::string> codes;
  for (const std::string& chunk : cfg.langs) {
    std::size_t pos = 0;
    while (pos <= chunk.size()) {
      std::size_t next = chunk.find(',', pos);
      if (next == std::string::npos) next = chunk.size();
      if (next > pos) codes.push_back(chunk.substr(pos, next - pos));
      pos = next + 1;
    }
  }
  return lavs::LanguageSet(codes);
}

lavs::UnkPolicy unk_policy(const RunConfig& cfg) {
  if (cfg.unk == "strict") return lavs::UnkPolicy::Strict;
  if (cfg.unk == "drop") return lavs::UnkPolicy::Drop;
  config_error("--unk must be strict or drop, got \"" + cfg.unk + "\"");
}

std::map<std::string, std::string> corpus_paths(const RunConfig& cfg,
                                                const lavs::LanguageSet& langs) {
  std::map<std::string, std::string> paths;
  for (const std::string& entry : cfg.corpus) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= entry.size()) {
      config_error("--corpus expects <lang>=<path>, got \"" + entry + "\"");
    }
    const std::string code = entry.substr(0, eq);
    if (!langs.find(code)) {
      config_error("--corpus names unregistered language \"" + code + "\"");
    }
    if (!paths.emplace(code, entry.substr(eq + 1)).second) {
      config_error("duplicate --corpus entry for \"" + code + "\"");
    }
  }
  return paths;
}

// One stats object per language, ordered by language index; every language
// must have a corpus.
std::vector<lavs::CorpusStats> ingest_all(const RunConfig& cfg,
                                          const lavs::LanguageSet& langs,
                                          const lavs::Vocabulary& vocab) {
  const auto paths = corpus_paths(cfg, langs);
  const lavs::UnkPolicy policy = unk_policy(cfg);
  std::vector<lavs::CorpusStats> stats(langs.size());
  std::vector<const lavs::LanguageId*> order;
  for (const auto& lang : langs.all()) {
    if (!paths.count(lang.code)) {
      config_error("no --corpus for language \"" + lang.code + "\"");
    }
    order.push_back(&lang);
  }
  lavs::parallel_blocks(order.size(), cfg.threads,
                        [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const lavs::LanguageId& lang = *order[i];
      stats[lang.index] = lavs::ingest_corpus_file(paths.at(lang.code), lang,
                                                   vocab, policy);
    }
  });
  return stats;
}

std::vector<lavs::TokenDistribution> all_distributions(
    std::span<const lavs::CorpusStats> stats, const lavs::Vocabulary& vocab) {
  std::vector<lavs::TokenDistribution> dists;
  dists.reserve(stats.size());
  for (const auto& s : stats) dists.push_back(lavs::distribution(s, vocab));
  return dists;
}

lavs::Vocabulary load_vocab(const RunConfig& cfg,
                            const lavs::LanguageSet& langs) {
  if (cfg.vocab_path.empty()) config_error("--vocab is required");
  return lavs::Vocabulary::load_file(cfg.vocab_path, langs);
}

fs::path out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) config_error("--out is required");
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) lavs::raise(lavs::ErrorCode::IoError,
                      "cannot create output directory " + dir.string());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    lavs::raise(lavs::ErrorCode::IoError, "cannot write " + path.string());
  }
  return out;
}

std::optional<std::uint32_t> pivot_index(const RunConfig& cfg,
                                         const lavs::LanguageSet& langs) {
  if (cfg.pivot == "none") return std::nullopt;
  if (cfg.pivot == "auto") return langs.find("en");
  auto index = langs.find(cfg.pivot);
  if (!index) config_error("--pivot names unregistered language \"" +
                           cfg.pivot + "\"");
  return index;
}

lavs::TierSpec parse_tiers(const RunConfig& cfg,
                           const lavs::LanguageSet& langs) {
  lavs::TierSpec tiers(langs.size());
  std::size_t pos = 0;
  const std::string& list = cfg.tiers;
  while (pos <= list.size()) {
    std::size_t next = list.find(',', pos);
    if (next == std::string::npos) next = list.size();
    if (next > pos) {
      const std::string item = list.substr(pos, next - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        config_error("--tiers expects <lang>=<high|mid|low>, got \"" + item +
                     "\"");
      }
      const std::string code = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      auto index = langs.find(code);
      if (!index) {
        config_error("--tiers names unregistered language \"" + code + "\"");
      }
      if (value == "high") {
        tiers[*index] = lavs::Tier::High;
      } else if (value == "mid") {
        tiers[*index] = lavs::Tier::Mid;
      } else if (value == "low") {
        tiers[*index] = lavs::Tier::Low;
      } else {
        config_error("tier for \"" + code + "\" must be high, mid, or low");
      }
    }
    pos = next + 1;
  }
  return tiers;
}

lavs::KlOrientation orientation(const RunConfig& cfg) {
  if (cfg.orientation == "t2s") return lavs::KlOrientation::TargetToSource;
  if (cfg.orientation == "s2t") return lavs::KlOrientation::SourceToTarget;
  config_error("--orientation must be t2s or s2t");
}

lavs::DetectionTable load_detections(const RunConfig& cfg,
                                     const lavs::LanguageSet& langs) {
  if (cfg.detections.empty()) config_error("--detections is required");
  std::ifstream in(cfg.detections, std::ios::binary);
  if (!in) {
    lavs::raise(lavs::ErrorCode::IoError,
                "cannot open detections " + cfg.detections);
  }
  auto table = lavs::load_detections_tsv(in, langs);
  if (table.folded_other > 0) {
    lavs::log(lavs::LogLevel::Warn,
              std::to_string(table.folded_other) +
                  " detected codes outside --langs folded into \"other\"");
  }
  return table;
}

// ---------------------------------------------------------------------------

void cmd_stats(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto vocab = load_vocab(cfg, langs);
  const auto stats = ingest_all(cfg, langs, vocab);
  const fs::path dir = out_dir(cfg);
  for (const auto& s : stats) {
    auto out = open_out(dir / ("stats." + langs.code(s.lang) + ".json"));
    lavs::export_stats_json(s, vocab, out);
  }
}

void cmd_kl(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto vocab = load_vocab(cfg, langs);
  const auto stats = ingest_all(cfg, langs, vocab);
  const auto dists = all_distributions(stats, vocab);
  const auto matrix = lavs::pairwise_kl(dists, langs, cfg.threads);
  const fs::path dir = out_dir(cfg);
  {
    auto out = open_out(dir / "kl.csv");
    lavs::export_kl_csv(matrix, out);
  }
  {
    auto out = open_out(dir / "kl.json");
    lavs::export_kl_json(matrix, out);
  }
}

void cmd_lavs(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto vocab = load_vocab(cfg, langs);
  const auto stats = ingest_all(cfg, langs, vocab);
  lavs::SplitPlan plan;
  const auto out_vocab =
      lavs::lavs(vocab, stats, cfg.budget, cfg.threads, &plan);
  const fs::path dir = out_dir(cfg);
  out_vocab.save_file(dir / "vocab.txt");
  {
    auto out = open_out(dir / "plan.json");
    lavs::export_plan_json(plan, vocab, out);
  }
}

void cmd_split_all(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto vocab = load_vocab(cfg, langs);
  const auto stats = ingest_all(cfg, langs, vocab);
  const auto usage = lavs::usage_from_stats(vocab, stats);
  const auto out_vocab = lavs::split_all(vocab, usage);
  const fs::path dir = out_dir(cfg);
  out_vocab.save_file(dir / "vocab.txt");
}

void cmd_retag(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto vocab = load_vocab(cfg, langs);
  if (cfg.stream_lang.empty()) config_error("--lang is required for retag");
  const lavs::LanguageId& lang = langs.require(cfg.stream_lang);
  const lavs::RetagMap map(vocab);

  std::ifstream file_in;
  std::ofstream file_out;
  std::istream* in = &std::cin;
  std::ostream* out = &std::cout;
  if (cfg.input != "-") {
    file_in.open(cfg.input, std::ios::binary);
    if (!file_in) {
      lavs::raise(lavs::ErrorCode::IoError, "cannot open " + cfg.input);
    }
    in = &file_in;
  }
  if (cfg.output != "-") {
    file_out = open_out(cfg.output);
    out = &file_out;
  }
  lavs::retag_stream(*in, *out, map, lang, unk_policy(cfg), cfg.threads);
  out->flush();
}

void cmd_detag(const RunConfig& cfg) {
  std::optional<lavs::LanguageSet> langs;
  if (!cfg.langs.empty()) langs = make_langs(cfg);

  std::ifstream file_in;
  std::ofstream file_out;
  std::istream* in = &std::cin;
  std::ostream* out = &std::cout;
  if (cfg.input != "-") {
    file_in.open(cfg.input, std::ios::binary);
    if (!file_in) {
      lavs::raise(lavs::ErrorCode::IoError, "cannot open " + cfg.input);
    }
    in = &file_in;
  }
  if (cfg.output != "-") {
    file_out = open_out(cfg.output);
    out = &file_out;
  }
  lavs::detag_stream(*in, *out, langs ? &*langs : nullptr, cfg.threads);
  out->flush();
}

void cmd_mcd_mask(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto vocab = load_vocab(cfg, langs);
  const auto stats = ingest_all(cfg, langs, vocab);
  std::vector<lavs::TargetMask> masks;
  masks.reserve(langs.size());
  for (const auto& lang : langs.all()) {
    masks.push_back(lavs::build_mask(lang, stats[lang.index], vocab,
                                     cfg.controls, cfg.mask_threshold));
  }
  const fs::path dir = out_dir(cfg);
  for (const auto& mask : masks) {
    const std::string code = langs.code(mask.lang);
    {
      auto out = open_out(dir / ("mask." + code + ".txt"));
      lavs::save_mask_text(mask, vocab, out);
    }
    {
      auto out = open_out(dir / ("mask." + code + ".bin"));
      lavs::save_mask_binary(mask, out);
    }
  }
  auto out = open_out(dir / "mask_report.json");
  lavs::export_mask_report_json(masks, langs, out);
}

void cmd_otr(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto table = load_detections(cfg, langs);
  const auto matrix =
      lavs::otr_matrix(table.records, langs, pivot_index(cfg, langs));
  const fs::path dir = out_dir(cfg);
  {
    auto out = open_out(dir / "otr.csv");
    lavs::export_otr_csv(matrix, out);
  }
  {
    auto out = open_out(dir / "otr.json");
    lavs::export_otr_json(matrix, out);
  }
  {
    const auto deviation =
        lavs::deviation_distribution(table.records, langs);
    auto out = open_out(dir / "deviation.json");
    lavs::export_deviation_json(deviation, out);
  }
  if (!cfg.tiers.empty()) {
    const auto agg = lavs::tier_aggregate(matrix, parse_tiers(cfg, langs));
    auto out = open_out(dir / "tiers.json");
    lavs::export_tier_json(agg, out);
  }
}

void cmd_correlate(const RunConfig& cfg) {
  const auto langs = make_langs(cfg);
  const auto table = load_detections(cfg, langs);
  const auto matrix =
      lavs::otr_matrix(table.records, langs, pivot_index(cfg, langs));

  lavs::KlMatrix kl_matrix;
  if (!cfg.kl_matrix_path.empty()) {
    std::ifstream in(cfg.kl_matrix_path, std::ios::binary);
    if (!in) {
      lavs::raise(lavs::ErrorCode::IoError,
                  "cannot open KL matrix " + cfg.kl_matrix_path);
    }
    kl_matrix = lavs::load_kl_csv(in);
  } else {
    const auto vocab = load_vocab(cfg, langs);
    const auto stats = ingest_all(cfg, langs, vocab);
    kl_matrix =
        lavs::pairwise_kl(all_distributions(stats, vocab), langs, cfg.threads);
  }

  const auto orient = orientation(cfg);
  const auto report = lavs::correlate_kl_otr(matrix, kl_matrix, orient);
  const fs::path dir = out_dir(cfg);
  {
    auto out = open_out(dir / "correlation.json");
    lavs::export_correlation_json(report, matrix, out);
  }
  {
    auto out = open_out(dir / "scatter.csv");
    lavs::export_scatter_csv(matrix, kl_matrix, orient, out);
  }
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--langs", cfg.langs,
                  "Comma-separated language codes, index order");
  sub->add_option("--threads", cfg.threads, "Worker thread count");
  sub->add_option("--config", "JSON config file; flags win")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Language-aware vocabulary sharing toolkit"};
  app.require_subcommand(1);

  // The config file is applied before parsing so explicit flags override it.
  for (int i = 1; i + 1 <= argc; ++i) {
    const std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc) {
        apply_config_file(argv[i + 1], cfg);
      } else if (arg.rfind("--config=", 0) == 0) {
        apply_config_file(arg.substr(9), cfg);
      }
    } catch (const lavs::Error& e) {
      nlohmann::json err;
      err["error"] = lavs::to_string(e.code());
      err["message"] = e.what();
      std::cerr << err.dump() << '\n';
      return 1;
    }
  }

  auto* stats = app.add_subcommand("stats", "Per-language token counts");
  auto* kl = app.add_subcommand("kl", "Pairwise KL divergence matrix");
  auto* lavs_cmd =
      app.add_subcommand("lavs", "Greedy language-specific token selection");
  auto* split_all =
      app.add_subcommand("split-all", "Complete per-language separation");
  auto* retag = app.add_subcommand("retag", "Apply language tags to a stream");
  auto* detag =
      app.add_subcommand("detag", "Strip language tags from a stream");
  auto* mcd = app.add_subcommand("mcd-mask", "Constrained decoding masks");
  auto* otr_cmd = app.add_subcommand("otr", "Off-target rate analytics");
  auto* correlate =
      app.add_subcommand("correlate", "KL vs off-target correlation");

  for (CLI::App* sub :
       {stats, kl, lavs_cmd, split_all, retag, detag, mcd, otr_cmd,
        correlate}) {
    add_common(sub, cfg);
  }
  for (CLI::App* sub : {stats, kl, lavs_cmd, split_all, mcd, correlate}) {
    sub->add_option("--corpus", cfg.corpus,
                    "Pre-tokenized corpus as <lang>=<path>, repeatable");
    sub->add_option("--unk", cfg.unk, "Unknown-token policy: strict or drop");
  }
  for (CLI::App* sub : {stats, kl, lavs_cmd, split_all, retag, mcd,
                        correlate}) {
    sub->add_option("--vocab", cfg.vocab_path, "Vocabulary file (.txt or .json)");
  }
  for (CLI::App* sub : {stats, kl, lavs_cmd, split_all, mcd, otr_cmd,
                        correlate}) {
    sub->add_option("--out", cfg.out_dir, "Output directory");
  }
  lavs_cmd->add_option("--budget", cfg.budget,
                       "Number of new language-specific entries");
  retag->add_option("--lang", cfg.stream_lang, "Language of the stream");
  retag->add_option("--unk", cfg.unk, "Unknown-token policy: strict or drop");
  for (CLI::App* sub : {retag, detag}) {
    sub->add_option("--input", cfg.input, "Input file, - for stdin");
    sub->add_option("--output", cfg.output, "Output file, - for stdout");
  }
  mcd->add_option("--control", cfg.controls,
                  "Always-allowed control token, repeatable");
  mcd->add_option("--mask-threshold", cfg.mask_threshold,
                  "Minimum corpus count (exclusive) for mask membership");
  for (CLI::App* sub : {otr_cmd, correlate}) {
    sub->add_option("--detections", cfg.detections,
                    "TSV of src<TAB>tgt<TAB>detected rows");
    sub->add_option("--pivot", cfg.pivot,
                    "Supervised hub language; auto = en when present, or none");
  }
  otr_cmd->add_option("--tiers", cfg.tiers,
                      "Resource tiers as <lang>=<high|mid|low>, comma list");
  correlate->add_option("--kl-matrix", cfg.kl_matrix_path,
                        "Load a saved kl.csv instead of ingesting corpora");
  correlate->add_option("--orientation", cfg.orientation,
                        "KL orientation: t2s or s2t");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err;
    err["error"] = "CONFIG_INVALID";
    err["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand(stats)) cmd_stats(cfg);
    if (app.got_subcommand(kl)) cmd_kl(cfg);
    if (app.got_subcommand(lavs_cmd)) cmd_lavs(cfg);
    if (app.got_subcommand(split_all)) cmd_split_all(cfg);
    if (app.got_subcommand(retag)) cmd_retag(cfg);
    if (app.got_subcommand(detag)) cmd_detag(cfg);
    if (app.got_subcommand(mcd)) cmd_mcd_mask(cfg);
    if (app.got_subcommand(otr_cmd)) cmd_otr(cfg);
    if (app.got_subcommand(correlate)) cmd_correlate(cfg);
  } catch (const lavs::Error& e) {
    nlohmann::json err;
    err["error"] = lavs::to_string(e.code());
    err["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = "INTERNAL";
    err["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 3;
  }
  return 0;
}
