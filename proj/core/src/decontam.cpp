#include "textmill/decontam.hpp"

#include <algorithm>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/parallel.hpp"
#include "textmill/text.hpp"

namespace textmill {

void StatFilterConfig::validate() const {
  if (d2_min_tokens >= d2_max_tokens) {
    throw ConfigError("stat_filter: d2_min_tokens must be < d2_max_tokens");
  }
  if (d3_min_tokens >= d3_max_tokens) {
    throw ConfigError("stat_filter: d3_min_tokens must be < d3_max_tokens");
  }
}

NRange DecontamConfig::range_for(Partition p) const {
  switch (p) {
    case Partition::D2: return d2_n_range;
    case Partition::D3: return d3_n_range;
    case Partition::D1: return {0, -1};  // empty: D1 is not decontaminated
  }
  return {0, -1};
}

void DecontamConfig::validate() const {
  if (d2_n_range.empty() || d3_n_range.empty()) {
    throw ConfigError("decontam: n ranges must be non-empty");
  }
  if (d2_n_range.lo < 1 || d3_n_range.lo < 1) {
    throw ConfigError("decontam: n must be >= 1");
  }
  if (max_repetition_rate <= 0.0 || max_repetition_rate > 1.0) {
    throw ConfigError("decontam: max_repetition_rate must be in (0,1]");
  }
}

std::uint64_t NGramIndex::window_hash(const std::vector<std::string>& words,
                                      std::size_t start, std::size_t n) {
  std::uint64_t h = 0x2545f4914f6cdd1dull;
  for (std::size_t k = 0; k < n; ++k) {
    h = hash_combine(h, hash64(words[start + k]));
  }
  return h;
}

std::size_t NGramIndex::table_for(int n) const {
  for (std::size_t i = 0; i < ns_.size(); ++i) {
    if (ns_[i] == n) return i;
  }
  throw ConfigError("n-gram index does not cover n=" + std::to_string(n));
}

bool NGramIndex::has_n(int n) const {
  return std::find(ns_.begin(), ns_.end(), n) != ns_.end();
}

std::uint8_t NGramIndex::hit_mask(int n, std::uint64_t window_hash) const {
  const auto& table = tables_[table_for(n)];
  auto it = table.find(window_hash);
  return it == table.end() ? 0 : it->second;
}

std::size_t NGramIndex::size(int n) const { return tables_[table_for(n)].size(); }

NGramIndex NGramIndex::build(const std::vector<BenchmarkSample>& samples,
                             std::vector<int> n_values) {
  if (n_values.empty()) throw ConfigError("n-gram index: n_values must be non-empty");
  std::sort(n_values.begin(), n_values.end());
  n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());

  NGramIndex index;
  index.ns_ = std::move(n_values);
  index.tables_.resize(index.ns_.size());

  for (const auto& sample : samples) {
    auto words = normalize_words(sample.canonical_text());
    if (words.empty()) continue;
    std::uint8_t bit = static_cast<std::uint8_t>(
        1u << static_cast<unsigned>(sample.benchmark));
    for (std::size_t t = 0; t < index.ns_.size(); ++t) {
      auto n = static_cast<std::size_t>(index.ns_[t]);
      auto& table = index.tables_[t];
      if (words.size() < n) {
        // short sample: its whole text is one gram
        table[window_hash(words, 0, words.size())] |= bit;
        continue;
      }
      for (std::size_t i = 0; i + n <= words.size(); ++i) {
        table[window_hash(words, i, n)] |= bit;
      }
    }
  }
  return index;
}

RateResult repetition_rate(const Document& doc, const NGramIndex& index, int n) {
  if (!index.has_n(n)) {
    throw ConfigError("repetition_rate: n=" + std::to_string(n) + " not indexed");
  }
  RateResult result;
  auto words = normalize_words(doc.text);
  auto un = static_cast<std::size_t>(n);
  if (words.size() < un) {
    result.too_short = true;
    return result;
  }
  result.windows = words.size() - un + 1;
  for (std::size_t i = 0; i + un <= words.size(); ++i) {
    std::uint8_t mask = index.hit_mask(n, NGramIndex::window_hash(words, i, un));
    if (mask) {
      ++result.hits;
      result.benchmarks_hit |= mask;
    }
  }
  result.rate = static_cast<double>(result.hits) /
                static_cast<double>(std::max<std::size_t>(1, result.windows));
  return result;
}

RateResult max_repetition_rate(const Document& doc, const NGramIndex& index,
                               NRange range) {
  RateResult best;
  bool all_short = true;
  for (int n = range.lo; n <= range.hi; ++n) {
    RateResult r = repetition_rate(doc, index, n);
    if (!r.too_short) all_short = false;
    best.benchmarks_hit |= r.benchmarks_hit;
    if (r.rate > best.rate || (best.windows == 0 && !r.too_short)) {
      best.rate = r.rate;
      best.windows = r.windows;
      best.hits = r.hits;
    }
  }
  best.too_short = all_short;
  return best;
}

StatDecision stat_filter(const Document& doc, const StatFilterConfig& cfg) {
  std::uint64_t lo = 0, hi = 0;
  switch (doc.partition) {
    case Partition::D1: return {true, ""};
    case Partition::D2:
      lo = cfg.d2_min_tokens;
      hi = cfg.d2_max_tokens;
      break;
    case Partition::D3:
      lo = cfg.d3_min_tokens;
      hi = cfg.d3_max_tokens;
      break;
  }
  if (doc.token_count < lo) return {false, "under " + std::to_string(lo)};
  if (doc.token_count > hi) return {false, "over " + std::to_string(hi)};
  return {true, ""};
}

std::string DecontamReport::to_json() const {
  nlohmann::ordered_json j;
  j["inspected"] = inspected;
  j["kept"] = kept;
  j["removed_stat"] = removed_stat;
  j["removed_overlap"] = removed_overlap;
  nlohmann::ordered_json hits = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < benchmark_hits.size(); ++i) {
    hits[std::string(to_string(kAllBenchmarks[i]))] = benchmark_hits[i];
  }
  j["benchmark_hits"] = std::move(hits);
  return j.dump();
}

DecontamResult decontaminate(std::vector<Document> docs, const NGramIndex& index,
                             const StatFilterConfig& stat_cfg,
                             const DecontamConfig& decon_cfg, int workers) {
  stat_cfg.validate();
  decon_cfg.validate();
  for (Partition p : {Partition::D2, Partition::D3}) {
    NRange range = decon_cfg.range_for(p);
    for (int n = range.lo; n <= range.hi; ++n) {
      if (!index.has_n(n)) {
        throw ConfigError("decontaminate: index missing n=" + std::to_string(n));
      }
    }
  }

  enum class Verdict : std::uint8_t { Keep, Stat, Overlap };
  struct Outcome {
    Verdict verdict = Verdict::Keep;
    std::uint8_t benchmarks_hit = 0;
  };

  std::vector<Outcome> outcomes = parallel_map_indexed<Outcome>(
      docs.size(), workers, [&](std::size_t i) {
        Outcome o;
        const Document& doc = docs[i];
        if (!stat_filter(doc, stat_cfg).keep) {
          o.verdict = Verdict::Stat;
          return o;
        }
        if (doc.partition == Partition::D1) return o;
        RateResult r = max_repetition_rate(doc, index, decon_cfg.range_for(doc.partition));
        if (r.rate > decon_cfg.max_repetition_rate) {
          o.verdict = Verdict::Overlap;
          o.benchmarks_hit = r.benchmarks_hit;
        }
        return o;
      });

  DecontamResult result;
  result.report.inspected = docs.size();
  result.kept.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    switch (outcomes[i].verdict) {
      case Verdict::Keep:
        result.kept.push_back(std::move(docs[i]));
        ++result.report.kept;
        break;
      case Verdict::Stat:
        ++result.report.removed_stat;
        break;
      case Verdict::Overlap:
        ++result.report.removed_overlap;
        for (std::size_t b = 0; b < kAllBenchmarks.size(); ++b) {
          if (outcomes[i].benchmarks_hit & (1u << b)) {
            ++result.report.benchmark_hits[b];
          }
        }
        break;
    }
  }
  return result;
}

}  // namespace textmill
