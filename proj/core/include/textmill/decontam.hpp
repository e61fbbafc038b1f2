#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "textmill/benchmark_sample.hpp"
#include "textmill/document.hpp"

namespace textmill {

struct StatFilterConfig {
  std::uint64_t d2_max_tokens = 2048;
  std::uint64_t d2_min_tokens = 64;
  std::uint64_t d3_max_tokens = 512;
  std::uint64_t d3_min_tokens = 8;

  void validate() const;  // throws ConfigError
};

struct NRange {
  int lo = 0;
  int hi = 0;  // inclusive
  bool contains(int n) const { return n >= lo && n <= hi; }
  bool empty() const { return hi < lo; }
};

struct DecontamConfig {
  NRange d2_n_range{10, 15};
  NRange d3_n_range{4, 8};
  double max_repetition_rate = 0.5;  // strictly greater removes

  NRange range_for(Partition p) const;
  void validate() const;
};

// Hashed membership tables over every length-n word window of every
// benchmark sample's canonical text, both splits, per n. Values carry a
// benchmark bitmask for hit attribution. Immutable once built.
class NGramIndex {
 public:
  static NGramIndex build(const std::vector<BenchmarkSample>& samples,
                          std::vector<int> n_values);

  bool has_n(int n) const;
  // 0 when absent; otherwise a bitmask of (1 << BenchmarkId).
  std::uint8_t hit_mask(int n, std::uint64_t window_hash) const;
  std::size_t size(int n) const;
  const std::vector<int>& n_values() const { return ns_; }

  static std::uint64_t window_hash(const std::vector<std::string>& words,
                                   std::size_t start, std::size_t n);

 private:
  std::vector<int> ns_;
  std::vector<std::unordered_map<std::uint64_t, std::uint8_t>> tables_;
  std::size_t table_for(int n) const;  // throws ConfigError when n not indexed
};

struct RateResult {
  double rate = 0.0;
  bool too_short = false;  // fewer than n words: rate 0 by definition
  std::size_t windows = 0;
  std::size_t hits = 0;
  std::uint8_t benchmarks_hit = 0;
};

// |windows of doc present in index| / max(1, |windows|), over the document's
// normalized words.
RateResult repetition_rate(const Document& doc, const NGramIndex& index, int n);
RateResult max_repetition_rate(const Document& doc, const NGramIndex& index,
                               NRange range);

struct StatDecision {
  bool keep = true;
  std::string reason;  // e.g. "over 512": set when rejected
};

// Partition-appropriate inclusive length bounds; D1 documents pass through
// (only synthetic data is decontaminated).
StatDecision stat_filter(const Document& doc, const StatFilterConfig& cfg);

struct DecontamReport {
  std::uint64_t inspected = 0;
  std::uint64_t kept = 0;
  std::uint64_t removed_stat = 0;
  std::uint64_t removed_overlap = 0;
  // docs removed for overlap, attributed to every benchmark they hit
  std::array<std::uint64_t, kAllBenchmarks.size()> benchmark_hits{};

  std::string to_json() const;
};

struct DecontamResult {
  std::vector<Document> kept;
  DecontamReport report;
};

// Statistical filter first, then max repetition rate over the partition's
// n-range against the threshold. Order-preserving and deterministic.
DecontamResult decontaminate(std::vector<Document> docs, const NGramIndex& index,
                             const StatFilterConfig& stat_cfg,
                             const DecontamConfig& decon_cfg, int workers = 1);

}  // namespace textmill
