#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textmill/document.hpp"

namespace textmill {

struct DedupConfig {
  int shingle_n = 5;          // word shingle width
  int num_hashes = 128;       // minhash signature length
  double jaccard_threshold = 0.8;
  int lsh_bands = 16;         // num_hashes must divide evenly into bands
  std::uint64_t hash_seed = 0x517cc1b727220a95ull;

  int rows_per_band() const { return num_hashes / lsh_bands; }
  void validate() const;  // throws ConfigError
};

struct ShingleSignature {
  std::uint64_t doc_id = 0;
  std::vector<std::uint64_t> minhash;
};

struct DuplicatePair {
  std::uint64_t kept_id = 0;
  std::uint64_t dropped_id = 0;
  double est_jaccard = 0.0;
};

std::string duplicate_pair_to_jsonl_line(const DuplicatePair& p);

struct ExactDedupResult {
  std::vector<Document> kept;
  std::vector<std::uint64_t> dropped_ids;
};

// First occurrence in stream order wins; later documents with an equal id
// are dropped. kept.size() + dropped_ids.size() == input size.
ExactDedupResult exact_dedup(std::vector<Document> docs);

// Deterministic minhash over word shingle sets. Fraction of matching slots
// estimates the shingle-set Jaccard similarity.
ShingleSignature signature(const Document& doc, const DedupConfig& cfg);
double estimated_jaccard(const ShingleSignature& a, const ShingleSignature& b);

struct NearDedupResult {
  std::vector<Document> kept;
  std::vector<DuplicatePair> pairs;
};

// Banded-LSH candidate generation, then signature comparison against the
// threshold. Within a duplicate cluster only the first document (stream
// order) survives. Documents with fewer than shingle_n words bypass
// near-dedup entirely.
NearDedupResult near_dedup(std::vector<Document> docs, const DedupConfig& cfg,
                           int workers = 1);

}  // namespace textmill
