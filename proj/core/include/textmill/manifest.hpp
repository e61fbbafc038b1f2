#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "textmill/document.hpp"

namespace textmill {

struct WeightEntry {
  std::string name;
  Partition partition = Partition::D1;
  double percent = 0.0;  // share of the final mixture, in percent
};

// Per-source/partition sampling weights for the final training stream.
struct MixtureSpec {
  std::vector<WeightEntry> entries;

  double total() const;
  double partition_total(Partition p) const;
  const WeightEntry* find(std::string_view name) const;
};

struct SourceSpec {
  std::string name;
  std::string categories;
  double sample_weight_pct = 0.0;
  std::vector<std::string> input_paths;  // globs; empty means declared weight-only
};

struct CorpusManifest {
  std::vector<SourceSpec> sources;              // cleaned open-source inputs (D1)
  std::vector<WeightEntry> synthetic_partitions;  // D2/D3 slices
  std::string tokenizer_id = "whitespace";
  std::string created_at;

  // D1 sources plus synthetic partitions as one weight table.
  MixtureSpec mixture() const;
};

struct ValidationFinding {
  std::string code;     // e.g. "duplicate_name", "weight_sum", "missing_path"
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool valid() const { return findings.empty(); }
  std::string summary() const;
};

// Checks weight sum (100.0 +/- 0.01), name uniqueness, nonnegative weights,
// tokenizer registration and input path existence (non-empty globs only).
ValidationReport validate_manifest(const CorpusManifest& m);

// The shipped registry: 19 cleaned open-source sources totalling 46.5%,
// plus synthetic 7.7%, cosmopedia 5.93%, restruct 23.5%, SFT 16.37%.
CorpusManifest default_manifest();

CorpusManifest load_manifest(const std::string& path);
void save_manifest(const CorpusManifest& m, const std::string& path);

// Classifies a source name into its partition: registry sources and unknown
// names -> D1, synthesis/cosmopedia origins -> D2, restruct/SFT origins -> D3.
Partition partition_for_source(std::string_view source_name);

}  // namespace textmill
