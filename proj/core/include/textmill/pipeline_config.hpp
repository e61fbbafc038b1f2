#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textmill/cleaner.hpp"
#include "textmill/cluster.hpp"
#include "textmill/decontam.hpp"
#include "textmill/dedup.hpp"
#include "textmill/llm_client.hpp"
#include "textmill/manifest.hpp"
#include "textmill/mixer.hpp"

namespace textmill {

struct SynthStageConfig {
  int k_topics = 64;
  std::uint64_t seed_subset = 0;  // 0 = use every input doc as clustering input
  std::uint64_t per_job_target_tokens = 1200;
  std::uint64_t budget_tokens_total = 0;  // 0 = one job per seed doc
  std::string templates_dir;              // empty = built-in templates
};

struct MixStageConfig {
  std::int64_t token_budget = 0;
  std::int64_t total_tokens = 600'000'000'000;  // two-stage schedule defaults
  std::int64_t stage1_tokens = 52'000'000'000;
  std::string exhaust = "reloop";  // or "renormalize"
  std::uint64_t docs_per_shard = 50'000;

  ExhaustPolicy exhaust_policy() const;
};

struct LeakageStageConfig {
  int cut_points = 5;
  std::string adapter_command;  // subprocess adapter; empty = --mock-adapter
  std::string model_name;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string tokenizer_id = "whitespace";
  CleaningRuleConfig cleaning = CleaningRuleConfig::defaults();
  DedupConfig dedup;
  StatFilterConfig stat_filter;
  DecontamConfig decontam;
  CorpusManifest manifest = default_manifest();
  EndpointConfig endpoint;
  SynthStageConfig synth;
  MixStageConfig mix;
  LeakageStageConfig leakage;

  void validate() const;  // throws ConfigError with the first violation
};

PipelineConfig default_pipeline_config();
PipelineConfig load_pipeline_config(const std::string& path);

// Canonical serialization of the fully-resolved config; the run manifest
// records hash64 of this string.
std::string canonical_config_json(const PipelineConfig& cfg);
std::uint64_t config_hash(const PipelineConfig& cfg);

}  // namespace textmill
