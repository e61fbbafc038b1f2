#include "textmill/pipeline_config.hpp"

#include <fstream>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/tokenizer.hpp"

namespace textmill {

ExhaustPolicy MixStageConfig::exhaust_policy() const {
  if (exhaust == "reloop") return ExhaustPolicy::Reloop;
  if (exhaust == "renormalize") return ExhaustPolicy::Renormalize;
  throw ConfigError("mix.exhaust must be 'reloop' or 'renormalize'");
}

void PipelineConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!TokenizerRegistry::instance().has(tokenizer_id)) {
    throw ConfigError("unknown tokenizer_id: " + tokenizer_id);
  }
  cleaning.validate();
  dedup.validate();
  stat_filter.validate();
  decontam.validate();
  (void)mix.exhaust_policy();
  if (synth.k_topics < 1) throw ConfigError("synth.k_topics must be >= 1");
  if (leakage.cut_points < 1) throw ConfigError("leakage.cut_points must be >= 1");
}

PipelineConfig default_pipeline_config() { return PipelineConfig{}; }

namespace {

void read_patterns(const nlohmann::json& j, std::vector<PatternSpec>* out) {
  out->clear();
  for (const auto& jp : j) {
    out->push_back({jp.at("name").get<std::string>(), jp.at("regex").get<std::string>()});
  }
}

nlohmann::ordered_json patterns_json(const std::vector<PatternSpec>& patterns) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : patterns) {
    arr.push_back({{"name", p.name}, {"regex", p.regex}});
  }
  return arr;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw IoError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }

  PipelineConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.tokenizer_id = j.value("tokenizer_id", cfg.tokenizer_id);

    if (j.contains("cleaning")) {
      const auto& jc = j["cleaning"];
      if (jc.contains("pii_patterns")) read_patterns(jc["pii_patterns"], &cfg.cleaning.pii_patterns);
      if (jc.contains("link_patterns")) read_patterns(jc["link_patterns"], &cfg.cleaning.link_patterns);
      cfg.cleaning.min_tokens = jc.value("min_tokens", cfg.cleaning.min_tokens);
      cfg.cleaning.terminal_punctuation =
          jc.value("terminal_punctuation", cfg.cleaning.terminal_punctuation);
      cfg.cleaning.english_stopword_ratio_min =
          jc.value("english_stopword_ratio_min", cfg.cleaning.english_stopword_ratio_min);
      cfg.cleaning.ascii_letter_ratio_min =
          jc.value("ascii_letter_ratio_min", cfg.cleaning.ascii_letter_ratio_min);
    }
    if (j.contains("dedup")) {
      const auto& jd = j["dedup"];
      cfg.dedup.shingle_n = jd.value("shingle_n", cfg.dedup.shingle_n);
      cfg.dedup.num_hashes = jd.value("num_hashes", cfg.dedup.num_hashes);
      cfg.dedup.jaccard_threshold = jd.value("jaccard_threshold", cfg.dedup.jaccard_threshold);
      cfg.dedup.lsh_bands = jd.value("lsh_bands", cfg.dedup.lsh_bands);
      cfg.dedup.hash_seed = jd.value("hash_seed", cfg.dedup.hash_seed);
    }
    if (j.contains("stat_filter")) {
      const auto& js = j["stat_filter"];
      cfg.stat_filter.d2_max_tokens = js.value("d2_max_tokens", cfg.stat_filter.d2_max_tokens);
      cfg.stat_filter.d2_min_tokens = js.value("d2_min_tokens", cfg.stat_filter.d2_min_tokens);
      cfg.stat_filter.d3_max_tokens = js.value("d3_max_tokens", cfg.stat_filter.d3_max_tokens);
      cfg.stat_filter.d3_min_tokens = js.value("d3_min_tokens", cfg.stat_filter.d3_min_tokens);
    }
    if (j.contains("decontam")) {
      const auto& jd = j["decontam"];
      if (jd.contains("d2_n_range")) {
        cfg.decontam.d2_n_range = {jd["d2_n_range"].at(0).get<int>(),
                                   jd["d2_n_range"].at(1).get<int>()};
      }
      if (jd.contains("d3_n_range")) {
        cfg.decontam.d3_n_range = {jd["d3_n_range"].at(0).get<int>(),
                                   jd["d3_n_range"].at(1).get<int>()};
      }
      cfg.decontam.max_repetition_rate =
          jd.value("max_repetition_rate", cfg.decontam.max_repetition_rate);
    }
    if (j.contains("manifest")) {
      if (j["manifest"].is_string()) {
        cfg.manifest = load_manifest(j["manifest"].get<std::string>());
      } else {
        throw ConfigError("config.manifest must be a path string");
      }
    }
    if (j.contains("endpoint")) {
      const auto& je = j["endpoint"];
      cfg.endpoint.base_url = je.value("base_url", cfg.endpoint.base_url);
      cfg.endpoint.path = je.value("path", cfg.endpoint.path);
      cfg.endpoint.model = je.value("model", cfg.endpoint.model);
      cfg.endpoint.temperature = je.value("temperature", cfg.endpoint.temperature);
      cfg.endpoint.timeout_s = je.value("timeout_s", cfg.endpoint.timeout_s);
      cfg.endpoint.api_key_env = je.value("api_key_env", cfg.endpoint.api_key_env);
      cfg.endpoint.mock_dir = je.value("mock_dir", cfg.endpoint.mock_dir);
    }
    if (j.contains("synth")) {
      const auto& js = j["synth"];
      cfg.synth.k_topics = js.value("k_topics", cfg.synth.k_topics);
      cfg.synth.seed_subset = js.value("seed_subset", cfg.synth.seed_subset);
      cfg.synth.per_job_target_tokens =
          js.value("per_job_target_tokens", cfg.synth.per_job_target_tokens);
      cfg.synth.budget_tokens_total =
          js.value("budget_tokens_total", cfg.synth.budget_tokens_total);
      cfg.synth.templates_dir = js.value("templates_dir", cfg.synth.templates_dir);
    }
    if (j.contains("mix")) {
      const auto& jm = j["mix"];
      cfg.mix.token_budget = jm.value("token_budget", cfg.mix.token_budget);
      cfg.mix.total_tokens = jm.value("total_tokens", cfg.mix.total_tokens);
      cfg.mix.stage1_tokens = jm.value("stage1_tokens", cfg.mix.stage1_tokens);
      cfg.mix.exhaust = jm.value("exhaust", cfg.mix.exhaust);
      cfg.mix.docs_per_shard = jm.value("docs_per_shard", cfg.mix.docs_per_shard);
    }
    if (j.contains("leakage")) {
      const auto& jl = j["leakage"];
      cfg.leakage.cut_points = jl.value("cut_points", cfg.leakage.cut_points);
      cfg.leakage.adapter_command = jl.value("adapter_command", cfg.leakage.adapter_command);
      cfg.leakage.model_name = jl.value("model_name", cfg.leakage.model_name);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return cfg;
}

std::string canonical_config_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["tokenizer_id"] = cfg.tokenizer_id;

  nlohmann::ordered_json jc;
  jc["pii_patterns"] = patterns_json(cfg.cleaning.pii_patterns);
  jc["link_patterns"] = patterns_json(cfg.cleaning.link_patterns);
  jc["min_tokens"] = cfg.cleaning.min_tokens;
  jc["terminal_punctuation"] = cfg.cleaning.terminal_punctuation;
  jc["english_stopword_ratio_min"] = cfg.cleaning.english_stopword_ratio_min;
  jc["ascii_letter_ratio_min"] = cfg.cleaning.ascii_letter_ratio_min;
  j["cleaning"] = std::move(jc);

  nlohmann::ordered_json jd;
  jd["shingle_n"] = cfg.dedup.shingle_n;
  jd["num_hashes"] = cfg.dedup.num_hashes;
  jd["jaccard_threshold"] = cfg.dedup.jaccard_threshold;
  jd["lsh_bands"] = cfg.dedup.lsh_bands;
  jd["hash_seed"] = cfg.dedup.hash_seed;
  j["dedup"] = std::move(jd);

  nlohmann::ordered_json js;
  js["d2_max_tokens"] = cfg.stat_filter.d2_max_tokens;
  js["d2_min_tokens"] = cfg.stat_filter.d2_min_tokens;
  js["d3_max_tokens"] = cfg.stat_filter.d3_max_tokens;
  js["d3_min_tokens"] = cfg.stat_filter.d3_min_tokens;
  j["stat_filter"] = std::move(js);

  nlohmann::ordered_json jn;
  jn["d2_n_range"] = {cfg.decontam.d2_n_range.lo, cfg.decontam.d2_n_range.hi};
  jn["d3_n_range"] = {cfg.decontam.d3_n_range.lo, cfg.decontam.d3_n_range.hi};
  jn["max_repetition_rate"] = cfg.decontam.max_repetition_rate;
  j["decontam"] = std::move(jn);

  nlohmann::ordered_json jm;
  jm["tokenizer_id"] = cfg.manifest.tokenizer_id;
  auto sources = nlohmann::ordered_json::array();
  for (const auto& s : cfg.manifest.sources) {
    sources.push_back({{"name", s.name},
                       {"categories", s.categories},
                       {"sample_weight_pct", s.sample_weight_pct},
                       {"input_paths", s.input_paths}});
  }
  jm["sources"] = std::move(sources);
  auto partitions = nlohmann::ordered_json::array();
  for (const auto& e : cfg.manifest.synthetic_partitions) {
    partitions.push_back({{"name", e.name},
                          {"partition", std::string(to_string(e.partition))},
                          {"sample_weight_pct", e.percent}});
  }
  jm["synthetic_partitions"] = std::move(partitions);
  j["manifest"] = std::move(jm);

  nlohmann::ordered_json je;
  je["base_url"] = cfg.endpoint.base_url;
  je["path"] = cfg.endpoint.path;
  je["model"] = cfg.endpoint.model;
  je["temperature"] = cfg.endpoint.temperature;
  je["timeout_s"] = cfg.endpoint.timeout_s;
  je["api_key_env"] = cfg.endpoint.api_key_env;
  je["mock_dir"] = cfg.endpoint.mock_dir;
  j["endpoint"] = std::move(je);

  nlohmann::ordered_json jy;
  jy["k_topics"] = cfg.synth.k_topics;
  jy["seed_subset"] = cfg.synth.seed_subset;
  jy["per_job_target_tokens"] = cfg.synth.per_job_target_tokens;
  jy["budget_tokens_total"] = cfg.synth.budget_tokens_total;
  jy["templates_dir"] = cfg.synth.templates_dir;
  j["synth"] = std::move(jy);

  nlohmann::ordered_json jx;
  jx["token_budget"] = cfg.mix.token_budget;
  jx["total_tokens"] = cfg.mix.total_tokens;
  jx["stage1_tokens"] = cfg.mix.stage1_tokens;
  jx["exhaust"] = cfg.mix.exhaust;
  jx["docs_per_shard"] = cfg.mix.docs_per_shard;
  j["mix"] = std::move(jx);

  nlohmann::ordered_json jl;
  jl["cut_points"] = cfg.leakage.cut_points;
  jl["adapter_command"] = cfg.leakage.adapter_command;
  jl["model_name"] = cfg.leakage.model_name;
  j["leakage"] = std::move(jl);

  return j.dump();
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
  return hash64(canonical_config_json(cfg));
}

}  // namespace textmill
