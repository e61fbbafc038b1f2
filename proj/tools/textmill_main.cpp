// textmill: corpus construction and decontamination pipeline.
//
// Subcommands: clean, dedup, synth, tasks, decontaminate, mix, leakage,
// report. Stages communicate only through files; every stage writes a run
// manifest next to its outputs and prints its headline metrics as JSON.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "textmill/benchmark_sample.hpp"
#include "textmill/cleaner.hpp"
#include "textmill/cluster.hpp"
#include "textmill/decontam.hpp"
#include "textmill/dedup.hpp"
#include "textmill/document.hpp"
#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/jsonl.hpp"
#include "textmill/leakage.hpp"
#include "textmill/llm_client.hpp"
#include "textmill/manifest.hpp"
#include "textmill/mixer.hpp"
#include "textmill/pipeline_config.hpp"
#include "textmill/prompt.hpp"
#include "textmill/run_manifest.hpp"
#include "textmill/synth.hpp"
#include "textmill/text.hpp"
#include "textmill/tokenizer.hpp"
#include "textmill/version.hpp"

namespace fs = std::filesystem;
using namespace textmill;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> input;
  std::string output_dir;
  std::string mock_endpoint;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;  // 0 = take from config
};

struct StageContext {
  PipelineConfig cfg;
  CommonArgs args;
  std::chrono::steady_clock::time_point started;

  const Tokenizer& tokenizer() const {
    return TokenizerRegistry::instance().get(cfg.tokenizer_id);
  }
  int workers() const { return args.workers > 0 ? args.workers : cfg.workers; }
  fs::path out(const std::string& name) const {
    return fs::path(args.output_dir) / name;
  }
};

StageContext make_context(const CommonArgs& args) {
  StageContext ctx;
  ctx.started = std::chrono::steady_clock::now();
  ctx.cfg = args.config_path.empty() ? default_pipeline_config()
                                     : load_pipeline_config(args.config_path);
  if (args.seed_set) ctx.cfg.seed = args.seed;
  if (!args.mock_endpoint.empty()) ctx.cfg.endpoint.mock_dir = args.mock_endpoint;
  ctx.args = args;
  ctx.cfg.validate();
  if (!args.output_dir.empty()) fs::create_directories(args.output_dir);
  return ctx;
}

void finish(const StageContext& ctx, const std::string& command,
            std::vector<std::string> outputs, std::map<std::string, std::int64_t> counts) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config_hash = config_hash(ctx.cfg);
  manifest.inputs = ctx.args.input;
  manifest.outputs = std::move(outputs);
  manifest.counts = std::move(counts);
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started)
          .count();
  manifest.tool_version = TEXTMILL_VERSION;
  save_run_manifest(manifest, ctx.out("run_manifest.json").string());

  nlohmann::ordered_json metrics;
  metrics["command"] = command;
  for (const auto& [k, v] : manifest.counts) metrics[k] = v;
  metrics["wall_time_s"] = manifest.wall_time_s;
  std::cout << metrics.dump() << "\n";
}

ReadPolicy policy_for(const StageContext& ctx, std::optional<Partition> partition,
                      const std::string& source = "", const std::string& category = "") {
  ReadPolicy policy;
  policy.tokenizer_id = ctx.cfg.tokenizer_id;
  policy.default_partition = partition;
  policy.default_source = source;
  policy.default_category = category;
  return policy;
}

// ---- clean --------------------------------------------------------------------

int cmd_clean(const CommonArgs& args, const std::string& default_source,
              const std::string& default_category) {
  auto ctx = make_context(args);
  Cleaner cleaner(ctx.cfg.cleaning, ctx.tokenizer());

  DocumentReader reader(expand_globs(args.input),
                        policy_for(ctx, Partition::D1, default_source, default_category));
  DocumentWriter kept(ctx.out("cleaned.jsonl").string());
  std::ofstream rejects(ctx.out("rejections.jsonl"));
  std::ofstream errors(ctx.out("line_errors.jsonl"));

  std::int64_t in = 0, rejected = 0, bad_lines = 0;
  std::int64_t kept_tokens = 0;
  while (auto rec = reader.next()) {
    if (std::holds_alternative<LineError>(*rec)) {
      const auto& err = std::get<LineError>(*rec);
      nlohmann::ordered_json j;
      j["path"] = err.path;
      j["line"] = err.line_no;
      j["message"] = err.message;
      errors << j.dump() << "\n";
      ++bad_lines;
      continue;
    }
    ++in;
    Document doc = std::get<Document>(std::move(*rec));
    std::uint64_t incoming_id = doc.id;
    Document transformed = cleaner.transform(std::move(doc));
    if (auto rejection = cleaner.evaluate(transformed)) {
      rejection->doc_id = incoming_id;
      rejects << rejection_to_jsonl_line(*rejection) << "\n";
      ++rejected;
    } else {
      kept_tokens += static_cast<std::int64_t>(transformed.token_count);
      kept.write(transformed);
    }
  }
  kept.flush();

  finish(ctx, "clean",
         {ctx.out("cleaned.jsonl").string(), ctx.out("rejections.jsonl").string()},
         {{"in", in},
          {"kept", static_cast<std::int64_t>(kept.written())},
          {"rejected", rejected},
          {"malformed_lines", bad_lines},
          {"kept_tokens", kept_tokens}});
  return 0;
}

// ---- dedup --------------------------------------------------------------------

int cmd_dedup(const CommonArgs& args) {
  auto ctx = make_context(args);
  std::vector<LineError> errors;
  auto docs = read_documents(args.input, policy_for(ctx, std::nullopt), &errors);
  std::int64_t in = static_cast<std::int64_t>(docs.size());

  auto exact = exact_dedup(std::move(docs));
  auto near = near_dedup(std::move(exact.kept), ctx.cfg.dedup, ctx.workers());

  write_documents(near.kept, ctx.out("deduped.jsonl").string());
  std::ofstream pairs(ctx.out("duplicate_pairs.jsonl"));
  for (const auto& p : near.pairs) pairs << duplicate_pair_to_jsonl_line(p) << "\n";

  finish(ctx, "dedup",
         {ctx.out("deduped.jsonl").string(), ctx.out("duplicate_pairs.jsonl").string()},
         {{"in", in},
          {"kept", static_cast<std::int64_t>(near.kept.size())},
          {"dropped_exact", static_cast<std::int64_t>(exact.dropped_ids.size())},
          {"dropped_near", static_cast<std::int64_t>(near.pairs.size())},
          {"malformed_lines", static_cast<std::int64_t>(errors.size())}});
  return 0;
}

// ---- synth ------------------------------------------------------------------

std::vector<PromptTemplate> stage_templates(const StageContext& ctx, Partition target) {
  std::vector<PromptTemplate> all = ctx.cfg.synth.templates_dir.empty()
                                        ? builtin_templates()
                                        : load_templates_dir(ctx.cfg.synth.templates_dir);
  std::vector<PromptTemplate> out;
  for (auto& t : all) {
    if (t.target_partition == target) out.push_back(std::move(t));
  }
  if (out.empty()) {
    throw ConfigError("no templates target partition " +
                      std::string(to_string(target)));
  }
  return out;
}

const PromptTemplate& template_for_category(const std::vector<PromptTemplate>& templates,
                                            const std::string& category) {
  for (const auto& t : templates) {
    if (t.seed_category == category) return t;
  }
  return templates.front();
}

int cmd_synth(const CommonArgs& args) {
  auto ctx = make_context(args);
  std::vector<LineError> errors;
  auto docs = read_documents(args.input, policy_for(ctx, Partition::D1), &errors);
  if (docs.empty()) throw ConfigError("synth: no seed documents in input");

  int k = std::min<int>(ctx.cfg.synth.k_topics, static_cast<int>(docs.size()));
  auto assignments = cluster_topics(docs, k, ctx.cfg.seed);

  // per-category quotas: the shipped token ratios scaled to the configured
  // budget, translated to seed counts by the per-job token target
  std::map<std::string, std::size_t> available;
  for (const auto& doc : docs) ++available[doc.category];
  std::map<std::string, std::size_t> quotas;
  if (ctx.cfg.synth.budget_tokens_total == 0) {
    for (const auto& [category, count] : available) quotas[category] = count;
  } else {
    double ratio_total = 0.0;
    std::map<std::string, double> ratios;
    for (const auto& q : default_synthesis_quotas()) {
      if (available.count(q.category)) {
        ratios[q.category] = q.synthetic_tokens_billions;
        ratio_total += q.synthetic_tokens_billions;
      }
    }
    if (ratios.empty()) {
      for (const auto& [category, count] : available) {
        ratios[category] = 1.0;
        ratio_total += 1.0;
      }
    }
    for (const auto& [category, ratio] : ratios) {
      auto budget = static_cast<std::uint64_t>(
          static_cast<double>(ctx.cfg.synth.budget_tokens_total) * ratio / ratio_total);
      std::size_t want = static_cast<std::size_t>(
          (budget + ctx.cfg.synth.per_job_target_tokens - 1) /
          std::max<std::uint64_t>(1, ctx.cfg.synth.per_job_target_tokens));
      quotas[category] = std::min(want, available[category]);
    }
  }

  auto seed_ids = sample_seeds(docs, assignments, quotas, ctx.cfg.seed);
  std::map<std::uint64_t, const Document*> by_id;
  for (const auto& doc : docs) by_id[doc.id] = &doc;

  auto templates = stage_templates(ctx, Partition::D2);
  std::map<std::string, std::vector<Document>> seeds_by_category;
  for (auto id : seed_ids) seeds_by_category[by_id[id]->category].push_back(*by_id[id]);

  std::vector<SynthesisJob> jobs;
  JobPlanConfig plan_cfg;
  plan_cfg.target_tokens_per_job = ctx.cfg.synth.per_job_target_tokens;
  for (const auto& [category, seeds] : seeds_by_category) {
    auto planned = plan_jobs(seeds, template_for_category(templates, category), plan_cfg);
    jobs.insert(jobs.end(), planned.begin(), planned.end());
  }

  auto endpoint = make_endpoint(ctx.cfg.endpoint);
  RetryPolicy retry;
  auto checkpoint = ctx.out("generations.jsonl").string();

  DocumentWriter synthetic(ctx.out("synthetic_docs.jsonl").string());
  std::map<std::string, const SynthesisJob*> job_by_id;
  for (const auto& job : jobs) job_by_id[job.job_id] = &job;
  std::int64_t tokens_generated = 0;

  auto on_record = [&](const GenerationRecord& rec) {
    if (rec.status != GenStatus::Ok) return;
    const SynthesisJob* job = job_by_id.at(rec.job_id);
    const Document* seed = by_id.count(job->seed_doc_id) ? by_id.at(job->seed_doc_id) : nullptr;
    Document doc = make_document(
        rec.response_text, "synthetic", seed ? seed->category : "General", Partition::D2,
        ctx.tokenizer(),
        {{"job_id", rec.job_id},
         {"template_id", job->template_id},
         {"seed_doc_id", std::to_string(job->seed_doc_id)}});
    tokens_generated += static_cast<std::int64_t>(doc.token_count);
    synthetic.write(doc);
  };

  auto stats = run_synthesis(jobs, *endpoint, retry, checkpoint, ctx.workers(), on_record);
  synthetic.flush();

  finish(ctx, "synth",
         {checkpoint, ctx.out("synthetic_docs.jsonl").string()},
         {{"seed_docs", static_cast<std::int64_t>(seed_ids.size())},
          {"jobs", static_cast<std::int64_t>(jobs.size())},
          {"submitted", static_cast<std::int64_t>(stats.submitted)},
          {"resumed", static_cast<std::int64_t>(stats.resumed)},
          {"ok", static_cast<std::int64_t>(stats.ok)},
          {"refused", static_cast<std::int64_t>(stats.refused)},
          {"transport_error", static_cast<std::int64_t>(stats.transport_error)},
          {"tokens_generated", tokens_generated}});
  return 0;
}

// ---- tasks ------------------------------------------------------------------

int cmd_tasks(const CommonArgs& args, const std::string& sft_input) {
  auto ctx = make_context(args);

  DocumentWriter d3(ctx.out("d3_docs.jsonl").string());
  std::ofstream samples_out(ctx.out("task_samples.jsonl"));
  std::ofstream rejects(ctx.out("task_rejects.jsonl"));
  std::int64_t mcq_ok = 0, mcq_failed = 0, sft_ok = 0, sft_failed = 0;

  auto emit = [&](const NlpTaskSample& sample, const std::string& source,
                  std::map<std::string, std::string> meta) {
    samples_out << to_jsonl_line(sample) << "\n";
    d3.write(make_document(sample.rendered_text(), source, "NLP-task", Partition::D3,
                           ctx.tokenizer(), std::move(meta)));
  };

  // synthetic MCQ generation from D2 seed content
  if (!args.input.empty()) {
    std::vector<LineError> errors;
    auto seeds = read_documents(args.input, policy_for(ctx, Partition::D2), &errors);
    auto templates = stage_templates(ctx, Partition::D3);
    JobPlanConfig plan_cfg;
    plan_cfg.target_tokens_per_job = ctx.cfg.synth.per_job_target_tokens;
    std::vector<SynthesisJob> jobs;
    for (const auto& t : templates) {
      auto planned = plan_jobs(seeds, t, plan_cfg);
      jobs.insert(jobs.end(), planned.begin(), planned.end());
    }

    auto endpoint = make_endpoint(ctx.cfg.endpoint);
    RetryPolicy retry;
    auto checkpoint = ctx.out("task_generations.jsonl").string();
    auto on_record = [&](const GenerationRecord& rec) {
      if (rec.status != GenStatus::Ok) {
        ++mcq_failed;
        return;
      }
      auto parsed = parse_mcq(rec);
      if (std::holds_alternative<McqParseError>(parsed)) {
        GenerationRecord annotated = rec;
        annotated.status = GenStatus::ParseError;
        rejects << to_jsonl_line(annotated) << "\n";
        ++mcq_failed;
        return;
      }
      ++mcq_ok;
      emit(std::get<NlpTaskSample>(parsed), "restruct", {{"job_id", rec.job_id}});
    };
    run_synthesis(jobs, *endpoint, retry, checkpoint, ctx.workers(), on_record);
  }

  // open-source SFT conversion
  if (!sft_input.empty()) {
    for (const auto& path : expand_globs({sft_input})) {
      std::ifstream in(path, std::ios::in | std::ios::binary);
      if (!in.is_open()) throw IoError("cannot open sft input: " + path);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto parsed = parse_instruction_line(line);
        if (std::holds_alternative<SftRejection>(parsed)) {
          ++sft_failed;
          continue;
        }
        auto converted = convert_sft(std::get<InstructionRecord>(parsed));
        if (std::holds_alternative<SftRejection>(converted)) {
          nlohmann::ordered_json j;
          j["path"] = path;
          j["line"] = line_no;
          j["message"] = std::get<SftRejection>(converted).message;
          rejects << j.dump() << "\n";
          ++sft_failed;
          continue;
        }
        ++sft_ok;
        emit(std::get<NlpTaskSample>(converted), "open_source_sft", {});
      }
    }
  }
  d3.flush();

  finish(ctx, "tasks",
         {ctx.out("d3_docs.jsonl").string(), ctx.out("task_samples.jsonl").string()},
         {{"mcq_ok", mcq_ok},
          {"mcq_failed", mcq_failed},
          {"sft_ok", sft_ok},
          {"sft_failed", sft_failed},
          {"d3_docs", static_cast<std::int64_t>(d3.written())}});
  return 0;
}

// ---- decontaminate -------------------------------------------------------------

int cmd_decontaminate(const CommonArgs& args, const std::string& benchmarks_glob) {
  auto ctx = make_context(args);
  if (benchmarks_glob.empty()) {
    throw ConfigError("decontaminate requires --benchmarks <glob>");
  }
  std::vector<LineError> errors;
  auto samples = load_benchmark_samples({benchmarks_glob}, &errors);
  if (samples.empty()) throw ConfigError("decontaminate: no benchmark samples loaded");

  std::vector<int> ns;
  for (int n = ctx.cfg.decontam.d3_n_range.lo; n <= ctx.cfg.decontam.d3_n_range.hi; ++n) {
    ns.push_back(n);
  }
  for (int n = ctx.cfg.decontam.d2_n_range.lo; n <= ctx.cfg.decontam.d2_n_range.hi; ++n) {
    ns.push_back(n);
  }
  auto index = NGramIndex::build(samples, ns);

  auto docs = read_documents(args.input, policy_for(ctx, Partition::D2), &errors);
  std::int64_t in = static_cast<std::int64_t>(docs.size());
  auto result = decontaminate(std::move(docs), index, ctx.cfg.stat_filter,
                              ctx.cfg.decontam, ctx.workers());

  write_documents(result.kept, ctx.out("decontaminated.jsonl").string());
  {
    std::ofstream report(ctx.out("decontam_report.json"));
    report << result.report.to_json() << "\n";
  }

  finish(ctx, "decontaminate",
         {ctx.out("decontaminated.jsonl").string(),
          ctx.out("decontam_report.json").string()},
         {{"in", in},
          {"kept", static_cast<std::int64_t>(result.report.kept)},
          {"removed_stat", static_cast<std::int64_t>(result.report.removed_stat)},
          {"removed_overlap", static_cast<std::int64_t>(result.report.removed_overlap)},
          {"benchmark_samples", static_cast<std::int64_t>(samples.size())}});
  return 0;
}

// ---- mix --------------------------------------------------------------------

std::string safe_name(const std::string& name) {
  std::string out = name;
  for (auto& c : out) {
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  }
  return out;
}

int cmd_mix(const CommonArgs& args, const std::string& input_dir, std::int64_t budget) {
  auto ctx = make_context(args);
  if (input_dir.empty()) throw ConfigError("mix requires --input-dir <dir>");
  std::int64_t token_budget = budget > 0 ? budget : ctx.cfg.mix.token_budget;
  if (token_budget <= 0) throw ConfigError("mix: token budget must be > 0");

  auto spec = ctx.cfg.manifest.mixture();
  std::vector<std::unique_ptr<FileDocSource>> sources;
  std::vector<std::pair<WeightEntry, DocSource*>> wired;
  for (const auto& entry : spec.entries) {
    if (entry.percent <= 0.0) continue;
    auto path = fs::path(input_dir) / (safe_name(entry.name) + ".jsonl");
    if (!fs::exists(path)) {
      throw ConfigError("mix: missing input file for source " + entry.name + ": " +
                        path.string());
    }
    ReadPolicy policy = policy_for(ctx, entry.partition, entry.name);
    sources.push_back(std::make_unique<FileDocSource>(
        std::vector<std::string>{path.string()}, policy));
    wired.push_back({entry, sources.back().get()});
  }

  InterleaveConfig icfg;
  icfg.token_budget = token_budget;
  icfg.seed = ctx.cfg.seed;
  icfg.exhaust = ctx.cfg.mix.exhaust_policy();
  Interleaver mixer(std::move(wired), icfg);

  std::uint64_t shard_index = 0;
  std::uint64_t in_shard = 0;
  std::vector<std::string> shard_paths;
  std::unique_ptr<DocumentWriter> writer;
  auto open_shard = [&] {
    char name[64];
    std::snprintf(name, sizeof(name), "mixed-%05llu.jsonl",
                  static_cast<unsigned long long>(shard_index++));
    shard_paths.push_back(ctx.out(name).string());
    writer = std::make_unique<DocumentWriter>(shard_paths.back());
    in_shard = 0;
  };
  open_shard();
  while (auto doc = mixer.next()) {
    if (in_shard >= ctx.cfg.mix.docs_per_shard) open_shard();
    writer->write(*doc);
    ++in_shard;
  }
  writer->flush();

  for (const auto& w : mixer.warnings()) std::cerr << "warning: " << w << "\n";

  // mix manifest: per-source token tallies plus the two-stage schedule
  nlohmann::ordered_json jm;
  jm["token_budget"] = token_budget;
  jm["total_tokens"] = mixer.state().total_tokens;
  jm["total_docs"] = mixer.state().total_docs;
  auto per_source = nlohmann::ordered_json::array();
  for (const auto& s : mixer.state().sources) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["weight_pct"] = s.weight;
    js["emitted_tokens"] = s.emitted_tokens;
    js["share_pct"] = mixer.state().total_tokens > 0
                          ? 100.0 * static_cast<double>(s.emitted_tokens) /
                                static_cast<double>(mixer.state().total_tokens)
                          : 0.0;
    js["epochs"] = s.epoch + 1;
    per_source.push_back(std::move(js));
  }
  jm["sources"] = std::move(per_source);
  jm["shards"] = shard_paths;
  {
    std::ofstream out(ctx.out("mix_manifest.json"));
    out << jm.dump(2) << "\n";
  }
  {
    auto plans = plan_schedule(spec, ctx.cfg.mix.total_tokens, ctx.cfg.mix.stage1_tokens);
    std::ofstream out(ctx.out("schedule.json"));
    out << schedule_to_json(plans) << "\n";
  }

  finish(ctx, "mix",
         {ctx.out("mix_manifest.json").string(), ctx.out("schedule.json").string()},
         {{"emitted_docs", static_cast<std::int64_t>(mixer.state().total_docs)},
          {"emitted_tokens", mixer.state().total_tokens},
          {"shards", static_cast<std::int64_t>(shard_paths.size())},
          {"exhausted_sources", static_cast<std::int64_t>(mixer.warnings().size())}});
  return 0;
}

// ---- leakage ----------------------------------------------------------------

int cmd_leakage(const CommonArgs& args, const std::string& benchmarks_glob,
                const std::string& adapter_cmd, const std::string& mock_adapter,
                const std::string& model_name) {
  auto ctx = make_context(args);
  if (benchmarks_glob.empty()) throw ConfigError("leakage requires --benchmarks <glob>");
  std::vector<LineError> errors;
  auto samples = load_benchmark_samples({benchmarks_glob}, &errors);
  if (samples.empty()) throw ConfigError("leakage: no benchmark samples loaded");

  ParaphraseConfig pcfg;
  pcfg.seed = ctx.cfg.seed;
  std::unique_ptr<ChatEndpoint> endpoint;
  bool needs_endpoint = false;
  for (const auto& s : samples) {
    if (s.options.empty()) needs_endpoint = true;
  }
  if (needs_endpoint) endpoint = make_endpoint(ctx.cfg.endpoint);
  auto built = build_paraphrases(samples, endpoint.get(), pcfg);
  save_paraphrase_pairs(built.pairs, ctx.out("paraphrases.jsonl").string());
  for (const auto& line : built.excluded) std::cerr << "excluded: " << line << "\n";

  std::unique_ptr<ModelAdapter> adapter;
  std::string effective_cmd =
      adapter_cmd.empty() ? ctx.cfg.leakage.adapter_command : adapter_cmd;
  if (!effective_cmd.empty()) {
    adapter = std::make_unique<SubprocessAdapter>(
        effective_cmd, model_name.empty() ? ctx.cfg.leakage.model_name : model_name);
  } else if (mock_adapter == "memorizer") {
    adapter = std::make_unique<MemorizerAdapter>(samples);
  } else if (mock_adapter == "random") {
    std::set<std::string> vocab_set;
    for (const auto& s : samples) {
      for (const auto& w : whitespace_split(s.canonical_text())) vocab_set.insert(w);
    }
    adapter = std::make_unique<UniformRandomAdapter>(
        std::vector<std::string>(vocab_set.begin(), vocab_set.end()), ctx.cfg.seed);
  } else {
    throw ConfigError("leakage: provide --adapter <command> or --mock-adapter "
                      "memorizer|random");
  }
  std::string reported_name = model_name.empty() ? adapter->name() : model_name;

  // bucket pairs by benchmark and split
  std::map<std::pair<BenchmarkId, Split>, std::vector<const ParaphrasePair*>> buckets;
  for (const auto& pair : built.pairs) {
    buckets[{pair.original.benchmark, pair.original.split}].push_back(&pair);
  }

  FivegramConfig fcfg;
  fcfg.cut_points = ctx.cfg.leakage.cut_points;
  DeltaReport report;
  for (const auto& [key, pairs] : buckets) {
    auto [benchmark, split] = key;
    std::vector<BenchmarkSample> originals, rewritten;
    for (const auto* p : pairs) {
      originals.push_back(p->original);
      rewritten.push_back(p->rewritten);
    }
    double d, d_prime;
    if (benchmark == BenchmarkId::MMLU) {
      // zero-shot letter extraction for MMLU, continuation accuracy elsewhere
      d = mmlu_zero_shot_score(*adapter, originals).score;
      d_prime = mmlu_zero_shot_score(*adapter, rewritten).score;
    } else {
      d = fivegram_accuracy(*adapter, originals, fcfg).score;
      d_prime = fivegram_accuracy(*adapter, rewritten, fcfg).score;
    }
    report.rows.push_back(
        {reported_name, benchmark, split, d_prime, d, compute_delta(d, d_prime)});
  }

  {
    std::ofstream out(ctx.out("delta_report.json"));
    out << report.to_json() << "\n";
  }
  std::cout << render_delta_table(report);

  finish(ctx, "leakage",
         {ctx.out("paraphrases.jsonl").string(), ctx.out("delta_report.json").string()},
         {{"samples", static_cast<std::int64_t>(samples.size())},
          {"pairs", static_cast<std::int64_t>(built.pairs.size())},
          {"excluded", static_cast<std::int64_t>(built.excluded.size())},
          {"rows", static_cast<std::int64_t>(report.rows.size())}});
  return 0;
}

// ---- report -----------------------------------------------------------------

int cmd_report(const std::string& report_path) {
  std::ifstream in(report_path);
  if (!in.is_open()) throw IoError("cannot open report: " + report_path);
  std::ostringstream os;
  os << in.rdbuf();
  auto report = DeltaReport::from_json(os.str());
  std::cout << render_delta_table(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textmill: corpus construction and decontamination pipeline"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommonArgs args;
  std::string default_source, default_category = "General";
  std::string sft_input, benchmarks_glob, input_dir;
  std::string adapter_cmd, mock_adapter, model_name, report_path;
  std::int64_t budget = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_output = true) {
    cmd->add_option("--config", args.config_path, "pipeline config JSON");
    cmd->add_option("--seed", args.seed, "global seed")->each([&](const std::string&) {
      args.seed_set = true;
    });
    cmd->add_option("--workers", args.workers, "parallel workers");
    cmd->add_option("--input", args.input, "input file glob(s)");
    if (needs_output) {
      cmd->add_option("--output", args.output_dir, "output directory")->required();
    }
    cmd->add_option("--mock-endpoint", args.mock_endpoint,
                    "file-backed mock endpoint fixture dir");
  };

  auto* clean = app.add_subcommand("clean", "heuristic cleaning producing D1");
  add_common(clean);
  clean->add_option("--source", default_source, "default source label");
  clean->add_option("--category", default_category, "default category label");

  auto* dedup = app.add_subcommand("dedup", "exact and near-duplicate removal");
  add_common(dedup);

  auto* synth = app.add_subcommand("synth", "LLM synthesis of D2 from seed topics");
  add_common(synth);

  auto* tasks = app.add_subcommand("tasks", "NLP-task data (D3): MCQ synthesis + SFT conversion");
  add_common(tasks);
  tasks->add_option("--sft-input", sft_input, "instruction-data JSONL glob");

  auto* decon = app.add_subcommand("decontaminate", "length filters + n-gram decontamination");
  add_common(decon);
  decon->add_option("--benchmarks", benchmarks_glob, "benchmark samples JSONL glob");

  auto* mix = app.add_subcommand("mix", "weighted interleave into the training stream");
  add_common(mix);
  mix->add_option("--input-dir", input_dir, "directory of <source>.jsonl inputs");
  mix->add_option("--budget", budget, "token budget for the mixed stream");

  auto* leakage = app.add_subcommand("leakage", "paraphrase-based leakage evaluation");
  add_common(leakage);
  leakage->add_option("--benchmarks", benchmarks_glob, "benchmark samples JSONL glob");
  leakage->add_option("--adapter", adapter_cmd, "model adapter subprocess command");
  leakage->add_option("--mock-adapter", mock_adapter, "memorizer|random");
  leakage->add_option("--model-name", model_name, "name for report rows");

  auto* report = app.add_subcommand("report", "render a delta report as a text table");
  report->add_option("--input", report_path, "delta report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (clean->parsed()) return cmd_clean(args, default_source, default_category);
    if (dedup->parsed()) return cmd_dedup(args);
    if (synth->parsed()) return cmd_synth(args);
    if (tasks->parsed()) return cmd_tasks(args, sft_input);
    if (decon->parsed()) return cmd_decontaminate(args, benchmarks_glob);
    if (mix->parsed()) return cmd_mix(args, input_dir, budget);
    if (leakage->parsed()) {
      return cmd_leakage(args, benchmarks_glob, adapter_cmd, mock_adapter, model_name);
    }
    if (report->parsed()) return cmd_report(report_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
