#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "textmill/cluster.hpp"
#include "textmill/document.hpp"
#include "textmill/llm_client.hpp"
#include "textmill/prompt.hpp"

namespace textmill {

struct SynthesisJob {
  std::string job_id;
  std::string template_id;
  std::uint64_t seed_doc_id = 0;
  std::string rendered_prompt;   // no unbound placeholders by construction
  std::uint64_t target_tokens = 0;
};

enum class GenStatus { Ok, ParseError, Refused, TransportError };

std::string_view to_string(GenStatus s);
GenStatus gen_status_from_string(std::string_view s);

struct GenerationRecord {
  std::string job_id;
  std::string response_text;
  std::string model_id;
  int attempt = 0;
  GenStatus status = GenStatus::Ok;
};

std::string to_jsonl_line(const GenerationRecord& r);
std::vector<GenerationRecord> load_generation_records(const std::string& path);

// ---- seed sampling ----------------------------------------------------------

// Uniform without replacement inside each topic, round-robin across the
// topics of a category, deterministic for a fixed seed. Quotas are keyed by
// category; a quota above the category's availability throws ConfigError
// naming the category.
std::vector<std::uint64_t> sample_seeds(const std::vector<Document>& docs,
                                        const std::vector<TopicAssignment>& assignments,
                                        const std::map<std::string, std::size_t>& quotas,
                                        std::uint64_t seed);

// Per-category synthetic token budgets, in billions; the shipped ratios that
// drive job planning (scaled by a global budget).
struct CategoryQuota {
  std::string seed_source;
  std::string category;
  double synthetic_tokens_billions = 0.0;
};
const std::vector<CategoryQuota>& default_synthesis_quotas();

// Turns seed documents into rendered jobs until each category's token quota
// is covered at target_tokens_per_job per job. Deterministic.
struct JobPlanConfig {
  std::uint64_t target_tokens_per_job = 1200;
  // Scales the quota table: budget_tokens_total distributed by quota ratios.
  // 0 means one job per seed document (fixture-scale runs).
  std::uint64_t budget_tokens_total = 0;
};

std::vector<SynthesisJob> plan_jobs(const std::vector<Document>& seed_docs,
                                    const PromptTemplate& tmpl,
                                    const JobPlanConfig& cfg);

// ---- batched generation ------------------------------------------------------

struct RetryPolicy {
  int max_attempts = 5;
  int initial_backoff_ms = 500;
  double backoff_factor = 2.0;
  bool sleep = true;  // tests disable the actual waiting
};

struct SynthesisRunStats {
  std::size_t submitted = 0;    // jobs sent to the endpoint this run
  std::size_t completed = 0;    // terminal records written this run
  std::size_t resumed = 0;      // jobs skipped because the checkpoint had them
  std::size_t ok = 0;
  std::size_t refused = 0;
  std::size_t transport_error = 0;
};

// Every job yields exactly one terminal record appended to checkpoint_path
// (line-delimited JSON, the resume log and the output). A rerun with the
// same checkpoint never re-submits completed jobs. Transport failures are
// retried with exponential backoff up to max_attempts and never abort the
// batch. Bounded in-flight pool of `workers` requests.
SynthesisRunStats run_synthesis(const std::vector<SynthesisJob>& jobs,
                                ChatEndpoint& endpoint, const RetryPolicy& retry,
                                const std::string& checkpoint_path, int workers = 1,
                                const std::function<void(const GenerationRecord&)>&
                                    on_record = nullptr);

// ---- NLP-task data -----------------------------------------------------------

enum class NlpTask { QA, MultiChoiceQA, Cloze, Summarization, Other };
enum class TaskOrigin { Synthetic, ConvertedSft };

std::string_view to_string(NlpTask t);
std::string_view to_string(TaskOrigin o);

struct NlpTaskSample {
  NlpTask task = NlpTask::QA;
  std::string question;
  std::vector<std::string> options;
  std::string answer;
  TaskOrigin origin = TaskOrigin::Synthetic;

  bool valid(std::string* why = nullptr) const;
  std::string rendered_text() const;  // natural-language form for documents
};

std::string to_jsonl_line(const NlpTaskSample& s);

struct McqParseError {
  std::string message;
};

// Extracts the first well-formed {"question","options","answer"} object from
// the response, tolerating prose before and after it. Rejects samples whose
// answer is not among the options.
std::variant<NlpTaskSample, McqParseError> parse_mcq(const GenerationRecord& r);

struct InstructionRecord {
  std::string instruction;
  std::string response;
};

struct SftRejection {
  std::string message;
};

// {instruction, response} -> QA sample with origin converted_sft.
std::variant<NlpTaskSample, SftRejection> convert_sft(const InstructionRecord& rec);

// Parses one line of a generic instruction-data export. Accepts
// instruction/response field pairs (also question/answer, prompt/completion).
std::variant<InstructionRecord, SftRejection> parse_instruction_line(std::string_view line);

}  // namespace textmill
