#include "textmill/synth.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"

namespace textmill {

std::string_view to_string(GenStatus s) {
  switch (s) {
    case GenStatus::Ok: return "ok";
    case GenStatus::ParseError: return "parse_error";
    case GenStatus::Refused: return "refused";
    case GenStatus::TransportError: return "transport_error";
  }
  return "ok";
}

GenStatus gen_status_from_string(std::string_view s) {
  if (s == "ok") return GenStatus::Ok;
  if (s == "parse_error") return GenStatus::ParseError;
  if (s == "refused") return GenStatus::Refused;
  if (s == "transport_error") return GenStatus::TransportError;
  throw ConfigError("unknown generation status: " + std::string(s));
}

std::string to_jsonl_line(const GenerationRecord& r) {
  nlohmann::ordered_json j;
  j["job_id"] = r.job_id;
  j["response_text"] = r.response_text;
  j["model_id"] = r.model_id;
  j["attempt"] = r.attempt;
  j["status"] = std::string(to_string(r.status));
  return j.dump();
}

std::vector<GenerationRecord> load_generation_records(const std::string& path) {
  std::vector<GenerationRecord> records;
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in.is_open()) return records;  // nonexistent checkpoint = fresh run
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;  // torn final line from an interrupted run
    try {
      GenerationRecord r;
      r.job_id = j.at("job_id").get<std::string>();
      r.response_text = j.value("response_text", "");
      r.model_id = j.value("model_id", "");
      r.attempt = j.value("attempt", 0);
      r.status = gen_status_from_string(j.value("status", "ok"));
      records.push_back(std::move(r));
    } catch (const std::exception&) {
      continue;
    }
  }
  return records;
}

// ---- seed sampling ----------------------------------------------------------

std::vector<std::uint64_t> sample_seeds(const std::vector<Document>& docs,
                                        const std::vector<TopicAssignment>& assignments,
                                        const std::map<std::string, std::size_t>& quotas,
                                        std::uint64_t seed) {
  std::unordered_map<std::uint64_t, int> topic_of;
  topic_of.reserve(assignments.size() * 2);
  for (const auto& a : assignments) topic_of[a.doc_id] = a.topic_id;

  // category -> topic -> doc ids in stream order
  std::map<std::string, std::map<int, std::vector<std::uint64_t>>> grouped;
  for (const auto& doc : docs) {
    auto it = topic_of.find(doc.id);
    int topic = it == topic_of.end() ? 0 : it->second;
    grouped[doc.category][topic].push_back(doc.id);
  }

  std::vector<std::uint64_t> selected;
  for (const auto& [category, quota] : quotas) {
    if (quota == 0) continue;
    auto git = grouped.find(category);
    std::size_t available = 0;
    if (git != grouped.end()) {
      for (const auto& [topic, ids] : git->second) available += ids.size();
    }
    if (quota > available) {
      throw ConfigError("seed quota for category '" + category + "' (" +
                        std::to_string(quota) + ") exceeds available documents (" +
                        std::to_string(available) + ")");
    }

    // Shuffle inside each topic, then round-robin across topics.
    std::vector<std::vector<std::uint64_t>> pools;
    for (auto& [topic, ids] : git->second) {
      std::vector<std::uint64_t> pool = ids;
      std::mt19937_64 rng(mix64(seed ^ hash64(category) ^
                                static_cast<std::uint64_t>(topic) * 0x9e3779b97f4a7c15ull));
      for (std::size_t i = pool.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(to_unit_interval(rng()) *
                                                 static_cast<double>(i));
        if (j >= i) j = i - 1;
        std::swap(pool[i - 1], pool[j]);
      }
      pools.push_back(std::move(pool));
    }
    std::vector<std::size_t> cursor(pools.size(), 0);
    std::size_t taken = 0;
    while (taken < quota) {
      bool progressed = false;
      for (std::size_t t = 0; t < pools.size() && taken < quota; ++t) {
        if (cursor[t] < pools[t].size()) {
          selected.push_back(pools[t][cursor[t]++]);
          ++taken;
          progressed = true;
        }
      }
      if (!progressed) break;  // unreachable given availability check
    }
  }
  return selected;
}

const std::vector<CategoryQuota>& default_synthesis_quotas() {
  static const std::vector<CategoryQuota> quotas = {
      {"RedPajamaC4", "Web", 4.5},
      {"RedPajamaWiki", "Wiki", 8.16},
      {"HackerNews", "News", 4.5},
      {"RedPajamaArxiv", "Academic", 4.62},
      {"FanFics", "Books", 4.08},
      {"Pile-of-law", "Law", 2.16},
      {"The-Stack,StackOverFlow", "Code", 0.06},
      {"Open-Web-Math", "Math", 0.12},
  };
  return quotas;
}

std::vector<SynthesisJob> plan_jobs(const std::vector<Document>& seed_docs,
                                    const PromptTemplate& tmpl,
                                    const JobPlanConfig& cfg) {
  std::vector<SynthesisJob> jobs;
  if (seed_docs.empty()) return jobs;

  std::size_t n_jobs;
  if (cfg.budget_tokens_total == 0) {
    n_jobs = seed_docs.size();
  } else {
    n_jobs = static_cast<std::size_t>(
        (cfg.budget_tokens_total + cfg.target_tokens_per_job - 1) /
        std::max<std::uint64_t>(1, cfg.target_tokens_per_job));
  }

  auto placeholders = template_placeholders(tmpl.body);
  jobs.reserve(n_jobs);
  for (std::size_t i = 0; i < n_jobs; ++i) {
    const Document& seed = seed_docs[i % seed_docs.size()];
    std::map<std::string, std::string> bindings;
    for (const auto& name : placeholders) {
      if (name.empty() || name == "content") {
        bindings[name] = seed.text;
      } else if (name == "topic") {
        bindings[name] = seed.category.empty() ? tmpl.seed_category : seed.category;
      } else if (name == "examples") {
        bindings[name] = seed.meta.count("examples") ? seed.meta.at("examples") : "";
      } else {
        bindings[name] = seed.meta.count(name) ? seed.meta.at(name) : "";
      }
    }
    SynthesisJob job;
    job.template_id = tmpl.template_id;
    job.seed_doc_id = seed.id;
    job.rendered_prompt = render_prompt(tmpl, bindings);
    job.target_tokens = cfg.target_tokens_per_job;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(
                      hash_combine(hash64(tmpl.template_id),
                                   hash_combine(seed.id, static_cast<std::uint64_t>(i)))));
    job.job_id = tmpl.template_id + "-" + buf;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

// ---- batched generation ------------------------------------------------------

SynthesisRunStats run_synthesis(const std::vector<SynthesisJob>& jobs,
                                ChatEndpoint& endpoint, const RetryPolicy& retry,
                                const std::string& checkpoint_path, int workers,
                                const std::function<void(const GenerationRecord&)>&
                                    on_record) {
  SynthesisRunStats stats;

  std::unordered_set<std::string> done;
  for (const auto& r : load_generation_records(checkpoint_path)) {
    done.insert(r.job_id);
  }

  std::vector<const SynthesisJob*> pending;
  std::unordered_set<std::string> seen_ids;
  for (const auto& job : jobs) {
    if (!seen_ids.insert(job.job_id).second) {
      throw ConfigError("duplicate job_id in batch: " + job.job_id);
    }
    if (done.count(job.job_id)) {
      ++stats.resumed;
    } else {
      pending.push_back(&job);
    }
  }

  std::ofstream out(checkpoint_path, std::ios::app);
  if (!out.is_open()) throw IoError("cannot open checkpoint: " + checkpoint_path);
  std::mutex write_mu;

  auto run_one = [&](const SynthesisJob& job) {
    GenerationRecord rec;
    rec.job_id = job.job_id;
    rec.model_id = endpoint.model_id();
    int backoff_ms = retry.initial_backoff_ms;
    for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
      rec.attempt = attempt;
      ChatResult res = endpoint.complete(job.job_id, job.rendered_prompt);
      if (res.kind == ChatResult::Kind::Ok) {
        rec.status = GenStatus::Ok;
        rec.response_text = res.text;
        return rec;
      }
      if (res.kind == ChatResult::Kind::Refused) {
        rec.status = GenStatus::Refused;
        rec.response_text.clear();
        return rec;
      }
      rec.status = GenStatus::TransportError;
      if (attempt < retry.max_attempts && retry.sleep) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
        backoff_ms = static_cast<int>(std::lround(backoff_ms * retry.backoff_factor));
      }
    }
    return rec;
  };

  auto commit = [&](const GenerationRecord& rec) {
    std::lock_guard<std::mutex> lock(write_mu);
    out << to_jsonl_line(rec) << "\n";
    out.flush();
    ++stats.completed;
    switch (rec.status) {
      case GenStatus::Ok: ++stats.ok; break;
      case GenStatus::Refused: ++stats.refused; break;
      case GenStatus::TransportError: ++stats.transport_error; break;
      case GenStatus::ParseError: break;
    }
    if (on_record) on_record(rec);
  };

  stats.submitted = pending.size();
  if (workers <= 1 || pending.size() < 2) {
    for (const SynthesisJob* job : pending) commit(run_one(*job));
  } else {
    std::size_t num_threads =
        std::min<std::size_t>(static_cast<std::size_t>(workers), pending.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(num_threads);
    for (std::size_t t = 0; t < num_threads; ++t) {
      threads.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= pending.size()) break;
          commit(run_one(*pending[i]));
        }
      });
    }
    for (auto& th : threads) th.join();
  }
  return stats;
}

// ---- NLP-task data -----------------------------------------------------------

std::string_view to_string(NlpTask t) {
  switch (t) {
    case NlpTask::QA: return "QA";
    case NlpTask::MultiChoiceQA: return "MultiChoiceQA";
    case NlpTask::Cloze: return "Cloze";
    case NlpTask::Summarization: return "Summarization";
    case NlpTask::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(TaskOrigin o) {
  return o == TaskOrigin::Synthetic ? "synthetic" : "converted_sft";
}

bool NlpTaskSample::valid(std::string* why) const {
  if (question.empty()) {
    if (why) *why = "empty question";
    return false;
  }
  if (answer.empty()) {
    if (why) *why = "empty answer";
    return false;
  }
  if (task == NlpTask::MultiChoiceQA) {
    if (options.empty()) {
      if (why) *why = "MultiChoiceQA requires options";
      return false;
    }
    if (std::find(options.begin(), options.end(), answer) == options.end()) {
      if (why) *why = "answer not among options";
      return false;
    }
  }
  return true;
}

std::string NlpTaskSample::rendered_text() const {
  std::string out = question;
  char label = 'A';
  for (const auto& opt : options) {
    out += '\n';
    out += label;
    out += ") ";
    out += opt;
    ++label;
  }
  out += "\nanswer: ";
  out += answer;
  return out;
}

std::string to_jsonl_line(const NlpTaskSample& s) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(s.task));
  j["question"] = s.question;
  if (!s.options.empty()) j["options"] = s.options;
  j["answer"] = s.answer;
  j["origin"] = std::string(to_string(s.origin));
  return j.dump();
}

namespace {

// Finds the end of the balanced JSON object starting at text[start] ('{'),
// honoring string literals and escapes. Returns npos if unbalanced.
std::size_t balanced_object_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::variant<NlpTaskSample, McqParseError> parse_mcq(const GenerationRecord& r) {
  if (r.status != GenStatus::Ok) {
    return McqParseError{"record status is not ok"};
  }
  const std::string& text = r.response_text;
  for (std::size_t pos = text.find('{'); pos != std::string::npos;
       pos = text.find('{', pos + 1)) {
    std::size_t end = balanced_object_end(text, pos);
    if (end == std::string::npos) break;
    nlohmann::json j =
        nlohmann::json::parse(text.substr(pos, end - pos + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (!j.contains("question") || !j.contains("options") || !j.contains("answer")) {
      continue;
    }
    if (!j["question"].is_string() || !j["options"].is_array() ||
        !j["answer"].is_string()) {
      continue;
    }
    NlpTaskSample s;
    s.task = NlpTask::MultiChoiceQA;
    s.origin = TaskOrigin::Synthetic;
    s.question = j["question"].get<std::string>();
    bool options_ok = true;
    for (const auto& opt : j["options"]) {
      if (!opt.is_string()) {
        options_ok = false;
        break;
      }
      s.options.push_back(opt.get<std::string>());
    }
    if (!options_ok) continue;
    s.answer = j["answer"].get<std::string>();
    std::string why;
    if (!s.valid(&why)) return McqParseError{"invalid sample: " + why};
    return s;
  }
  return McqParseError{"no parseable question/options/answer object in response"};
}

std::variant<InstructionRecord, SftRejection> parse_instruction_line(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return SftRejection{"not a JSON object"};
  }
  static constexpr std::pair<const char*, const char*> kFieldPairs[] = {
      {"instruction", "response"},
      {"question", "answer"},
      {"prompt", "completion"},
  };
  for (const auto& [qf, af] : kFieldPairs) {
    if (j.contains(qf) && j.contains(af) && j[qf].is_string() && j[af].is_string()) {
      return InstructionRecord{j[qf].get<std::string>(), j[af].get<std::string>()};
    }
  }
  return SftRejection{"missing instruction/response fields"};
}

std::variant<NlpTaskSample, SftRejection> convert_sft(const InstructionRecord& rec) {
  if (rec.instruction.empty()) return SftRejection{"empty instruction"};
  if (rec.response.empty()) return SftRejection{"empty response"};
  NlpTaskSample s;
  s.task = NlpTask::QA;
  s.origin = TaskOrigin::ConvertedSft;
  s.question = rec.instruction;
  s.answer = rec.response;
  return s;
}

}  // namespace textmill
