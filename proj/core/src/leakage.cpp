#include "textmill/leakage.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/jsonl.hpp"
#include "textmill/text.hpp"

namespace textmill {

std::string_view to_string(ParaphraseMethod m) {
  return m == ParaphraseMethod::SentenceRewrite ? "sentence_rewrite" : "option_reorder";
}

namespace {

nlohmann::ordered_json sample_to_json(const BenchmarkSample& s) {
  nlohmann::ordered_json j;
  j["benchmark"] = std::string(to_string(s.benchmark));
  j["split"] = std::string(to_string(s.split));
  j["question"] = s.question;
  if (!s.options.empty()) j["options"] = s.options;
  j["answer"] = s.answer;
  return j;
}

BenchmarkSample sample_from_json(const nlohmann::json& j) {
  BenchmarkSample s;
  s.benchmark = benchmark_from_string(j.at("benchmark").get<std::string>());
  s.split = split_from_string(j.at("split").get<std::string>());
  s.question = j.at("question").get<std::string>();
  if (j.contains("options") && !j["options"].is_null()) {
    s.options = j.at("options").get<std::vector<std::string>>();
  }
  s.answer = j.at("answer").get<std::string>();
  return s;
}

}  // namespace

std::string to_jsonl_line(const ParaphrasePair& p) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(p.method));
  j["original"] = sample_to_json(p.original);
  j["rewritten"] = sample_to_json(p.rewritten);
  return j.dump();
}

std::vector<ParaphrasePair> load_paraphrase_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in.is_open()) throw IoError("cannot open paraphrase file: " + path);
  std::vector<ParaphrasePair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    ParaphrasePair p;
    p.method = j.at("method").get<std::string>() == "option_reorder"
                   ? ParaphraseMethod::OptionReorder
                   : ParaphraseMethod::SentenceRewrite;
    p.original = sample_from_json(j.at("original"));
    p.rewritten = sample_from_json(j.at("rewritten"));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void save_paraphrase_pairs(const std::vector<ParaphrasePair>& pairs,
                           const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out.is_open()) throw IoError("cannot write paraphrase file: " + path);
  for (const auto& p : pairs) out << to_jsonl_line(p) << '\n';
}

// ---- subprocess adapter --------------------------------------------------------

SubprocessAdapter::SubprocessAdapter(std::string command, std::string display_name)
    : command_(std::move(command)),
      name_(display_name.empty() ? command_ : std::move(display_name)) {
  start();
}

void SubprocessAdapter::start() {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw IoError("adapter: pipe() failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw IoError("adapter: fork() failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

SubprocessAdapter::~SubprocessAdapter() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

std::vector<std::string> SubprocessAdapter::generate(
    const std::vector<std::string>& prefix, std::size_t n_tokens) {
  nlohmann::ordered_json req;
  req["prefix"] = prefix;
  req["n_tokens"] = n_tokens;
  std::string line = req.dump() + "\n";
  ssize_t off = 0;
  while (off < static_cast<ssize_t>(line.size())) {
    ssize_t n = write(to_child_, line.data() + off, line.size() - off);
    if (n <= 0) throw IoError("adapter: write to subprocess failed");
    off += n;
  }
  std::string resp;
  char c;
  while (true) {
    ssize_t n = read(from_child_, &c, 1);
    if (n <= 0) throw IoError("adapter: subprocess closed its output");
    if (c == '\n') break;
    resp.push_back(c);
  }
  nlohmann::json j = nlohmann::json::parse(resp, nullptr, false);
  if (j.is_discarded() || !j.contains("tokens") || !j["tokens"].is_array()) {
    throw IoError("adapter: bad response line: " + resp);
  }
  return j["tokens"].get<std::vector<std::string>>();
}

// ---- mock adapters -------------------------------------------------------------

MemorizerAdapter::MemorizerAdapter(const std::vector<BenchmarkSample>& known) {
  texts_.reserve(known.size());
  for (const auto& s : known) texts_.push_back(whitespace_split(s.canonical_text()));
}

std::vector<std::string> MemorizerAdapter::generate(
    const std::vector<std::string>& prefix, std::size_t n_tokens) {
  for (const auto& text : texts_) {
    if (prefix.size() > text.size()) continue;
    if (!std::equal(prefix.begin(), prefix.end(), text.begin())) continue;
    std::vector<std::string> out;
    for (std::size_t i = prefix.size(); i < text.size() && out.size() < n_tokens; ++i) {
      out.push_back(text[i]);
    }
    out.resize(n_tokens, "<pad>");
    return out;
  }
  return std::vector<std::string>(n_tokens, "<unk>");
}

UniformRandomAdapter::UniformRandomAdapter(std::vector<std::string> vocabulary,
                                           std::uint64_t seed)
    : vocab_(std::move(vocabulary)), state_(mix64(seed ^ 0x72616e646f6dull)) {
  if (vocab_.empty()) vocab_.push_back("<unk>");
}

std::vector<std::string> UniformRandomAdapter::generate(
    const std::vector<std::string>&, std::size_t n_tokens) {
  std::vector<std::string> out;
  out.reserve(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) {
    state_ = mix64(state_ + 0x9e3779b97f4a7c15ull);
    out.push_back(vocab_[state_ % vocab_.size()]);
  }
  return out;
}

// ---- paraphrase construction -----------------------------------------------------

ParaphraseBuildResult build_paraphrases(const std::vector<BenchmarkSample>& samples,
                                        ChatEndpoint* endpoint,
                                        const ParaphraseConfig& cfg) {
  ParaphraseBuildResult result;
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    const BenchmarkSample& original = samples[idx];

    if (!original.options.empty()) {
      // Deterministic seeded reorder; the answer keeps its identity (same
      // option text), retried until the arrangement actually changes when a
      // different arrangement exists.
      BenchmarkSample rewritten = original;
      std::uint64_t state =
          mix64(cfg.seed ^ hash64(original.canonical_text()) ^ idx);
      bool distinct = std::adjacent_find(original.options.begin(), original.options.end(),
                                         std::not_equal_to<>()) != original.options.end();
      for (int attempt = 0; attempt < 16; ++attempt) {
        std::vector<std::string> opts = original.options;
        for (std::size_t i = opts.size(); i > 1; --i) {
          state = mix64(state + 0x9e3779b97f4a7c15ull);
          std::size_t j = state % i;
          std::swap(opts[i - 1], opts[j]);
        }
        rewritten.options = std::move(opts);
        if (!distinct || rewritten.options != original.options) break;
      }
      result.pairs.push_back({original, rewritten, ParaphraseMethod::OptionReorder});
      continue;
    }

    if (!endpoint) {
      result.excluded.push_back("sample " + std::to_string(idx) +
                                ": no endpoint for sentence rewrite");
      continue;
    }
    bool done = false;
    for (int attempt = 1; attempt <= cfg.max_attempts && !done; ++attempt) {
      std::string prompt = cfg.rewrite_prompt;
      auto pos = prompt.find("{content}");
      if (pos != std::string::npos) {
        prompt.replace(pos, 9, original.question);
      } else {
        prompt += "\n" + original.question;
      }
      ChatResult res = endpoint->complete("rewrite-" + std::to_string(idx), prompt);
      if (res.kind != ChatResult::Kind::Ok) continue;
      BenchmarkSample rewritten = original;
      rewritten.question = res.text;
      std::string why;
      if (!rewritten.valid(&why)) continue;
      result.pairs.push_back({original, rewritten, ParaphraseMethod::SentenceRewrite});
      done = true;
    }
    if (!done) {
      result.excluded.push_back("sample " + std::to_string(idx) +
                                ": rewrite failed validation after " +
                                std::to_string(cfg.max_attempts) + " attempts");
    }
  }
  return result;
}

// ---- scoring ---------------------------------------------------------------------

FivegramResult fivegram_accuracy(ModelAdapter& model,
                                 const std::vector<BenchmarkSample>& samples,
                                 const FivegramConfig& cfg) {
  FivegramResult result;
  const std::size_t gram = static_cast<std::size_t>(cfg.gram);
  for (const auto& sample : samples) {
    auto words = whitespace_split(sample.canonical_text());
    if (words.size() < 2 * gram) {
      ++result.skipped;
      continue;
    }
    ++result.evaluated;
    const std::size_t lo = (words.size() + 1) / 2;  // cuts start at mid-text
    const std::size_t hi = words.size() - gram;
    for (int k = 0; k < cfg.cut_points; ++k) {
      std::size_t cut =
          cfg.cut_points == 1
              ? lo
              : lo + static_cast<std::size_t>(
                         std::llround(static_cast<double>(k) *
                                      static_cast<double>(hi - lo) /
                                      static_cast<double>(cfg.cut_points - 1)));
      std::vector<std::string> prefix(words.begin(),
                                      words.begin() + static_cast<std::ptrdiff_t>(cut));
      auto generated = model.generate(prefix, gram);
      ++result.trials;
      if (generated.size() < gram) continue;
      bool hit = true;
      for (std::size_t g = 0; g < gram; ++g) {
        if (generated[g] != words[cut + g]) {
          hit = false;
          break;
        }
      }
      if (hit) ++result.hits;
    }
  }
  result.score = result.trials == 0
                     ? 0.0
                     : 100.0 * static_cast<double>(result.hits) /
                           static_cast<double>(result.trials);
  return result;
}

double compute_delta(double d_original, double d_rewritten) {
  return d_original - d_rewritten;
}

MmluResult mmlu_zero_shot_score(ModelAdapter& model,
                                const std::vector<BenchmarkSample>& samples,
                                std::size_t max_tokens) {
  MmluResult result;
  for (const auto& sample : samples) {
    if (sample.options.empty()) {
      throw ConfigError("mmlu_zero_shot_score: sample has no options");
    }
    auto gold_it =
        std::find(sample.options.begin(), sample.options.end(), sample.answer);
    if (gold_it == sample.options.end()) {
      throw ConfigError("mmlu_zero_shot_score: answer not among options");
    }
    char gold_letter = static_cast<char>(
        'a' + std::distance(sample.options.begin(), gold_it));

    std::string prompt = sample.question;
    char label = 'A';
    for (const auto& opt : sample.options) {
      prompt += '\n';
      prompt += label;
      prompt += ") ";
      prompt += opt;
      ++label;
    }
    auto generated = model.generate(whitespace_split(prompt), max_tokens);

    ++result.total;
    char first = 0;
    for (const auto& token : generated) {
      for (char c : token) {
        if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
          first = c;
          break;
        }
      }
      if (first) break;
    }
    if (!first) continue;  // empty generation counts incorrect
    if (first >= 'A' && first <= 'Z') first = static_cast<char>(first - 'A' + 'a');
    if (first == gold_letter) ++result.correct;
  }
  result.score = result.total == 0
                     ? 0.0
                     : 100.0 * static_cast<double>(result.correct) /
                           static_cast<double>(result.total);
  return result;
}

// ---- report ----------------------------------------------------------------------

std::string DeltaReport::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["benchmark"] = std::string(to_string(r.benchmark));
    j["split"] = std::string(to_string(r.split));
    j["d_prime"] = r.d_prime;
    j["d"] = r.d;
    j["delta"] = r.delta;
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["rows"] = std::move(arr);
  return root.dump(2);
}

DeltaReport DeltaReport::from_json(const std::string& json_text) {
  nlohmann::json root = nlohmann::json::parse(json_text);
  DeltaReport report;
  for (const auto& j : root.at("rows")) {
    DeltaRow r;
    r.model = j.at("model").get<std::string>();
    r.benchmark = benchmark_from_string(j.at("benchmark").get<std::string>());
    r.split = split_from_string(j.at("split").get<std::string>());
    r.d_prime = j.at("d_prime").get<double>();
    r.d = j.at("d").get<double>();
    r.delta = j.at("delta").get<double>();
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::string format_score(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

namespace {

const DeltaRow* find_row(const DeltaReport& report, const std::string& model,
                         BenchmarkId benchmark, Split split) {
  for (const auto& r : report.rows) {
    if (r.model == model && r.benchmark == benchmark && r.split == split) return &r;
  }
  return nullptr;
}

std::string triple_or_dash(const DeltaRow* row) {
  if (!row) return "-";
  return format_score(row->d_prime) + ", " + format_score(row->d) + ", " +
         format_score(row->delta);
}

}  // namespace

std::string format_row_scores(const DeltaReport& report, const std::string& model,
                              BenchmarkId benchmark) {
  const DeltaRow* train = find_row(report, model, benchmark, Split::Train);
  const DeltaRow* test = find_row(report, model, benchmark, Split::Test);
  return triple_or_dash(train) + " | " + triple_or_dash(test);
}

std::string render_delta_table(const DeltaReport& report) {
  // stable model order: first appearance
  std::vector<std::string> models;
  for (const auto& r : report.rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) {
      models.push_back(r.model);
    }
  }
  std::ostringstream os;
  os << "Task        Model            D'_train, D_train, delta_train | D'_test, "
        "D_test, delta_test\n";
  for (BenchmarkId b : kAllBenchmarks) {
    bool any = false;
    for (const auto& model : models) {
      if (!find_row(report, model, b, Split::Train) &&
          !find_row(report, model, b, Split::Test)) {
        continue;
      }
      any = true;
      char line[256];
      std::snprintf(line, sizeof(line), "%-11s %-16s %s",
                    std::string(to_string(b)).c_str(), model.c_str(),
                    format_row_scores(report, model, b).c_str());
      os << line << "\n";
    }
    if (any) os << "\n";
  }
  return os.str();
}

}  // namespace textmill
