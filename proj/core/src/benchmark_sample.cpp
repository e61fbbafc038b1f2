#include "textmill/benchmark_sample.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/jsonl.hpp"

namespace textmill {

std::string_view to_string(BenchmarkId b) {
  switch (b) {
    case BenchmarkId::MMLU: return "MMLU";
    case BenchmarkId::ArcC: return "ARC-C";
    case BenchmarkId::TruthfulQA: return "TruthfulQA";
    case BenchmarkId::Winogrande: return "Winogrande";
    case BenchmarkId::Hellaswag: return "Hellaswag";
    case BenchmarkId::Gsm8k: return "Gsm8k";
  }
  return "MMLU";
}

std::string_view to_string(Split s) {
  return s == Split::Train ? "train" : "test";
}

BenchmarkId benchmark_from_string(std::string_view s) {
  for (BenchmarkId b : kAllBenchmarks) {
    if (to_string(b) == s) return b;
  }
  throw ConfigError("unknown benchmark: " + std::string(s));
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw ConfigError("unknown split: " + std::string(s));
}

std::string BenchmarkSample::canonical_text() const {
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

bool BenchmarkSample::valid(std::string* why) const {
  if (question.empty()) {
    if (why) *why = "empty question";
    return false;
  }
  if (answer.empty()) {
    if (why) *why = "empty answer";
    return false;
  }
  if (!options.empty() &&
      std::find(options.begin(), options.end(), answer) == options.end()) {
    if (why) *why = "answer not among options";
    return false;
  }
  return true;
}

std::string to_jsonl_line(const BenchmarkSample& s) {
  nlohmann::ordered_json j;
  j["benchmark"] = std::string(to_string(s.benchmark));
  j["split"] = std::string(to_string(s.split));
  j["question"] = s.question;
  if (!s.options.empty()) j["options"] = s.options;
  j["answer"] = s.answer;
  return j.dump();
}

std::vector<BenchmarkSample> load_benchmark_samples(const std::vector<std::string>& globs,
                                                    std::vector<LineError>* errors) {
  std::vector<BenchmarkSample> samples;
  for (const auto& path : expand_globs(globs)) {
    std::ifstream in(path, std::ios::in | std::ios::binary);
    if (!in.is_open()) throw IoError("cannot open benchmark file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto fail = [&](std::string msg) {
        if (!errors) {
          throw IoError(path + ":" + std::to_string(line_no) + ": " + msg);
        }
        errors->push_back({path, line_no, std::move(msg)});
      };
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        fail("not a JSON object");
        continue;
      }
      try {
        BenchmarkSample s;
        s.benchmark = benchmark_from_string(j.at("benchmark").get<std::string>());
        s.split = split_from_string(j.at("split").get<std::string>());
        s.question = j.at("question").get<std::string>();
        if (j.contains("options") && !j["options"].is_null()) {
          s.options = j.at("options").get<std::vector<std::string>>();
        }
        s.answer = j.at("answer").get<std::string>();
        std::string why;
        if (!s.valid(&why)) {
          fail("invalid sample: " + why);
          continue;
        }
        samples.push_back(std::move(s));
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
  }
  return samples;
}

void save_benchmark_samples(const std::vector<BenchmarkSample>& samples,
                            const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out.is_open()) throw IoError("cannot write benchmark file: " + path);
  for (const auto& s : samples) out << to_jsonl_line(s) << '\n';
}

}  // namespace textmill
