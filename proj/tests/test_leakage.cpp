#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "testutil.hpp"
#include "textmill/leakage.hpp"
#include "textmill/text.hpp"

using namespace textmill;

namespace {

// Answers with the gold letter of whichever known sample the prompt opens with.
class AnswerKeyAdapter final : public ModelAdapter {
 public:
  explicit AnswerKeyAdapter(const std::vector<BenchmarkSample>& samples) {
    for (const auto& s : samples) {
      auto words = whitespace_split(s.question);
      if (words.empty()) continue;
      std::size_t gold = 0;
      for (std::size_t i = 0; i < s.options.size(); ++i) {
        if (s.options[i] == s.answer) gold = i;
      }
      key_[words[0]] = std::string(1, static_cast<char>('A' + gold));
    }
  }
  std::vector<std::string> generate(const std::vector<std::string>& prefix,
                                    std::size_t n) override {
    std::string letter = "Z";
    if (!prefix.empty() && key_.count(prefix[0])) letter = key_.at(prefix[0]);
    std::vector<std::string> out(n, ".");
    if (n > 0) out[0] = letter;
    return out;
  }
  std::string name() const override { return "answer-key"; }

 private:
  std::map<std::string, std::string> key_;
};

std::filesystem::path mock_dir(const std::string& name, const std::string& config) {
  auto dir = std::filesystem::temp_directory_path() / ("textmill_leak_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "mock.json");
  out << config;
  return dir;
}

}  // namespace

TEST_CASE("compute_delta reproduces reference pairs and is antisymmetric") {
  CHECK(compute_delta(66.57, 31.56) == doctest::Approx(35.01).epsilon(1e-9));
  CHECK(compute_delta(7.24, 7.76) == doctest::Approx(-0.52).epsilon(1e-9));
  CHECK(compute_delta(12.5, 12.5) == 0.0);
  for (double a : {0.0, 3.77, 66.57, 100.0}) {
    for (double b : {0.0, 4.51, 39.74, 100.0}) {
      CHECK(compute_delta(a, b) == doctest::Approx(-compute_delta(b, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("option_reorder keeps the option multiset and the answer's identity") {
  auto samples = testutil::benchmark_fixture(301, 2, 20);
  std::vector<BenchmarkSample> mcq;
  for (const auto& s : samples) {
    if (!s.options.empty()) mcq.push_back(s);
  }
  REQUIRE_FALSE(mcq.empty());

  ParaphraseConfig cfg;
  cfg.seed = 5;
  auto built = build_paraphrases(mcq, nullptr, cfg);
  CHECK(built.pairs.size() == mcq.size());
  CHECK(built.excluded.empty());
  bool any_changed = false;
  for (const auto& pair : built.pairs) {
    CHECK(pair.method == ParaphraseMethod::OptionReorder);
    CHECK(pair.rewritten.benchmark == pair.original.benchmark);
    CHECK(pair.rewritten.split == pair.original.split);
    CHECK(pair.rewritten.answer == pair.original.answer);
    auto a = pair.original.options;
    auto b = pair.rewritten.options;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(pair.rewritten.valid());
    if (pair.rewritten.options != pair.original.options) any_changed = true;
  }
  CHECK(any_changed);

  // determinism
  auto again = build_paraphrases(mcq, nullptr, cfg);
  for (std::size_t i = 0; i < built.pairs.size(); ++i) {
    CHECK(again.pairs[i].rewritten.options == built.pairs[i].rewritten.options);
  }
}

TEST_CASE("sentence rewrites flow through the endpoint and validate") {
  auto samples = testutil::benchmark_fixture(303, 2, 25);
  std::vector<BenchmarkSample> open_ended;
  for (const auto& s : samples) {
    if (s.options.empty()) open_ended.push_back(s);
  }
  REQUIRE_FALSE(open_ended.empty());

  auto dir = mock_dir("rewrite", R"({"mode":"reverse_words"})");
  auto endpoint = make_mock_endpoint(dir.string());
  ParaphraseConfig cfg;
  auto built = build_paraphrases(open_ended, endpoint.get(), cfg);
  CHECK(built.pairs.size() == open_ended.size());
  for (const auto& pair : built.pairs) {
    CHECK(pair.method == ParaphraseMethod::SentenceRewrite);
    CHECK(pair.rewritten.question != pair.original.question);
    CHECK(pair.rewritten.valid());
  }

  // a refusing endpoint excludes samples instead of emitting bad pairs
  auto refuse_dir = mock_dir("refuse", R"({"mode":"refuse"})");
  auto refusing = make_mock_endpoint(refuse_dir.string());
  auto none = build_paraphrases(open_ended, refusing.get(), cfg);
  CHECK(none.pairs.empty());
  CHECK(none.excluded.size() == open_ended.size());
}

TEST_CASE("paraphrase pairs survive a save/load round trip") {
  auto samples = testutil::benchmark_fixture(305, 1, 20);
  ParaphraseConfig cfg;
  auto dir = mock_dir("roundtrip", R"({"mode":"reverse_words"})");
  auto endpoint = make_mock_endpoint(dir.string());
  auto built = build_paraphrases(samples, endpoint.get(), cfg);
  auto path = (dir / "pairs.jsonl").string();
  save_paraphrase_pairs(built.pairs, path);
  auto loaded = load_paraphrase_pairs(path);
  REQUIRE(loaded.size() == built.pairs.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].original.canonical_text() == built.pairs[i].original.canonical_text());
    CHECK(loaded[i].rewritten.canonical_text() ==
          built.pairs[i].rewritten.canonical_text());
  }
}

TEST_CASE("fivegram_accuracy: memorizer scores 100, garbage scores 0") {
  auto samples = testutil::benchmark_fixture(307, 3, 30);

  MemorizerAdapter memorizer(samples);
  auto perfect = fivegram_accuracy(memorizer, samples);
  CHECK(perfect.score == doctest::Approx(100.0));
  CHECK(perfect.skipped == 0);
  CHECK(perfect.evaluated == samples.size());
  CHECK(perfect.trials == samples.size() * 5);

  ConstantAdapter never(std::vector<std::string>{"zzz-not-in-any-text"});
  CHECK(fivegram_accuracy(never, samples).score == doctest::Approx(0.0));
}

TEST_CASE("fivegram_accuracy: a model memorizing half the samples scores 50") {
  auto samples = testutil::benchmark_fixture(311, 2, 30);
  std::vector<BenchmarkSample> known(samples.begin(),
                                     samples.begin() + samples.size() / 2);
  MemorizerAdapter half(known);
  auto result = fivegram_accuracy(half, samples);
  // 24 samples, 12 memorized: exactly half the trials hit
  CHECK(samples.size() % 2 == 0);
  CHECK(result.score == doctest::Approx(50.0));
}

TEST_CASE("fivegram_accuracy: short samples are skipped and counted") {
  BenchmarkSample shorty;
  shorty.benchmark = BenchmarkId::Gsm8k;
  shorty.split = Split::Train;
  shorty.question = "too few words";
  shorty.answer = "yes";
  auto samples = testutil::benchmark_fixture(313, 1, 30);
  samples.push_back(shorty);
  MemorizerAdapter memorizer(samples);
  auto result = fivegram_accuracy(memorizer, samples);
  CHECK(result.skipped == 1);
  CHECK(result.evaluated == samples.size() - 1);
  CHECK(result.score == doctest::Approx(100.0));  // skipped samples do not dilute
}

TEST_CASE("mmlu_zero_shot_score: extraction of the first non-empty character") {
  auto all = testutil::benchmark_fixture(317, 4, 15);
  std::vector<BenchmarkSample> mcq;
  for (const auto& s : all) {
    if (s.benchmark == BenchmarkId::MMLU) mcq.push_back(s);
  }
  REQUIRE_FALSE(mcq.empty());

  AnswerKeyAdapter oracle_model(mcq);
  CHECK(mmlu_zero_shot_score(oracle_model, mcq).score == doctest::Approx(100.0));

  // " b) ..." with gold B counts correct: first non-empty char, case-folded
  BenchmarkSample sample = mcq[0];
  sample.options = {"alpha", "bravo", "charlie", "delta"};
  sample.answer = "bravo";
  ConstantAdapter spacey(std::vector<std::string>{" b)", "more", "text"});
  CHECK(mmlu_zero_shot_score(spacey, {sample}).score == doctest::Approx(100.0));

  ConstantAdapter empty_gen(std::vector<std::string>{""});
  CHECK(mmlu_zero_shot_score(empty_gen, {sample}).score == doctest::Approx(0.0));
}

TEST_CASE("delta report: formatting matches the reference layout") {
  DeltaReport report;
  report.rows.push_back({"Qwen1.5", BenchmarkId::Gsm8k, Split::Train, 31.56, 66.57,
                         compute_delta(66.57, 31.56)});
  report.rows.push_back({"Qwen1.5", BenchmarkId::Gsm8k, Split::Test, 28.8, 39.74,
                         compute_delta(39.74, 28.8)});
  CHECK(format_row_scores(report, "Qwen1.5", BenchmarkId::Gsm8k) ==
        "31.56, 66.57, 35.01 | 28.8, 39.74, 10.94");

  // train-only benchmark renders a dash for the test triple
  report.rows.push_back({"Qwen1.5", BenchmarkId::Hellaswag, Split::Train, 1.19, 2.13,
                         compute_delta(2.13, 1.19)});
  CHECK(format_row_scores(report, "Qwen1.5", BenchmarkId::Hellaswag) ==
        "1.19, 2.13, 0.94 | -");

  auto table = render_delta_table(report);
  CHECK(table.find("Gsm8k") != std::string::npos);
  CHECK(table.find("31.56, 66.57, 35.01 | 28.8, 39.74, 10.94") != std::string::npos);

  // empty report renders without rows and without crashing
  DeltaReport empty;
  auto empty_table = render_delta_table(empty);
  CHECK(empty_table.find("Task") != std::string::npos);

  // JSON round trip
  auto loaded = DeltaReport::from_json(report.to_json());
  REQUIRE(loaded.rows.size() == report.rows.size());
  CHECK(loaded.rows[0].delta == doctest::Approx(35.01));
}

TEST_CASE("format_score trims trailing zeros at render time only") {
  CHECK(format_score(28.8) == "28.8");
  CHECK(format_score(35.01) == "35.01");
  CHECK(format_score(8.0) == "8");
  CHECK(format_score(0.0) == "0");
  CHECK(format_score(-13.87) == "-13.87");
  CHECK(format_score(-0.0) == "0");
  CHECK(format_score(0.525) == "0.53");  // rounded to 2 decimals first
}

TEST_CASE("delta rows satisfy the exact identity before rounding") {
  testutil::Rng rng(71);
  for (int i = 0; i < 200; ++i) {
    double d = rng.unit() * 100.0;
    double dp = rng.unit() * 100.0;
    double delta = compute_delta(d, dp);
    CHECK(std::abs(delta - (d - dp)) <= 1e-9);
  }
}
