#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "testutil.hpp"
#include "textmill/jsonl.hpp"
#include "textmill/leakage.hpp"
#include "textmill/manifest.hpp"
#include "textmill/run_manifest.hpp"
#include "textmill/text.hpp"

namespace fs = std::filesystem;
using namespace textmill;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

RunResult run_cli(const std::string& cli_args, const fs::path& workdir) {
  fs::create_directories(workdir);
  auto out_path = workdir / "stdout.txt";
  std::string cmd = std::string(TEXTMILL_BIN) + " " + cli_args + " > " +
                    out_path.string() + " 2> " + (workdir / "stderr.txt").string();
  int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_path);
  std::ostringstream os;
  os << in.rdbuf();
  result.stdout_text = os.str();
  return result;
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("textmill_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json last_json_line(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '{') last = line;
  }
  REQUIRE_FALSE(last.empty());
  return nlohmann::json::parse(last);
}

std::string english_sentenceish(testutil::Rng& rng, std::size_t words) {
  std::string out = "The study of";
  for (std::size_t i = 0; i < words; ++i) {
    out += " " + testutil::vocab_word("topic", rng.below(500));
    if (i % 7 == 3) out += " and the";
    if (i % 11 == 5) out += " of a";
  }
  out += " is done.";
  return out;
}

}  // namespace

TEST_CASE("cli: unknown subcommand exits 2 with usage text") {
  auto dir = fresh_dir("usage");
  auto result = run_cli("frobnicate", dir);
  CHECK(result.exit_code == 2);

  auto no_args = run_cli("", dir);
  CHECK(no_args.exit_code == 2);
}

TEST_CASE("cli: clean on a 3-doc fixture writes conservation counts") {
  auto dir = fresh_dir("clean3");
  testutil::Rng rng(1);
  {
    std::ofstream in(dir / "input.jsonl");
    in << to_jsonl_line(testutil::make_doc(english_sentenceish(rng, 30))) << "\n";
    in << to_jsonl_line(testutil::make_doc(english_sentenceish(rng, 40))) << "\n";
    in << to_jsonl_line(testutil::make_doc("一二三 四五六 "
                                           "七八九 十")) << "\n";
  }
  auto out = dir / "out";
  auto result = run_cli("clean --input " + (dir / "input.jsonl").string() +
                            " --output " + out.string() + " --source demo",
                        dir);
  REQUIRE(result.exit_code == 0);
  auto metrics = last_json_line(result.stdout_text);
  CHECK(metrics["in"] == 3);
  CHECK(metrics["kept"].get<int>() + metrics["rejected"].get<int>() == 3);
  CHECK(metrics["kept"] == 2);

  auto manifest = load_run_manifest((out / "run_manifest.json").string());
  CHECK(manifest.command == "clean");
  CHECK(manifest.counts["in"] == 3);
  CHECK(manifest.counts["kept"] + manifest.counts["rejected"] == 3);
  CHECK(manifest.tool_version == std::string("0.1.0"));
}

TEST_CASE("cli: config errors exit 2, runtime errors exit 1") {
  auto dir = fresh_dir("exits");
  {
    std::ofstream bad(dir / "bad_config.json");
    bad << R"({"workers": 0})";
  }
  {
    std::ofstream in(dir / "in.jsonl");
    in << to_jsonl_line(testutil::make_doc("Some valid text here.")) << "\n";
  }
  auto bad_cfg = run_cli("clean --config " + (dir / "bad_config.json").string() +
                             " --input " + (dir / "in.jsonl").string() + " --output " +
                             (dir / "o1").string(),
                         dir);
  CHECK(bad_cfg.exit_code == 2);

  auto missing_input = run_cli(
      "dedup --input " + (dir / "nope.jsonl").string() + " --output " + (dir / "o2").string(),
      dir);
  CHECK(missing_input.exit_code == 1);
}

TEST_CASE("cli: synth against the mock endpoint is resumable") {
  auto dir = fresh_dir("synth");
  auto mock = dir / "mock";
  fs::create_directories(mock);
  {
    std::ofstream cfg(mock / "mock.json");
    cfg << R"({"mode":"echo","model":"mock-echo"})";
  }
  testutil::Rng rng(3);
  {
    std::ofstream in(dir / "seeds.jsonl");
    for (int i = 0; i < 12; ++i) {
      auto doc = testutil::make_doc(english_sentenceish(rng, 25), "PileofLaw", "Law");
      in << to_jsonl_line(doc) << "\n";
    }
  }
  auto out = dir / "out";
  std::string cli = "synth --input " + (dir / "seeds.jsonl").string() + " --output " +
                    out.string() + " --mock-endpoint " + mock.string() + " --seed 9";
  auto first = run_cli(cli, dir);
  REQUIRE(first.exit_code == 0);
  auto m1 = last_json_line(first.stdout_text);
  CHECK(m1["jobs"] == 12);
  CHECK(m1["ok"] == 12);
  CHECK(m1["resumed"] == 0);

  // re-running with the same output directory resumes, submitting nothing
  auto second = run_cli(cli, dir);
  REQUIRE(second.exit_code == 0);
  auto m2 = last_json_line(second.stdout_text);
  CHECK(m2["resumed"] == 12);
  CHECK(m2["submitted"] == 0);

  auto docs = read_documents({(out / "synthetic_docs.jsonl").string()});
  CHECK(docs.size() == 12);
  for (const auto& d : docs) {
    CHECK(d.partition == Partition::D2);
    CHECK(d.source == "synthetic");
  }
}

TEST_CASE("cli: tasks builds D3 from canned MCQ responses and SFT records") {
  auto dir = fresh_dir("tasks");
  auto mock = dir / "mock";
  fs::create_directories(mock);
  {
    std::ofstream cfg(mock / "mock.json");
    cfg << R"({"mode":"canned","responses":[
      "Here you go: {\"question\": \"Pick one?\", \"options\": [\"a\",\"b\",\"c\",\"d\"], \"answer\": \"b\"}",
      "{\"question\": \"Choose!\", \"options\": [\"x\",\"y\",\"z\",\"w\"], \"answer\": \"w\"} trailing text"
    ]})";
  }
  testutil::Rng rng(5);
  {
    std::ofstream in(dir / "d2.jsonl");
    for (int i = 0; i < 6; ++i) {
      auto doc = testutil::make_doc(english_sentenceish(rng, 30), "synthetic", "Wiki",
                                    Partition::D2);
      in << to_jsonl_line(doc) << "\n";
    }
  }
  {
    std::ofstream sft(dir / "sft.jsonl");
    sft << R"({"instruction":"Summarize the text","response":"A short summary"})" << "\n";
    sft << R"({"instruction":"Broken record","response":""})" << "\n";
    sft << R"({"question":"What year?","answer":"1999"})" << "\n";
  }
  auto out = dir / "out";
  auto result = run_cli("tasks --input " + (dir / "d2.jsonl").string() + " --sft-input " +
                            (dir / "sft.jsonl").string() + " --output " + out.string() +
                            " --mock-endpoint " + mock.string(),
                        dir);
  REQUIRE(result.exit_code == 0);
  auto metrics = last_json_line(result.stdout_text);
  CHECK(metrics["mcq_ok"] == 6);
  CHECK(metrics["sft_ok"] == 2);
  CHECK(metrics["sft_failed"] == 1);
  CHECK(metrics["d3_docs"] == 8);

  auto d3 = read_documents({(out / "d3_docs.jsonl").string()});
  REQUIRE(d3.size() == 8);
  for (const auto& doc : d3) CHECK(doc.partition == Partition::D3);
}

TEST_CASE("cli: full pipeline on a 1k-doc demo corpus, manifests cross-check") {
  auto dir = fresh_dir("pipeline");
  testutil::Rng rng(7);

  // demo corpus: 1,000 docs with some duplicates and some contaminated docs
  auto samples_path = dir / "benchmarks.jsonl";
  auto samples = testutil::benchmark_fixture(701, 3, 60);
  save_benchmark_samples(samples, samples_path.string());

  {
    std::ofstream in(dir / "raw.jsonl");
    std::string dup_text;
    for (int i = 0; i < 1000; ++i) {
      std::string text;
      if (i % 101 == 0) {
        // contaminated: mostly benchmark sample text (over 64 tokens, D2 range)
        auto words = whitespace_split(samples[i % samples.size()].canonical_text());
        for (std::size_t w = 0; w < words.size(); ++w) {
          if (w) text += ' ';
          text += words[w];
        }
        text += " " + english_sentenceish(rng, 8);
      } else if (i % 53 == 0 && !dup_text.empty()) {
        text = dup_text;  // exact duplicate
      } else {
        text = english_sentenceish(rng, 40 + rng.below(80));
        if (i % 50 == 0) dup_text = text;
      }
      auto doc = testutil::make_doc(text, "demo", "General", Partition::D2);
      in << to_jsonl_line(doc) << "\n";
    }
  }

  auto clean_out = dir / "s1_clean";
  auto r1 = run_cli("clean --input " + (dir / "raw.jsonl").string() + " --output " +
                        clean_out.string(),
                    dir);
  REQUIRE(r1.exit_code == 0);
  auto m1 = last_json_line(r1.stdout_text);
  CHECK(m1["in"] == 1000);

  auto dedup_out = dir / "s2_dedup";
  auto r2 = run_cli("dedup --input " + (clean_out / "cleaned.jsonl").string() +
                        " --output " + dedup_out.string(),
                    dir);
  REQUIRE(r2.exit_code == 0);
  auto m2 = last_json_line(r2.stdout_text);
  CHECK(m2["in"] == m1["kept"]);
  CHECK(m2["dropped_exact"].get<int>() > 0);

  auto decon_out = dir / "s3_decon";
  auto r3 = run_cli("decontaminate --input " + (dedup_out / "deduped.jsonl").string() +
                        " --benchmarks " + samples_path.string() + " --output " +
                        decon_out.string(),
                    dir);
  REQUIRE(r3.exit_code == 0);
  auto m3 = last_json_line(r3.stdout_text);
  CHECK(m3["in"] == m2["kept"]);
  CHECK(m3["removed_overlap"].get<int>() > 0);
  CHECK(m3["kept"].get<int>() + m3["removed_stat"].get<int>() +
            m3["removed_overlap"].get<int>() ==
        m3["in"].get<int>());

  // mixture inputs: one file per weighted source, reusing the decontaminated
  // stream for every slice of a small two-source manifest
  auto mix_in = dir / "mix_in";
  fs::create_directories(mix_in);
  auto mixture_manifest = dir / "mix_manifest_cfg.json";
  {
    CorpusManifest small;
    small.tokenizer_id = "whitespace";
    small.created_at = "2026-08-11T00:00:00Z";
    small.sources = {{"demo_a", "General", 70.0, {}}, {"demo_b", "General", 30.0, {}}};
    save_manifest(small, mixture_manifest.string());
    fs::copy_file(decon_out / "decontaminated.jsonl", mix_in / "demo_a.jsonl");
    fs::copy_file(decon_out / "decontaminated.jsonl", mix_in / "demo_b.jsonl");
  }
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"manifest": ")" << mixture_manifest.string() << R"("})";
  }
  auto mix_out = dir / "s4_mix";
  auto r4 = run_cli("mix --config " + (dir / "config.json").string() + " --input-dir " +
                        mix_in.string() + " --budget 50000 --output " + mix_out.string() +
                        " --seed 3",
                    dir);
  REQUIRE(r4.exit_code == 0);
  auto m4 = last_json_line(r4.stdout_text);

  // cross-check: mix manifest tallies equal a recount over the shards
  std::ifstream mm(mix_out / "mix_manifest.json");
  nlohmann::json jm;
  mm >> jm;
  std::int64_t manifest_tokens = jm["total_tokens"].get<std::int64_t>();
  CHECK(manifest_tokens == m4["emitted_tokens"].get<std::int64_t>());

  std::map<std::string, std::int64_t> recount;
  std::int64_t recount_total = 0;
  for (const auto& shard : jm["shards"]) {
    auto docs = read_documents({shard.get<std::string>()});
    for (const auto& doc : docs) {
      recount[doc.source] += static_cast<std::int64_t>(doc.token_count);
      recount_total += static_cast<std::int64_t>(doc.token_count);
    }
  }
  CHECK(recount_total == manifest_tokens);
  for (const auto& js : jm["sources"]) {
    CHECK(recount[js["name"].get<std::string>()] ==
          js["emitted_tokens"].get<std::int64_t>());
  }

  // schedule artifact
  std::ifstream sched(mix_out / "schedule.json");
  nlohmann::json jsched;
  sched >> jsched;
  REQUIRE(jsched.size() == 2);
  CHECK(jsched[0]["token_budget"].get<std::int64_t>() == 52'000'000'000LL);
  CHECK(jsched[1]["token_budget"].get<std::int64_t>() == 548'000'000'000LL);
}

TEST_CASE("cli: leakage with mock adapters and report rendering") {
  auto dir = fresh_dir("leakage");
  auto samples = testutil::benchmark_fixture(703, 2, 25);
  auto samples_path = dir / "benchmarks.jsonl";
  save_benchmark_samples(samples, samples_path.string());

  auto mock = dir / "mock";
  fs::create_directories(mock);
  {
    std::ofstream cfg(mock / "mock.json");
    cfg << R"({"mode":"reverse_words"})";
  }

  auto out = dir / "out";
  auto result = run_cli("leakage --benchmarks " + samples_path.string() + " --output " +
                            out.string() + " --mock-endpoint " + mock.string() +
                            " --mock-adapter memorizer --model-name demo-model",
                        dir);
  REQUIRE(result.exit_code == 0);
  auto metrics = last_json_line(result.stdout_text);
  CHECK(metrics["pairs"] == static_cast<int>(samples.size()));
  CHECK(metrics["rows"].get<int>() == 12);  // 6 benchmarks x 2 splits

  // memorizer: D = 100 on every non-MMLU bucket, delta > 0 somewhere
  std::ifstream rj(out / "delta_report.json");
  std::ostringstream os;
  os << rj.rdbuf();
  auto report = DeltaReport::from_json(os.str());
  bool positive_delta = false;
  for (const auto& row : report.rows) {
    if (row.benchmark != BenchmarkId::MMLU) {
      CHECK(row.d == doctest::Approx(100.0));
    }
    if (row.delta > 0) positive_delta = true;
  }
  CHECK(positive_delta);

  auto rendered = run_cli("report --input " + (out / "delta_report.json").string(), dir);
  REQUIRE(rendered.exit_code == 0);
  CHECK(rendered.stdout_text.find("demo-model") != std::string::npos);
  CHECK(rendered.stdout_text.find("Gsm8k") != std::string::npos);
}

TEST_CASE("cli: subprocess model adapter protocol") {
  auto dir = fresh_dir("adapter");
  auto samples = testutil::benchmark_fixture(707, 1, 25);
  // keep only no-option samples so no rewrite endpoint is needed... options
  // exist; use the mock endpoint for rewrites
  auto samples_path = dir / "benchmarks.jsonl";
  save_benchmark_samples(samples, samples_path.string());
  auto mock = dir / "mock";
  fs::create_directories(mock);
  {
    std::ofstream cfg(mock / "mock.json");
    cfg << R"({"mode":"reverse_words"})";
  }

  // a tiny adapter: always answers the same token
  auto adapter_path = dir / "adapter.py";
  {
    std::ofstream py(adapter_path);
    py << "import sys, json\n"
       << "for line in sys.stdin:\n"
       << "    req = json.loads(line)\n"
       << "    print(json.dumps({\"tokens\": [\"a)\"] * req[\"n_tokens\"]}))\n"
       << "    sys.stdout.flush()\n";
  }

  auto out = dir / "out";
  auto result = run_cli("leakage --benchmarks " + samples_path.string() + " --output " +
                            out.string() + " --mock-endpoint " + mock.string() +
                            " --adapter \"python3 " + adapter_path.string() +
                            "\" --model-name subprocess-model",
                        dir);
  REQUIRE(result.exit_code == 0);
  std::ifstream rj(out / "delta_report.json");
  std::ostringstream os;
  os << rj.rdbuf();
  auto report = DeltaReport::from_json(os.str());
  CHECK_FALSE(report.rows.empty());
  for (const auto& row : report.rows) {
    CHECK(row.model == "subprocess-model");
    if (row.benchmark != BenchmarkId::MMLU) {
      // constant garbage tokens never reproduce a continuation
      CHECK(row.d == doctest::Approx(0.0));
      CHECK(row.d_prime == doctest::Approx(0.0));
    }
  }
}
