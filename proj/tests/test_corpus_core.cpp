#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "testutil.hpp"
#include "textmill/document.hpp"
#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/jsonl.hpp"
#include "textmill/manifest.hpp"
#include "textmill/text.hpp"
#include "textmill/tokenizer.hpp"

using namespace textmill;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("textmill_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("id is stable across runs and machines") {
  // frozen values guard against any drift in the hash or normalization
  CHECK(hash64("") == 0x5b21f68ffa77f14cull);
  CHECK(hash64("the cat sat") == 0x431e23b130764db4ull);
  CHECK(document_id("The cat sat.") == 0xf10a129127c2202full);
  // whitespace-collapse and NFC both fold into the same id
  CHECK(document_id("The cat  sat.\n") == document_id("The cat sat."));
  CHECK(document_id("café") == document_id("café"));
}

TEST_CASE("count_tokens") {
  CHECK(count_tokens("", "whitespace") == 0);
  CHECK(count_tokens("a b c", "whitespace") == 3);
  CHECK_THROWS_AS(count_tokens("x", "no-such-tokenizer"), ConfigError);

  // 1,000-word fixture against an independent word-split count
  testutil::Rng rng(7);
  std::string text = testutil::random_words(rng, 1000, "w", 5000);
  std::istringstream iss(text);
  std::size_t reference = 0;
  std::string w;
  while (iss >> w) ++reference;
  CHECK(reference == 1000);
  CHECK(count_tokens(text, "whitespace") == reference);
}

TEST_CASE("stream_documents: empty file, valid lines, malformed lines") {
  auto dir = temp_dir("stream");

  write_file(dir / "empty.jsonl", "");
  DocumentReader empty_reader({(dir / "empty.jsonl").string()});
  CHECK_FALSE(empty_reader.next().has_value());

  auto d1 = testutil::make_doc("alpha beta gamma.");
  auto d2 = testutil::make_doc("delta epsilon zeta.");
  auto d3 = testutil::make_doc("eta theta iota.");
  write_file(dir / "three.jsonl",
             to_jsonl_line(d1) + "\n" + to_jsonl_line(d2) + "\n" + to_jsonl_line(d3) + "\n");
  std::vector<LineError> errors;
  auto docs = read_documents({(dir / "three.jsonl").string()}, {}, &errors);
  REQUIRE(docs.size() == 3);
  CHECK(errors.empty());
  CHECK(docs[0].text == "alpha beta gamma.");
  CHECK(docs[2].text == "eta theta iota.");

  write_file(dir / "mixed.jsonl", to_jsonl_line(d1) + "\n{not json}\n");
  errors.clear();
  docs = read_documents({(dir / "mixed.jsonl").string()}, {}, &errors);
  CHECK(docs.size() == 1);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].line_no == 2);

  CHECK_THROWS_AS(read_documents({(dir / "missing.jsonl").string()}), IoError);
}

TEST_CASE("document round-trip is byte-exact under the canonical serializer") {
  auto dir = temp_dir("roundtrip");
  testutil::Rng rng(11);
  std::vector<Document> docs;
  for (int i = 0; i < 50; ++i) {
    auto doc = testutil::make_doc(testutil::random_words(rng, 20 + rng.below(50), "w", 900),
                                  "src" + std::to_string(i % 3), "Cat",
                                  i % 2 ? Partition::D2 : Partition::D1);
    doc.meta["topic"] = std::to_string(rng.below(8));
    docs.push_back(std::move(doc));
  }
  auto path = (dir / "docs.jsonl").string();
  write_documents(docs, path);
  std::string first = read_file(path);

  auto reread = read_documents({path});
  REQUIRE(reread.size() == docs.size());
  auto path2 = (dir / "docs2.jsonl").string();
  write_documents(reread, path2);
  CHECK(read_file(path2) == first);

  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(reread[i].id == document_id(reread[i].text));
    CHECK(reread[i].token_count == testutil::tok().count(reread[i].text));
  }
}

TEST_CASE("validate_manifest: default registry is consistent") {
  auto m = default_manifest();
  auto report = validate_manifest(m);
  CHECK(report.valid());

  double d1 = m.mixture().partition_total(Partition::D1);
  CHECK(d1 == doctest::Approx(46.5).epsilon(1e-12));
  CHECK(m.mixture().total() == doctest::Approx(100.0).epsilon(1e-9));

  // the four synthetic slices
  REQUIRE(m.synthetic_partitions.size() == 4);
  CHECK(m.mixture().find("synthetic")->percent == 7.7);
  CHECK(m.mixture().find("cosmopedia")->percent == 5.93);
  CHECK(m.mixture().find("restruct")->percent == 23.5);
  CHECK(m.mixture().find("open_source_sft")->percent == 16.37);
}

TEST_CASE("validate_manifest: violations are reported, not thrown") {
  auto m = default_manifest();
  m.sources.push_back(m.sources.front());  // duplicate name
  auto report = validate_manifest(m);
  CHECK_FALSE(report.valid());
  bool dup = false, sum = false;
  for (const auto& f : report.findings) {
    if (f.code == "duplicate_name") dup = true;
    if (f.code == "weight_sum") sum = true;  // duplicate also breaks the sum
  }
  CHECK(dup);
  CHECK(sum);

  auto m2 = default_manifest();
  m2.sources[0].sample_weight_pct -= 1.0;  // sums to 99.0
  auto report2 = validate_manifest(m2);
  CHECK_FALSE(report2.valid());
  REQUIRE(report2.findings.size() == 1);
  CHECK(report2.findings[0].code == "weight_sum");
  CHECK(report2.findings[0].message.find("99") != std::string::npos);

  auto m3 = default_manifest();
  m3.sources[0].input_paths = {"/nonexistent/path/*.jsonl"};
  auto report3 = validate_manifest(m3);
  CHECK_FALSE(report3.valid());
  CHECK(report3.findings[0].code == "missing_path");
}

TEST_CASE("manifest save/load round-trip") {
  auto dir = temp_dir("manifest");
  auto m = default_manifest();
  auto path = (dir / "manifest.json").string();
  save_manifest(m, path);
  auto loaded = load_manifest(path);
  REQUIRE(loaded.sources.size() == m.sources.size());
  CHECK(loaded.sources[0].name == "RedPajamaC4");
  CHECK(loaded.mixture().total() == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(validate_manifest(loaded).valid());
}

TEST_CASE("partition classification of sources") {
  CHECK(partition_for_source("RedPajamaC4") == Partition::D1);
  CHECK(partition_for_source("synthetic") == Partition::D2);
  CHECK(partition_for_source("cosmopedia") == Partition::D2);
  CHECK(partition_for_source("restruct") == Partition::D3);
  CHECK(partition_for_source("open_source_sft") == Partition::D3);
}

TEST_CASE("benchmark sample canonical text and validity") {
  BenchmarkSample s;
  s.benchmark = BenchmarkId::MMLU;
  s.split = Split::Test;
  s.question = "What is two plus two";
  s.options = {"three", "four", "five", "six"};
  s.answer = "four";
  CHECK(s.valid());
  auto text = s.canonical_text();
  CHECK(text.find("What is two plus two") == 0);
  CHECK(text.find("B) four") != std::string::npos);
  CHECK(text.find("answer: four") != std::string::npos);
  // pure function of the fields
  CHECK(text == s.canonical_text());

  s.answer = "seven";
  std::string why;
  CHECK_FALSE(s.valid(&why));
  CHECK(why == "answer not among options");
}
