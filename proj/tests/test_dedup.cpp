#include <doctest.h>

#include <cmath>
#include <set>

#include "testutil.hpp"
#include "textmill/dedup.hpp"

using namespace textmill;

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> words;
  std::string w;
  for (char c : text) {
    if (c == ' ') {
      if (!w.empty()) words.push_back(w);
      w.clear();
    } else {
      w.push_back(c);
    }
  }
  if (!w.empty()) words.push_back(w);
  return words;
}

std::string mutate(const std::string& text, double fraction, testutil::Rng& rng) {
  auto words = split(text);
  std::size_t changes = static_cast<std::size_t>(fraction * words.size());
  for (std::size_t c = 0; c < changes; ++c) {
    words[rng.below(words.size())] = "mut" + std::to_string(rng.below(100000));
  }
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

TEST_CASE("exact_dedup: first occurrence wins, conservation, idempotence") {
  auto a = testutil::make_doc("identical text body here.");
  auto b = testutil::make_doc("identical text body here.");
  auto c = testutil::make_doc("a different text body entirely.");
  auto result = exact_dedup({a, b, c});
  REQUIRE(result.kept.size() == 2);
  CHECK(result.kept[0].id == a.id);
  REQUIRE(result.dropped_ids.size() == 1);
  CHECK(result.dropped_ids[0] == b.id);

  // all-unique stream passes through
  testutil::Rng rng(5);
  std::vector<Document> unique_docs;
  for (int i = 0; i < 30; ++i) {
    unique_docs.push_back(
        testutil::make_doc("u" + std::to_string(i) + " " +
                           testutil::random_words(rng, 30, "w", 10000)));
  }
  auto unique_result = exact_dedup(unique_docs);
  CHECK(unique_result.kept.size() == unique_docs.size());
  CHECK(unique_result.dropped_ids.empty());

  // idempotent on its own output
  auto again = exact_dedup(result.kept);
  CHECK(again.kept.size() == result.kept.size());
  CHECK(again.dropped_ids.empty());
}

TEST_CASE("exact_dedup: dropped count matches the pairwise-equality oracle") {
  testutil::Rng rng(17);
  std::vector<Document> docs;
  for (int g = 0; g < 12; ++g) {
    std::string text = testutil::random_words(rng, 40, "w", 4000) + " .";
    std::size_t copies = 1 + rng.below(4);
    for (std::size_t c = 0; c < copies; ++c) docs.push_back(testutil::make_doc(text));
  }

  // O(n^2) string-equality oracle: count docs equal to an earlier doc
  std::size_t oracle_dropped = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (docs[i].text == docs[j].text) {
        ++oracle_dropped;
        break;
      }
    }
  }

  auto result = exact_dedup(docs);
  CHECK(result.dropped_ids.size() == oracle_dropped);
  CHECK(result.kept.size() + result.dropped_ids.size() == docs.size());
}

TEST_CASE("signature: determinism and Jaccard estimation") {
  DedupConfig cfg;
  testutil::Rng rng(29);

  std::string text = testutil::random_words(rng, 200, "w", 3000);
  auto d1 = testutil::make_doc(text);
  auto d2 = testutil::make_doc(text);
  CHECK(signature(d1, cfg).minhash == signature(d2, cfg).minhash);

  // disjoint vocabulary -> true Jaccard 0, estimate near 0
  auto da = testutil::make_doc(testutil::random_words(rng, 200, "left", 2000));
  auto db = testutil::make_doc(testutil::random_words(rng, 200, "right", 2000));
  CHECK(testutil::oracle_jaccard(testutil::oracle_shingles(da.text, cfg.shingle_n),
                                 testutil::oracle_shingles(db.text, cfg.shingle_n)) == 0.0);
  CHECK(estimated_jaccard(signature(da, cfg), signature(db, cfg)) <= 0.05);

  // ~10% words changed -> estimate within +/-0.1 of the exact shingle Jaccard
  std::string mutated = mutate(text, 0.10, rng);
  auto dm = testutil::make_doc(mutated);
  double truth = testutil::oracle_jaccard(testutil::oracle_shingles(text, cfg.shingle_n),
                                          testutil::oracle_shingles(mutated, cfg.shingle_n));
  double est = estimated_jaccard(signature(d1, cfg), signature(dm, cfg));
  CHECK(std::abs(est - truth) <= 0.1);
}

TEST_CASE("near_dedup: no pairs among unrelated docs") {
  DedupConfig cfg;
  testutil::Rng rng(41);
  std::vector<Document> docs;
  for (int i = 0; i < 80; ++i) {
    docs.push_back(testutil::make_doc("p" + std::to_string(i) + " " +
                                      testutil::random_words(rng, 120, "w", 8000)));
  }
  auto result = near_dedup(docs, cfg);
  CHECK(result.pairs.empty());
  CHECK(result.kept.size() == docs.size());
}

TEST_CASE("near_dedup: planted 95%-overlap pair is detected") {
  DedupConfig cfg;
  testutil::Rng rng(43);
  std::string base = testutil::random_words(rng, 300, "w", 5000);
  std::string close = mutate(base, 0.01, rng);  // each changed word kills ~5 shingles

  double truth = testutil::oracle_jaccard(testutil::oracle_shingles(base, cfg.shingle_n),
                                          testutil::oracle_shingles(close, cfg.shingle_n));
  REQUIRE(truth >= 0.9);  // fixture sanity: this really is a duplicate pair

  std::vector<Document> docs;
  docs.push_back(testutil::make_doc(testutil::random_words(rng, 150, "x", 4000)));
  docs.push_back(testutil::make_doc(base));
  docs.push_back(testutil::make_doc(testutil::random_words(rng, 150, "y", 4000)));
  docs.push_back(testutil::make_doc(close));

  auto result = near_dedup(docs, cfg);
  REQUIRE(result.pairs.size() == 1);
  CHECK(result.pairs[0].kept_id == docs[1].id);
  CHECK(result.pairs[0].dropped_id == docs[3].id);
  CHECK(result.pairs[0].est_jaccard >= cfg.jaccard_threshold);
  CHECK(result.kept.size() == 3);
}

TEST_CASE("near_dedup: short docs bypass near-dedup") {
  DedupConfig cfg;
  auto tiny1 = testutil::make_doc("tiny one");
  auto tiny2 = testutil::make_doc("tiny one");  // equal but below shingle_n words
  auto result = near_dedup({tiny1, tiny2}, cfg);
  CHECK(result.kept.size() == 2);
  CHECK(result.pairs.empty());
}

TEST_CASE("near_dedup: deterministic across runs and workers") {
  DedupConfig cfg;
  testutil::Rng rng(47);
  std::vector<Document> docs;
  for (int i = 0; i < 60; ++i) {
    std::string text = testutil::random_words(rng, 150, "w", 2000);
    docs.push_back(testutil::make_doc(text));
    if (i % 7 == 0) docs.push_back(testutil::make_doc(mutate(text, 0.01, rng)));
  }
  auto r1 = near_dedup(docs, cfg, 1);
  auto r2 = near_dedup(docs, cfg, 4);
  REQUIRE(r1.kept.size() == r2.kept.size());
  for (std::size_t i = 0; i < r1.kept.size(); ++i) {
    CHECK(r1.kept[i].id == r2.kept[i].id);
  }
  REQUIRE(r1.pairs.size() == r2.pairs.size());
  for (std::size_t i = 0; i < r1.pairs.size(); ++i) {
    CHECK(r1.pairs[i].dropped_id == r2.pairs[i].dropped_id);
  }
}
