#include "textmill/dedup.hpp"

#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/parallel.hpp"
#include "textmill/text.hpp"

namespace textmill {

void DedupConfig::validate() const {
  if (shingle_n < 1) throw ConfigError("dedup.shingle_n must be >= 1");
  if (num_hashes < 1) throw ConfigError("dedup.num_hashes must be >= 1");
  if (lsh_bands < 1 || num_hashes % lsh_bands != 0) {
    throw ConfigError("dedup.num_hashes must be divisible by lsh_bands");
  }
  if (jaccard_threshold <= 0.0 || jaccard_threshold > 1.0) {
    throw ConfigError("dedup.jaccard_threshold must be in (0,1]");
  }
}

std::string duplicate_pair_to_jsonl_line(const DuplicatePair& p) {
  nlohmann::ordered_json j;
  j["kept_id"] = p.kept_id;
  j["dropped_id"] = p.dropped_id;
  j["est_jaccard"] = p.est_jaccard;
  return j.dump();
}

ExactDedupResult exact_dedup(std::vector<Document> docs) {
  ExactDedupResult result;
  result.kept.reserve(docs.size());
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(docs.size() * 2);
  for (auto& doc : docs) {
    if (seen.insert(doc.id).second) {
      result.kept.push_back(std::move(doc));
    } else {
      result.dropped_ids.push_back(doc.id);
    }
  }
  return result;
}

namespace {

// Distinct hashed shingles of a document: n-word windows joined by a space.
std::vector<std::uint64_t> shingle_hashes(const Document& doc, const DedupConfig& cfg) {
  auto words = normalize_words(doc.text);
  std::vector<std::uint64_t> hashes;
  if (words.size() < static_cast<std::size_t>(cfg.shingle_n)) return hashes;
  std::unordered_set<std::uint64_t> distinct;
  std::string buf;
  for (std::size_t i = 0; i + cfg.shingle_n <= words.size(); ++i) {
    buf.clear();
    for (int k = 0; k < cfg.shingle_n; ++k) {
      if (k) buf.push_back(' ');
      buf += words[i + k];
    }
    distinct.insert(hash64(buf, cfg.hash_seed));
  }
  hashes.assign(distinct.begin(), distinct.end());
  return hashes;
}

// Slot permutations derived from the seed: h_i(x) = mix64(a_i * x + b_i).
struct SlotParams {
  std::vector<std::uint64_t> a, b;
};

SlotParams slot_params(const DedupConfig& cfg) {
  SlotParams p;
  p.a.reserve(cfg.num_hashes);
  p.b.reserve(cfg.num_hashes);
  std::uint64_t state = cfg.hash_seed;
  for (int i = 0; i < cfg.num_hashes; ++i) {
    state = mix64(state + 0x9e3779b97f4a7c15ull);
    p.a.push_back(state | 1ull);  // odd multiplier
    state = mix64(state + 0x7f4a7c159e3779b9ull);
    p.b.push_back(state);
  }
  return p;
}

}  // namespace

ShingleSignature signature(const Document& doc, const DedupConfig& cfg) {
  cfg.validate();
  ShingleSignature sig;
  sig.doc_id = doc.id;
  sig.minhash.assign(cfg.num_hashes, std::numeric_limits<std::uint64_t>::max());
  auto hashes = shingle_hashes(doc, cfg);
  if (hashes.empty()) return sig;  // caller treats this as "bypass"
  static thread_local std::unordered_map<std::uint64_t, SlotParams> cache;
  auto it = cache.find(cfg.hash_seed ^ static_cast<std::uint64_t>(cfg.num_hashes));
  if (it == cache.end()) {
    it = cache.emplace(cfg.hash_seed ^ static_cast<std::uint64_t>(cfg.num_hashes),
                       slot_params(cfg)).first;
  }
  const SlotParams& params = it->second;
  for (std::uint64_t h : hashes) {
    for (int i = 0; i < cfg.num_hashes; ++i) {
      std::uint64_t v = mix64(params.a[static_cast<std::size_t>(i)] * h +
                              params.b[static_cast<std::size_t>(i)]);
      auto& slot = sig.minhash[static_cast<std::size_t>(i)];
      if (v < slot) slot = v;
    }
  }
  return sig;
}

double estimated_jaccard(const ShingleSignature& a, const ShingleSignature& b) {
  if (a.minhash.empty() || a.minhash.size() != b.minhash.size()) return 0.0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.minhash.size(); ++i) {
    if (a.minhash[i] == b.minhash[i]) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(a.minhash.size());
}

NearDedupResult near_dedup(std::vector<Document> docs, const DedupConfig& cfg,
                           int workers) {
  cfg.validate();
  NearDedupResult result;
  result.kept.reserve(docs.size());

  struct SigInfo {
    ShingleSignature sig;
    bool has_shingles = false;
  };
  std::vector<SigInfo> sigs = parallel_map_indexed<SigInfo>(
      docs.size(), workers, [&](std::size_t i) {
        SigInfo info;
        auto words = normalize_words(docs[i].text);
        info.has_shingles = words.size() >= static_cast<std::size_t>(cfg.shingle_n);
        if (info.has_shingles) info.sig = signature(docs[i], cfg);
        return info;
      });

  // band hash -> indices of kept docs sharing that band
  const int rows = cfg.rows_per_band();
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> bands(
      static_cast<std::size_t>(cfg.lsh_bands));

  auto band_key = [&](const ShingleSignature& sig, int band) {
    std::uint64_t h = cfg.hash_seed + static_cast<std::uint64_t>(band);
    for (int r = 0; r < rows; ++r) {
      h = hash_combine(h, sig.minhash[static_cast<std::size_t>(band * rows + r)]);
    }
    return h;
  };

  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!sigs[i].has_shingles) {
      result.kept.push_back(std::move(docs[i]));
      continue;
    }
    const ShingleSignature& sig = sigs[i].sig;

    std::unordered_set<std::size_t> candidates;
    for (int band = 0; band < cfg.lsh_bands; ++band) {
      auto it = bands[static_cast<std::size_t>(band)].find(band_key(sig, band));
      if (it == bands[static_cast<std::size_t>(band)].end()) continue;
      candidates.insert(it->second.begin(), it->second.end());
    }

    const ShingleSignature* dup_of = nullptr;
    double best = 0.0;
    std::vector<std::size_t> ordered(candidates.begin(), candidates.end());
    std::sort(ordered.begin(), ordered.end());  // stream order, deterministic
    for (std::size_t cand : ordered) {
      double est = estimated_jaccard(sig, sigs[cand].sig);
      if (est >= cfg.jaccard_threshold) {
        dup_of = &sigs[cand].sig;
        best = est;
        break;
      }
    }
    if (dup_of) {
      result.pairs.push_back({dup_of->doc_id, sig.doc_id, best});
      continue;
    }

    result.kept.push_back(std::move(docs[i]));
    for (int band = 0; band < cfg.lsh_bands; ++band) {
      bands[static_cast<std::size_t>(band)][band_key(sig, band)].push_back(i);
    }
  }
  return result;
}

}  // namespace textmill
