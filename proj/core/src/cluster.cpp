#include "textmill/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/text.hpp"

namespace textmill {

namespace {

struct SparseVec {
  std::vector<std::pair<std::uint32_t, float>> terms;  // sorted by index
};

SparseVec featurize(const Document& doc, std::uint32_t dim_mask) {
  std::vector<std::pair<std::uint32_t, float>> counts;
  for (const auto& w : normalize_words(doc.text)) {
    counts.emplace_back(static_cast<std::uint32_t>(hash64(w)) & dim_mask, 1.0f);
  }
  std::sort(counts.begin(), counts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec v;
  for (const auto& [idx, c] : counts) {
    if (!v.terms.empty() && v.terms.back().first == idx) {
      v.terms.back().second += c;
    } else {
      v.terms.emplace_back(idx, c);
    }
  }
  double norm_sq = 0.0;
  for (const auto& [idx, c] : v.terms) norm_sq += static_cast<double>(c) * c;
  if (norm_sq > 0.0) {
    float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (auto& [idx, c] : v.terms) c *= inv;
  }
  return v;
}

double sparse_dot(const SparseVec& a, const SparseVec& b) {
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() && j < b.terms.size()) {
    if (a.terms[i].first == b.terms[j].first) {
      dot += static_cast<double>(a.terms[i].second) * b.terms[j].second;
      ++i;
      ++j;
    } else if (a.terms[i].first < b.terms[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

double dense_dot(const SparseVec& a, const std::vector<double>& centroid) {
  double dot = 0.0;
  for (const auto& [idx, c] : a.terms) dot += static_cast<double>(c) * centroid[idx];
  return dot;
}

}  // namespace

std::vector<TopicAssignment> cluster_topics(const std::vector<Document>& docs,
                                            const ClusterConfig& cfg) {
  if (docs.empty()) throw ConfigError("cluster_topics: no documents");
  if (cfg.k < 1) throw ConfigError("cluster_topics: k must be >= 1");
  if (static_cast<std::size_t>(cfg.k) > docs.size()) {
    throw ConfigError("cluster_topics: k exceeds document count");
  }

  const std::uint32_t dim = 1u << cfg.hash_dim_log2;
  const std::uint32_t dim_mask = dim - 1;
  const std::size_t n = docs.size();
  const std::size_t k = static_cast<std::size_t>(cfg.k);

  std::vector<SparseVec> vecs(n);
  for (std::size_t i = 0; i < n; ++i) vecs[i] = featurize(docs[i], dim_mask);

  // k-means++ initialization. Docs are unit vectors, so squared distance to a
  // chosen center is 2 - 2*dot (zero-norm docs sit at the origin: dist 1).
  std::mt19937_64 rng(mix64(cfg.seed ^ 0x6b6d65616e73ull));
  auto uniform = [&rng]() { return to_unit_interval(rng()); };

  std::vector<std::size_t> centers;
  centers.push_back(static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n);
  std::vector<double> dist_sq(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (std::size_t c : centers) {
        double d = 2.0 - 2.0 * sparse_dot(vecs[i], vecs[c]);
        best = std::min(best, std::max(0.0, d));
      }
      dist_sq[i] = best;
      total += best;
    }
    std::size_t chosen = 0;
    if (total <= 0.0) {
      // all residual distances zero: spread deterministically
      chosen = centers.size() % n;
    } else {
      double r = uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist_sq[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    }
    centers.push_back(chosen);
  }

  std::vector<std::vector<double>> centroids(k, std::vector<double>(dim, 0.0));
  std::vector<double> centroid_norm_sq(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (const auto& [idx, val] : vecs[centers[c]].terms) {
      centroids[c][idx] = val;
    }
    centroid_norm_sq[c] = 1.0;
    if (vecs[centers[c]].terms.empty()) centroid_norm_sq[c] = 0.0;
  }

  std::vector<int> assign(n, -1);
  std::vector<double> assign_dist(n, 0.0);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::max();
      double self = 0.0;
      for (const auto& [idx, val] : vecs[i].terms) {
        self += static_cast<double>(val) * val;
      }
      for (std::size_t c = 0; c < k; ++c) {
        double d = self + centroid_norm_sq[c] - 2.0 * dense_dot(vecs[i], centroids[c]);
        if (d < best_d - 1e-12) {
          best_d = d;
          best_c = static_cast<int>(c);
        }
      }
      if (assign[i] != best_c) {
        assign[i] = best_c;
        changed = true;
      }
      assign_dist[i] = std::sqrt(std::max(0.0, best_d));
    }
    if (!changed) break;

    for (std::size_t c = 0; c < k; ++c) {
      std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
    }
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(assign[i]);
      ++sizes[c];
      for (const auto& [idx, val] : vecs[i].terms) centroids[c][idx] += val;
    }
    for (std::size_t c = 0; c < k; ++c) {
      centroid_norm_sq[c] = 0.0;
      if (sizes[c] == 0) continue;  // empty cluster keeps a zero centroid
      double inv = 1.0 / static_cast<double>(sizes[c]);
      for (auto& v : centroids[c]) {
        v *= inv;
        centroid_norm_sq[c] += v * v;
      }
    }
  }

  std::vector<TopicAssignment> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {docs[i].id, assign[i], assign_dist[i]};
  }
  return out;
}

std::vector<TopicAssignment> cluster_topics(const std::vector<Document>& docs, int k,
                                            std::uint64_t seed) {
  ClusterConfig cfg;
  cfg.k = k;
  cfg.seed = seed;
  return cluster_topics(docs, cfg);
}

}  // namespace textmill
