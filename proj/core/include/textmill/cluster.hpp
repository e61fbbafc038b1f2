#pragma once

#include <cstdint>
#include <vector>

#include "textmill/document.hpp"

namespace textmill {

struct TopicAssignment {
  std::uint64_t doc_id = 0;
  int topic_id = 0;      // in [0, k)
  double distance = 0.0;  // Euclidean distance to the centroid
};

struct ClusterConfig {
  int k = 64;
  std::uint64_t seed = 0;
  int max_iters = 50;
  int hash_dim_log2 = 18;  // feature space: hashed term frequencies
};

// Hashed term-frequency vectors (L2-normalized) clustered with k-means,
// k-means++ seeded initialization. Deterministic for a fixed seed; every
// document gets exactly one topic; some topics may end up empty.
// Throws ConfigError when k < 1 or k > |docs| or docs is empty.
std::vector<TopicAssignment> cluster_topics(const std::vector<Document>& docs,
                                            const ClusterConfig& cfg);

std::vector<TopicAssignment> cluster_topics(const std::vector<Document>& docs, int k,
                                            std::uint64_t seed);

}  // namespace textmill
