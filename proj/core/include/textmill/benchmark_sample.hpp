#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace textmill {

struct LineError;

enum class BenchmarkId : std::uint8_t {
  MMLU = 0,
  ArcC,
  TruthfulQA,
  Winogrande,
  Hellaswag,
  Gsm8k,
};

inline constexpr std::array<BenchmarkId, 6> kAllBenchmarks = {
    BenchmarkId::MMLU,      BenchmarkId::ArcC,      BenchmarkId::TruthfulQA,
    BenchmarkId::Winogrande, BenchmarkId::Hellaswag, BenchmarkId::Gsm8k,
};

enum class Split : std::uint8_t { Train = 0, Test };

std::string_view to_string(BenchmarkId b);
std::string_view to_string(Split s);
BenchmarkId benchmark_from_string(std::string_view s);  // throws ConfigError
Split split_from_string(std::string_view s);            // throws ConfigError

struct BenchmarkSample {
  BenchmarkId benchmark = BenchmarkId::MMLU;
  Split split = Split::Train;
  std::string question;
  std::vector<std::string> options;  // empty when the benchmark has none
  std::string answer;

  // Deterministic rendering of all fields into one string; the unit over
  // which n-gram windows and continuation cuts are taken.
  std::string canonical_text() const;

  bool valid(std::string* why = nullptr) const;
};

std::string to_jsonl_line(const BenchmarkSample& s);

std::vector<BenchmarkSample> load_benchmark_samples(const std::vector<std::string>& globs,
                                                    std::vector<LineError>* errors = nullptr);
void save_benchmark_samples(const std::vector<BenchmarkSample>& samples,
                            const std::string& path);

}  // namespace textmill
