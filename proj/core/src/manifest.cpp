#include "textmill/manifest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/jsonl.hpp"
#include "textmill/tokenizer.hpp"

namespace textmill {

double MixtureSpec::total() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.percent;
  return sum;
}

double MixtureSpec::partition_total(Partition p) const {
  double sum = 0.0;
  for (const auto& e : entries) {
    if (e.partition == p) sum += e.percent;
  }
  return sum;
}

const WeightEntry* MixtureSpec::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

MixtureSpec CorpusManifest::mixture() const {
  MixtureSpec spec;
  for (const auto& s : sources) {
    spec.entries.push_back({s.name, Partition::D1, s.sample_weight_pct});
  }
  for (const auto& e : synthetic_partitions) spec.entries.push_back(e);
  return spec;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& f : findings) os << f.code << ": " << f.message << "\n";
  return os.str();
}

ValidationReport validate_manifest(const CorpusManifest& m) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.findings.push_back({std::move(code), std::move(message)});
  };

  std::set<std::string> seen;
  for (const auto& s : m.sources) {
    if (!seen.insert(s.name).second) add("duplicate_name", "duplicate name: " + s.name);
    if (s.sample_weight_pct < 0.0) {
      add("negative_weight", s.name + " has negative weight");
    }
    for (const auto& pattern : s.input_paths) {
      if (pattern.empty()) continue;
      try {
        if (expand_globs({pattern}).empty()) {
          add("missing_path", s.name + ": no files match " + pattern);
        }
      } catch (const IoError& e) {
        add("missing_path", s.name + ": " + e.what());
      }
    }
  }
  for (const auto& e : m.synthetic_partitions) {
    if (!seen.insert(e.name).second) add("duplicate_name", "duplicate name: " + e.name);
    if (e.percent < 0.0) add("negative_weight", e.name + " has negative weight");
    if (e.partition == Partition::D1) {
      add("partition", e.name + ": synthetic partitions must be D2 or D3");
    }
  }

  double sum = m.mixture().total();
  if (std::abs(sum - 100.0) > 0.01) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "weight sum %.6g != 100.0", sum);
    add("weight_sum", buf);
  }

  if (!TokenizerRegistry::instance().has(m.tokenizer_id)) {
    add("tokenizer", "unknown tokenizer_id: " + m.tokenizer_id);
  }

  return report;
}

CorpusManifest default_manifest() {
  CorpusManifest m;
  m.tokenizer_id = "whitespace";
  m.created_at = "2026-08-11T00:00:00Z";
  m.sources = {
      {"RedPajamaC4", "C4", 11.0, {}},
      {"RedPajamaArxiv", "Arxiv", 1.42, {}},
      {"Pubmed", "References", 0.65, {}},
      {"S2orc", "Open Research Corpus", 1.68, {}},
      {"PhiPapers", "Philosophy", 0.06, {}},
      {"RedPajamaBook", "Book", 1.73, {}},
      {"PG_19", "Book", 1.46, {}},
      {"RedPajamaStackExchange", "Net", 1.10, {}},
      {"HackerNews", "News", 0.10, {}},
      {"FreeLaw", "Law", 0.46, {}},
      {"PileofLaw", "Law", 0.34, {}},
      {"AMPS", "Khan Academy", 0.96, {}},
      {"DM_math", "Math", 0.5, {}},
      {"Orca_math", "Math", 2.56, {}},
      {"OpenWebMath", "Math", 3.88, {}},
      {"Fanfics", "Book", 1.32, {}},
      {"RedPajamaWiki", "Wiki", 7.78, {}},
      {"The-Stack", "Code", 5.5, {}},
      {"StackOverFlow", "Code", 4.0, {}},
  };
  m.synthetic_partitions = {
      {"synthetic", Partition::D2, 7.7},
      {"cosmopedia", Partition::D2, 5.93},
      {"restruct", Partition::D3, 23.5},
      {"open_source_sft", Partition::D3, 16.37},
  };
  return m;
}

Partition partition_for_source(std::string_view source_name) {
  if (source_name == "synthetic" || source_name == "cosmopedia") return Partition::D2;
  if (source_name == "restruct" || source_name == "open_source_sft" ||
      source_name == "sft") {
    return Partition::D3;
  }
  return Partition::D1;
}

namespace {

nlohmann::ordered_json source_to_json(const SourceSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["categories"] = s.categories;
  j["sample_weight_pct"] = s.sample_weight_pct;
  j["input_paths"] = s.input_paths;
  return j;
}

SourceSpec source_from_json(const nlohmann::json& j) {
  SourceSpec s;
  s.name = j.at("name").get<std::string>();
  s.categories = j.value("categories", "");
  s.sample_weight_pct = j.at("sample_weight_pct").get<double>();
  if (j.contains("input_paths")) {
    s.input_paths = j.at("input_paths").get<std::vector<std::string>>();
  }
  return s;
}

}  // namespace

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw IoError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path + " is not valid JSON: " + e.what());
  }
  CorpusManifest m;
  try {
    m.tokenizer_id = j.value("tokenizer_id", "whitespace");
    m.created_at = j.value("created_at", "");
    for (const auto& js : j.value("sources", nlohmann::json::array())) {
      m.sources.push_back(source_from_json(js));
    }
    for (const auto& je : j.value("synthetic_partitions", nlohmann::json::array())) {
      WeightEntry e;
      e.name = je.at("name").get<std::string>();
      e.partition = partition_from_string(je.at("partition").get<std::string>());
      e.percent = je.at("sample_weight_pct").get<double>();
      m.synthetic_partitions.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path + ": " + e.what());
  }
  return m;
}

void save_manifest(const CorpusManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["tokenizer_id"] = m.tokenizer_id;
  j["created_at"] = m.created_at;
  j["sources"] = nlohmann::ordered_json::array();
  for (const auto& s : m.sources) j["sources"].push_back(source_to_json(s));
  j["synthetic_partitions"] = nlohmann::ordered_json::array();
  for (const auto& e : m.synthetic_partitions) {
    nlohmann::ordered_json je;
    je["name"] = e.name;
    je["partition"] = std::string(to_string(e.partition));
    je["sample_weight_pct"] = e.percent;
    j["synthetic_partitions"].push_back(std::move(je));
  }
  std::ofstream out(path);
  if (!out.is_open()) throw IoError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace textmill
