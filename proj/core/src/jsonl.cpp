#include "textmill/jsonl.hpp"

#include <glob.h>

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/tokenizer.hpp"

namespace textmill {

namespace {

bool has_wildcard(const std::string& pattern) {
  return pattern.find_first_of("*?[") != std::string::npos;
}

}  // namespace

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> files;
  for (const auto& pattern : patterns) {
    if (!has_wildcard(pattern)) {
      if (!std::filesystem::exists(pattern)) {
        throw IoError("no such file: " + pattern);
      }
      files.push_back(pattern);
      continue;
    }
    ::glob_t g{};
    int rc = ::glob(pattern.c_str(), GLOB_TILDE, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) {
        if (std::filesystem::is_regular_file(g.gl_pathv[i])) {
          files.emplace_back(g.gl_pathv[i]);
        }
      }
    }
    ::globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH) {
      throw IoError("glob failed for pattern: " + pattern);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

DocRecord parse_document_line(std::string_view line, const ReadPolicy& policy,
                              const std::string& path, std::size_t line_no) {
  auto fail = [&](std::string msg) {
    return DocRecord(LineError{path, line_no, std::move(msg)});
  };

  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
  if (!j.contains("text") || !j["text"].is_string()) return fail("missing string field 'text'");

  Document doc;
  doc.text = j["text"].get<std::string>();

  try {
    if (j.contains("source")) {
      if (!j["source"].is_string()) return fail("field 'source' must be a string");
      doc.source = j["source"].get<std::string>();
    } else {
      doc.source = policy.default_source;
    }
    if (j.contains("category")) {
      if (!j["category"].is_string()) return fail("field 'category' must be a string");
      doc.category = j["category"].get<std::string>();
    } else {
      doc.category = policy.default_category;
    }
    if (j.contains("partition")) {
      if (!j["partition"].is_string()) return fail("field 'partition' must be a string");
      doc.partition = partition_from_string(j["partition"].get<std::string>());
    } else if (policy.default_partition) {
      doc.partition = *policy.default_partition;
    } else {
      doc.partition = Partition::D1;
    }
    if (j.contains("meta")) {
      if (!j["meta"].is_object()) return fail("field 'meta' must be an object");
      for (auto it = j["meta"].begin(); it != j["meta"].end(); ++it) {
        if (!it.value().is_string()) return fail("meta values must be strings");
        doc.meta[it.key()] = it.value().get<std::string>();
      }
    }

    bool has_id = j.contains("id");
    bool has_count = j.contains("token_count");
    if (has_id) {
      if (!j["id"].is_number_unsigned()) return fail("field 'id' must be an unsigned integer");
      doc.id = j["id"].get<std::uint64_t>();
    }
    if (has_count) {
      if (!j["token_count"].is_number_unsigned()) {
        return fail("field 'token_count' must be a non-negative integer");
      }
      doc.token_count = j["token_count"].get<std::uint64_t>();
    }
    if ((!has_id || !has_count)) {
      if (!policy.fill_missing) return fail("missing 'id' or 'token_count'");
      const Tokenizer& tok = TokenizerRegistry::instance().get(policy.tokenizer_id);
      if (!has_id) doc.id = document_id(doc.text);
      if (!has_count) doc.token_count = tok.count(doc.text);
    }
  } catch (const ConfigError& e) {
    return fail(e.what());
  }

  return DocRecord(std::move(doc));
}

std::string to_jsonl_line(const Document& doc) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  j["source"] = doc.source;
  j["category"] = doc.category;
  j["partition"] = std::string(to_string(doc.partition));
  j["token_count"] = doc.token_count;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : doc.meta) meta[k] = v;  // std::map keeps keys sorted
  j["meta"] = std::move(meta);
  return j.dump();
}

DocumentReader::DocumentReader(std::vector<std::string> paths, ReadPolicy policy)
    : paths_(std::move(paths)), policy_(std::move(policy)) {}

bool DocumentReader::open_next_file() {
  while (file_index_ < paths_.size()) {
    const std::string& path = paths_[file_index_];
    in_.close();
    in_.clear();
    in_.open(path, std::ios::in | std::ios::binary);
    if (!in_.is_open()) {
      throw IoError("cannot open input file: " + path);
    }
    file_open_ = true;
    line_no_ = 0;
    return true;
  }
  return false;
}

std::optional<DocRecord> DocumentReader::next() {
  std::string line;
  while (true) {
    if (!file_open_) {
      if (file_index_ >= paths_.size()) return std::nullopt;
      open_next_file();
    }
    if (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty()) continue;  // tolerate blank lines
      return parse_document_line(line, policy_, paths_[file_index_], line_no_);
    }
    file_open_ = false;
    ++file_index_;
  }
}

DocumentWriter::DocumentWriter(const std::string& path) : path_(path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  out_.open(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out_.is_open()) throw IoError("cannot open output file: " + path);
}

void DocumentWriter::write(const Document& doc) {
  out_ << to_jsonl_line(doc) << '\n';
  if (!out_.good()) throw IoError("write failed: " + path_);
  ++written_;
}

void DocumentWriter::flush() { out_.flush(); }

std::vector<Document> read_documents(const std::vector<std::string>& globs,
                                     ReadPolicy policy, std::vector<LineError>* errors) {
  DocumentReader reader(expand_globs(globs), std::move(policy));
  std::vector<Document> docs;
  while (auto rec = reader.next()) {
    if (std::holds_alternative<Document>(*rec)) {
      docs.push_back(std::move(std::get<Document>(*rec)));
    } else {
      const auto& err = std::get<LineError>(*rec);
      if (errors) {
        errors->push_back(err);
      } else {
        throw IoError(err.path + ":" + std::to_string(err.line_no) + ": " + err.message);
      }
    }
  }
  return docs;
}

void write_documents(const std::vector<Document>& docs, const std::string& path) {
  DocumentWriter writer(path);
  for (const auto& doc : docs) writer.write(doc);
  writer.flush();
}

}  // namespace textmill
