#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "textmill/document.hpp"

namespace textmill {

struct LineError {
  std::string path;
  std::size_t line_no = 0;  // 1-based
  std::string message;
};

using DocRecord = std::variant<Document, LineError>;

// Expands shell-style globs to a sorted list of regular files.
// Patterns without wildcards must name an existing file (IoError otherwise).
std::vector<std::string> expand_globs(const std::vector<std::string>& patterns);

// How to fill fields that raw corpora often lack. When fill_missing is set,
// absent id/token_count are recomputed from the text with the named tokenizer.
struct ReadPolicy {
  std::string default_source;
  std::string default_category;
  std::optional<Partition> default_partition;
  std::string tokenizer_id = "whitespace";
  bool fill_missing = true;
};

DocRecord parse_document_line(std::string_view line, const ReadPolicy& policy,
                              const std::string& path = "", std::size_t line_no = 0);

// Canonical single-line serialization; fixed field order so identical
// documents serialize to identical bytes.
std::string to_jsonl_line(const Document& doc);

// Streams documents from many line-delimited JSON files, in file order.
// A file that cannot be opened throws IoError; a malformed line yields a
// LineError record instead of a document.
class DocumentReader {
 public:
  explicit DocumentReader(std::vector<std::string> paths, ReadPolicy policy = {});

  std::optional<DocRecord> next();
  const std::vector<std::string>& paths() const { return paths_; }

 private:
  bool open_next_file();

  std::vector<std::string> paths_;
  ReadPolicy policy_;
  std::size_t file_index_ = 0;
  std::size_t line_no_ = 0;
  std::ifstream in_;
  bool file_open_ = false;
};

class DocumentWriter {
 public:
  explicit DocumentWriter(const std::string& path);  // throws IoError

  void write(const Document& doc);
  std::size_t written() const { return written_; }
  void flush();

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t written_ = 0;
};

// Convenience eager loader; errors are appended to *errors when given,
// otherwise malformed lines throw IoError.
std::vector<Document> read_documents(const std::vector<std::string>& globs,
                                     ReadPolicy policy = {},
                                     std::vector<LineError>* errors = nullptr);

void write_documents(const std::vector<Document>& docs, const std::string& path);

}  // namespace textmill
