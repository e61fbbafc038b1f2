#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "textmill/document.hpp"

namespace textmill {

// A placeholder is '{' + optional identifier + '}'. Brace pairs that do not
// form an identifier (e.g. inline JSON in a template body) pass through
// verbatim. The empty name "{}" is a valid placeholder bound under "".
struct PromptTemplate {
  std::string template_id;
  std::string body;
  Partition target_partition = Partition::D2;
  std::string seed_category;
};

std::vector<std::string> template_placeholders(std::string_view body);

// Exact substitution, no other mutation of the body.
// Throws ConfigError naming the first unbound placeholder.
std::string render_prompt(const PromptTemplate& t,
                          const std::map<std::string, std::string>& bindings);

// Template files: a front-matter block delimited by '---' lines with
// key: value pairs (template_id, target_partition, seed_category), then the
// body verbatim.
PromptTemplate parse_template_text(std::string_view text, std::string_view origin = "");
PromptTemplate load_template_file(const std::string& path);
std::vector<PromptTemplate> load_templates_dir(const std::string& dir);

// Built-in generation templates used when no template directory is given:
// a long-form course-unit writer (D2) and an MCQ data generator (D3).
const std::vector<PromptTemplate>& builtin_templates();

}  // namespace textmill
