#include "textmill/prompt.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "textmill/error.hpp"

namespace textmill {

namespace {

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Returns the placeholder name if body[pos] opens one, and advances *end past
// the closing brace.
bool scan_placeholder(std::string_view body, std::size_t pos, std::string* name,
                      std::size_t* end) {
  if (body[pos] != '{') return false;
  std::size_t i = pos + 1;
  if (i < body.size() && body[i] == '}') {
    *name = "";
    *end = i + 1;
    return true;
  }
  if (i >= body.size() || !ident_start(body[i])) return false;
  std::size_t start = i;
  while (i < body.size() && ident_char(body[i])) ++i;
  if (i >= body.size() || body[i] != '}') return false;
  *name = std::string(body.substr(start, i - start));
  *end = i + 1;
  return true;
}

}  // namespace

std::vector<std::string> template_placeholders(std::string_view body) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < body.size();) {
    std::string name;
    std::size_t end = 0;
    if (scan_placeholder(body, i, &name, &end)) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(name);
      }
      i = end;
    } else {
      ++i;
    }
  }
  return names;
}

std::string render_prompt(const PromptTemplate& t,
                          const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(t.body.size());
  for (std::size_t i = 0; i < t.body.size();) {
    std::string name;
    std::size_t end = 0;
    if (scan_placeholder(t.body, i, &name, &end)) {
      auto it = bindings.find(name);
      if (it == bindings.end()) {
        throw ConfigError("template " + t.template_id + ": unbound placeholder {" +
                          name + "}");
      }
      out += it->second;
      i = end;
    } else {
      out.push_back(t.body[i]);
      ++i;
    }
  }
  return out;
}

PromptTemplate parse_template_text(std::string_view text, std::string_view origin) {
  PromptTemplate t;
  std::string src(text);
  std::istringstream in(src);
  std::string line;
  if (!std::getline(in, line) || line != "---") {
    throw ConfigError("template " + std::string(origin) +
                      ": expected '---' front-matter delimiter on line 1");
  }
  while (std::getline(in, line)) {
    if (line == "---") break;
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    if (key == "template_id") {
      t.template_id = value;
    } else if (key == "target_partition") {
      t.target_partition = partition_from_string(value);
    } else if (key == "seed_category") {
      t.seed_category = value;
    }
  }
  std::string body;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) body += '\n';
    body += line;
    first = false;
  }
  t.body = std::move(body);
  if (t.template_id.empty()) {
    throw ConfigError("template " + std::string(origin) + ": missing template_id");
  }
  return t;
}

PromptTemplate load_template_file(const std::string& path) {
  std::ifstream in(path, std::ios::in | std::ios::binary);
  if (!in.is_open()) throw IoError("cannot open template: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_template_text(os.str(), path);
}

std::vector<PromptTemplate> load_templates_dir(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<PromptTemplate> templates;
  for (const auto& p : paths) templates.push_back(load_template_file(p));
  return templates;
}

const std::vector<PromptTemplate>& builtin_templates() {
  static const std::vector<PromptTemplate> templates = [] {
    std::vector<PromptTemplate> v;

    PromptTemplate law;
    law.template_id = "law_course_unit";
    law.target_partition = Partition::D2;
    law.seed_category = "Law";
    law.body =
        "Write a long and very detailed law course unit for a textbook, The course "
        "should be inspired from this text snippet:\n\"{}\"\n while trying to be: - "
        "Rigorous - you create challenging textbooks that cover the material in depth. "
        "\n - Engaging - your textbooks have a narrative arc and engaging tone, like "
        "the writing of Michael Lewis. \n - Applied - you use specific and practical "
        "examples. For example, if the topic is integration in calculus, include "
        "equations and proofs of the concept you're teaching. \n As another example, "
        "if the topic is the history of the United States, include dates, names, and "
        "key events. Do not include a title or an introduction, simply write the "
        "content without headlines and introductory phrases. Focus purely on the "
        "subject itself without offering advice on teaching and instruction. The word "
        "count of the textbook needs to be greater than 1000 words.";
    v.push_back(std::move(law));

    PromptTemplate mcq;
    mcq.template_id = "mcq_generator";
    mcq.target_partition = Partition::D3;
    mcq.seed_category = "D2\\Wiki";
    mcq.body =
        "Please play the role of a data generator. Your task is to generate a data "
        "sample in the feild of {topic}.\n\nTask Requirements:\n\n - You will be given "
        "a content about {topic}, you should read carefully and try to generate data "
        "with the content.\n\n - You will be given some examples, which you should "
        "learn and try to generate data in the form of the given examples.\n\n - Do "
        "NOT copy any of the examples given to you!!!\n\n - You should focus on the "
        "quality of the generated data samples not quantity.\n\nOutput Format:\n"
        "Please output in the following format.\n{\"question\": \"questions you "
        "generated\", \"options\": [\"option1\", ..., \"option4\"], \"answer\": "
        "\"gold option\"}\n\nContent:\n{content}\n\nExamples:\n{examples}";
    v.push_back(std::move(mcq));

    return v;
  }();
  return templates;
}

}  // namespace textmill
