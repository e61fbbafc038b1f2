#include "textmill/llm_client.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/text.hpp"

namespace textmill {

namespace {

class HttpChatEndpoint final : public ChatEndpoint {
 public:
  explicit HttpChatEndpoint(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) {
      throw ConfigError("endpoint.base_url is required (or set endpoint.mock_dir)");
    }
  }

  ChatResult complete(const std::string&, const std::string& prompt) override {
    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout_s, 0);
    client.set_read_timeout(cfg_.timeout_s, 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    nlohmann::json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "user"}, {"content", prompt}}});

    auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
    ChatResult out;
    if (!res) {
      out.kind = ChatResult::Kind::Transport;
      out.error = "transport: " + httplib::to_string(res.error());
      return out;
    }
    if (res->status == 429 || res->status >= 500) {
      out.kind = ChatResult::Kind::Transport;
      out.error = "http " + std::to_string(res->status);
      return out;
    }
    if (res->status >= 400) {
      out.kind = ChatResult::Kind::Refused;
      out.error = "http " + std::to_string(res->status) + ": " + res->body;
      return out;
    }
    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) {
      out.kind = ChatResult::Kind::Transport;
      out.error = "unparseable response body";
      return out;
    }
    try {
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      out.kind = ChatResult::Kind::Transport;
      out.error = "response missing choices[0].message.content";
      return out;
    }
    if (out.text.empty()) {
      out.kind = ChatResult::Kind::Refused;
      out.error = "empty completion";
      return out;
    }
    out.kind = ChatResult::Kind::Ok;
    return out;
  }

  std::string model_id() const override { return cfg_.model; }

 private:
  EndpointConfig cfg_;
};

class MockChatEndpoint final : public ChatEndpoint {
 public:
  explicit MockChatEndpoint(std::string dir) : dir_(std::move(dir)) {
    std::ifstream in(dir_ + "/mock.json");
    if (!in.is_open()) {
      throw ConfigError("mock endpoint dir missing mock.json: " + dir_);
    }
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("mock.json invalid: " + std::string(e.what()));
    }
    mode_ = j.value("mode", "echo");
    fail_times_ = j.value("fail_times", 0);
    model_ = j.value("model", "mock-model");
    if (j.contains("responses")) {
      responses_ = j["responses"].get<std::vector<std::string>>();
    }
  }

  ChatResult complete(const std::string& job_id, const std::string& prompt) override {
    int attempt;
    {
      std::lock_guard<std::mutex> lock(mu_);
      attempt = ++attempts_[job_id];
      std::ofstream log(dir_ + "/requests.log", std::ios::app);
      nlohmann::ordered_json entry;
      entry["job_id"] = job_id;
      entry["attempt"] = attempt;
      entry["prompt_hash"] = hash64(prompt);
      log << entry.dump() << "\n";
    }

    ChatResult out;
    if (mode_ == "refuse") {
      out.kind = ChatResult::Kind::Refused;
      out.error = "mock refusal";
      return out;
    }
    if (mode_ == "fail_then_ok" && attempt <= fail_times_) {
      out.kind = ChatResult::Kind::Transport;
      out.error = "mock transport failure " + std::to_string(attempt);
      return out;
    }
    out.kind = ChatResult::Kind::Ok;
    if (mode_ == "canned" && !responses_.empty()) {
      out.text = responses_[hash64(job_id) % responses_.size()];
    } else if (mode_ == "reverse_words") {
      auto nl = prompt.find_last_of('\n');
      std::string last = nl == std::string::npos ? prompt : prompt.substr(nl + 1);
      auto words = whitespace_split(last);
      std::string reversed;
      for (auto it = words.rbegin(); it != words.rend(); ++it) {
        if (!reversed.empty()) reversed += ' ';
        reversed += *it;
      }
      out.text = reversed.empty() ? last : reversed;
    } else {
      out.text = prompt;
    }
    if (out.text.empty()) out.text = " ";
    return out;
  }

  std::string model_id() const override { return model_; }

 private:
  std::string dir_;
  std::string mode_;
  int fail_times_ = 0;
  std::string model_;
  std::vector<std::string> responses_;
  std::mutex mu_;
  std::unordered_map<std::string, int> attempts_;
};

}  // namespace

std::unique_ptr<ChatEndpoint> make_mock_endpoint(const std::string& dir) {
  return std::make_unique<MockChatEndpoint>(dir);
}

std::unique_ptr<ChatEndpoint> make_endpoint(const EndpointConfig& cfg) {
  if (!cfg.mock_dir.empty()) return make_mock_endpoint(cfg.mock_dir);
  return std::make_unique<HttpChatEndpoint>(cfg);
}

}  // namespace textmill
