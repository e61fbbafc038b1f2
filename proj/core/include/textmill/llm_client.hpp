#pragma once

#include <memory>
#include <string>

namespace textmill {

struct EndpointConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string path = "/v1/chat/completions";
  std::string model = "synthesis-model";
  double temperature = 0.8;
  int timeout_s = 120;
  std::string api_key_env = "TEXTMILL_API_KEY";  // credentials never live in config files
  // When set, requests go to the file-backed mock in this directory instead
  // of HTTP. The mock logs every request to <dir>/requests.log.
  std::string mock_dir;
};

struct ChatResult {
  enum class Kind { Ok, Refused, Transport };
  Kind kind = Kind::Transport;
  std::string text;
  std::string error;
};

// One chat completion per call. job_id identifies the request for logging
// and lets the mock script per-job behavior; the HTTP client ignores it.
class ChatEndpoint {
 public:
  virtual ~ChatEndpoint() = default;
  virtual ChatResult complete(const std::string& job_id, const std::string& prompt) = 0;
  virtual std::string model_id() const = 0;
};

// HTTP chat-completion endpoint, or the mock when cfg.mock_dir is set.
std::unique_ptr<ChatEndpoint> make_endpoint(const EndpointConfig& cfg);

// Mock behavior is driven by <dir>/mock.json:
//   {"mode": "echo" | "canned" | "fail_then_ok" | "reverse_words" | "refuse",
//    "fail_times": 2, "responses": ["..."], "model": "mock-model"}
// echo           -> responds with the prompt itself
// canned         -> responses[hash(job_id) % len]
// fail_then_ok   -> per-job: transport failure for the first fail_times
//                   attempts, then echoes
// reverse_words  -> responds with the words of the prompt's last line reversed
// refuse         -> always refuses
std::unique_ptr<ChatEndpoint> make_mock_endpoint(const std::string& dir);

}  // namespace textmill
