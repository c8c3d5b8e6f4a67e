#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "creditnet/errors.hpp"

namespace creditnet {

struct LlmClientConfig {
  std::string endpoint;  // full URL of a chat-completion style endpoint
  std::string model;
  std::string api_key;
  double timeout_seconds = 60.0;
  std::size_t transport_retries = 2;

  // Endpoint, model and credentials come from LLM_ENDPOINT, LLM_MODEL and
  // LLM_API_KEY; timeout and retry counts stay in the config file.
  static LlmClientConfig from_env();
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// POSTs {"model": ..., "messages": [{"role": "user", "content": prompt}]}
// and returns choices[0].message.content. Retries transport failures up to
// transport_retries times, then throws TransportError.
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(LlmClientConfig config);
  std::string complete(const std::string& prompt) override;

 private:
  LlmClientConfig config_;
};

struct MockScriptEntry {
  std::string expect_substring;
  std::string reply;
};

// Scripted client: entries are consumed strictly in order and each prompt
// must contain its entry's expected substring.
class MockLlmClient : public LlmClient {
 public:
  explicit MockLlmClient(std::vector<MockScriptEntry> script);
  MockLlmClient(std::initializer_list<MockScriptEntry> script)
      : MockLlmClient(std::vector<MockScriptEntry>(script)) {}

  // Script format: [{"expect_substring": ..., "reply": ...}, ...].
  static MockLlmClient from_json(const nlohmann::json& doc);
  static MockLlmClient from_file(const std::string& path);

  std::string complete(const std::string& prompt) override;
  std::size_t consumed() const;
  std::size_t remaining() const;

 private:
  std::unique_ptr<std::mutex> mutex_;
  std::vector<MockScriptEntry> script_;
  std::size_t next_ = 0;
};

nlohmann::ordered_json mock_script_to_json(
    const std::vector<MockScriptEntry>& script);

}  // namespace creditnet
