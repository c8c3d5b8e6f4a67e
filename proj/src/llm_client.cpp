#include "creditnet/llm_client.hpp"

#include <cstdlib>
#include <fstream>

#include "httplib.h"

namespace creditnet {

LlmClientConfig LlmClientConfig::from_env() {
  LlmClientConfig config;
  if (const char* v = std::getenv("LLM_ENDPOINT")) config.endpoint = v;
  if (const char* v = std::getenv("LLM_MODEL")) config.model = v;
  if (const char* v = std::getenv("LLM_API_KEY")) config.api_key = v;
  return config;
}

HttpLlmClient::HttpLlmClient(LlmClientConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty())
    fail(Errc::invalid_config, "LLM endpoint not configured");
}

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    fail(Errc::invalid_config, "endpoint \"" + url + "\" has no scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string HttpLlmClient::complete(const std::string& prompt) {
  const SplitUrl url = split_url(config_.endpoint);
  nlohmann::ordered_json request;
  request["model"] = config_.model;
  request["messages"] = nlohmann::ordered_json::array(
      {{{"role", "user"}, {"content", prompt}}});
  const std::string body = request.dump();

  std::string last_error;
  for (std::size_t attempt = 0; attempt <= config_.transport_retries;
       ++attempt) {
    httplib::Client client(url.origin);
    client.set_connection_timeout(std::chrono::milliseconds(
        static_cast<long>(config_.timeout_seconds * 1000)));
    client.set_read_timeout(std::chrono::milliseconds(
        static_cast<long>(config_.timeout_seconds * 1000)));
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);
    const auto result =
        client.Post(url.path, headers, body, "application/json");
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status < 200 || result->status >= 300) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    try {
      const auto reply = nlohmann::json::parse(result->body);
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::transport_error,
           std::string("unexpected completion payload: ") + e.what());
    }
  }
  fail(Errc::transport_error, "request to " + config_.endpoint +
                                  " failed after " +
                                  std::to_string(config_.transport_retries + 1) +
                                  " attempts: " + last_error);
}

MockLlmClient::MockLlmClient(std::vector<MockScriptEntry> script)
    : mutex_(std::make_unique<std::mutex>()), script_(std::move(script)) {}

MockLlmClient MockLlmClient::from_json(const nlohmann::json& doc) {
  if (!doc.is_array())
    fail(Errc::schema_error, "mock script must be an array");
  std::vector<MockScriptEntry> script;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("expect_substring") ||
        !item.contains("reply"))
      fail(Errc::schema_error,
           "mock script entries need expect_substring and reply");
    script.push_back({item.at("expect_substring").get<std::string>(),
                      item.at("reply").get<std::string>()});
  }
  return MockLlmClient(std::move(script));
}

MockLlmClient MockLlmClient::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot read mock script " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, "mock script " + path + ": " + e.what());
  }
  return from_json(doc);
}

std::string MockLlmClient::complete(const std::string& prompt) {
  std::lock_guard<std::mutex> lock(*mutex_);
  if (next_ >= script_.size())
    fail(Errc::transport_error, "mock script exhausted after " +
                                    std::to_string(script_.size()) +
                                    " replies");
  const MockScriptEntry& entry = script_[next_];
  if (prompt.find(entry.expect_substring) == std::string::npos)
    fail(Errc::transport_error,
         "mock script entry " + std::to_string(next_) +
             " expected the prompt to contain \"" + entry.expect_substring +
             "\"");
  ++next_;
  return entry.reply;
}

std::size_t MockLlmClient::consumed() const {
  std::lock_guard<std::mutex> lock(*mutex_);
  return next_;
}

std::size_t MockLlmClient::remaining() const {
  std::lock_guard<std::mutex> lock(*mutex_);
  return script_.size() - next_;
}

nlohmann::ordered_json mock_script_to_json(
    const std::vector<MockScriptEntry>& script) {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& entry : script)
    doc.push_back({{"expect_substring", entry.expect_substring},
                   {"reply", entry.reply}});
  return doc;
}

}  // namespace creditnet
