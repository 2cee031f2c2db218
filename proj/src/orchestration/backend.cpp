#include "rxm/orchestration/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "rxm/core/error.hpp"

namespace rxm::orchestration {

std::string_view to_string(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::kUnavailable: return "unavailable";
    case BackendErrorKind::kTimeout: return "timeout";
    case BackendErrorKind::kHttpError: return "http_error";
  }
  return "unavailable";
}

BackendResponse UnavailableBackend::generate(const BackendRequest&) {
  return BackendResponse::fail(BackendErrorKind::kUnavailable, "no language-model backend configured");
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kFileNotFound, fmt::format("scripted backend file '{}' not found", path.string()));
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("scripted backend file '{}' is not JSON: {}", path.string(), e.what()));
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("scripted backend file '{}' must hold a JSON array of strings", path.string()));
  }
  std::vector<std::string> replies;
  for (const auto& item : doc) {
    if (!item.is_string()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("scripted backend file '{}' has a non-string entry", path.string()));
    }
    replies.push_back(item.get<std::string>());
  }
  return ScriptedBackend(std::move(replies));
}

BackendResponse ScriptedBackend::generate(const BackendRequest& request) {
  prompts_.push_back(request.prompt);
  if (next_ >= replies_.size()) {
    return BackendResponse::fail(BackendErrorKind::kUnavailable, "scripted replies exhausted");
  }
  return BackendResponse::ok(replies_[next_++]);
}

std::string ScriptedBackend::describe() const {
  return fmt::format("scripted ({} replies)", replies_.size());
}

namespace {

BackendResponse post_json(const std::string& base_url, const std::string& path,
                          const nlohmann::json& body, std::chrono::seconds timeout,
                          const httplib::Headers& headers,
                          const std::function<std::optional<std::string>(const nlohmann::json&)>& extract) {
  httplib::Client client(base_url);
  if (!client.is_valid()) {
    return BackendResponse::fail(BackendErrorKind::kUnavailable,
                                 fmt::format("invalid backend URL '{}'", base_url));
  }
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const auto result = client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    const auto kind = err == httplib::Error::Read || err == httplib::Error::Write ||
                              err == httplib::Error::ConnectionTimeout
                          ? BackendErrorKind::kTimeout
                          : BackendErrorKind::kUnavailable;
    return BackendResponse::fail(kind, fmt::format("{}{}: {}", base_url, path, httplib::to_string(err)));
  }
  if (result->status != 200) {
    return BackendResponse::fail(BackendErrorKind::kHttpError,
                                 fmt::format("{}{} returned HTTP {}", base_url, path, result->status));
  }
  try {
    const auto doc = nlohmann::json::parse(result->body);
    if (auto text = extract(doc)) return BackendResponse::ok(std::move(*text));
  } catch (const nlohmann::json::exception&) {
  }
  return BackendResponse::fail(BackendErrorKind::kHttpError,
                               fmt::format("{}{} reply lacks the expected text field", base_url, path));
}

}  // namespace

GenerateHttpBackend::GenerateHttpBackend(std::string base_url, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

nlohmann::json GenerateHttpBackend::request_body(const BackendRequest& request) {
  return {{"model", request.model_name}, {"prompt", request.prompt}, {"stream", false}};
}

BackendResponse GenerateHttpBackend::generate(const BackendRequest& request) {
  return post_json(base_url_, "/api/generate", request_body(request), timeout_, {},
                   [](const nlohmann::json& doc) -> std::optional<std::string> {
                     if (doc.contains("response") && doc["response"].is_string()) {
                       return doc["response"].get<std::string>();
                     }
                     return std::nullopt;
                   });
}

ChatHttpBackend::ChatHttpBackend(std::string base_url, std::string api_key_env,
                                 std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), api_key_env_(std::move(api_key_env)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

nlohmann::json ChatHttpBackend::request_body(const BackendRequest& request) {
  return {{"model", request.model_name},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
          {"stream", false}};
}

BackendResponse ChatHttpBackend::generate(const BackendRequest& request) {
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env_.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  return post_json(base_url_, "/v1/chat/completions", request_body(request), timeout_, headers,
                   [](const nlohmann::json& doc) -> std::optional<std::string> {
                     const auto& choices = doc.at("choices");
                     if (!choices.is_array() || choices.empty()) return std::nullopt;
                     const auto& content = choices.at(0).at("message").at("content");
                     if (!content.is_string()) return std::nullopt;
                     return content.get<std::string>();
                   });
}

}  // namespace rxm::orchestration
