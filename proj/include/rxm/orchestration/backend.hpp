#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rxm::orchestration {

struct BackendRequest {
  std::string model_name;
  std::string prompt;
  nlohmann::json options = nlohmann::json::object();
};

enum class BackendErrorKind { kUnavailable, kTimeout, kHttpError };

std::string_view to_string(BackendErrorKind kind);

struct BackendError {
  BackendErrorKind kind = BackendErrorKind::kUnavailable;
  std::string detail;
};

// Raw model text on success; the text is opaque until parsed.
struct BackendResponse {
  std::optional<std::string> text;
  std::optional<BackendError> error;

  static BackendResponse ok(std::string text) { return {std::move(text), std::nullopt}; }
  static BackendResponse fail(BackendErrorKind kind, std::string detail) {
    return {std::nullopt, BackendError{kind, std::move(detail)}};
  }
  bool succeeded() const { return text.has_value(); }
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse generate(const BackendRequest& request) = 0;
  virtual std::string describe() const = 0;
};

// Always unavailable.
class UnavailableBackend final : public Backend {
 public:
  BackendResponse generate(const BackendRequest& request) override;
  std::string describe() const override { return "unavailable"; }
};

// Canned replies consumed in order; once exhausted every call is
// unavailable. Prompts are recorded for inspection.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies);
  // The file holds a JSON array of strings. Throws Error(kFileNotFound) or
  // Error(kInvalidArgument).
  static ScriptedBackend from_file(const std::filesystem::path& path);

  BackendResponse generate(const BackendRequest& request) override;
  std::string describe() const override;

  std::size_t calls() const { return prompts_.size(); }
  std::size_t remaining() const { return replies_.size() - next_; }
  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_;
};

inline constexpr std::chrono::seconds kBackendTimeout{60};

// POST <base_url>/api/generate with {"model", "prompt", "stream": false};
// the reply's "response" field is the text. No transport-level retries.
class GenerateHttpBackend final : public Backend {
 public:
  explicit GenerateHttpBackend(std::string base_url,
                               std::chrono::seconds timeout = kBackendTimeout);
  BackendResponse generate(const BackendRequest& request) override;
  std::string describe() const override { return base_url_ + "/api/generate"; }

  static nlohmann::json request_body(const BackendRequest& request);

 private:
  std::string base_url_;
  std::chrono::seconds timeout_;
};

// POST <base_url>/v1/chat/completions with one user message; the text is
// choices[0].message.content. The bearer token, if any, is read from the
// named environment variable at call time.
class ChatHttpBackend final : public Backend {
 public:
  ChatHttpBackend(std::string base_url, std::string api_key_env = "RXM_API_KEY",
                  std::chrono::seconds timeout = kBackendTimeout);
  BackendResponse generate(const BackendRequest& request) override;
  std::string describe() const override { return base_url_ + "/v1/chat/completions"; }

  static nlohmann::json request_body(const BackendRequest& request);

 private:
  std::string base_url_;
  std::string api_key_env_;
  std::chrono::seconds timeout_;
};

}  // namespace rxm::orchestration
