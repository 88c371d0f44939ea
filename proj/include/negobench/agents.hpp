#pragma once

// Agent abstraction: deterministic scripted policies and a remote
// chat-completions client with bounded exponential-backoff retries.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "negobench/game.hpp"

namespace negobench {

class AgentError : public std::runtime_error {
 public:
  enum class Kind { kTransport, kAuthentication, kEmptyCompletion, kProtocol, kPolicy };
  AgentError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(AgentError::Kind kind);

struct GenerationParams {
  double temperature = 0.0;
  std::optional<std::int64_t> seed;  // defaults to the experiment seed
  int max_tokens = 1024;
  std::string model_name;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

struct ScriptedEndpoint {
  std::string policy_id;
  nlohmann::json params = nlohmann::json::object();
};

struct RemoteEndpoint {
  std::string base_url;     // e.g. http://127.0.0.1:8080/v1
  std::string api_key_env;  // environment variable holding the key; may be empty
  GenerationParams generation;
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
};

struct AgentEndpoint {
  std::variant<ScriptedEndpoint, RemoteEndpoint> kind;

  static AgentEndpoint scripted(std::string policy_id, nlohmann::json params = nlohmann::json::object());
};

AgentEndpoint endpoint_from_json(const nlohmann::json& node);
// Never includes credential values, only the variable name.
nlohmann::json endpoint_to_json(const AgentEndpoint& endpoint);

// Everything a call may depend on. Scripted policies must be pure functions
// of this request.
struct AgentRequest {
  const GameConfig* config = nullptr;
  PartyIndex party = 0;
  std::string system_prompt;
  std::string user_prompt;
  std::uint64_t seed = 0;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct AgentReply {
  std::string text;
  std::optional<TokenUsage> usage;
  int attempts = 1;
};

using ScriptedPolicy = std::function<std::string(const AgentRequest&, const nlohmann::json& params)>;

class PolicyRegistry {
 public:
  // Registry preloaded with the built-in policies.
  static PolicyRegistry& global();

  // Throws std::invalid_argument on a duplicate id.
  void register_policy(const std::string& id, ScriptedPolicy policy);
  // Throws std::out_of_range on an unknown id.
  ScriptedPolicy resolve(const std::string& id) const;
  bool contains(const std::string& id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, ScriptedPolicy> policies_;
};

void register_scripted_policy(const std::string& id, ScriptedPolicy policy);

// Built-in policies:
//   echo-initial-deal   proposes the config's initial deal
//   oracle-negotiator   best collective-score deal acceptable to itself,
//                       preferring deals that pass the vote
//   stubborn            its own highest-scoring deal
//   malformed           **ANSWER** markup, no tags, no option tokens
//   random-proposer     seeded random deals; params.malformed_rate in [0,1]
void register_builtin_policies(PolicyRegistry& registry);

// Sleeps between retries; replaceable in tests.
using Sleeper = std::function<void(std::chrono::milliseconds)>;

class ChatClient {
 public:
  explicit ChatClient(RemoteEndpoint endpoint, Sleeper sleeper = {});

  // POST <base_url>/chat/completions with system + user messages.
  AgentReply complete(const std::string& system_prompt, const std::string& user_prompt,
                      std::int64_t default_seed) const;

  // The request body as sent on the wire.
  nlohmann::json request_body(const std::string& system_prompt, const std::string& user_prompt,
                              std::int64_t default_seed) const;

 private:
  RemoteEndpoint endpoint_;
  Sleeper sleeper_;
};

AgentReply complete(const AgentEndpoint& endpoint, const AgentRequest& request,
                    const PolicyRegistry& registry = PolicyRegistry::global());

// FNV-1a 64-bit, used to derive per-call seeds for scripted policies.
std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace negobench
