#include "negobench/agents.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "negobench/answer_parser.hpp"
#include "negobench/deal_space.hpp"
#include "negobench/rng.hpp"

namespace negobench {

std::string_view to_string(AgentError::Kind kind) {
  switch (kind) {
    case AgentError::Kind::kTransport: return "transport";
    case AgentError::Kind::kAuthentication: return "authentication";
    case AgentError::Kind::kEmptyCompletion: return "empty_completion";
    case AgentError::Kind::kProtocol: return "protocol";
    case AgentError::Kind::kPolicy: return "policy";
  }
  return "transport";
}

std::uint64_t fnv1a64(std::string_view text, std::uint64_t basis) {
  std::uint64_t hash = basis;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

AgentEndpoint AgentEndpoint::scripted(std::string policy_id, nlohmann::json params) {
  return AgentEndpoint{ScriptedEndpoint{std::move(policy_id), std::move(params)}};
}

AgentEndpoint endpoint_from_json(const nlohmann::json& node) {
  const auto kind = node.value("kind", std::string("scripted"));
  if (kind == "scripted") {
    return AgentEndpoint::scripted(node.at("policy").get<std::string>(),
                                   node.value("params", nlohmann::json::object()));
  }
  if (kind != "remote") throw std::invalid_argument("unknown endpoint kind '" + kind + "'");
  if (node.contains("api_key")) {
    throw std::invalid_argument("credentials must come from an environment variable (api_key_env), not the plan");
  }
  RemoteEndpoint remote;
  remote.base_url = node.at("base_url").get<std::string>();
  remote.api_key_env = node.value("api_key_env", std::string());
  remote.generation.model_name = node.at("model").get<std::string>();
  remote.generation.temperature = node.value("temperature", 0.0);
  if (remote.generation.temperature < 0) throw std::invalid_argument("temperature must be >= 0");
  if (node.contains("seed")) remote.generation.seed = node.at("seed").get<std::int64_t>();
  remote.generation.max_tokens = node.value("max_tokens", 1024);
  remote.retry.max_attempts = node.value("max_attempts", 4);
  remote.retry.initial_backoff = std::chrono::milliseconds(node.value("initial_backoff_ms", 500));
  remote.retry.max_backoff = std::chrono::milliseconds(node.value("max_backoff_ms", 8000));
  remote.timeout = std::chrono::seconds(node.value("timeout_s", 120));
  return AgentEndpoint{remote};
}

nlohmann::json endpoint_to_json(const AgentEndpoint& endpoint) {
  if (const auto* scripted = std::get_if<ScriptedEndpoint>(&endpoint.kind)) {
    return {{"kind", "scripted"}, {"policy", scripted->policy_id}, {"params", scripted->params}};
  }
  const auto& remote = std::get<RemoteEndpoint>(endpoint.kind);
  nlohmann::json node{{"kind", "remote"},
                      {"base_url", remote.base_url},
                      {"api_key_env", remote.api_key_env},
                      {"model", remote.generation.model_name},
                      {"temperature", remote.generation.temperature},
                      {"max_tokens", remote.generation.max_tokens},
                      {"max_attempts", remote.retry.max_attempts}};
  if (remote.generation.seed) node["seed"] = *remote.generation.seed;
  return node;
}

// ---------------------------------------------------------------------------
// Scripted policies

PolicyRegistry& PolicyRegistry::global() {
  static PolicyRegistry* registry = [] {
    auto* r = new PolicyRegistry();
    register_builtin_policies(*r);
    return r;
  }();
  return *registry;
}

void PolicyRegistry::register_policy(const std::string& id, ScriptedPolicy policy) {
  std::lock_guard lock(mutex_);
  if (!policies_.emplace(id, std::move(policy)).second) {
    throw std::invalid_argument("scripted policy '" + id + "' is already registered");
  }
}

ScriptedPolicy PolicyRegistry::resolve(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = policies_.find(id);
  if (it == policies_.end()) throw std::out_of_range("unknown scripted policy '" + id + "'");
  return it->second;
}

bool PolicyRegistry::contains(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return policies_.contains(id);
}

void register_scripted_policy(const std::string& id, ScriptedPolicy policy) {
  PolicyRegistry::global().register_policy(id, std::move(policy));
}

namespace {

const GameConfig& require_config(const AgentRequest& request) {
  if (!request.config) throw AgentError(AgentError::Kind::kPolicy, "scripted policy needs the game config");
  return *request.config;
}

Score collective(const std::vector<Score>& scores) {
  Score total = 0;
  for (Score s : scores) total += s;
  return total;
}

Deal oracle_deal(const GameConfig& config, PartyIndex party) {
  // Ranking: self-acceptable, then passes the vote, then collective score.
  // Ties keep the first deal in enumeration order.
  std::optional<Deal> best;
  std::tuple<bool, bool, Score, Score> best_key{};
  for_each_deal(config, [&](const Deal& deal) {
    const auto scores = party_scores(config, deal);
    const Score own = scores[party - 1];
    const std::tuple key{own >= config.party(party).threshold, deal_success(config, deal), collective(scores), own};
    if (!best || key > best_key) {
      best = deal;
      best_key = key;
    }
  });
  return *best;
}

Deal own_best_deal(const GameConfig& config, PartyIndex party) {
  std::optional<Deal> best;
  Score best_score = 0;
  for_each_deal(config, [&](const Deal& deal) {
    const Score own = deal_score(config, deal, party);
    if (!best || own > best_score) {
      best = deal;
      best_score = own;
    }
  });
  return *best;
}

std::string oracle_policy(const AgentRequest& request, const nlohmann::json&) {
  const auto& config = require_config(request);
  const Deal deal = oracle_deal(config, request.party);
  const std::string notation = deal_notation(config, deal);
  return render_answer("This deal meets my minimum score and gives the group the highest total I can find.",
                       "I suggest a deal that should work for all of us.", notation,
                       "Keep supporting " + notation + " unless someone raises a new concern.");
}

std::string stubborn_policy(const AgentRequest& request, const nlohmann::json&) {
  const auto& config = require_config(request);
  const std::string notation = deal_notation(config, own_best_deal(config, request.party));
  return render_answer("I will not move from my preferred options.", "My position has not changed.", notation,
                       "Insist on " + notation + ".");
}

std::string echo_policy(const AgentRequest& request, const nlohmann::json&) {
  const auto& config = require_config(request);
  const std::string notation = deal_notation(config, config.initial_deal);
  return render_answer("Restating the initial deal.", "I propose the initial deal.", notation, "");
}

std::string malformed_policy(const AgentRequest&, const nlohmann::json&) {
  return "**ANSWER**\n"
         "I think we should build close to the water and keep the compensation moderate so that everybody can "
         "live with the outcome. Let us agree on something balanced.\n"
         "**PLAN**\n"
         "Keep pushing for the water site and ask the others what they need.";
}

std::string random_policy(const AgentRequest& request, const nlohmann::json& params) {
  const auto& config = require_config(request);
  SplitMix64 rng(fnv1a64(request.user_prompt, fnv1a64(std::to_string(request.party), request.seed)));
  std::vector<int> choices;
  for (const auto& issue : config.issues) {
    choices.push_back(1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(issue.option_count))));
  }
  const Deal deal(choices);
  const std::string notation = deal_notation(config, deal);
  const double malformed_rate = params.value("malformed_rate", 0.0);
  const double draw = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
  if (draw >= malformed_rate) {
    return render_answer("Trying something new.", "How about this?", notation, "Try another combination.");
  }
  switch (rng.bounded(6)) {
    case 0:  // no tags at all
      return "I would like " + notation + " please.";
    case 1:  // markdown headings instead of tags
      return "**ANSWER**\nWe should aim for a balanced outcome.";
    case 2:  // plan inside the public answer
      return "<ANSWER>Here is my idea <DEAL>" + notation + "</DEAL> <PLAN>ask for more</PLAN></ANSWER>";
    case 3:  // hallucinated tag
      return "<SCRATCHPAD>thinking</SCRATCHPAD><ANSWER><SUGGESTION>" + notation + "</SUGGESTION></ANSWER>";
    case 4:  // option tokens without DEAL tags
      return "<ANSWER>I propose " + notation + ".</ANSWER>";
    default:  // partial deal
      return "<ANSWER>Let us fix <DEAL>" + notation.substr(0, 2) + "</DEAL> first.</ANSWER>";
  }
}

}  // namespace

void register_builtin_policies(PolicyRegistry& registry) {
  registry.register_policy("oracle-negotiator", oracle_policy);
  registry.register_policy("stubborn", stubborn_policy);
  registry.register_policy("echo-initial-deal", echo_policy);
  registry.register_policy("malformed", malformed_policy);
  registry.register_policy("random-proposer", random_policy);
}

// ---------------------------------------------------------------------------
// Remote chat-completions client

namespace {

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("base_url needs a scheme: '" + url + "'");
  const auto path_begin = url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  parsed.scheme_host_port = url.substr(0, path_begin);
  if (path_begin != std::string::npos) parsed.path_prefix = url.substr(path_begin);
  while (!parsed.path_prefix.empty() && parsed.path_prefix.back() == '/') parsed.path_prefix.pop_back();
  return parsed;
}

}  // namespace

ChatClient::ChatClient(RemoteEndpoint endpoint, Sleeper sleeper)
    : endpoint_(std::move(endpoint)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

nlohmann::json ChatClient::request_body(const std::string& system_prompt, const std::string& user_prompt,
                                        std::int64_t default_seed) const {
  const auto& g = endpoint_.generation;
  return {
      {"model", g.model_name},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", system_prompt}},
                              {{"role", "user"}, {"content", user_prompt}}})},
      {"temperature", g.temperature},
      {"seed", g.seed.value_or(default_seed)},
      {"max_tokens", g.max_tokens},
  };
}

AgentReply ChatClient::complete(const std::string& system_prompt, const std::string& user_prompt,
                                std::int64_t default_seed) const {
  httplib::Headers headers;
  if (!endpoint_.api_key_env.empty()) {
    const char* key = std::getenv(endpoint_.api_key_env.c_str());
    if (!key || !*key) {
      throw AgentError(AgentError::Kind::kAuthentication,
                       "environment variable " + endpoint_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const auto url = parse_url(endpoint_.base_url);
  const std::string path = url.path_prefix + "/chat/completions";
  const std::string body = request_body(system_prompt, user_prompt, default_seed).dump();

  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(endpoint_.timeout);
  client.set_read_timeout(endpoint_.timeout);
  client.set_write_timeout(endpoint_.timeout);

  const auto& retry = endpoint_.retry;
  auto backoff = retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= std::max(1, retry.max_attempts); ++attempt) {
    if (attempt > 1) {
      sleeper_(backoff);
      backoff = std::min(retry.max_backoff, std::chrono::milliseconds(static_cast<std::int64_t>(
                                                static_cast<double>(backoff.count()) * retry.backoff_factor)));
    }
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
      throw AgentError(AgentError::Kind::kAuthentication, "server rejected credentials (HTTP " +
                                                              std::to_string(status) + ")");
    }
    if (status == 429 || status >= 500) {
      last_error = "HTTP " + std::to_string(status);
      continue;
    }
    if (status != 200) {
      throw AgentError(AgentError::Kind::kProtocol, "HTTP " + std::to_string(status) + ": " + result->body);
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw AgentError(AgentError::Kind::kProtocol, std::string("invalid JSON response: ") + e.what());
    }
    AgentReply reply;
    reply.attempts = attempt;
    try {
      const auto& content = doc.at("choices").at(0).at("message").at("content");
      if (content.is_string()) reply.text = content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw AgentError(AgentError::Kind::kProtocol, std::string("unexpected response shape: ") + e.what());
    }
    if (reply.text.empty()) throw AgentError(AgentError::Kind::kEmptyCompletion, "empty completion");
    if (doc.contains("usage") && doc["usage"].is_object()) {
      reply.usage = TokenUsage{doc["usage"].value("prompt_tokens", std::int64_t{0}),
                               doc["usage"].value("completion_tokens", std::int64_t{0})};
    }
    return reply;
  }
  throw AgentError(AgentError::Kind::kTransport,
                   "giving up after " + std::to_string(retry.max_attempts) + " attempts: " + last_error);
}

AgentReply complete(const AgentEndpoint& endpoint, const AgentRequest& request, const PolicyRegistry& registry) {
  if (const auto* scripted = std::get_if<ScriptedEndpoint>(&endpoint.kind)) {
    ScriptedPolicy policy;
    try {
      policy = registry.resolve(scripted->policy_id);
    } catch (const std::out_of_range& e) {
      throw AgentError(AgentError::Kind::kPolicy, e.what());
    }
    AgentReply reply;
    reply.text = policy(request, scripted->params);
    if (reply.text.empty()) throw AgentError(AgentError::Kind::kEmptyCompletion, "empty completion");
    return reply;
  }
  ChatClient client(std::get<RemoteEndpoint>(endpoint.kind));
  return client.complete(request.system_prompt, request.user_prompt, static_cast<std::int64_t>(request.seed));
}

}  // namespace negobench
