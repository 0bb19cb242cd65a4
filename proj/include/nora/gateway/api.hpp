#pragma once

// Transport-independent REST surface. The HTTP server (server.hpp) and the
// tests both drive Gateway::handle directly.

#include <cctype>

#include "nora/dialogue/serialize.hpp"
#include "nora/gateway/platform.hpp"

namespace nora::gateway {

struct Request {
  std::string method;  // "GET", "POST", "PUT"
  std::string target;  // path with optional query string
  std::string body;
  std::optional<std::string> bearer;
};

struct Response {
  int status = 200;
  json body = json::object();
};

// One status per error kind.
inline constexpr int http_status(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::InvalidInput: return 400;
    case ErrorKind::Unauthorized: return 401;
    case ErrorKind::Forbidden: return 403;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Conflict: return 409;
    case ErrorKind::InvalidState: return 412;
    case ErrorKind::Unprocessable: return 422;
    case ErrorKind::Upstream: return 502;
  }
  return 500;
}

inline Response error_response(ErrorKind k, const std::string& message) {
  return {http_status(k), json{{"error", {{"kind", to_string(k)}, {"message", message}}}}};
}

inline std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

struct Target {
  std::string path;
  std::map<std::string, std::string> query;
};

inline Target split_target(std::string_view target) {
  Target t;
  const auto q = target.find('?');
  t.path = percent_decode(target.substr(0, q));
  if (q == std::string_view::npos) return t;
  auto rest = target.substr(q + 1);
  while (!rest.empty()) {
    const auto amp = rest.find('&');
    const auto pair = rest.substr(0, amp);
    const auto eq = pair.find('=');
    if (!pair.empty()) {
      t.query[percent_decode(pair.substr(0, eq))] =
          eq == std::string_view::npos ? std::string() : percent_decode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return t;
}

// "direct:<a>|<b>" or "topic:<id>".
inline chat::ConversationRef parse_conversation_key(std::string_view key) {
  if (key.rfind("topic:", 0) == 0) return chat::ConversationRef::topic(std::string(key.substr(6)));
  if (key.rfind("direct:", 0) == 0) {
    const auto rest = key.substr(7);
    const auto bar = rest.find('|');
    if (bar != std::string_view::npos) {
      return chat::ConversationRef::direct(std::string(rest.substr(0, bar)), std::string(rest.substr(bar + 1)));
    }
  }
  fail(ErrorKind::InvalidInput, "bad conversation key: " + std::string(key));
}

inline std::string decode_base64(const std::string& s) {
  std::string out(s.size(), '\0');
  std::size_t len = 0;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), s.data(), s.size(), " \r\n",
                        &len, nullptr, sodium_base64_VARIANT_ORIGINAL) != 0) {
    fail(ErrorKind::InvalidInput, "audio.data is not valid base64");
  }
  out.resize(len);
  return out;
}

// Profile as returned to its owner; the credential hash never leaves the server.
inline json public_profile(const UserProfile& p) {
  json j = p;
  j.erase("credential_hash");
  return j;
}

class Gateway {
 public:
  explicit Gateway(Platform& platform) : p_(platform) {}

  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      return error_response(e.kind(), e.what());
    } catch (const json::exception& e) {
      return error_response(ErrorKind::InvalidInput, std::string("bad request body: ") + e.what());
    }
  }

  Platform& platform() { return p_; }

 private:
  Response route(const Request& req) {
    const auto t = split_target(req.target);
    const auto& m = req.method;
    const auto& path = t.path;

    if (m == "GET" && path == "/api/health") return {200, {{"status", "ok"}}};
    if (m == "POST" && path == "/api/auth/register") return do_register(body_of(req));
    if (m == "POST" && path == "/api/auth/login") return do_login(body_of(req));

    if (path.rfind("/api/", 0) != 0) fail(ErrorKind::NotFound, "no route for " + path);
    const auto user = p_.auth().authenticate(req.bearer);

    if (m == "POST" && path == "/api/auth/logout") {
      p_.auth().logout(*req.bearer);
      return {200, {{"ok", true}}};
    }
    if (m == "POST" && path == "/api/session/start") return do_start(user, body_of(req));
    if (m == "POST" && path == "/api/session/turn") return do_turn(user, body_of(req));
    if (m == "POST" && path == "/api/session/resume") return turn_response(p_.resume(user));
    if (m == "GET" && path == "/api/session") return do_session(user, t.query);
    if (m == "GET" && path == "/api/progress") return {200, p_.progress(user)};
    if (m == "GET" && path == "/api/profile") return {200, public_profile(require_user(p_.store(), user))};
    if (m == "PUT" && path == "/api/profile") return do_profile(user, body_of(req));
    if (m == "PUT" && path == "/api/profile/interests") return do_interests(user, body_of(req));
    if (m == "GET" && path == "/api/chat/contacts") return do_contacts(user);
    if (m == "POST" && path == "/api/chat/contacts") return do_add_friend(user, body_of(req));
    if (m == "POST" && path == "/api/chat/direct") return do_direct(user, body_of(req));
    if (m == "GET" && path == "/api/chat/sync") return do_sync(user, t.query);
    if (m == "GET" && path == "/api/chat/conversations") return do_conversations(user);
    if (m == "POST" && path == "/api/chat/report") return do_report(user, body_of(req));
    if (m == "POST" && path.rfind("/api/chat/topic/", 0) == 0) {
      return do_post_topic(user, path.substr(16), body_of(req));
    }
    if (m == "POST" && path.rfind("/api/chat/meeting/", 0) == 0) {
      const auto url = p_.chat().get_or_create_meeting(path.substr(18), p_.meetings());
      return {200, {{"topic", path.substr(18)}, {"join_url", url}}};
    }
    fail(ErrorKind::NotFound, "no route for " + m + " " + path);
  }

  static json body_of(const Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorKind::InvalidInput, "body must be a JSON object");
    return j;
  }

  static std::string required_string(const json& body, const char* field) {
    if (!body.contains(field) || !body[field].is_string()) {
      fail(ErrorKind::InvalidInput, std::string("missing string field '") + field + "'");
    }
    return body[field].get<std::string>();
  }

  Response do_register(const json& b) {
    Registration r;
    r.user = required_string(b, "user");
    r.alias = b.contains("alias") ? required_string(b, "alias") : r.user;
    r.password = required_string(b, "password");
    r.language = parse_language(b.value("language", std::string("en")));
    return {201, public_profile(p_.register_user(r))};
  }

  Response do_login(const json& b) {
    return {200, p_.auth().login(required_string(b, "user"), required_string(b, "password"))};
  }

  Response do_start(const std::string& user, const json& b) {
    if (!b.contains("day") || !b["day"].is_number_integer()) fail(ErrorKind::InvalidInput, "missing integer 'day'");
    const auto response = p_.start_session(user, b["day"].get<int>());
    return {201, {{"response", response}}};
  }

  Response do_turn(const std::string& user, const json& b) {
    const bool has_text = b.contains("text");
    const bool has_audio = b.contains("audio");
    if (has_text == has_audio) fail(ErrorKind::InvalidInput, "send exactly one of 'text' or 'audio'");
    if (has_text) return turn_response(p_.session_turn(user, required_string(b, "text")));
    const auto& a = b["audio"];
    if (!a.is_object()) fail(ErrorKind::InvalidInput, "'audio' must be an object");
    std::optional<empathy::AudioFeatures> features;
    if (a.contains("features")) features = a["features"].get<empathy::AudioFeatures>();
    return turn_response(p_.speech_turn(user, decode_base64(required_string(a, "data")), features));
  }

  static Response turn_response(const TurnOutcome& o) {
    json body{{"response", o.result.response},
              {"frame", o.frame},
              {"scores", o.scores ? json(*o.scores) : json(nullptr)},
              {"phase", to_string(o.result.state.phase)}};
    if (o.result.summary) body["summary"] = *o.result.summary;
    return {200, std::move(body)};
  }

  Response do_session(const std::string& user, const std::map<std::string, std::string>& q) {
    std::optional<dialogue::SessionState> s;
    if (auto it = q.find("day"); it != q.end()) {
      s = p_.sessions().load(user, parse_int(it->second, "day"));
    } else {
      s = p_.sessions().open_session(user);
    }
    if (!s) fail(ErrorKind::NotFound, "no such session");
    return {200, *s};
  }

  Response do_profile(const std::string& user, const json& b) {
    auto updated = update_user(p_.store(), user, [&](UserProfile& prof) {
      if (b.contains("language")) prof.language = parse_language(b["language"].get<std::string>());
      if (b.contains("program")) {
        const auto& pr = b["program"];
        prof.program.name = pr.value("name", prof.program.name);
        prof.program.length_days = pr.value("length_days", prof.program.length_days);
      }
      if (b.contains("activities")) prof.activities = b["activities"].get<dialogue::ActivityPreferences>();
      if (b.contains("alias")) fail(ErrorKind::InvalidInput, "alias cannot be changed");
    });
    return {200, public_profile(updated)};
  }

  Response do_interests(const std::string& user, const json& b) {
    if (!b.contains("topics") || !b["topics"].is_array()) fail(ErrorKind::InvalidInput, "missing array 'topics'");
    const auto diff = p_.chat().set_interests(user, b["topics"].get<std::set<std::string>>());
    return {200, {{"added", diff.added}, {"removed", diff.removed}}};
  }

  Response do_contacts(const std::string& user) {
    json list = json::array();
    for (const auto& c : p_.chat().contacts(user)) list.push_back({{"user", c.user}, {"alias", c.alias}});
    return {200, {{"contacts", list}}};
  }

  Response do_add_friend(const std::string& user, const json& b) {
    const auto c = p_.chat().add_friend(user, required_string(b, "alias"));
    return {201, {{"user", c.user}, {"alias", c.alias}}};
  }

  Response do_direct(const std::string& user, const json& b) {
    const auto to = required_string(b, "to");
    const auto id = p_.chat().send_direct(user, to, required_string(b, "body"));
    return {201, {{"id", id}, {"conversation", chat::ConversationRef::direct(user, to)}}};
  }

  Response do_post_topic(const std::string& user, const std::string& topic, const json& b) {
    const auto id = p_.chat().post_topic(user, topic, required_string(b, "body"));
    return {201, {{"id", id}, {"conversation", chat::ConversationRef::topic(topic)}}};
  }

  Response do_sync(const std::string& user, const std::map<std::string, std::string>& q) {
    chat::ConversationRef conv;
    if (auto it = q.find("conversation"); it != q.end()) {
      conv = parse_conversation_key(it->second);
    } else if (auto w = q.find("with"); w != q.end()) {
      conv = chat::ConversationRef::direct(user, w->second);
    } else if (auto tp = q.find("topic"); tp != q.end()) {
      conv = chat::ConversationRef::topic(tp->second);
    } else {
      fail(ErrorKind::InvalidInput, "name a conversation, 'with' user or 'topic'");
    }
    chat::MessageId last_seen = 0;
    if (auto it = q.find("last_seen"); it != q.end()) last_seen = parse_int(it->second, "last_seen");
    const auto r = p_.chat().sync(user, conv, last_seen);
    return {200, {{"messages", r.messages}, {"cursor", r.cursor}}};
  }

  Response do_conversations(const std::string& user) {
    json list = json::array();
    for (const auto& c : p_.chat().conversations_of(user)) list.push_back({{"key", c.key()}, {"conversation", c}});
    return {200, {{"conversations", list}}};
  }

  Response do_report(const std::string& user, const json& b) {
    chat::MessageRef ref;
    if (b.contains("conversation") && b["conversation"].is_string()) {
      ref.conversation = parse_conversation_key(b["conversation"].get<std::string>());
    } else {
      ref.conversation = b.at("conversation").get<chat::ConversationRef>();
    }
    if (!b.contains("id") || !b["id"].is_number_unsigned()) fail(ErrorKind::InvalidInput, "missing message 'id'");
    ref.id = b["id"].get<chat::MessageId>();
    const auto r = p_.chat().report_message(user, ref, b.value("reason", std::string()));
    return {201, r};
  }

  static long long parse_int(const std::string& s, const char* name) {
    try {
      std::size_t used = 0;
      const auto v = std::stoll(s, &used);
      if (used == s.size() && v >= 0) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::InvalidInput, std::string("'") + name + "' must be a non-negative integer");
  }

  Platform& p_;
};

}  // namespace nora::gateway
