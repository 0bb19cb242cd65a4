#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "nora/error.hpp"

namespace nora::chat {

using nlohmann::json;

// A direct conversation between two users or a topic thread.
class ConversationRef {
 public:
  enum class Kind { Direct, Topic };

  static ConversationRef direct(std::string a, std::string b) {
    if (a == b) fail(ErrorKind::InvalidInput, "direct conversation needs two users");
    if (b < a) std::swap(a, b);
    ConversationRef r;
    r.kind_ = Kind::Direct;
    r.users_ = {std::move(a), std::move(b)};
    return r;
  }

  static ConversationRef topic(std::string id) {
    if (id.empty()) fail(ErrorKind::InvalidInput, "empty topic id");
    ConversationRef r;
    r.kind_ = Kind::Topic;
    r.topic_ = std::move(id);
    return r;
  }

  Kind kind() const { return kind_; }
  bool is_topic() const { return kind_ == Kind::Topic; }
  const std::array<std::string, 2>& users() const { return users_; }
  const std::string& topic_id() const { return topic_; }

  bool involves(const std::string& user) const {
    return kind_ == Kind::Direct && (users_[0] == user || users_[1] == user);
  }

  const std::string& other(const std::string& user) const {
    return users_[0] == user ? users_[1] : users_[0];
  }

  // Storage key: "direct:<a>|<b>" (sorted) or "topic:<id>".
  std::string key() const {
    return kind_ == Kind::Direct ? "direct:" + users_[0] + "|" + users_[1] : "topic:" + topic_;
  }

  friend bool operator==(const ConversationRef&, const ConversationRef&) = default;
  friend auto operator<=>(const ConversationRef& a, const ConversationRef& b) { return a.key() <=> b.key(); }

 private:
  Kind kind_ = Kind::Topic;
  std::array<std::string, 2> users_;
  std::string topic_;
};

inline void to_json(json& j, const ConversationRef& c) {
  if (c.is_topic()) {
    j = json{{"kind", "topic"}, {"topic", c.topic_id()}};
  } else {
    j = json{{"kind", "direct"}, {"users", c.users()}};
  }
}

inline void from_json(const json& j, ConversationRef& c) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "topic") {
    c = ConversationRef::topic(j.at("topic").get<std::string>());
  } else if (kind == "direct") {
    const auto users = j.at("users").get<std::vector<std::string>>();
    if (users.size() != 2) fail(ErrorKind::InvalidInput, "direct conversation needs two users");
    c = ConversationRef::direct(users[0], users[1]);
  } else {
    fail(ErrorKind::InvalidInput, "unknown conversation kind: " + kind);
  }
}

using MessageId = std::uint64_t;

struct ChatMessage {
  MessageId id = 0;
  ConversationRef conversation;
  std::string sender;  // account id, or the pseudonym in topic payloads
  std::string body;
  std::int64_t sent_at = 0;  // ms since epoch, display only
  bool mine = false;         // payload field: the requester sent it

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

inline void to_json(json& j, const ChatMessage& m) {
  j = json{{"id", m.id},         {"conversation", m.conversation}, {"sender", m.sender},
           {"body", m.body},     {"sent_at", m.sent_at},           {"mine", m.mine}};
}

inline void from_json(const json& j, ChatMessage& m) {
  m.id = j.at("id").get<MessageId>();
  m.conversation = j.at("conversation").get<ConversationRef>();
  m.sender = j.at("sender").get<std::string>();
  m.body = j.at("body").get<std::string>();
  m.sent_at = j.at("sent_at").get<std::int64_t>();
  m.mine = j.value("mine", false);
}

// Push hint: carries no body; the client syncs to fetch messages.
struct Notification {
  std::string recipient;
  ConversationRef conversation;
  MessageId hint = 0;  // latest message id at send time

  friend bool operator==(const Notification&, const Notification&) = default;
};

inline void to_json(json& j, const Notification& n) {
  j = json{{"recipient", n.recipient}, {"conversation", n.conversation}, {"hint", n.hint}};
}

inline void from_json(const json& j, Notification& n) {
  n.recipient = j.at("recipient").get<std::string>();
  n.conversation = j.at("conversation").get<ConversationRef>();
  n.hint = j.at("hint").get<MessageId>();
}

struct SyncCursor {
  std::string user;
  ConversationRef conversation;
  MessageId last_seen = 0;
};

inline void to_json(json& j, const SyncCursor& c) {
  j = json{{"user", c.user}, {"conversation", c.conversation}, {"last_seen", c.last_seen}};
}

struct SyncResult {
  std::vector<ChatMessage> messages;
  SyncCursor cursor;
};

struct MeetingCredentials {
  std::string topic;
  std::string join_url;
  std::string provider_meeting_id;
};

inline void to_json(json& j, const MeetingCredentials& m) {
  j = json{{"topic", m.topic}, {"join_url", m.join_url}, {"provider_meeting_id", m.provider_meeting_id}};
}

inline void from_json(const json& j, MeetingCredentials& m) {
  m.topic = j.at("topic").get<std::string>();
  m.join_url = j.at("join_url").get<std::string>();
  m.provider_meeting_id = j.at("provider_meeting_id").get<std::string>();
}

struct MessageRef {
  ConversationRef conversation;
  MessageId id = 0;
};

struct ReportRecord {
  std::string reporter;
  MessageRef message;
  std::string reason;
  std::int64_t created_at = 0;
};

inline void to_json(json& j, const ReportRecord& r) {
  j = json{{"reporter", r.reporter},
           {"message", {{"conversation", r.message.conversation}, {"id", r.message.id}}},
           {"reason", r.reason},
           {"created_at", r.created_at}};
}

inline void from_json(const json& j, ReportRecord& r) {
  r.reporter = j.at("reporter").get<std::string>();
  r.message.conversation = j.at("message").at("conversation").get<ConversationRef>();
  r.message.id = j.at("message").at("id").get<MessageId>();
  r.reason = j.at("reason").get<std::string>();
  r.created_at = j.at("created_at").get<std::int64_t>();
}

}  // namespace nora::chat
