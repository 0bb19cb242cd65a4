#pragma once

// User-to-user messaging over the document store.
//
// Messages live in "messages" under "<conversation key>#<10-digit id>". A
// sender claims the next id with compare_and_put against an absent key, so
// concurrent appends to one conversation serialize without a lock and the
// log has no gaps. "conversations" keeps the highest id as a hint for the
// next claim. Notifications go out only after the message is stored.

#include <chrono>
#include <functional>
#include <shared_mutex>
#include <unordered_map>

#include "nora/chat/providers.hpp"
#include "nora/profile.hpp"

namespace nora::chat {

struct Contact {
  std::string user;
  std::string alias;
};

struct SubscriptionDiff {
  std::vector<std::string> added;
  std::vector<std::string> removed;
};

using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

class ChatServer {
 public:
  ChatServer(store::DocumentStore& store, PushChannel& push, std::vector<std::string> topic_catalog,
             std::string pseudonym_secret = "nora", Clock clock = system_clock_ms)
      : store_(store),
        push_(push),
        catalog_(std::move(topic_catalog)),
        secret_(std::move(pseudonym_secret)),
        clock_(std::move(clock)) {}

  const std::vector<std::string>& topic_catalog() const { return catalog_; }

  bool topic_exists(const std::string& topic) const {
    return std::find(catalog_.begin(), catalog_.end(), topic) != catalog_.end();
  }

  // Friendship is symmetric: both users gain each other as a contact.
  Contact add_friend(const std::string& user, const std::string& alias) {
    const auto me = require_user(store_, user);
    const auto other = find_by_alias(store_, alias);
    if (!other) fail(ErrorKind::NotFound, "no user with alias " + alias);
    if (other->id == me.id) fail(ErrorKind::InvalidInput, "cannot add yourself");
    add_contact(me.id, other->id);
    add_contact(other->id, me.id);
    return {other->id, other->alias};
  }

  std::vector<Contact> contacts(const std::string& user) const {
    std::vector<Contact> out;
    for (const auto& id : contact_ids(user)) {
      if (auto p = find_user(store_, id)) out.push_back({p->id, p->alias});
    }
    return out;
  }

  bool are_contacts(const std::string& a, const std::string& b) const {
    const auto ids = contact_ids(a);
    return std::find(ids.begin(), ids.end(), b) != ids.end();
  }

  MessageId send_direct(const std::string& sender, const std::string& receiver, const std::string& body) {
    if (!are_contacts(sender, receiver)) fail(ErrorKind::Forbidden, receiver + " is not a contact");
    const auto conv = ConversationRef::direct(sender, receiver);
    const auto id = append(conv, sender, body);
    push_.deliver({receiver, conv, id});
    return id;
  }

  SyncResult sync(const std::string& user, const ConversationRef& conv, MessageId last_seen) const {
    if (!can_read(user, conv)) fail(ErrorKind::Forbidden, "not a member of " + conv.key());
    if (last_seen > 0 && !store_.get("messages", message_key(conv, last_seen))) {
      fail(ErrorKind::InvalidInput, "cursor is ahead of the log");
    }
    SyncResult out{{}, {user, conv, last_seen}};
    for (MessageId id = last_seen + 1;; ++id) {
      auto doc = store_.get("messages", message_key(conv, id));
      if (!doc) break;
      out.messages.push_back(payload(user, conv, doc->body));
      out.cursor.last_seen = id;
    }
    return out;
  }

  // Subscribes the user to exactly `topics`.
  SubscriptionDiff set_interests(const std::string& user, const std::set<std::string>& topics) {
    for (const auto& t : topics) {
      if (!topic_exists(t)) fail(ErrorKind::InvalidInput, "unknown topic: " + t);
    }
    std::unique_lock lock(subscriptions_mutex_);
    const auto before = require_user(store_, user).interests;
    SubscriptionDiff diff;
    std::set_difference(topics.begin(), topics.end(), before.begin(), before.end(),
                        std::back_inserter(diff.added));
    std::set_difference(before.begin(), before.end(), topics.begin(), topics.end(),
                        std::back_inserter(diff.removed));
    for (const auto& t : diff.added) {
      store::update(store_, "topics", t, [&](json body) { return with_subscriber(std::move(body), user, true); });
      push_.subscribe(t, user);
    }
    for (const auto& t : diff.removed) {
      store::update(store_, "topics", t, [&](json body) { return with_subscriber(std::move(body), user, false); });
      push_.unsubscribe(t, user);
    }
    update_user(store_, user, [&](UserProfile& p) { p.interests = topics; });
    return diff;
  }

  std::set<std::string> subscribers(const std::string& topic) const {
    auto doc = store_.get("topics", topic);
    if (!doc) return {};
    return doc->body.value("subscribers", std::set<std::string>{});
  }

  bool is_subscribed(const std::string& user, const std::string& topic) const {
    return subscribers(topic).count(user) > 0;
  }

  // Stores the post and notifies every current subscriber except the sender.
  MessageId post_topic(const std::string& user, const std::string& topic, const std::string& body) {
    if (!topic_exists(topic)) fail(ErrorKind::NotFound, "unknown topic: " + topic);
    std::shared_lock lock(subscriptions_mutex_);
    const auto members = subscribers(topic);
    if (!members.count(user)) fail(ErrorKind::Forbidden, "not subscribed to " + topic);
    const auto conv = ConversationRef::topic(topic);
    const auto id = append(conv, user, body);
    for (const auto& m : members) {
      if (m != user) push_.deliver({m, conv, id});
    }
    return id;
  }

  // Stable display name for a user inside one topic. Never contains the
  // user's id or alias.
  std::string pseudonym(const std::string& user, const std::string& topic) const {
    static const std::array<const char*, 16> adjectives = {
        "Quiet", "Bright", "Gentle", "Brave", "Calm", "Kind", "Swift", "Merry",
        "Sunny", "Clever", "Cozy", "Lucky", "Noble", "Witty", "Mellow", "Bold"};
    static const std::array<const char*, 16> animals = {
        "Otter", "Panda", "Heron", "Fox", "Koala", "Lynx", "Robin", "Seal",
        "Badger", "Crane", "Dolphin", "Finch", "Hare", "Ibis", "Lemur", "Wren"};
    const auto profile = find_user(store_, user);
    const auto alias = profile ? text::lower_ascii(profile->alias) : std::string();
    const auto id = text::lower_ascii(user);
    for (std::uint64_t salt = 0;; ++salt) {
      const auto h = fnv1a(secret_ + '\x1f' + topic + '\x1f' + user + '\x1f' + std::to_string(salt));
      const std::string name = std::string(adjectives[h % 16]) + " " + animals[(h >> 4) % 16] + " " +
                               std::to_string((h >> 8) % 100);
      const auto lower = text::lower_ascii(name);
      if (lower.find(id) == std::string::npos && (alias.empty() || lower.find(alias) == std::string::npos)) {
        return name;
      }
    }
  }

  // The first request creates a recurring meeting with the provider; later
  // requests reuse the stored credentials.
  std::string get_or_create_meeting(const std::string& topic, MeetingProvider& provider) {
    if (!topic_exists(topic)) fail(ErrorKind::NotFound, "unknown topic: " + topic);
    std::lock_guard lock(meeting_mutex(topic));
    if (auto doc = store_.get("meetings", topic)) return doc->body.get<MeetingCredentials>().join_url;
    MeetingCredentials creds;
    try {
      creds = provider.create_meeting({topic, true, false});
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorKind::Upstream, std::string("conferencing provider failed: ") + e.what());
    }
    creds.topic = topic;
    if (!store_.compare_and_put("meetings", topic, store::kAbsent, json(creds))) {
      return store_.get("meetings", topic)->body.get<MeetingCredentials>().join_url;
    }
    return creds.join_url;
  }

  // Stores a report and flags the message. Reporting the same message twice
  // returns the first report.
  ReportRecord report_message(const std::string& user, const MessageRef& ref, const std::string& reason) {
    if (!can_read(user, ref.conversation)) fail(ErrorKind::NotFound, "message not found");
    const auto mkey = message_key(ref.conversation, ref.id);
    if (!store_.get("messages", mkey)) fail(ErrorKind::NotFound, "message not found");
    const auto rkey = mkey + "#" + user;
    ReportRecord record{user, ref, reason, clock_()};
    json body = record;
    if (!store_.compare_and_put("reports", rkey, store::kAbsent, body)) {
      return store_.get("reports", rkey)->body.get<ReportRecord>();
    }
    store::update(store_, "messages", mkey, [](json m) {
      m["flagged"] = true;
      m["reports"] = m.value("reports", 0) + 1;
      return m;
    });
    return record;
  }

  std::vector<ReportRecord> reports_by(const std::string& user) const {
    std::vector<ReportRecord> out;
    for (const auto& d : store_.query("reports", {{{"reporter", user}}, std::nullopt})) {
      out.push_back(d.body.get<ReportRecord>());
    }
    return out;
  }

  bool is_flagged(const MessageRef& ref) const {
    auto doc = store_.get("messages", message_key(ref.conversation, ref.id));
    return doc && doc->body.value("flagged", false);
  }

  // Conversations a user may read: direct threads with contacts that have
  // messages, plus subscribed topics.
  std::vector<ConversationRef> conversations_of(const std::string& user) const {
    std::vector<ConversationRef> out;
    for (const auto& c : contact_ids(user)) out.push_back(ConversationRef::direct(user, c));
    for (const auto& t : catalog_) {
      if (is_subscribed(user, t)) out.push_back(ConversationRef::topic(t));
    }
    return out;
  }

  bool can_read(const std::string& user, const ConversationRef& conv) const {
    if (conv.is_topic()) return topic_exists(conv.topic_id()) && is_subscribed(user, conv.topic_id());
    return conv.involves(user);
  }

  // Full stored log with real sender ids (server-side view).
  std::vector<ChatMessage> server_log(const ConversationRef& conv) const {
    std::vector<ChatMessage> out;
    for (MessageId id = 1;; ++id) {
      auto doc = store_.get("messages", message_key(conv, id));
      if (!doc) break;
      out.push_back(stored_message(conv, doc->body));
    }
    return out;
  }

  static std::string message_key(const ConversationRef& conv, MessageId id) {
    std::string n = std::to_string(id);
    if (n.size() < 10) n.insert(0, 10 - n.size(), '0');
    return conv.key() + "#" + n;
  }

 private:
  static std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

  static json with_subscriber(json body, const std::string& user, bool add) {
    auto subs = body.is_null() ? std::set<std::string>{} : body.value("subscribers", std::set<std::string>{});
    if (add) {
      subs.insert(user);
    } else {
      subs.erase(user);
    }
    return json{{"subscribers", subs}};
  }

  std::vector<std::string> contact_ids(const std::string& user) const {
    auto doc = store_.get("contacts", user);
    if (!doc) return {};
    return doc->body.value("contacts", std::vector<std::string>{});
  }

  void add_contact(const std::string& user, const std::string& contact) {
    store::update(store_, "contacts", user, [&](json body) {
      auto ids = body.is_null() ? std::vector<std::string>{} : body.value("contacts", std::vector<std::string>{});
      if (std::find(ids.begin(), ids.end(), contact) == ids.end()) ids.push_back(contact);
      return json{{"contacts", ids}};
    });
  }

  MessageId append(const ConversationRef& conv, const std::string& sender, const std::string& body) {
    const auto head = store_.get("conversations", conv.key());
    MessageId id = head ? head->body.value("last_id", MessageId{0}) + 1 : 1;
    const json conv_json = conv;
    for (;; ++id) {
      json doc{{"conversation", conv.key()}, {"conv", conv_json}, {"id", id},
               {"sender", sender},           {"body", body},      {"sent_at", clock_()}};
      if (store_.compare_and_put("messages", message_key(conv, id), store::kAbsent, std::move(doc))) break;
    }
    store::update(store_, "conversations", conv.key(), [&](json h) {
      const MessageId last = h.is_null() ? 0 : h.value("last_id", MessageId{0});
      return json{{"last_id", std::max(last, id)}};
    });
    return id;
  }

  static ChatMessage stored_message(const ConversationRef& conv, const json& body) {
    ChatMessage m;
    m.id = body.at("id").get<MessageId>();
    m.conversation = conv;
    m.sender = body.at("sender").get<std::string>();
    m.body = body.at("body").get<std::string>();
    m.sent_at = body.at("sent_at").get<std::int64_t>();
    return m;
  }

  ChatMessage payload(const std::string& reader, const ConversationRef& conv, const json& body) const {
    auto m = stored_message(conv, body);
    m.mine = m.sender == reader;
    if (conv.is_topic()) m.sender = pseudonym(m.sender, conv.topic_id());
    return m;
  }

  std::mutex& meeting_mutex(const std::string& topic) {
    std::lock_guard lock(meetings_registry_);
    auto& m = meeting_locks_[topic];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  store::DocumentStore& store_;
  PushChannel& push_;
  std::vector<std::string> catalog_;
  std::string secret_;
  Clock clock_;
  mutable std::shared_mutex subscriptions_mutex_;
  std::mutex meetings_registry_;
  std::unordered_map<std::string, std::unique_ptr<std::mutex>> meeting_locks_;
};

}  // namespace nora::chat
