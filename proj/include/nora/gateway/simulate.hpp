#pragma once

// Scripted simulations with invariant checks, shared by `noractl simulate`
// and the acceptance suite.
//
// The program trace drives multi-day sessions for several users through the
// full pipeline. The chat swarm runs clients against a lossy push channel
// and compares what they materialize with the server log and with an
// independent model of who should have been notified.

#include <random>

#include "nora/gateway/platform.hpp"

namespace nora::gateway {

// Collects named invariant checks with their violations.
class Report {
 public:
  void check(const std::string& name, bool ok, const std::string& detail = {}) {
    auto& c = checks_[name];
    ++c.evaluated;
    if (!ok) {
      ++c.violations;
      if (c.details.size() < 10) c.details.push_back(detail);
    }
  }

  std::size_t violations() const {
    std::size_t n = 0;
    for (const auto& [_, c] : checks_) n += c.violations;
    return n;
  }

  std::size_t violations(const std::string& name) const {
    auto it = checks_.find(name);
    return it == checks_.end() ? 0 : it->second.violations;
  }

  bool has(const std::string& name) const { return checks_.count(name) > 0; }

  json to_json() const {
    json checks = json::array();
    for (const auto& [name, c] : checks_) {
      checks.push_back({{"name", name}, {"evaluated", c.evaluated}, {"violations", c.violations},
                        {"details", c.details}});
    }
    return {{"checks", checks}, {"violations", violations()}};
  }

 private:
  struct Check {
    std::size_t evaluated = 0;
    std::size_t violations = 0;
    std::vector<std::string> details;
  };
  std::map<std::string, Check> checks_;
};

// Answers per dialogue step. Keys are phase names plus "breath_followup";
// each step cycles through its list, offset by user and day.
struct SessionScript {
  std::map<std::string, std::vector<std::string>> answers;

  static SessionScript defaults(Language lang) {
    if (lang == Language::ZH) {
      return {{{"intro", {"我叫小明", "你好，我是小红"}},
               {"future_plans", {"我想去日本旅行", "吃火锅", "见我的父母"}},
               {"mood", {"今天很开心", "有点孤独，压力很大", "还好"}},
               {"temperature", {"三十六点六", "37.2", "38.6", "45", "36.8"}},
               {"breath", {"一二三四五六七八九十", "数到了二十五", "十五"}},
               {"breath_followup", {"没有", "是的", "不"}},
               {"gratitude", {"感谢我的父母", "感恩朋友", "身体健康"}},
               {"activity_offer", {"好的", "不要", "嗯"}},
               {"activity_running", {"继续"}},
               {"feedback", {"很有帮助，谢谢", "有点太长"}}}};
    }
    return {{{"intro", {"My name is Ana", "Hi, I'm Ben", "Call me Chris"}},
             {"future_plans", {"I want to travel to Japan", "eat hotpot with friends", "see my parents",
                               "go hiking in the mountains"}},
             {"mood", {"I feel good today", "a bit lonely and stressed", "tired and anxious", "great, thanks",
                       "not great"}},
             {"temperature", {"36.6", "37.1", "38.4", "45", "it is 36.9", "no idea", "36.7"}},
             {"breath", {"one two three four five six seven eight nine ten", "I counted to 25", "15", "no"}},
             {"breath_followup", {"no", "yes", "not really", "hmm"}},
             {"gratitude", {"I am very grateful because of my parents", "thankful for my friends", "my health"}},
             {"activity_offer", {"yes", "no thanks", "sure", "maybe"}},
             {"activity_running", {"continue"}},
             {"feedback", {"It was helpful, thanks", "a bit too long", "I enjoyed it"}}}};
  }

  // Entries in `j` replace the defaults for their keys.
  static SessionScript from_json(const json& j, Language lang) {
    auto s = defaults(lang);
    for (auto& [key, list] : j.items()) {
      auto answers = list.get<std::vector<std::string>>();
      if (answers.empty()) fail(ErrorKind::InvalidInput, "script: empty answer list for " + key);
      s.answers[key] = std::move(answers);
    }
    return s;
  }

  const std::string& pick(const std::string& key, std::size_t n) const {
    auto it = answers.find(key);
    if (it == answers.end() || it->second.empty()) fail(ErrorKind::InvalidInput, "script has no answers for " + key);
    return it->second[n % it->second.size()];
  }
};

struct ProgramOptions {
  int users = 3;
  int days = 14;
  Language language = Language::EN;
  int max_turns = 25;
};

struct DayTrace {
  std::string user;
  int day = 0;
  std::string opening_template;
  std::string opening_text;
  int user_turns = 0;
  bool ended = false;
  bool hotline_shown = false;
  std::vector<std::string> phases;
};

// Runs `options.days` daily sessions for `options.users` users.
inline json simulate_program(Platform& platform, const SessionScript& script, const ProgramOptions& options,
                             Report& report) {
  if (options.users < 1 || options.days < 1) fail(ErrorKind::InvalidInput, "need at least one user and one day");
  std::vector<DayTrace> traces;
  std::vector<std::string> users;
  for (int u = 0; u < options.users; ++u) {
    const std::string id = "sim-user-" + std::to_string(u + 1);
    users.push_back(id);
    if (!find_user(platform.store(), id)) {
      platform.register_user({id, "sim-" + std::to_string(u + 1), "simulated-password", options.language});
    }
    update_user(platform.store(), id, [&](UserProfile& p) {
      p.language = options.language;
      p.program.length_days = std::max(p.program.length_days, options.days);
    });
  }

  for (int day = 1; day <= options.days; ++day) {
    for (std::size_t u = 0; u < users.size(); ++u) {
      const auto& user = users[u];
      DayTrace t{user, day, {}, {}, 0, false, false, {}};
      const auto opening = platform.start_session(user, day);
      t.opening_template = opening.template_ids.empty() ? std::string() : opening.template_ids.front();
      t.opening_text = opening.text;
      t.phases.emplace_back(to_string(opening.phase));
      std::map<std::string, std::size_t> used;
      auto phase = opening.phase;
      while (phase != dialogue::Phase::End && t.user_turns < options.max_turns + 5) {
        ++t.user_turns;
        TurnOutcome out;
        if (phase == dialogue::Phase::ActivityRunning && script.pick("activity_running", 0) == "continue") {
          out = platform.resume(user);
        } else {
          std::string key(to_string(phase));
          if (phase == dialogue::Phase::Breath) {
            const auto open = platform.sessions().open_session(user);
            if (open && open->facts.contains("breath") && open->facts["breath"].value("pending", false)) {
              key = "breath_followup";
            }
          }
          const auto n = u + static_cast<std::size_t>(day) + used[key]++;
          out = platform.session_turn(user, script.pick(key, n));
        }
        const auto& r = out.result.response;
        if (r.directive.kind == dialogue::DirectiveKind::ShowHotline) t.hotline_shown = true;
        report.check("agent_initiative",
                     r.directive.kind == dialogue::DirectiveKind::EndSession ||
                         r.directive.kind != dialogue::DirectiveKind::None ||
                         r.text.find('?') != std::string::npos || r.text.find("？") != std::string::npos,
                     user + " day " + std::to_string(day) + ": " + r.text);
        phase = out.result.state.phase;
        t.phases.emplace_back(to_string(phase));
      }
      t.ended = phase == dialogue::Phase::End;
      traces.push_back(std::move(t));
    }
  }

  for (const auto& t : traces) {
    const auto where = t.user + " day " + std::to_string(t.day);
    report.check("session_ends", t.ended, where);
    report.check("turn_bound", t.user_turns <= options.max_turns, where + ": " + std::to_string(t.user_turns));
    const auto expected = t.day == 1 ? "intro." : "future_plans.";
    report.check("opening_phase", t.opening_template.rfind(expected, 0) == 0, where + ": " + t.opening_template);
    const auto health = screening::history(platform.store(), t.user);
    auto it = std::find_if(health.begin(), health.end(), [&](const auto& h) { return h.day == t.day; });
    if (it != health.end()) {
      report.check("hotline_on_escalation", it->escalated == t.hotline_shown,
                   where + ": escalated=" + std::to_string(it->escalated));
    }
  }
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (std::size_t j = 0; j < traces.size(); ++j) {
      if (traces[j].user == traces[i].user && traces[j].day == traces[i].day + 1) {
        report.check("opening_rotation", traces[j].opening_text != traces[i].opening_text,
                     traces[i].user + " days " + std::to_string(traces[i].day) + "/" +
                         std::to_string(traces[j].day));
      }
    }
  }

  json per_user = json::array();
  for (const auto& user : users) {
    const auto health = screening::history(platform.store(), user);
    const auto summaries = platform.sessions().summaries(user);
    std::vector<int> hdays, sdays, want;
    for (const auto& h : health) hdays.push_back(h.day);
    for (const auto& s : summaries) sdays.push_back(s.day);
    for (int d = 1; d <= options.days; ++d) want.push_back(d);
    report.check("one_health_record_per_day", hdays == want, user + ": " + json(hdays).dump());
    report.check("one_summary_per_day", sdays == want, user + ": " + json(sdays).dump());
    per_user.push_back({{"user", user},
                        {"health_records", health.size()},
                        {"summaries", summaries.size()},
                        {"escalated_days", std::count_if(health.begin(), health.end(),
                                                         [](const auto& h) { return h.escalated; })}});
  }

  json days = json::array();
  for (const auto& t : traces) {
    days.push_back({{"user", t.user},
                    {"day", t.day},
                    {"opening", t.opening_template},
                    {"user_turns", t.user_turns},
                    {"hotline", t.hotline_shown},
                    {"phases", t.phases}});
  }
  return {{"users", per_user}, {"sessions", days}};
}

struct ChatSwarmOptions {
  int users = 5;
  int topics = 3;
  int messages = 500;
  double drop_probability = 0.2;
  double duplicate_probability = 0.05;
  double interest_change_probability = 0.1;
  double client_poll_probability = 0.3;
  std::uint64_t seed = 7;
};

// Runs the swarm against its own store and lossy channel.
inline json simulate_chat(const ChatSwarmOptions& o, Report& report) {
  if (o.users < 2 || o.topics < 1 || o.messages < 0) fail(ErrorKind::InvalidInput, "chat swarm needs >= 2 users and >= 1 topic");
  store::MemoryStore store(store::platform_collections());
  chat::InProcessPushChannel push({o.drop_probability, o.duplicate_probability, o.seed});
  std::vector<std::string> topics;
  for (int t = 0; t < o.topics; ++t) topics.push_back("topic-" + std::to_string(t + 1));
  std::int64_t tick = 0;
  chat::ChatServer server(store, push, topics, "swarm", [&] { return ++tick; });
  std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
  auto uniform = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

  std::vector<std::string> users;
  for (int u = 0; u < o.users; ++u) {
    UserProfile p;
    p.id = "member-" + std::to_string(u + 1);
    p.alias = "m" + std::to_string(u + 1);
    create_user(store, p);
    users.push_back(p.id);
  }
  for (std::size_t a = 0; a < users.size(); ++a) {
    for (std::size_t b = a + 1; b < users.size(); ++b) server.add_friend(users[a], "m" + std::to_string(b + 1));
  }

  // Independent model of subscriptions and of every notification owed.
  std::map<std::string, std::set<std::string>> subscribed;
  using Owed = std::tuple<std::string, std::string, chat::MessageId>;
  std::vector<Owed> owed;
  auto random_interests = [&] {
    std::set<std::string> s;
    for (const auto& t : topics) {
      if (coin(0.5)) s.insert(t);
    }
    return s;
  };
  auto change_interests = [&](const std::string& user) {
    const auto next = random_interests();
    server.set_interests(user, next);
    for (const auto& t : topics) {
      if (next.count(t)) {
        subscribed[t].insert(user);
      } else {
        subscribed[t].erase(user);
      }
    }
  };
  for (const auto& u : users) change_interests(u);

  struct Client {
    std::map<std::string, std::vector<chat::ChatMessage>> logs;
    std::map<std::string, chat::MessageId> cursor;
  };
  std::map<std::string, Client> clients;
  std::size_t syncs = 0, forbidden_posts = 0, interest_changes = 0;

  auto sync_into = [&](const std::string& user, const chat::ConversationRef& conv) {
    auto& c = clients[user];
    const auto key = conv.key();
    const auto r = server.sync(user, conv, c.cursor[key]);
    ++syncs;
    for (const auto& m : r.messages) {
      auto& log = c.logs[key];
      const chat::MessageId prev = log.empty() ? 0 : log.back().id;
      report.check("ordering", m.id == prev + 1,
                   user + " " + key + ": got " + std::to_string(m.id) + " after " + std::to_string(prev));
      log.push_back(m);
    }
    c.cursor[key] = r.cursor.last_seen;
  };
  auto poll = [&](const std::string& user) {
    for (const auto& n : push.drain(user)) {
      if (clients[user].cursor[n.conversation.key()] >= n.hint) continue;  // already have it
      if (!server.can_read(user, n.conversation)) continue;                 // left the topic since
      sync_into(user, n.conversation);
    }
  };

  int sent = 0;
  while (sent < o.messages) {
    if (coin(o.interest_change_probability)) {
      change_interests(users[uniform(users.size())]);
      ++interest_changes;
    } else if (coin(0.5)) {
      const auto a = uniform(users.size());
      auto b = uniform(users.size() - 1);
      if (b >= a) ++b;
      const auto id = server.send_direct(users[a], users[b], "direct " + std::to_string(sent));
      owed.emplace_back(users[b], chat::ConversationRef::direct(users[a], users[b]).key(), id);
      ++sent;
    } else {
      const auto& sender = users[uniform(users.size())];
      const auto& topic = topics[uniform(topics.size())];
      if (!subscribed[topic].count(sender)) {
        bool refused = false;
        try {
          server.post_topic(sender, topic, "stray");
        } catch (const Error& e) {
          refused = e.kind() == ErrorKind::Forbidden;
        }
        report.check("non_subscriber_refused", refused, sender + " posted to " + topic);
        ++forbidden_posts;
        continue;
      }
      const auto id = server.post_topic(sender, topic, "post " + std::to_string(sent) + " in " + topic);
      for (const auto& m : subscribed[topic]) {
        if (m != sender) owed.emplace_back(m, chat::ConversationRef::topic(topic).key(), id);
      }
      ++sent;
    }
    for (const auto& u : users) {
      if (coin(o.client_poll_probability)) poll(u);
    }
  }

  // Quiescence: drain what is left, then one full sync per conversation.
  for (const auto& u : users) {
    poll(u);
    for (const auto& conv : server.conversations_of(u)) sync_into(u, conv);
  }

  std::vector<Owed> delivered;
  for (const auto& n : push.sent()) delivered.emplace_back(n.recipient, n.conversation.key(), n.hint);
  std::sort(owed.begin(), owed.end());
  std::sort(delivered.begin(), delivered.end());
  report.check("fanout_multiset", owed == delivered,
               "expected " + std::to_string(owed.size()) + " notifications, server sent " +
                   std::to_string(delivered.size()));

  for (const auto& t : topics) {
    std::set<std::string> from_profiles;
    for (const auto& u : users) {
      if (require_user(store, u).interests.count(t)) from_profiles.insert(u);
    }
    report.check("subscription_consistency", server.subscribers(t) == subscribed[t] && from_profiles == subscribed[t],
                 t);
  }

  std::size_t compared = 0;
  for (const auto& u : users) {
    for (const auto& conv : server.conversations_of(u)) {
      const auto key = conv.key();
      const auto truth = server.server_log(conv);
      const auto& mine = clients[u].logs[key];
      bool same = truth.size() == mine.size();
      for (std::size_t i = 0; same && i < truth.size(); ++i) {
        const auto& s = truth[i];
        const auto& c = mine[i];
        const auto shown = conv.is_topic() ? server.pseudonym(s.sender, conv.topic_id()) : s.sender;
        same = c.id == s.id && c.body == s.body && c.sender == shown && c.mine == (s.sender == u);
        if (conv.is_topic() && s.sender != u) {
          const auto alias = require_user(store, s.sender).alias;
          const auto payload = json(c).dump();
          report.check("anonymity",
                       payload.find(s.sender) == std::string::npos &&
                           payload.find("\"" + alias + "\"") == std::string::npos &&
                           c.sender.find(alias) == std::string::npos,
                       u + " sees " + key + "#" + std::to_string(c.id));
        }
      }
      report.check("client_log_equals_server_log", same,
                   u + " " + key + ": client " + std::to_string(mine.size()) + " vs server " +
                       std::to_string(truth.size()));
      ++compared;
    }
  }

  return {{"users", o.users},
          {"topics", o.topics},
          {"messages", sent},
          {"notifications_sent", push.sent().size()},
          {"notifications_dropped", push.dropped()},
          {"syncs", syncs},
          {"interest_changes", interest_changes},
          {"refused_posts", forbidden_posts},
          {"conversations_compared", compared}};
}

}  // namespace nora::gateway
