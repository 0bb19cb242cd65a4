#pragma once

// External provider clients: the push channel that carries notifications and
// the conferencing service that hosts topic video calls. The in-process
// implementations stand in for the real services.

#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>

#include "nora/chat/types.hpp"

namespace nora::chat {

class PushChannel {
 public:
  virtual ~PushChannel() = default;
  // At-least-once at best: implementations may drop or repeat.
  virtual void deliver(const Notification& n) = 0;
  virtual void subscribe(const std::string& /*topic*/, const std::string& /*user*/) {}
  virtual void unsubscribe(const std::string& /*topic*/, const std::string& /*user*/) {}
};

// Queues notifications per recipient. A seeded RNG drops a fraction of them
// and repeats another fraction.
class InProcessPushChannel : public PushChannel {
 public:
  struct Options {
    double drop_probability = 0.0;
    double duplicate_probability = 0.0;
    std::uint64_t seed = 1;
  };

  InProcessPushChannel() : InProcessPushChannel(Options{}) {}
  explicit InProcessPushChannel(Options options) : options_(options), rng_(options.seed) {}

  void deliver(const Notification& n) override {
    std::lock_guard lock(mutex_);
    sent_.push_back(n);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < options_.drop_probability) {
      ++dropped_;
      return;
    }
    inbox_[n.recipient].push_back(n);
    if (coin(rng_) < options_.duplicate_probability) inbox_[n.recipient].push_back(n);
  }

  void subscribe(const std::string& topic, const std::string& user) override {
    std::lock_guard lock(mutex_);
    topics_[topic].insert(user);
  }

  void unsubscribe(const std::string& topic, const std::string& user) override {
    std::lock_guard lock(mutex_);
    topics_[topic].erase(user);
  }

  // Takes every queued notification for a user.
  std::vector<Notification> drain(const std::string& user) {
    std::lock_guard lock(mutex_);
    auto& q = inbox_[user];
    std::vector<Notification> out(q.begin(), q.end());
    q.clear();
    return out;
  }

  // Everything handed to the channel, before loss.
  std::vector<Notification> sent() const {
    std::lock_guard lock(mutex_);
    return sent_;
  }

  std::size_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }

  std::set<std::string> subscribers(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    auto it = topics_.find(topic);
    return it == topics_.end() ? std::set<std::string>{} : it->second;
  }

 private:
  Options options_;
  mutable std::mutex mutex_;
  std::mt19937_64 rng_;
  std::vector<Notification> sent_;
  std::size_t dropped_ = 0;
  std::map<std::string, std::deque<Notification>> inbox_;
  std::map<std::string, std::set<std::string>> topics_;
};

// Forwards notifications to several channels (e.g. WebSocket and a log).
class FanoutPushChannel : public PushChannel {
 public:
  void add(std::shared_ptr<PushChannel> ch) { channels_.push_back(std::move(ch)); }
  void deliver(const Notification& n) override {
    for (auto& c : channels_) c->deliver(n);
  }
  void subscribe(const std::string& t, const std::string& u) override {
    for (auto& c : channels_) c->subscribe(t, u);
  }
  void unsubscribe(const std::string& t, const std::string& u) override {
    for (auto& c : channels_) c->unsubscribe(t, u);
  }

 private:
  std::vector<std::shared_ptr<PushChannel>> channels_;
};

struct MeetingRequest {
  std::string topic;
  bool recurring = true;
  bool fixed_time = false;
};

class MeetingProvider {
 public:
  virtual ~MeetingProvider() = default;
  virtual MeetingCredentials create_meeting(const MeetingRequest& request) = 0;
};

// Issues deterministic URLs and counts create calls; can be told to fail.
class SimulatedMeetingProvider : public MeetingProvider {
 public:
  explicit SimulatedMeetingProvider(std::string base_url = "https://meet.example.invalid/j/")
      : base_url_(std::move(base_url)) {}

  MeetingCredentials create_meeting(const MeetingRequest& request) override {
    const auto n = ++creates_;
    if (fail_next_.exchange(false)) fail(ErrorKind::Upstream, "conferencing provider unavailable");
    if (!request.recurring || request.fixed_time) {
      fail(ErrorKind::InvalidInput, "topic meetings must be recurring without a fixed time");
    }
    const auto id = "m" + std::to_string(n) + "-" + request.topic;
    return {request.topic, base_url_ + id, id};
  }

  void fail_next() { fail_next_ = true; }
  std::size_t create_calls() const { return creates_.load(); }

 private:
  std::string base_url_;
  std::atomic<std::size_t> creates_{0};
  std::atomic<bool> fail_next_{false};
};

}  // namespace nora::chat
