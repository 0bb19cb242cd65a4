#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nora/error.hpp"

namespace nora::store {

using json = nlohmann::json;

struct Document {
  std::string collection;
  std::string key;
  json body;
  std::uint64_t version = 0;
};

// A collection and the top-level body fields that may be queried.
struct CollectionSpec {
  std::string name;
  std::vector<std::string> indexed;
};

struct Query {
  std::vector<std::pair<std::string, json>> equals;  // conjunction
  std::optional<std::string> order_by;               // ascending, ties by key
};

// Version 0 in compare_and_put means "the key does not exist yet".
inline constexpr std::uint64_t kAbsent = 0;

class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  virtual std::uint64_t put(const std::string& collection, const std::string& key,
                            json body) = 0;
  virtual std::optional<Document> get(const std::string& collection,
                                      const std::string& key) const = 0;
  virtual std::vector<Document> query(const std::string& collection,
                                      const Query& q) const = 0;
  // Returns the new version, or nullopt when `expected` is stale.
  virtual std::optional<std::uint64_t> compare_and_put(const std::string& collection,
                                                       const std::string& key,
                                                       std::uint64_t expected,
                                                       json body) = 0;
  // Every document of a collection in key order.
  virtual std::vector<Document> scan(const std::string& collection) const = 0;
  virtual std::vector<CollectionSpec> collections() const = 0;
};

// Read-modify-write with retry. `mutate` receives the current body (null when
// absent) and returns the new body.
template <typename Fn>
std::uint64_t update(DocumentStore& store, const std::string& collection,
                     const std::string& key, Fn&& mutate) {
  for (;;) {
    auto cur = store.get(collection, key);
    const std::uint64_t expected = cur ? cur->version : kAbsent;
    json next = mutate(cur ? std::move(cur->body) : json());
    if (auto v = store.compare_and_put(collection, key, expected, std::move(next))) {
      return *v;
    }
  }
}

class MemoryStore : public DocumentStore {
 public:
  explicit MemoryStore(std::vector<CollectionSpec> specs) {
    for (auto& spec : specs) {
      auto& c = collections_[spec.name];
      for (const auto& field : spec.indexed) c.index[field];
      c.spec = std::move(spec);
    }
  }

  std::uint64_t put(const std::string& collection, const std::string& key,
                    json body) override {
    std::unique_lock lock(mutex_);
    auto& c = must_find(collection);
    auto it = c.docs.find(key);
    const std::uint64_t version = it == c.docs.end() ? 1 : it->second.version + 1;
    write_locked(c, key, std::move(body), version);
    return version;
  }

  std::optional<Document> get(const std::string& collection,
                              const std::string& key) const override {
    std::shared_lock lock(mutex_);
    const auto& c = must_find(collection);
    auto it = c.docs.find(key);
    if (it == c.docs.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Document> query(const std::string& collection,
                              const Query& q) const override {
    std::shared_lock lock(mutex_);
    const auto& c = must_find(collection);
    for (const auto& [field, value] : q.equals) require_indexed(c, field);
    if (q.order_by) require_indexed(c, *q.order_by);

    std::vector<const Document*> hits;
    if (q.equals.empty()) {
      for (const auto& [k, d] : c.docs) hits.push_back(&d);
    } else {
      // Intersect posting lists, starting from the first predicate.
      std::set<std::string> keys;
      bool first = true;
      for (const auto& [field, value] : q.equals) {
        std::set<std::string> matched;
        const auto& by_value = c.index.at(field);
        if (auto it = by_value.find(value.dump()); it != by_value.end()) {
          matched = it->second;
        }
        if (first) {
          keys = std::move(matched);
          first = false;
        } else {
          std::set<std::string> both;
          std::set_intersection(keys.begin(), keys.end(), matched.begin(),
                                matched.end(), std::inserter(both, both.end()));
          keys = std::move(both);
        }
      }
      for (const auto& k : keys) hits.push_back(&c.docs.at(k));
    }
    if (q.order_by) {
      const auto& field = *q.order_by;
      std::stable_sort(hits.begin(), hits.end(), [&](const Document* a, const Document* b) {
        const json& va = a->body.contains(field) ? a->body.at(field) : json();
        const json& vb = b->body.contains(field) ? b->body.at(field) : json();
        return va < vb;
      });
    }
    std::vector<Document> out;
    out.reserve(hits.size());
    for (const auto* d : hits) out.push_back(*d);
    return out;
  }

  std::optional<std::uint64_t> compare_and_put(const std::string& collection,
                                               const std::string& key,
                                               std::uint64_t expected,
                                               json body) override {
    std::unique_lock lock(mutex_);
    auto& c = must_find(collection);
    auto it = c.docs.find(key);
    const std::uint64_t current = it == c.docs.end() ? kAbsent : it->second.version;
    if (current != expected) return std::nullopt;
    write_locked(c, key, std::move(body), current + 1);
    return current + 1;
  }

  std::vector<Document> scan(const std::string& collection) const override {
    std::shared_lock lock(mutex_);
    const auto& c = must_find(collection);
    std::vector<Document> out;
    out.reserve(c.docs.size());
    for (const auto& [k, d] : c.docs) out.push_back(d);
    return out;
  }

  std::vector<CollectionSpec> collections() const override {
    std::shared_lock lock(mutex_);
    std::vector<CollectionSpec> out;
    for (const auto& [name, c] : collections_) out.push_back(c.spec);
    return out;
  }

 protected:
  struct Collection {
    CollectionSpec spec;
    std::map<std::string, Document> docs;
    // field -> serialized value -> keys
    std::map<std::string, std::map<std::string, std::set<std::string>>> index;
  };

  // Called with the write lock held, before the in-memory state changes.
  // A throwing hook leaves the store untouched.
  virtual void persist(const Document& /*doc*/) {}

  // Applies a document without persisting it (used when replaying logs).
  void apply(const std::string& collection, Document doc) {
    auto& c = must_find(collection);
    index_remove(c, doc.key);
    const auto key = doc.key;
    c.docs[key] = std::move(doc);
    index_add(c, c.docs[key]);
  }

  Collection& must_find(const std::string& name) {
    auto it = collections_.find(name);
    if (it == collections_.end()) fail(ErrorKind::NotFound, "unknown collection: " + name);
    return it->second;
  }
  const Collection& must_find(const std::string& name) const {
    auto it = collections_.find(name);
    if (it == collections_.end()) fail(ErrorKind::NotFound, "unknown collection: " + name);
    return it->second;
  }

  std::map<std::string, Collection> collections_;
  mutable std::shared_mutex mutex_;

 private:
  void write_locked(Collection& c, const std::string& key, json body,
                    std::uint64_t version) {
    Document doc{c.spec.name, key, std::move(body), version};
    persist(doc);
    apply(c.spec.name, std::move(doc));
  }

  static void require_indexed(const Collection& c, const std::string& field) {
    const auto& idx = c.spec.indexed;
    if (std::find(idx.begin(), idx.end(), field) == idx.end()) {
      fail(ErrorKind::InvalidInput,
           "field '" + field + "' is not indexed in " + c.spec.name);
    }
  }

  static void index_add(Collection& c, const Document& d) {
    for (const auto& field : c.spec.indexed) {
      if (d.body.is_object() && d.body.contains(field)) {
        c.index[field][d.body.at(field).dump()].insert(d.key);
      }
    }
  }

  static void index_remove(Collection& c, const std::string& key) {
    auto it = c.docs.find(key);
    if (it == c.docs.end()) return;
    for (const auto& field : c.spec.indexed) {
      const auto& body = it->second.body;
      if (!body.is_object() || !body.contains(field)) continue;
      auto& by_value = c.index[field];
      auto pos = by_value.find(body.at(field).dump());
      if (pos == by_value.end()) continue;
      pos->second.erase(key);
      if (pos->second.empty()) by_value.erase(pos);
    }
  }
};

}  // namespace nora::store
