#pragma once

#include "nora/store/document_store.hpp"

namespace nora::store {

// Collections used by the platform and their queryable fields.
inline std::vector<CollectionSpec> platform_collections() {
  return {
      {"users", {"alias"}},
      {"sessions", {"user", "day"}},
      {"summaries", {"user", "day"}},
      {"health", {"user", "day"}},
      {"contacts", {}},
      {"conversations", {}},
      {"messages", {"conversation"}},
      {"topics", {}},
      {"meetings", {}},
      {"reports", {"reporter"}},
  };
}

inline std::string day_key(const std::string& user, int day) {
  std::string d = std::to_string(day);
  if (d.size() < 4) d.insert(0, 4 - d.size(), '0');
  return user + "/" + d;
}

}  // namespace nora::store
