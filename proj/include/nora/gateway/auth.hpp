#pragma once

// Local accounts and bearer tokens. Passwords are stored as libsodium
// Argon2id strings; tokens are random, held in memory and expire after a
// configured lifetime.

#include <sodium.h>

#include <chrono>
#include <functional>
#include <mutex>
#include <unordered_map>

#include "nora/gateway/config.hpp"

namespace nora::gateway {

using SecondsClock = std::function<std::int64_t()>;

inline std::int64_t system_clock_s() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct AuthToken {
  std::string token;
  std::string user;
  std::int64_t expires_at = 0;  // seconds since epoch
};

inline void to_json(json& j, const AuthToken& t) {
  j = json{{"token", t.token}, {"user", t.user}, {"expires_at", t.expires_at}};
}

struct Registration {
  std::string user;
  std::string alias;
  std::string password;
  Language language = Language::EN;
};

class AuthService {
 public:
  AuthService(store::DocumentStore& store, std::int64_t ttl_seconds, HashCost cost,
              SecondsClock clock = system_clock_s)
      : store_(store), ttl_(ttl_seconds), cost_(cost), clock_(std::move(clock)) {
    if (sodium_init() < 0) fail(ErrorKind::Upstream, "libsodium failed to initialise");
  }

  UserProfile register_user(const Registration& r, const Program& program) {
    if (r.password.size() < 8) fail(ErrorKind::InvalidInput, "password must have at least 8 characters");
    UserProfile p;
    p.id = r.user;
    p.alias = r.alias;
    p.language = r.language;
    p.program = program;
    p.credential_hash = hash_password(r.password);
    std::lock_guard lock(registration_mutex_);
    return create_user(store_, std::move(p));
  }

  AuthToken login(const std::string& user, const std::string& password) {
    const auto profile = find_user(store_, user);
    if (!profile || !verify_password(profile->credential_hash, password)) {
      fail(ErrorKind::Unauthorized, "unknown user or wrong password");
    }
    AuthToken t{random_token(), profile->id, clock_() + ttl_};
    std::lock_guard lock(tokens_mutex_);
    tokens_[t.token] = t;
    return t;
  }

  // The user a bearer token belongs to.
  std::string authenticate(const std::optional<std::string>& token) {
    if (!token || token->empty()) fail(ErrorKind::Unauthorized, "missing token");
    std::lock_guard lock(tokens_mutex_);
    auto it = tokens_.find(*token);
    if (it == tokens_.end()) fail(ErrorKind::Unauthorized, "unknown token");
    if (clock_() >= it->second.expires_at) {
      tokens_.erase(it);
      fail(ErrorKind::Unauthorized, "token expired");
    }
    return it->second.user;
  }

  void logout(const std::string& token) {
    std::lock_guard lock(tokens_mutex_);
    tokens_.erase(token);
  }

  std::string hash_password(const std::string& password) const {
    char out[crypto_pwhash_STRBYTES];
    const auto [ops, mem] = limits();
    if (crypto_pwhash_str(out, password.data(), password.size(), ops, mem) != 0) {
      fail(ErrorKind::Upstream, "password hashing ran out of memory");
    }
    return out;
  }

  static bool verify_password(const std::string& hash, const std::string& password) {
    return crypto_pwhash_str_verify(hash.c_str(), password.data(), password.size()) == 0;
  }

 private:
  std::pair<unsigned long long, std::size_t> limits() const {
    switch (cost_) {
      case HashCost::Min: return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN};
      case HashCost::Interactive: return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
      case HashCost::Moderate: return {crypto_pwhash_OPSLIMIT_MODERATE, crypto_pwhash_MEMLIMIT_MODERATE};
    }
    return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
  }

  static std::string random_token() {
    unsigned char raw[32];
    randombytes_buf(raw, sizeof raw);
    char hex[sizeof raw * 2 + 1];
    sodium_bin2hex(hex, sizeof hex, raw, sizeof raw);
    return hex;
  }

  store::DocumentStore& store_;
  std::int64_t ttl_;
  HashCost cost_;
  SecondsClock clock_;
  std::mutex registration_mutex_;
  std::mutex tokens_mutex_;
  std::unordered_map<std::string, AuthToken> tokens_;
};

}  // namespace nora::gateway
