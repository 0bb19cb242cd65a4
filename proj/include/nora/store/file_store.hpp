#pragma once

// File-backed document store: one append-only log per collection under the
// data directory (`<dir>/<collection>.log`). Each record is a 4-byte
// little-endian length followed by that many bytes of UTF-8 JSON
// {"k": key, "v": version, "b": body}. The in-memory state is rebuilt by
// replaying the logs; a torn final record is discarded on open.

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "nora/store/document_store.hpp"

namespace nora::store {

struct FileStoreOptions {
  bool fsync = false;
  // Compact a collection once its log holds this many records and more than
  // twice the number of live documents.
  std::size_t compact_min_records = 4096;
};

class FileStore : public MemoryStore {
 public:
  FileStore(std::filesystem::path dir, std::vector<CollectionSpec> specs,
            FileStoreOptions options = {})
      : MemoryStore(std::move(specs)), dir_(std::move(dir)), options_(options) {
    std::filesystem::create_directories(dir_);
    std::unique_lock lock(mutex_);
    for (auto& [name, c] : collections_) {
      auto& log = logs_[name];
      log.records = replay(name);
      log.fd = open_log(name);
    }
  }

  FileStore(const FileStore&) = delete;
  FileStore& operator=(const FileStore&) = delete;

  ~FileStore() override {
    for (auto& [name, log] : logs_) {
      if (log.fd >= 0) ::close(log.fd);
    }
  }

  const std::filesystem::path& directory() const { return dir_; }

  std::filesystem::path log_path(const std::string& collection) const {
    return dir_ / (collection + ".log");
  }

  std::uint64_t put(const std::string& collection, const std::string& key,
                    json body) override {
    const auto v = MemoryStore::put(collection, key, std::move(body));
    maybe_compact();
    return v;
  }

  std::optional<std::uint64_t> compare_and_put(const std::string& collection,
                                               const std::string& key,
                                               std::uint64_t expected,
                                               json body) override {
    auto v = MemoryStore::compare_and_put(collection, key, expected, std::move(body));
    maybe_compact();
    return v;
  }

  // Rewrites a collection's log with only the live documents.
  void compact(const std::string& collection) {
    std::unique_lock lock(mutex_);
    compact_locked(collection);
  }

 protected:
  void persist(const Document& doc) override {
    auto& log = logs_.at(doc.collection);
    write_record(log.fd, doc);
    ++log.records;
    const auto live = collections_.at(doc.collection).docs.size() + 1;
    if (log.records >= options_.compact_min_records && log.records > 2 * live) {
      pending_compaction_ = doc.collection;
    }
  }

 private:
  struct Log {
    int fd = -1;
    std::size_t records = 0;
  };

  static std::string encode(const Document& doc) {
    const std::string payload =
        json{{"k", doc.key}, {"v", doc.version}, {"b", doc.body}}.dump();
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::string rec;
    rec.reserve(4 + payload.size());
    for (int i = 0; i < 4; ++i) rec.push_back(static_cast<char>((n >> (8 * i)) & 0xFF));
    rec += payload;
    return rec;
  }

  void write_record(int fd, const Document& doc) {
    const std::string rec = encode(doc);
    std::size_t off = 0;
    while (off < rec.size()) {
      const ssize_t n = ::write(fd, rec.data() + off, rec.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail(ErrorKind::Upstream, std::string("log write failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
    if (options_.fsync) ::fsync(fd);
  }

  int open_log(const std::string& name) const {
    const int fd = ::open(log_path(name).c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) {
      fail(ErrorKind::Upstream, "cannot open " + log_path(name).string() + ": " +
                                    std::strerror(errno));
    }
    return fd;
  }

  // Loads a log into memory and returns the number of intact records.
  std::size_t replay(const std::string& name) {
    const auto path = log_path(name);
    if (!std::filesystem::exists(path)) return 0;
    std::ifstream in(path, std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t off = 0;
    std::size_t records = 0;
    while (off + 4 <= data.size()) {
      std::uint32_t n = 0;
      for (int i = 0; i < 4; ++i) {
        n |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[off + i])) << (8 * i);
      }
      if (off + 4 + n > data.size()) break;
      json rec = json::parse(data.begin() + static_cast<std::ptrdiff_t>(off + 4),
                             data.begin() + static_cast<std::ptrdiff_t>(off + 4 + n),
                             nullptr, false);
      if (rec.is_discarded() || !rec.contains("k") || !rec.contains("v")) break;
      apply(name, Document{name, rec.at("k").get<std::string>(), std::move(rec["b"]),
                           rec.at("v").get<std::uint64_t>()});
      off += 4 + n;
      ++records;
    }
    if (off < data.size()) std::filesystem::resize_file(path, off);
    return records;
  }

  void compact_locked(const std::string& name) {
    auto& log = logs_.at(name);
    const auto tmp = dir_ / (name + ".log.compact");
    {
      const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
      if (fd < 0) fail(ErrorKind::Upstream, "cannot open " + tmp.string());
      for (const auto& [k, d] : collections_.at(name).docs) write_record(fd, d);
      ::fsync(fd);
      ::close(fd);
    }
    std::filesystem::rename(tmp, log_path(name));
    ::close(log.fd);
    log.fd = open_log(name);
    log.records = collections_.at(name).docs.size();
  }

  void maybe_compact() {
    std::unique_lock lock(mutex_);
    if (pending_compaction_.empty()) return;
    const auto name = std::exchange(pending_compaction_, {});
    compact_locked(name);
  }

  std::filesystem::path dir_;
  FileStoreOptions options_;
  std::map<std::string, Log> logs_;
  std::string pending_compaction_;
};

}  // namespace nora::store
