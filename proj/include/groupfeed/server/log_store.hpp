#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "groupfeed/session/session_log.hpp"

namespace groupfeed::server {

class PersistenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A session log being written. commit() makes it durable or throws
/// PersistenceError.
class PersistentLog : public session::LogSink {
 public:
  virtual void commit() = 0;
};

class LogStore {
 public:
  virtual ~LogStore() = default;
  virtual std::unique_ptr<PersistentLog> open(const std::string& log_id) = 0;
};

/// Writes into `<dir>/recovery/<log_id>` while the session runs; commit
/// flushes, fsyncs and renames it to `<dir>/<log_id>`. Anything that fails
/// leaves the partial file in the recovery directory.
class FileLogStore final : public LogStore {
 public:
  explicit FileLogStore(std::filesystem::path dir);

  std::unique_ptr<PersistentLog> open(const std::string& log_id) override;

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path recovery_dir() const { return dir_ / "recovery"; }

 private:
  std::filesystem::path dir_;
};

/// Keeps committed logs in memory, keyed by id. Used by tests and simulations.
class MemoryLogStore final : public LogStore {
 public:
  std::unique_ptr<PersistentLog> open(const std::string& log_id) override;

  /// Committed log text, or nullptr.
  const std::string* find(const std::string& log_id) const;
  /// Makes the next commit throw.
  void fail_next_commit() { fail_next_ = true; }
  const std::map<std::string, std::string>& recovered() const noexcept { return recovery_; }

 private:
  friend class MemoryLog;
  std::map<std::string, std::string> committed_;
  std::map<std::string, std::string> recovery_;
  bool fail_next_ = false;
};

}  // namespace groupfeed::server
