#include "groupfeed/server/log_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <system_error>

namespace groupfeed::server {

namespace fs = std::filesystem;

namespace {

class FileLog final : public PersistentLog {
 public:
  FileLog(fs::path partial, fs::path final_path)
      : partial_(std::move(partial)), final_(std::move(final_path)) {
    file_ = std::fopen(partial_.c_str(), "wb");
    if (!file_) error_ = "cannot create " + partial_.string() + ": " + std::strerror(errno);
  }

  ~FileLog() override {
    if (file_) std::fclose(file_);
  }

  void append(std::string_view line) override {
    if (!file_ || !error_.empty()) return;
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fputc('\n', file_) == EOF)
      error_ = "write to " + partial_.string() + " failed: " + std::strerror(errno);
  }

  void commit() override {
    if (error_.empty() && file_) {
      if (std::fflush(file_) != 0 || ::fsync(::fileno(file_)) != 0)
        error_ = "flush of " + partial_.string() + " failed: " + std::strerror(errno);
    }
    if (file_) {
      if (std::fclose(file_) != 0 && error_.empty())
        error_ = "close of " + partial_.string() + " failed: " + std::strerror(errno);
      file_ = nullptr;
    }
    if (!error_.empty()) throw PersistenceError(error_ + " (partial log kept in recovery area)");

    std::error_code ec;
    fs::rename(partial_, final_, ec);
    if (ec) throw PersistenceError("cannot move log into place: " + ec.message());
    sync_directory(final_.parent_path());
  }

 private:
  static void sync_directory(const fs::path& dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
  }

  fs::path partial_;
  fs::path final_;
  std::FILE* file_ = nullptr;
  std::string error_;
};

}  // namespace

FileLogStore::FileLogStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(recovery_dir(), ec);
  if (ec) throw PersistenceError("cannot create log directory " + dir_.string() + ": " + ec.message());
}

std::unique_ptr<PersistentLog> FileLogStore::open(const std::string& log_id) {
  return std::make_unique<FileLog>(recovery_dir() / log_id, dir_ / log_id);
}

class MemoryLog final : public PersistentLog {
 public:
  MemoryLog(MemoryLogStore& store, std::string id) : store_(store), id_(std::move(id)) {}

  void append(std::string_view line) override {
    text_.append(line);
    text_ += '\n';
  }

  void commit() override {
    if (store_.fail_next_) {
      store_.fail_next_ = false;
      store_.recovery_[id_] = text_;
      throw PersistenceError("injected commit failure for " + id_);
    }
    store_.committed_[id_] = text_;
  }

 private:
  MemoryLogStore& store_;
  std::string id_;
  std::string text_;
};

std::unique_ptr<PersistentLog> MemoryLogStore::open(const std::string& log_id) {
  return std::make_unique<MemoryLog>(*this, log_id);
}

const std::string* MemoryLogStore::find(const std::string& log_id) const {
  auto it = committed_.find(log_id);
  return it == committed_.end() ? nullptr : &it->second;
}

}  // namespace groupfeed::server
