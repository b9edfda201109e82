#include "hg/service/event_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hg/common/error.hpp"

namespace hg::service {

namespace {

[[noreturn]] void storage_fail(const std::string& what) {
  fail(ErrorCode::kStorageFull, what + ": " + std::strerror(errno));
}

bool write_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

void fsync_dir(const std::filesystem::path& dir) {
  const int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

void to_json(json& j, const EventRecord& r) {
  j = json{{"seq", r.seq}, {"at", r.at}, {"kind", r.kind}, {"payload", r.payload}};
}

void from_json(const json& j, EventRecord& r) {
  r.seq = j.at("seq").get<std::uint64_t>();
  r.at = j.at("at").get<Millis>();
  r.kind = j.at("kind").get<std::string>();
  r.payload = j.at("payload");
}

std::vector<EventRecord> read_event_log(const std::filesystem::path& path, bool repair) {
  std::vector<EventRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  std::size_t pos = 0, line_no = 0, good_end = 0;
  while (pos < data.size()) {
    ++line_no;
    const std::size_t nl = data.find('\n', pos);
    const bool last = nl == std::string::npos;
    const std::string_view line(data.data() + pos, (last ? data.size() : nl) - pos);
    EventRecord rec;
    bool ok = true;
    try {
      rec = json::parse(line).get<EventRecord>();
    } catch (const std::exception&) {
      ok = false;
    }
    // Only the unterminated final line can be a torn write.
    if (last) {
      if (!ok) break;
      ok = true;
    } else if (!ok) {
      fail(ErrorCode::kRecoveryError,
           path.string() + ": corrupt record on line " + std::to_string(line_no));
    }
    if (!out.empty() && rec.seq <= out.back().seq) {
      fail(ErrorCode::kRecoveryError,
           path.string() + ": sequence does not increase on line " + std::to_string(line_no));
    }
    out.push_back(std::move(rec));
    pos = last ? data.size() : nl + 1;
    good_end = pos;
  }
  if (repair && good_end < data.size()) {
    std::filesystem::resize_file(path, good_end);
  }
  // A complete record without its newline: terminate it so appends stay line-aligned.
  if (repair && good_end > 0 && data[good_end - 1] != '\n') {
    std::ofstream(path, std::ios::app) << '\n';
  }
  return out;
}

EventLog::EventLog(std::filesystem::path path, Clock& clock, bool fsync, std::uint64_t last_seq)
    : path_(std::move(path)), clock_(clock), fsync_(fsync), last_seq_(last_seq) {
  open_file();
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::open_file() {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) storage_fail("cannot open " + path_.string());
}

std::uint64_t EventLog::append(std::string_view kind, const json& payload) {
  std::lock_guard lock(mu_);
  if (fault_ && fault_(kind)) {
    errno = ENOSPC;
    storage_fail("append of " + std::string(kind) + " refused");
  }
  const EventRecord rec{last_seq_ + 1, clock_.now(), std::string(kind), payload};
  std::string line = json(rec).dump();
  line += '\n';

  struct stat st {};
  if (::fstat(fd_, &st) != 0) storage_fail("cannot stat " + path_.string());
  const bool written = write_all(fd_, line.data(), line.size());
  const bool synced = written && (!fsync_ || ::fdatasync(fd_) == 0);
  if (!synced) {
    const int saved = errno;
    // If this fails too, the log ends in a torn record that recovery drops.
    (void)!::ftruncate(fd_, st.st_size);
    errno = saved;
    storage_fail("cannot append to " + path_.string());
  }
  ++since_reset_;
  return ++last_seq_;
}

std::uint64_t EventLog::last_seq() const {
  std::lock_guard lock(mu_);
  return last_seq_;
}

std::size_t EventLog::size_since_reset() const {
  std::lock_guard lock(mu_);
  return since_reset_;
}

void EventLog::reset() {
  std::lock_guard lock(mu_);
  write_file_atomic(path_, "");
  ::close(fd_);
  open_file();
  since_reset_ = 0;
}

void EventLog::set_fault_injector(std::function<bool(std::string_view)> f) {
  std::lock_guard lock(mu_);
  fault_ = std::move(f);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) storage_fail("cannot create " + tmp.string());
  const bool ok = write_all(fd, contents.data(), contents.size()) && ::fsync(fd) == 0;
  const int saved = errno;
  ::close(fd);
  if (!ok) {
    errno = saved;
    storage_fail("cannot write " + tmp.string());
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) storage_fail("cannot rename " + tmp.string());
  fsync_dir(path.parent_path());
}

std::optional<json> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorCode::kRecoveryError, path.string() + ": unreadable snapshot: " + e.what());
  }
}

}  // namespace hg::service
