#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hg/common/clock.hpp"
#include "hg/common/event_sink.hpp"

namespace hg::service {

struct EventRecord {
  std::uint64_t seq = 0;
  Millis at = 0;
  std::string kind;
  json payload;
};

void to_json(json& j, const EventRecord& r);
void from_json(const json& j, EventRecord& r);

// Reads a JSON-lines log. A final line cut short by a crash is dropped (and,
// with `repair`, truncated away). Anything else malformed, or a sequence
// that does not strictly increase, throws kRecoveryError.
std::vector<EventRecord> read_event_log(const std::filesystem::path& path, bool repair);

// Append-only JSON-lines event log. append() returns only after the record is
// written (and fsynced when enabled); on failure the file is cut back to its
// previous length and kStorageFull is thrown.
class EventLog final : public EventSink {
 public:
  EventLog(std::filesystem::path path, Clock& clock, bool fsync, std::uint64_t last_seq);
  ~EventLog() override;
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  std::uint64_t append(std::string_view kind, const json& payload) override;

  std::uint64_t last_seq() const;
  std::size_t size_since_reset() const;

  // Drops every record; the caller has just persisted them in a snapshot.
  void reset();

  // Test hook: when it returns true the append fails as if the disk were full.
  void set_fault_injector(std::function<bool(std::string_view kind)> f);

  const std::filesystem::path& path() const { return path_; }

 private:
  void open_file();

  std::filesystem::path path_;
  Clock& clock_;
  bool fsync_;
  mutable std::mutex mu_;
  int fd_ = -1;
  std::uint64_t last_seq_;
  std::size_t since_reset_ = 0;
  std::function<bool(std::string_view)> fault_;
};

// Atomic file replacement: temp file, fsync, rename, fsync of the directory.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::optional<json> read_snapshot(const std::filesystem::path& path);

}  // namespace hg::service
