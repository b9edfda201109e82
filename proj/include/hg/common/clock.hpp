#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hg {

// Milliseconds since the Unix epoch, UTC.
using Millis = std::int64_t;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis now() = 0;
};

class SystemClock final : public Clock {
 public:
  Millis now() override;
};

// Externally driven clock. Time never moves backwards; `step` is added after
// every read, which lets tests model "some time passes between calls".
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Millis start = 0, Millis step = 0)
      : now_(start), step_(step) {}

  Millis now() override { return now_.fetch_add(step_); }

  Millis peek() const { return now_.load(); }

  // Returns false if `t` would move the clock backwards.
  bool set(Millis t);
  void advance(Millis delta) { now_.fetch_add(delta); }

 private:
  std::atomic<Millis> now_;
  Millis step_;
};

// ISO-8601 UTC with millisecond precision, e.g. 2019-05-04T12:00:00.250Z.
std::string format_iso8601(Millis t);
std::optional<Millis> parse_iso8601(std::string_view s);

}  // namespace hg
