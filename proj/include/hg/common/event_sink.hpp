#pragma once

#include <cstdint>
#include <string_view>

#include "json.hpp"

namespace hg {

using json = nlohmann::json;

// Destination for state-change events. Every mutation appends its event
// before applying it in memory; an append that throws aborts the mutation.
class EventSink {
 public:
  virtual ~EventSink() = default;
  // Returns the assigned sequence number. Throws hg::Error(kStorageFull).
  virtual std::uint64_t append(std::string_view kind, const json& payload) = 0;
};

class NullSink final : public EventSink {
 public:
  std::uint64_t append(std::string_view, const json&) override {
    return ++seq_;
  }

 private:
  std::uint64_t seq_ = 0;
};

}  // namespace hg
