#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hg {

// Ids of the form "<prefix>-<n>". peek() proposes the next id; it is only
// committed once the record carrying it is stored via observe(). Callers
// serialize peek/observe pairs.
class IdAllocator {
 public:
  explicit IdAllocator(std::string prefix) : prefix_(std::move(prefix)) {}

  std::string peek() const { return prefix_ + "-" + std::to_string(last_ + 1); }

  void observe(std::string_view id);

  std::uint64_t last() const { return last_; }
  void reset(std::uint64_t last) { last_ = last; }

 private:
  std::string prefix_;
  std::uint64_t last_ = 0;
};

}  // namespace hg
