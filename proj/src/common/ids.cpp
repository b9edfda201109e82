#include "hg/common/ids.hpp"

#include <charconv>

namespace hg {

void IdAllocator::observe(std::string_view id) {
  if (id.size() <= prefix_.size() + 1 || id.substr(0, prefix_.size()) != prefix_ ||
      id[prefix_.size()] != '-') {
    return;
  }
  const auto digits = id.substr(prefix_.size() + 1);
  std::uint64_t n = 0;
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return;
  if (n > last_) last_ = n;
}

}  // namespace hg
