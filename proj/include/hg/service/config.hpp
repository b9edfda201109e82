#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "hg/common/clock.hpp"

namespace hg::service {

struct Config {
  double time_lock_seconds = 30;
  std::size_t min_idea_words = 50;
  unsigned per_character_quota = 3;
  std::size_t copy_overlap_tokens = 15;
  double duplicate_distance_threshold = 0.05;

  std::optional<std::filesystem::path> embedding_path;
  std::optional<std::filesystem::path> sidecar_path;
  bool case_folding = true;
  // Subset of glove, sentence_mean, sentence_min, sentence_median, sidecar.
  std::vector<std::string> metrics{"glove", "sentence_mean", "sentence_min", "sentence_median"};

  std::string listen_address = "127.0.0.1:8080";
  std::filesystem::path data_dir;
  std::string writer_key;

  // "manual" freezes time until POST /admin/clock moves it (simulations).
  std::string clock = "system";
  Millis manual_clock_start = 1577836800000;  // 2020-01-01T00:00:00Z
  std::size_t snapshot_every = 1000;          // events between automatic snapshots
  bool fsync = true;
  std::size_t http_threads = 32;

  std::string host() const;
  int port() const;
};

inline const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> names{"glove", "sentence_mean", "sentence_min",
                                              "sentence_median", "sidecar"};
  return names;
}

// `key = value` lines; '#' starts a comment. Relative paths resolve against
// `base_dir`. Throws kConfigError on unknown keys, bad values, or missing
// required settings.
Config parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

// --config wins over $HG_CONFIG; returns nullopt when neither is set.
std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& flag);

}  // namespace hg::service
