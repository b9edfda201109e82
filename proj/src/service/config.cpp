#include "hg/service/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"

namespace hg::service {

namespace {

[[noreturn]] void config_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::kConfigError, "config line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_positive(const std::string& v, std::size_t line, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) config_fail(line, key + " is not a number");
  if (!(out > T{})) config_fail(line, key + " must be > 0");
  return out;
}

bool parse_bool(const std::string& v, std::size_t line, const std::string& key) {
  const std::string l = text::to_lower_ascii(v);
  if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
  if (l == "false" || l == "no" || l == "0" || l == "off") return false;
  config_fail(line, key + " must be true or false");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

std::string Config::host() const {
  const auto colon = listen_address.rfind(':');
  return colon == std::string::npos ? listen_address : listen_address.substr(0, colon);
}

int Config::port() const {
  const auto colon = listen_address.rfind(':');
  if (colon == std::string::npos) return 8080;
  int port = -1;
  const std::string p = listen_address.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), port);
  if (ec != std::errc() || ptr != p.data() + p.size() || port < 0 || port > 65535) {
    fail(ErrorCode::kConfigError, "bad port in listen_address '" + listen_address + "'");
  }
  return port;
}

Config parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  Config c;
  std::map<std::string, std::size_t> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string trimmed = text::trim(raw);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) config_fail(line, "expected key = value");
    const std::string key = text::trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = text::trim(std::string_view(trimmed).substr(eq + 1));
    if (!seen.emplace(key, line).second) config_fail(line, "duplicate key " + key);

    if (key == "time_lock_seconds") {
      c.time_lock_seconds = parse_positive<double>(value, line, key);
    } else if (key == "min_idea_words") {
      c.min_idea_words = parse_positive<std::size_t>(value, line, key);
    } else if (key == "per_character_quota") {
      c.per_character_quota = parse_positive<unsigned>(value, line, key);
    } else if (key == "copy_overlap_tokens") {
      c.copy_overlap_tokens = parse_positive<std::size_t>(value, line, key);
    } else if (key == "duplicate_distance_threshold") {
      c.duplicate_distance_threshold = parse_positive<double>(value, line, key);
    } else if (key == "embedding_path") {
      if (!value.empty()) c.embedding_path = resolve(base_dir, value);
    } else if (key == "sidecar_path") {
      if (!value.empty()) c.sidecar_path = resolve(base_dir, value);
    } else if (key == "case_folding") {
      c.case_folding = parse_bool(value, line, key);
    } else if (key == "metrics") {
      c.metrics.clear();
      if (text::to_lower_ascii(value) == "none") continue;
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string name = text::trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto& known = known_metrics();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
          config_fail(line, "unknown metric '" + name + "'");
        }
        c.metrics.push_back(name);
      }
    } else if (key == "listen_address") {
      c.listen_address = value;
    } else if (key == "data_dir") {
      c.data_dir = resolve(base_dir, value);
    } else if (key == "writer_key") {
      c.writer_key = value;
    } else if (key == "clock") {
      if (value != "system" && value != "manual") config_fail(line, "clock must be system or manual");
      c.clock = value;
    } else if (key == "manual_clock_start") {
      const auto t = parse_iso8601(value);
      if (!t) config_fail(line, "manual_clock_start must be an ISO-8601 UTC timestamp");
      c.manual_clock_start = *t;
    } else if (key == "snapshot_every") {
      c.snapshot_every = parse_positive<std::size_t>(value, line, key);
    } else if (key == "fsync") {
      c.fsync = parse_bool(value, line, key);
    } else if (key == "http_threads") {
      c.http_threads = parse_positive<std::size_t>(value, line, key);
    } else {
      config_fail(line, "unknown key '" + key + "'");
    }
  }

  if (c.data_dir.empty()) fail(ErrorCode::kConfigError, "data_dir is required");
  if (c.writer_key.empty()) fail(ErrorCode::kConfigError, "writer_key is required");
  const bool needs_embeddings = std::any_of(c.metrics.begin(), c.metrics.end(),
                                            [](const auto& m) { return m != "sidecar"; });
  if (needs_embeddings && !c.embedding_path) {
    fail(ErrorCode::kConfigError, "embedding_path is required by the configured metrics");
  }
  if (std::find(c.metrics.begin(), c.metrics.end(), "sidecar") != c.metrics.end() &&
      !c.sidecar_path) {
    fail(ErrorCode::kConfigError, "the sidecar metric needs sidecar_path");
  }
  (void)c.port();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfigError, "cannot read config file " + path.string());
  return parse_config(in, path.parent_path());
}

std::optional<std::filesystem::path> resolve_config_path(
    const std::optional<std::filesystem::path>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("HG_CONFIG"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

}  // namespace hg::service
