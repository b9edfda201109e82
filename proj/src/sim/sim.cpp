#include "hg/sim/sim.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"
#include "hg/stats/stats.hpp"

namespace hg::sim {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

[[noreturn]] void profile_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::kConfigError, "profile line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(const std::string& v, std::size_t line, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) profile_fail(line, key + " is not a number");
  return out;
}

// --- deterministic randomness ---------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// Uniform [0, 1) keyed by seed and a label, independent of call order.
double keyed_uniform(std::uint64_t seed, std::string_view label, std::uint64_t n) {
  const std::uint64_t x = splitmix64(splitmix64(seed ^ fnv1a(label)) + n);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

Millis seconds_to_ms(double s) { return static_cast<Millis>(std::llround(s * 1000.0)); }

// --- synthetic setup text --------------------------------------------------

constexpr std::string_view kStoryWords[] = {
    "harbor", "rain",    "pier",    "siren",   "doctor",  "detective", "town",   "night",
    "storm",  "lighthouse", "ship", "captain", "letter",  "secret",    "island", "village",
    "forest", "river",   "castle",  "tower",   "garden",  "station",   "train",  "window",
    "door",   "key",     "map",     "clock",   "mirror",  "lantern",   "bridge", "market",
    "song",   "voice",   "shadow",  "light",   "fire",    "water",     "stone",  "glass",
    "found",  "lost",    "hid",     "opened",  "carried", "followed",  "heard",  "burned",
    "old",    "quiet",   "cold",    "dark",    "strange", "silent",    "hidden", "ancient",
    "the",    "a",       "of",      "and",     "to",      "in",        "was",    "her"};

std::string synthetic_story(std::uint64_t seed, std::size_t index) {
  std::string out;
  const std::size_t n_words = 90 + static_cast<std::size_t>(keyed_uniform(seed, "story-len", index) * 60);
  for (std::size_t i = 0; i < n_words; ++i) {
    const double u = keyed_uniform(seed, "story-" + std::to_string(index), i);
    std::string w(kStoryWords[static_cast<std::size_t>(u * std::size(kStoryWords))]);
    const bool sentence_start = i == 0 || out.back() == '.';
    if (sentence_start) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (i) out += ' ';
    out += w;
    if (i + 1 == n_words || keyed_uniform(seed, "story-stop-" + std::to_string(index), i) < 0.1) {
      out += '.';
    }
  }
  return out;
}

// --- HTTP ------------------------------------------------------------------

struct Reply {
  int status = 0;
  json body;
};

class Api {
 public:
  Api(std::string url, std::string writer_key) : url_(std::move(url)), key_(std::move(writer_key)) {}

  Reply call(const std::string& method, const std::string& path, const json& body,
             httplib::Headers headers) {
    ++requests_;
    httplib::Client client(url_);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    const std::string payload = body.is_null() ? "" : body.dump();
    httplib::Result res = method == "GET" ? client.Get(path, headers)
                                          : client.Post(path, headers, payload, "application/json");
    if (!res) {
      fail(ErrorCode::kServerUnreachable,
           method + " " + url_ + path + ": " + httplib::to_string(res.error()));
    }
    Reply r{res->status, json()};
    if (!res->body.empty()) {
      r.body = json::parse(res->body, nullptr, false);
      if (r.body.is_discarded()) fail(ErrorCode::kParseError, path + ": response is not JSON");
    }
    return r;
  }

  json writer(const std::string& method, const std::string& path, const json& body = {}) {
    const Reply r = call(method, path, body, {{"X-Writer-Key", key_}});
    if (r.status == 401) fail(ErrorCode::kDenied, "the server rejected writer_key");
    if (r.status >= 300) {
      fail(ErrorCode::kBadState, method + " " + path + " -> " + std::to_string(r.status) + " " +
                                     r.body.dump());
    }
    return r.body;
  }

  Reply worker(const std::string& path, const std::string& worker_id, const std::string& key,
               const json& body = {}) {
    return call("POST", path, body, {{"X-Worker-Id", worker_id}, {"Idempotency-Key", key}});
  }

  std::size_t requests() const { return requests_; }

 private:
  std::string url_;
  std::string key_;
  std::atomic<std::size_t> requests_{0};
};

// Runs the calls concurrently; results come back in call order.
std::vector<Reply> in_parallel(const std::vector<std::function<Reply()>>& calls) {
  std::vector<std::future<Reply>> futures;
  futures.reserve(calls.size());
  for (const auto& c : calls) futures.push_back(std::async(std::launch::async, c));
  std::vector<Reply> out;
  out.reserve(calls.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

Millis iso_ms(const json& v) {
  const auto t = parse_iso8601(v.get<std::string>());
  if (!t) fail(ErrorCode::kParseError, "bad timestamp " + v.dump());
  return *t;
}

std::string error_name(const Reply& r) {
  return r.body.is_object() && r.body.contains("error") ? r.body["error"].get<std::string>() : "";
}

// --- simulation state ------------------------------------------------------

enum Phase { kAttest = 0, kSubmit = 1, kClaim = 2 };

struct Event {
  std::size_t worker = 0;
  std::string slot;
  std::uint64_t attempt = 0;
};

struct Worker {
  std::string id;
  std::set<std::string> worked;  // tasks with an accepted idea
  std::optional<std::string> slot;
  std::string task;
  std::size_t claims = 0;
  bool left = false;
};

struct Tracked {
  std::string id;
  std::string thread_id;
  Millis created_at = 0;
  std::size_t total_slots = 0;
  std::size_t accepted = 0;
  std::set<std::string> roles;  // character names; empty for NO_ROLE
  bool role_less = false;
  std::vector<std::pair<std::string, Millis>> ideas;  // (role label, submitted_at)
};

std::optional<LatencyTriple> latency_from(const Tracked& t) {
  if (t.ideas.empty()) return std::nullopt;
  LatencyTriple out;
  Millis first = t.ideas.front().second, last = first;
  std::map<std::string, Millis> earliest;
  for (const auto& [label, at] : t.ideas) {
    first = std::min(first, at);
    last = std::max(last, at);
    auto [it, fresh] = earliest.emplace(label, at);
    if (!fresh) it->second = std::min(it->second, at);
  }
  out.first_idea = first - t.created_at;
  out.last_idea = last - t.created_at;
  if (!t.role_less && !t.roles.empty() &&
      std::all_of(t.roles.begin(), t.roles.end(), [&](const auto& r) { return earliest.count(r); })) {
    Millis cover = 0;
    for (const auto& r : t.roles) cover = std::max(cover, earliest.at(r));
    out.per_character_coverage = cover - t.created_at;
  }
  return out;
}

json triple_json(const std::optional<LatencyTriple>& t) {
  if (!t) return nullptr;
  return json{{"first_idea_ms", t->first_idea},
              {"per_character_coverage_ms",
               t->per_character_coverage ? json(*t->per_character_coverage) : json(nullptr)},
              {"last_idea_ms", t->last_idea}};
}

bool close(Millis a, Millis b) { return std::llabs(a - b) <= 1; }

bool agrees(const std::optional<LatencyTriple>& a, const std::optional<LatencyTriple>& b) {
  if (!a || !b) return !a && !b;
  if (a->per_character_coverage.has_value() != b->per_character_coverage.has_value()) return false;
  if (a->per_character_coverage && !close(*a->per_character_coverage, *b->per_character_coverage)) {
    return false;
  }
  return close(a->first_idea, b->first_idea) && close(a->last_idea, b->last_idea);
}

std::string fmt(double v, const char* pattern = "%.3f") {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void write_outputs(const SimProfile& profile, const SimResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kConfigError, "cannot create " + out_dir.string());

  {
    const double width = profile.histogram_bucket_seconds;
    std::map<long long, std::size_t> counts;
    long long top = -1;
    for (Millis ms : result.idea_latencies) {
      const auto b = static_cast<long long>(std::floor(static_cast<double>(ms) / 1000.0 / width));
      ++counts[b];
      top = std::max(top, b);
    }
    std::ofstream h(out_dir / "histogram.csv", std::ios::binary);
    h << "bucket,count\n";
    for (long long b = 0; b <= top; ++b) {
      h << fmt(static_cast<double>(b) * width, "%g") << ',' << (counts.count(b) ? counts[b] : 0)
        << '\n';
    }
  }

  {
    std::vector<double> first, cover, last;
    for (const auto& t : result.tasks) {
      if (!t.sim) continue;
      first.push_back(static_cast<double>(t.sim->first_idea) / 1000.0);
      if (t.sim->per_character_coverage) {
        cover.push_back(static_cast<double>(*t.sim->per_character_coverage) / 1000.0);
      }
      last.push_back(static_cast<double>(t.sim->last_idea) / 1000.0);
    }
    auto median = [](std::vector<double> v) {
      if (v.empty()) return std::nan("");
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size() / 2;
      return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
    };
    std::ofstream s(out_dir / "summary.csv", std::ios::binary);
    s << "statistic,n,median_seconds,mean_seconds,sd_seconds\n";
    for (const auto& [name, v] : {std::pair<const char*, const std::vector<double>&>{"first_idea", first},
                                  {"per_character_coverage", cover},
                                  {"last_idea", last}}) {
      const double mean = v.empty() ? std::nan("") : stats::mean(v);
      const double sd = v.size() < 2 ? std::nan("") : stats::stddev(v);
      s << name << ',' << v.size() << ',' << fmt(median(v)) << ',' << fmt(mean) << ',' << fmt(sd)
        << '\n';
    }
  }

  json tasks = json::array();
  for (const auto& t : result.tasks) {
    tasks.push_back({{"task_id", t.task_id},
                     {"total_slots", t.total_slots},
                     {"acceptances", t.acceptances},
                     {"complete", t.complete},
                     {"every_role_covered", t.every_role_covered},
                     {"thread_replies", t.thread_replies},
                     {"sim_latency", triple_json(t.sim)},
                     {"server_latency", triple_json(t.server)},
                     {"latency_agrees", t.latency_agrees}});
  }
  const json doc{{"acceptances", result.acceptances},
                 {"rejections", result.rejections},
                 {"requests", result.requests},
                 {"virtual_duration_ms", result.virtual_duration},
                 {"all_complete", result.all_complete()},
                 {"latency_agreement", result.latency_agreement()},
                 {"tasks", tasks}};
  std::ofstream(out_dir / "result.json", std::ios::binary) << doc.dump(2) << '\n';
}

}  // namespace

double Distribution::sample(double u) const {
  switch (kind) {
    case Kind::kFixed:
      return a;
    case Kind::kUniform:
      return a + (b - a) * u;
    case Kind::kExponential:
      return -std::log1p(-u) / a;
  }
  return a;
}

Distribution Distribution::parse(std::string_view text) {
  static const std::regex shape(R"(^\s*([a-z]+)\s*\(\s*([^,\s)]+)\s*(?:,\s*([^,\s)]+)\s*)?\)\s*$)");
  const std::string s = text::to_lower_ascii(text);
  auto number = [&](const std::string& v) {
    double out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
      fail(ErrorCode::kConfigError, "bad number '" + v + "' in distribution '" + s + "'");
    }
    return out;
  };
  std::smatch m;
  Distribution d;
  if (std::regex_match(s, m, shape)) {
    const std::string kind = m[1];
    const bool two = m[3].matched;
    if (kind == "fixed" && !two) {
      d = {Kind::kFixed, number(m[2]), 0};
    } else if (kind == "uniform" && two) {
      d = {Kind::kUniform, number(m[2]), number(m[3])};
    } else if (kind == "exponential" && !two) {
      d = {Kind::kExponential, number(m[2]), 0};
    } else {
      fail(ErrorCode::kConfigError, "unknown distribution '" + s + "'");
    }
  } else {
    d = {Kind::kFixed, number(text::trim(s)), 0};
  }
  const bool ok = d.kind == Kind::kFixed         ? d.a >= 0
                  : d.kind == Kind::kUniform     ? d.a >= 0 && d.b >= d.a
                                                 : d.a > 0;
  if (!ok) fail(ErrorCode::kConfigError, "distribution '" + s + "' is out of range");
  return d;
}

bool SimResult::all_complete() const {
  return !tasks.empty() && std::all_of(tasks.begin(), tasks.end(), [](const auto& t) { return t.complete; });
}

bool SimResult::latency_agreement() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const auto& t) { return t.latency_agrees; });
}

SimProfile parse_profile(std::istream& in, const fs::path& base_dir) {
  SimProfile p;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string trimmed = text::trim(raw);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) profile_fail(line, "expected key = value");
    const std::string key = text::trim(std::string_view(trimmed).substr(0, eq));
    const std::string value = text::trim(std::string_view(trimmed).substr(eq + 1));
    if (!seen.insert(key).second) profile_fail(line, "duplicate key " + key);

    try {
      if (key == "n_workers") {
        p.n_workers = parse_number<std::size_t>(value, line, key);
        if (p.n_workers == 0) profile_fail(line, "n_workers must be > 0");
      } else if (key == "arrival") {
        p.arrival = Distribution::parse(value);
      } else if (key == "read_time") {
        p.read_time = Distribution::parse(value);
      } else if (key == "idea_source") {
        const fs::path path(value);
        p.idea_source = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
      } else if (key == "compliance") {
        p.compliance = parse_number<double>(value, line, key);
        if (!(p.compliance >= 0 && p.compliance <= 1)) profile_fail(line, "compliance must be in [0, 1]");
      } else if (key == "seed") {
        p.seed = parse_number<std::uint64_t>(value, line, key);
      } else if (key == "writer_key") {
        p.writer_key = value;
      } else if (key == "setup_tasks") {
        p.setup_tasks = parse_number<std::size_t>(value, line, key);
      } else if (key == "setup_team_sizes") {
        p.setup_team_sizes.clear();
        std::string item;
        std::istringstream items(value);
        while (std::getline(items, item, ',')) {
          const auto n = parse_number<std::size_t>(text::trim(item), line, key);
          if (n == 0) profile_fail(line, "team sizes must be > 0");
          p.setup_team_sizes.push_back(n);
        }
        if (p.setup_team_sizes.empty()) profile_fail(line, "setup_team_sizes is empty");
      } else if (key == "setup_quota") {
        p.setup_quota = parse_number<unsigned>(value, line, key);
        if (p.setup_quota == 0) profile_fail(line, "setup_quota must be > 0");
      } else if (key == "setup_strategy") {
        const auto s = orchestrator::parse_strategy(value);
        if (!s) profile_fail(line, "setup_strategy must be ROLE_PLAY or NO_ROLE");
        p.setup_strategy = *s;
      } else if (key == "poll_seconds" || key == "histogram_bucket_seconds" ||
                 key == "max_virtual_hours") {
        const double v = parse_number<double>(value, line, key);
        if (!(v > 0)) profile_fail(line, key + " must be > 0");
        (key == "poll_seconds"               ? p.poll_seconds
         : key == "histogram_bucket_seconds" ? p.histogram_bucket_seconds
                                             : p.max_virtual_hours) = v;
      } else {
        profile_fail(line, "unknown key " + key);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfigError && std::string(e.what()).rfind("profile line", 0) != 0) {
        profile_fail(line, e.what());
      }
      throw;
    }
  }
  if (p.idea_source.empty()) fail(ErrorCode::kConfigError, "profile: idea_source is required");
  if (p.writer_key.empty()) fail(ErrorCode::kConfigError, "profile: writer_key is required");
  return p;
}

SimProfile load_profile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfigError, "cannot read profile " + path.string());
  return parse_profile(in, path.parent_path());
}

SimResult run_sim(const SimProfile& profile, const std::string& server_url, const fs::path& out_dir) {
  Api api(server_url, profile.writer_key);

  const Reply health = api.call("GET", "/health", nullptr, {});
  if (health.status != 200) fail(ErrorCode::kServerUnreachable, server_url + ": health check failed");
  if (health.body.value("clock", "") != "manual") {
    fail(ErrorCode::kConfigError, "the simulator needs a server started with clock = manual");
  }
  const Millis t0 = iso_ms(health.body.at("now"));
  const Millis lock_ms = seconds_to_ms(health.body.at("time_lock_seconds").get<double>());
  const auto min_words = health.body.at("min_idea_words").get<std::size_t>();

  std::vector<std::string> corpus;
  {
    std::ifstream in(profile.idea_source, std::ios::binary);
    if (!in) fail(ErrorCode::kConfigError, "cannot read idea_source " + profile.idea_source.string());
    std::string line;
    while (std::getline(in, line)) {
      std::string idea = text::trim(line);
      if (text::word_count(idea) >= min_words) corpus.push_back(std::move(idea));
    }
  }

  // Tasks to work on, and how many ideas they need.
  std::map<std::string, Tracked> tracked;
  std::vector<std::string> order;
  std::size_t needed = 0;
  if (profile.setup_tasks > 0) {
    for (std::size_t i = 0; i < profile.setup_tasks; ++i) {
      needed += profile.setup_team_sizes[i % profile.setup_team_sizes.size()] * profile.setup_quota;
    }
  } else {
    for (const auto& st : api.writer("GET", "/tasks")) {
      if (st.at("state") != "OPEN") continue;
      Tracked t;
      t.id = st.at("task_id");
      t.thread_id = st.at("thread_id");
      t.created_at = iso_ms(st.at("created_at"));
      t.total_slots = st.at("total_slots");
      t.accepted = st.at("slots").at("submitted");
      t.role_less = st.at("strategy") == "NO_ROLE";
      for (const auto& r : st.at("roles")) t.roles.insert(r.get<std::string>());
      needed += t.total_slots - t.accepted - st.at("slots").at("void").get<std::size_t>();
      order.push_back(t.id);
      tracked.emplace(t.id, std::move(t));
    }
  }
  if (corpus.size() < needed) {
    fail(ErrorCode::kCorpusTooSmall, std::to_string(corpus.size()) + " usable ideas (>= " +
                                         std::to_string(min_words) + " words) for " +
                                         std::to_string(needed) + " slots");
  }

  for (std::size_t i = 0; i < profile.setup_tasks; ++i) {
    const std::size_t size = profile.setup_team_sizes[i % profile.setup_team_sizes.size()];
    json members = json::array();
    std::set<std::string> names;
    for (std::size_t k = 0; k < size; ++k) {
      const std::string name = "Sim character " + std::to_string(i + 1) + "." + std::to_string(k + 1);
      names.insert(name);
      members.push_back(api.writer("POST", "/characters",
                                   {{"name", name},
                                    {"description", "A scripted persona for simulated crowd runs."}})
                            .at("id"));
    }
    const json team = api.writer("POST", "/teams",
                                 {{"name", "Sim team " + std::to_string(i + 1)}, {"member_ids", members}});
    const std::string story = synthetic_story(profile.seed, i);
    const json doc = api.writer("POST", "/documents",
                                {{"title", "Sim story " + std::to_string(i + 1)}, {"body", story}});
    const json task = api.writer("POST", "/documents/" + doc.at("id").get<std::string>() + "/tasks",
                                 {{"start", 0},
                                  {"end", text::utf8_length(story)},
                                  {"team_id", team.at("id")},
                                  {"strategy", to_string(profile.setup_strategy)},
                                  {"quota", profile.setup_quota}});
    Tracked t;
    t.id = task.at("id");
    t.thread_id = task.at("thread_id");
    t.created_at = iso_ms(task.at("created_at"));
    t.total_slots = task.at("slots").size();
    t.role_less = profile.setup_strategy == orchestrator::Strategy::kNoRole;
    if (!t.role_less) t.roles = names;
    order.push_back(t.id);
    tracked.emplace(t.id, std::move(t));
  }

  SimResult result;
  std::vector<Worker> workers(profile.n_workers);
  std::map<std::tuple<Millis, int, std::uint64_t>, Event> queue;
  std::uint64_t next_seq = 0;
  auto schedule = [&](Millis t, Phase phase, Event e) {
    queue.emplace(std::make_tuple(t, static_cast<int>(phase), next_seq++), std::move(e));
  };
  {
    double arrival = 0;
    for (std::size_t i = 0; i < workers.size(); ++i) {
      workers[i].id = "sim-" + std::to_string(profile.seed) + "-w" + std::to_string(i);
      arrival += profile.arrival.sample(keyed_uniform(profile.seed, "arrival", i));
      schedule(seconds_to_ms(arrival), kClaim, {i, "", 0});
    }
  }

  std::map<std::string, std::uint64_t> attempts;  // slot -> claims so far
  std::map<std::string, std::size_t> slot_idea;   // slot -> corpus line
  std::size_t next_idea = 0;
  auto all_done = [&] {
    return std::all_of(tracked.begin(), tracked.end(),
                       [](const auto& kv) { return kv.second.accepted >= kv.second.total_slots; });
  };
  auto worked_everything = [&](const Worker& w) {
    return std::all_of(tracked.begin(), tracked.end(), [&](const auto& kv) {
      return w.worked.count(kv.first) || kv.second.accepted >= kv.second.total_slots;
    });
  };

  const Millis horizon = seconds_to_ms(profile.max_virtual_hours * 3600.0);
  Millis now = 0;
  while (!queue.empty() && !all_done()) {
    const Millis t = std::get<0>(queue.begin()->first);
    if (t > horizon) break;
    if (t != now) {
      api.writer("POST", "/admin/clock", {{"now", format_iso8601(t0 + t)}});
      now = t;
    }
    std::vector<Event> batch[3];
    while (!queue.empty() && std::get<0>(queue.begin()->first) == t) {
      batch[std::get<1>(queue.begin()->first)].push_back(std::move(queue.begin()->second));
      queue.erase(queue.begin());
    }

    // Read-bottom attestations.
    {
      std::vector<std::function<Reply()>> calls;
      for (const auto& e : batch[kAttest]) {
        calls.push_back([&api, &workers, e] {
          return api.worker("/work/" + e.slot + "/read-bottom", workers[e.worker].id,
                            "a-" + e.slot + "-" + std::to_string(e.attempt));
        });
      }
      const auto replies = in_parallel(calls);
      for (std::size_t i = 0; i < replies.size(); ++i) {
        if (replies[i].status != 200) {
          Worker& w = workers[batch[kAttest][i].worker];
          w.slot.reset();
          schedule(t, kClaim, {batch[kAttest][i].worker, "", 0});
        }
      }
    }

    // Submissions. Ideas are handed out in slot order so the run does not
    // depend on thread scheduling.
    {
      auto& subs = batch[kSubmit];
      subs.erase(std::remove_if(subs.begin(), subs.end(),
                                [&](const Event& e) { return workers[e.worker].slot != e.slot; }),
                 subs.end());
      std::sort(subs.begin(), subs.end(), [](const Event& a, const Event& b) { return a.slot < b.slot; });
      std::vector<std::function<Reply()>> calls;
      for (const auto& e : subs) {
        if (!slot_idea.count(e.slot)) {
          if (next_idea >= corpus.size()) fail(ErrorCode::kCorpusTooSmall, "ran out of ideas");
          slot_idea[e.slot] = next_idea++;
        }
        const std::string body = corpus[slot_idea[e.slot]];
        calls.push_back([&api, &workers, e, body] {
          return api.worker("/work/" + e.slot + "/submit", workers[e.worker].id,
                            "s-" + e.slot + "-" + std::to_string(e.attempt), {{"body", body}});
        });
      }
      const auto replies = in_parallel(calls);
      for (std::size_t i = 0; i < replies.size(); ++i) {
        const Event& e = subs[i];
        Worker& w = workers[e.worker];
        const Reply& r = replies[i];
        w.slot.reset();
        if (r.status == 200 && r.body.at("status") == "accepted") {
          const json& sub = r.body.at("submission");
          const std::string task_id = sub.at("task_id");
          ++result.acceptances;
          w.worked.insert(task_id);
          if (auto it = tracked.find(task_id); it != tracked.end()) {
            ++it->second.accepted;
            it->second.ideas.emplace_back(sub.at("role_label"), iso_ms(sub.at("submitted_at")));
          }
        } else if (r.status == 200) {
          const std::string reason = r.body.at("reason");
          ++result.rejections[reason];
          if (reason != "TIME_LOCK") slot_idea.erase(e.slot);
        }
        schedule(t, kClaim, {e.worker, "", 0});
      }
    }

    // Claims. Workers with the same history are interchangeable, so each such
    // group claims concurrently; groups go one after another.
    bool claimed_any = false;
    {
      std::map<std::set<std::string>, std::vector<std::size_t>> groups;
      for (const auto& e : batch[kClaim]) {
        if (!workers[e.worker].left) groups[workers[e.worker].worked].push_back(e.worker);
      }
      for (const auto& [history, members] : groups) {
        std::vector<std::function<Reply()>> calls;
        for (std::size_t wi : members) {
          Worker& w = workers[wi];
          const std::string key = "c-" + w.id + "-" + std::to_string(w.claims++);
          calls.push_back([&api, id = w.id, key] { return api.worker("/work/claim", id, key); });
        }
        const auto replies = in_parallel(calls);
        for (std::size_t i = 0; i < replies.size(); ++i) {
          const std::size_t wi = members[i];
          Worker& w = workers[wi];
          const Reply& r = replies[i];
          if (r.status != 200) {
            const std::string err = error_name(r);
            if (err != "NoWorkAvailable" && err != "AlreadyWorkedTask") {
              fail(ErrorCode::kBadState, "claim by " + w.id + " -> " + std::to_string(r.status) +
                                             " " + r.body.dump());
            }
            if (worked_everything(w)) {
              w.left = true;
            } else {
              schedule(t + seconds_to_ms(profile.poll_seconds), kClaim, {wi, "", 0});
            }
            continue;
          }
          claimed_any = true;
          const std::string slot = r.body.at("slot_id");
          const std::string task_id = r.body.at("task_id");
          w.slot = slot;
          w.task = task_id;
          const std::uint64_t attempt = attempts[slot]++;
          const std::string label = slot + "#" + std::to_string(attempt);
          const Millis read = seconds_to_ms(
              profile.read_time.sample(keyed_uniform(profile.seed, "read:" + label, 0)));
          // Only a slot's first attempt may jump the lock; a rejected worker
          // has learned the rule.
          const bool complies =
              attempt > 0 || keyed_uniform(profile.seed, "comply:" + label, 0) < profile.compliance;
          if (complies) {
            schedule(t + read, kAttest, {wi, slot, attempt});
            schedule(t + std::max(read, lock_ms), kSubmit, {wi, slot, attempt});
          } else {
            const Millis early = std::min(read, lock_ms / 2);
            schedule(t + early, kAttest, {wi, slot, attempt});
            schedule(t + early, kSubmit, {wi, slot, attempt});
          }
        }
      }
    }

    // Nobody holds a slot and nobody could get one: polling cannot change anything.
    const bool stalled =
        batch[kSubmit].empty() && !batch[kClaim].empty() && !claimed_any &&
        std::all_of(workers.begin(), workers.end(),
                    [](const Worker& w) { return w.left || (!w.slot && w.claims > 0); });
    if (stalled) break;
  }
  result.virtual_duration = now;

  for (const auto& id : order) {
    Tracked& t = tracked.at(id);
    TaskOutcome out;
    out.task_id = id;
    out.total_slots = t.total_slots;
    out.acceptances = t.accepted;
    const json status = api.writer("GET", "/tasks/" + id);
    out.complete = status.at("state") == "COMPLETE";
    const json& by_role = status.at("ideas_by_role");
    out.every_role_covered =
        t.role_less ? !by_role.empty()
                    : !t.roles.empty() && std::all_of(t.roles.begin(), t.roles.end(), [&](const auto& r) {
                        return by_role.contains(r) && !by_role.at(r).empty();
                      });
    out.thread_replies = api.writer("GET", "/threads/" + t.thread_id).at("replies").size();
    out.sim = latency_from(t);
    const Reply lat = api.call("GET", "/tasks/" + id + "/latency", nullptr,
                               {{"X-Writer-Key", profile.writer_key}});
    if (lat.status == 200) {
      LatencyTriple s;
      s.first_idea = lat.body.at("first_idea_ms");
      if (!lat.body.at("per_character_coverage_ms").is_null()) {
        s.per_character_coverage = lat.body.at("per_character_coverage_ms").get<Millis>();
      }
      s.last_idea = lat.body.at("last_idea_ms");
      out.server = s;
    }
    out.latency_agrees = agrees(out.sim, out.server);
    for (const auto& [label, at] : t.ideas) result.idea_latencies.push_back(at - t.created_at);
    result.tasks.push_back(std::move(out));
  }
  std::sort(result.idea_latencies.begin(), result.idea_latencies.end());
  result.requests = api.requests();
  write_outputs(profile, result, out_dir);
  return result;
}

}  // namespace hg::sim
