#pragma once

// Random mutation sequences against a service App, plus the kill/recover
// round used by the durability tests.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"
#include "hg/service/app.hpp"

namespace hg::testsupport {

namespace fs = std::filesystem;

inline service::Config test_config(const fs::path& data_dir, const fs::path& embeddings) {
  service::Config c;
  c.data_dir = data_dir;
  c.writer_key = "writer-secret";
  c.embedding_path = embeddings;
  c.clock = "manual";
  c.listen_address = "127.0.0.1:0";
  c.snapshot_every = 1'000'000;
  c.http_threads = 32;
  return c;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << s;
}

// Tokens unique enough that random bodies never overlap a prompt.
inline std::string random_words(std::mt19937_64& rng, std::size_t n, char stem) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += (rng() % 9 == 0) ? ". " : " ";
    s += stem;
    s += std::to_string(rng() % 5000);
  }
  return s;
}

// One random mutation. Choices the API rejects (bad ids, closed tasks, gate
// failures) throw and are ignored: they must leave no trace in the log.
inline void random_mutation(service::App& app, std::mt19937_64& rng) {
  auto& ws = app.workspace();
  auto& orch = app.orchestrator();
  const auto chars = ws.list_characters();
  const auto teams = ws.list_teams();
  const auto docs = ws.read([](const workspace::WorkspaceState& st) {
    std::vector<workspace::Document> out;
    for (const auto& [id, d] : st.documents()) out.push_back(d);
    return out;
  });
  const auto tasks = orch.list_tasks();
  auto index = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::string worker = "w-" + std::to_string(rng() % 12);

  try {
    switch (rng() % 16) {
      case 0:
      case 1:
        ws.create_character("char " + std::to_string(rng() % 100), random_words(rng, 6, 'd'));
        break;
      case 2:
        if (!chars.empty()) {
          workspace::CharacterUpdate u;
          u.description = random_words(rng, 4, 'u');
          if (rng() % 2) u.image_ref = std::optional<std::string>("img.png");
          ws.update_character(chars[index(chars.size())].id, u);
        }
        break;
      case 3:
        if (!chars.empty() && rng() % 3 == 0) ws.delete_character(chars[index(chars.size())].id);
        break;
      case 4:
        if (!chars.empty()) {
          std::vector<std::string> members;
          for (const auto& c : chars) {
            if (rng() % 2) members.push_back(c.id);
          }
          if (members.empty()) members.push_back(chars.front().id);
          ws.create_team("team " + std::to_string(rng() % 50), members);
        }
        break;
      case 5:
        if (!teams.empty()) {
          workspace::TeamUpdate u;
          u.name = "renamed " + std::to_string(rng() % 50);
          ws.update_team(teams[index(teams.size())].id, u);
        }
        break;
      case 6:
        ws.create_document("doc", random_words(rng, 40 + rng() % 60, 'p'));
        break;
      case 7:
        if (!docs.empty()) {
          const auto& d = docs[index(docs.size())];
          const std::size_t len = text::utf8_length(d.body);
          const std::size_t at = len ? index(len) : 0;
          ws.edit_document(d.id, {at, rng() % 5, random_words(rng, 1 + rng() % 3, 'e') + " "});
        }
        break;
      case 8:
        if (!docs.empty()) {
          const auto& d = docs[index(docs.size())];
          ws.create_thread(d.id, 0, std::min<std::size_t>(10, text::utf8_length(d.body)),
                           "note " + std::to_string(rng() % 10));
        }
        break;
      case 9:
      case 10:
        if (!docs.empty() && !teams.empty()) {
          const auto& d = docs[index(docs.size())];
          const std::size_t len = text::utf8_length(d.body);
          orchestrator::CreateTaskRequest r;
          r.document_id = d.id;
          r.start = index(std::max<std::size_t>(len / 2, 1));
          r.end = std::min(len, r.start + 20 + index(200));
          r.team_id = teams[index(teams.size())].id;
          r.strategy = rng() % 2 ? orchestrator::Strategy::kRolePlay : orchestrator::Strategy::kNoRole;
          r.per_character_quota = 1 + rng() % 3;
          if (rng() % 2) r.note = "keep it spooky";
          orch.create_task(r);
        }
        break;
      case 11:
      case 12:
        orch.claim(worker, rng() % 3 ? std::optional<std::string>("k" + std::to_string(rng() % 4))
                                     : std::nullopt);
        break;
      case 13:
      case 14: {
        std::vector<orchestrator::AssignmentSlot> claimed;
        for (const auto& t : tasks) {
          for (const auto& s : t.slots) {
            if (s.state == orchestrator::SlotState::kClaimed) claimed.push_back(s);
          }
        }
        if (claimed.empty()) break;
        const auto& s = claimed[index(claimed.size())];
        app.manual_clock()->advance(static_cast<Millis>(rng() % 45'000));
        if (!s.read_bottom_attested && rng() % 4) {
          orch.attest_read_bottom(s.id, *s.claimed_by);
          break;
        }
        const std::size_t n = rng() % 5 == 0 ? 20 : 50 + rng() % 30;
        orch.submit(s.id, *s.claimed_by, random_words(rng, n, 'i'),
                    rng() % 2 ? std::optional<std::string>("s" + std::to_string(rng() % 3))
                              : std::nullopt);
        break;
      }
      case 15:
        if (!tasks.empty() && rng() % 4 == 0) orch.cancel(tasks[index(tasks.size())].id);
        break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kStorageFull) throw;
  }
}

struct RoundResult {
  bool recovered_equal = false;  // kill + recover reproduces the pre-kill state
  bool replay_equal = false;     // snapshot + log replays to the same state as the full log
  bool second_recovery_equal = false;
  std::string detail;
};

// One durability round: random mutations with occasional snapshots, a kill
// (App destroyed without shutdown, optionally leaving a torn record), then
// recovery and a from-genesis replay in a second directory.
inline RoundResult durability_round(const fs::path& root, const fs::path& embeddings,
                                    std::uint64_t seed, bool torn_tail) {
  std::mt19937_64 rng(seed);
  RoundResult r;
  const fs::path a = root / "live";
  const fs::path b = root / "genesis";
  fs::remove_all(root);
  fs::create_directories(b);
  std::string full_log;
  json before;
  {
    service::App app(test_config(a, embeddings));
    const int ops = 20 + static_cast<int>(rng() % 80);
    for (int i = 0; i < ops; ++i) {
      random_mutation(app, rng);
      if (rng() % 25 == 0) {
        full_log += read_file(a / "events.log");
        app.snapshot();
      }
    }
    before = app.state();
    full_log += read_file(a / "events.log");
  }
  if (torn_tail) {
    std::ofstream(a / "events.log", std::ios::app) << R"({"seq":999999,"at":1,"kind":"slot.cla)";
  }

  json after;
  {
    service::App app(test_config(a, embeddings));
    after = app.state();
    r.recovered_equal = after == before;
    for (int i = 0; i < 10; ++i) random_mutation(app, rng);
    before = app.state();
  }
  {
    service::App app(test_config(a, embeddings));
    r.second_recovery_equal = app.state() == before;
  }

  write_file(b / "events.log", full_log);
  {
    service::App genesis(test_config(b, embeddings));
    r.replay_equal = genesis.state() == after;
  }
  if (!r.recovered_equal) r.detail += "recovery diverged; ";
  if (!r.second_recovery_equal) r.detail += "recovery after torn tail diverged; ";
  if (!r.replay_equal) r.detail += "genesis replay diverged; ";
  return r;
}

}  // namespace hg::testsupport
