#include <atomic>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "hg/common/error.hpp"
#include "hg/common/text.hpp"
#include "hg/orchestrator/orchestrator.hpp"

using namespace hg;
using namespace hg::orchestrator;

namespace {

constexpr Millis kMinute = 60'000;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected hg::Error");
  return ErrorCode::kInvalidArgument;
}

std::string words(std::size_t n, std::string_view stem = "idea") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += std::string(stem) + std::to_string(i);
  }
  return s;
}

const std::string kStory =
    "Detective Opal considered her seargant. The rain had not stopped for three "
    "days and the harbor smelled of salt and diesel. Somewhere below the pier a "
    "siren was singing a song that nobody in the town admitted to hearing, and "
    "the doctor who had heard it last was found floating near the breakwater.";

struct World {
  explicit World(Millis step = 0) : clock(1'000'000, step) {}

  ManualClock clock;
  NullSink sink;
  workspace::Workspace ws{clock, sink};
  Orchestrator orch{ws, clock, sink};

  std::vector<std::string> characters(int n) {
    static const char* names[] = {"Detective Opal", "Siren Eris", "Dead Doctor",
                                  "Sgt. Subwoofer", "Harbor Master"};
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
      ids.push_back(ws.create_character(names[i], std::string("backstory of ") + names[i],
                                        "img/" + std::to_string(i) + ".png")
                        .id);
    }
    return ids;
  }

  IdeationTask task(int team_size, unsigned quota, Strategy strategy = Strategy::kRolePlay) {
    const auto team = ws.create_team("Team", characters(team_size));
    const auto doc = ws.create_document("Draft", kStory);
    CreateTaskRequest req;
    req.document_id = doc.id;
    req.start = 0;
    req.end = text::utf8_length(kStory);
    req.team_id = team.id;
    req.note = "keep it spooky";
    req.strategy = strategy;
    req.per_character_quota = quota;
    return orch.create_task(req);
  }

  // Claim, attest, wait past the lock, submit.
  SubmitOutcome complete_one(const std::string& worker, const std::string& body) {
    const auto offer = orch.claim(worker);
    orch.attest_read_bottom(offer.slot_id, worker);
    clock.advance(orch.settings().time_lock_ms());
    return orch.submit(offer.slot_id, worker, body);
  }
};

bool accepted(const SubmitOutcome& o) { return std::holds_alternative<IdeaSubmission>(o); }

RejectReason reason(const SubmitOutcome& o) { return std::get<Rejection>(o).reason; }

}  // namespace

TEST_CASE("compute_reward") {
  CHECK(compute_reward(1000) == 200);
  CHECK(compute_reward(0) == 100);
  CHECK(compute_reward(511) == 151);
  CHECK(compute_reward(515) == 152);  // 151.5 rounds half-up
  CHECK(compute_reward(514) == 151);
  std::int64_t prev = compute_reward(0);
  for (std::size_t w = 0; w <= 5000; ++w) {
    REQUIRE(compute_reward(w + 1000) - compute_reward(w) == 100);
    REQUIRE(compute_reward(w) >= prev);
    prev = compute_reward(w);
  }
}

TEST_CASE("longest_common_run") {
  CHECK(longest_common_run("", "a b c") == 0);
  CHECK(longest_common_run("a b c d", "x b c d y") == 3);
  CHECK(longest_common_run("The Rain, had", "the rain had") == 3);
  CHECK(longest_common_run("a b a b a", "b a b") == 3);
}

TEST_CASE("create_task mints slots per strategy") {
  World w;
  const auto t = w.task(3, 3);
  CHECK(t.slots.size() == 9);
  std::map<std::string, int> per_role;
  for (const auto& s : t.slots) {
    REQUIRE(s.role.has_value());
    ++per_role[*s.role];
    CHECK(s.state == SlotState::kUnclaimed);
  }
  CHECK(per_role.size() == 3);
  for (const auto& [_, n] : per_role) CHECK(n == 3);
  CHECK(t.state == TaskState::kOpen);
  CHECK(t.reward_cents == compute_reward(text::word_count(kStory)));

  const auto thread = w.ws.get_thread(t.thread_id);
  CHECK(thread.overview.find("Detective Opal") != std::string::npos);
  CHECK(thread.overview.find("Siren Eris") != std::string::npos);
  CHECK(thread.overview.find("Dead Doctor") != std::string::npos);
  CHECK(thread.replies.empty());

  World w2;
  const auto nr = w2.task(2, 5, Strategy::kNoRole);
  CHECK(nr.slots.size() == 10);
  for (const auto& s : nr.slots) CHECK_FALSE(s.role.has_value());
}

TEST_CASE("create_task errors") {
  World w;
  const auto ids = w.characters(2);
  const auto team = w.ws.create_team("T", ids);
  const auto doc = w.ws.create_document("D", kStory);
  CreateTaskRequest req{doc.id, 0, 10, team.id, std::nullopt, Strategy::kRolePlay, 3};

  auto bad = req;
  bad.team_id = "team-77";
  CHECK(code_of([&] { w.orch.create_task(bad); }) == ErrorCode::kUnknownTeam);
  bad = req;
  bad.end = 100000;
  CHECK(code_of([&] { w.orch.create_task(bad); }) == ErrorCode::kInvalidSelection);
  bad = req;
  bad.per_character_quota = 0;
  CHECK(code_of([&] { w.orch.create_task(bad); }) == ErrorCode::kInvalidArgument);

  w.ws.delete_character(ids[1]);
  CHECK(code_of([&] { w.orch.create_task(req); }) == ErrorCode::kDeletedCharacterInTeam);
}

TEST_CASE("claim rules") {
  World w;
  const auto t = w.task(1, 2);
  const auto offer = w.orch.claim("w-1");
  CHECK(offer.task_id == t.id);
  CHECK(offer.slot_id == t.slots[0].id);
  REQUIRE(offer.role.has_value());
  CHECK(offer.role->name == "Detective Opal");
  CHECK(offer.prompt == kStory);
  CHECK(offer.note == std::optional<std::string>("keep it spooky"));
  CHECK(w.orch.get_task(t.id).slots[0].state == SlotState::kClaimed);

  // Role card carries only name and description.
  const json j = offer;
  CHECK(j.at("role").size() == 2);
  CHECK(j.dump().find("img/") == std::string::npos);

  CHECK(code_of([&] { w.orch.claim("w-1"); }) == ErrorCode::kAlreadyActive);

  w.orch.attest_read_bottom(offer.slot_id, "w-1");
  w.clock.advance(31'000);
  REQUIRE(accepted(w.orch.submit(offer.slot_id, "w-1", words(60))));
  CHECK(code_of([&] { w.orch.claim("w-1"); }) == ErrorCode::kAlreadyWorkedTask);

  const auto other = w.orch.claim("w-2");
  CHECK(other.slot_id == t.slots[1].id);
  CHECK(code_of([&] { w.orch.claim("w-3"); }) == ErrorCode::kNoWorkAvailable);
}

TEST_CASE("claim dispatch is oldest task first") {
  World w;
  const auto first = w.task(1, 1);
  const auto second = w.task(1, 1);
  CHECK(w.orch.claim("a").task_id == first.id);
  CHECK(w.orch.claim("b").task_id == second.id);
}

TEST_CASE("worker who finished the oldest task gets the next one") {
  World w;
  const auto first = w.task(1, 2);
  const auto second = w.task(1, 1);
  REQUIRE(accepted(w.complete_one("a", words(60))));
  CHECK(w.orch.claim("a").task_id == second.id);
  (void)first;
}

TEST_CASE("attest_read_bottom") {
  World w;
  w.task(1, 2);
  const auto offer = w.orch.claim("w-1");
  CHECK(code_of([&] { w.orch.attest_read_bottom(offer.slot_id, "w-2"); }) ==
        ErrorCode::kNotClaimant);
  w.orch.attest_read_bottom(offer.slot_id, "w-1");
  CHECK(w.orch.get_task(offer.task_id).slots[0].read_bottom_attested);
  w.clock.advance(31'000);
  REQUIRE(accepted(w.orch.submit(offer.slot_id, "w-1", words(60))));
  CHECK(code_of([&] { w.orch.attest_read_bottom(offer.slot_id, "w-1"); }) ==
        ErrorCode::kBadState);
  CHECK(code_of([&] { w.orch.attest_read_bottom("slot-99", "w-1"); }) == ErrorCode::kNotFound);
}

TEST_CASE("submit gates") {
  World w;
  const auto t = w.task(1, 3);

  SUBCASE("time lock") {
    const auto offer = w.orch.claim("w");
    w.orch.attest_read_bottom(offer.slot_id, "w");
    w.clock.advance(10'000);
    const auto out = w.orch.submit(offer.slot_id, "w", words(60));
    REQUIRE_FALSE(accepted(out));
    CHECK(reason(out) == RejectReason::kTimeLock);
    CHECK(std::get<Rejection>(out).retry_after_ms == 20'000);
    // Released back to the pool.
    const auto slot = w.orch.get_task(t.id).slots[0];
    CHECK(slot.state == SlotState::kUnclaimed);
    CHECK_FALSE(slot.claimed_by.has_value());
    CHECK(w.orch.claim("other").slot_id == offer.slot_id);
  }
  SUBCASE("read attestation") {
    const auto offer = w.orch.claim("w");
    w.clock.advance(60'000);
    CHECK(reason(w.orch.submit(offer.slot_id, "w", words(60))) ==
          RejectReason::kNoReadAttestation);
  }
  SUBCASE("too short") {
    const auto offer = w.orch.claim("w");
    w.orch.attest_read_bottom(offer.slot_id, "w");
    w.clock.advance(60'000);
    CHECK(reason(w.orch.submit(offer.slot_id, "w", words(40))) == RejectReason::kTooShort);
  }
  SUBCASE("copy overlap") {
    const auto story_words = text::split_words(kStory);
    std::string copied;
    for (std::size_t i = 5; i < 25; ++i) copied += std::string(story_words[i]) + " ";
    const std::string body = copied + words(40);
    const auto offer = w.orch.claim("w");
    w.orch.attest_read_bottom(offer.slot_id, "w");
    w.clock.advance(60'000);
    CHECK(reason(w.orch.submit(offer.slot_id, "w", body)) == RejectReason::kCopyOverlap);
  }
  SUBCASE("gate order: time lock reported first") {
    const auto offer = w.orch.claim("w");
    CHECK(reason(w.orch.submit(offer.slot_id, "w", "short")) == RejectReason::kTimeLock);
  }
  SUBCASE("accepted idea lands in the thread") {
    const auto offer = w.orch.claim("w");
    w.orch.attest_read_bottom(offer.slot_id, "w");
    w.clock.advance(60'000);
    const auto out = w.orch.submit(offer.slot_id, "w", words(60));
    REQUIRE(accepted(out));
    const auto& sub = std::get<IdeaSubmission>(out);
    CHECK(sub.role_label == "Detective Opal");
    CHECK(sub.elapsed_read_ms == 60'000);
    const auto thread = w.ws.get_thread(t.thread_id);
    REQUIRE(thread.replies.size() == 1);
    CHECK(thread.replies[0].author_label == "Detective Opal");
    CHECK(thread.replies[0].body == words(60));
  }
  SUBCASE("not claimant / bad state") {
    const auto offer = w.orch.claim("w");
    CHECK(code_of([&] { w.orch.submit(offer.slot_id, "x", words(60)); }) ==
          ErrorCode::kNotClaimant);
    w.orch.attest_read_bottom(offer.slot_id, "w");
    w.clock.advance(60'000);
    REQUIRE(accepted(w.orch.submit(offer.slot_id, "w", words(60))));
    CHECK(code_of([&] { w.orch.submit(offer.slot_id, "w", words(60)); }) ==
          ErrorCode::kBadState);
  }
}

TEST_CASE("no-role ideas are labeled as such") {
  World w;
  const auto t = w.task(2, 1, Strategy::kNoRole);
  const auto offer = w.orch.claim("w");
  CHECK_FALSE(offer.role.has_value());
  w.orch.attest_read_bottom(offer.slot_id, "w");
  w.clock.advance(30'000);
  const auto out = w.orch.submit(offer.slot_id, "w", words(50));
  REQUIRE(accepted(out));
  CHECK(std::get<IdeaSubmission>(out).role_label == kNoRoleLabel);
  CHECK(w.ws.get_thread(t.thread_id).replies[0].author_label == kNoRoleLabel);
}

TEST_CASE("time lock boundary property") {
  std::mt19937_64 rng(30);
  World w;
  w.task(1, 1);
  const Millis lock = w.orch.settings().time_lock_ms();
  for (int i = 0; i < 400; ++i) {
    const auto offer = w.orch.claim("w");
    w.orch.attest_read_bottom(offer.slot_id, "w");
    const Millis elapsed = static_cast<Millis>(rng() % static_cast<std::uint64_t>(2 * lock));
    w.clock.advance(elapsed);
    const auto out = w.orch.submit(offer.slot_id, "w", "too short on purpose");
    // Past the lock the next gate (length) rejects, keeping the slot reusable.
    REQUIRE(reason(out) == (elapsed < lock ? RejectReason::kTimeLock : RejectReason::kTooShort));
  }
  const auto offer = w.orch.claim("w");
  w.orch.attest_read_bottom(offer.slot_id, "w");
  w.clock.advance(lock - 1);
  CHECK(reason(w.orch.submit(offer.slot_id, "w", words(60))) == RejectReason::kTimeLock);
  const auto again = w.orch.claim("w");
  w.orch.attest_read_bottom(again.slot_id, "w");
  w.clock.advance(lock);
  CHECK(accepted(w.orch.submit(again.slot_id, "w", words(60))));
}

TEST_CASE("status and completion") {
  World w;
  const auto t = w.task(3, 3);
  for (int i = 0; i < 4; ++i) REQUIRE(accepted(w.complete_one("w" + std::to_string(i), words(55))));
  auto s = w.orch.status(t.id);
  CHECK(s.submitted == 4);
  CHECK(s.unclaimed + s.claimed == 5);
  CHECK(s.total_slots == 9);
  CHECK(s.state == TaskState::kOpen);
  for (int i = 4; i < 9; ++i) REQUIRE(accepted(w.complete_one("w" + std::to_string(i), words(55))));
  s = w.orch.status(t.id);
  CHECK(s.submitted == 9);
  CHECK(s.state == TaskState::kComplete);
  CHECK(s.ideas_by_role.size() == 3);
  CHECK(code_of([&] { w.orch.status("task-99"); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { w.orch.claim("late"); }) == ErrorCode::kNoWorkAvailable);
}

TEST_CASE("latency report") {
  SUBCASE("one character") {
    World w;
    const auto t = w.task(1, 3);
    const Millis t0 = t.created_at;
    for (Millis at : {5 * kMinute, 12 * kMinute, 30 * kMinute}) {
      const auto offer = w.orch.claim("w" + std::to_string(at));
      w.orch.attest_read_bottom(offer.slot_id, "w" + std::to_string(at));
      w.clock.set(t0 + at);
      REQUIRE(accepted(w.orch.submit(offer.slot_id, "w" + std::to_string(at), words(50))));
    }
    const auto r = w.orch.latency_report(t.id);
    CHECK(r.first_idea == 5 * kMinute);
    CHECK(r.per_character_coverage == 5 * kMinute);
    CHECK(r.last_idea == 30 * kMinute);
  }
  SUBCASE("two characters") {
    World w;
    const auto t = w.task(2, 2);
    const Millis t0 = t.created_at;
    // Slots are dispatched A, A, B, B.
    const auto a1 = w.orch.claim("a1");
    const auto a2 = w.orch.claim("a2");
    const auto b1 = w.orch.claim("b1");
    for (const auto& [o, wid] : {std::pair{a1, "a1"}, {a2, "a2"}, {b1, "b1"}}) {
      w.orch.attest_read_bottom(o.slot_id, wid);
    }
    w.clock.set(t0 + 5 * kMinute);
    REQUIRE(accepted(w.orch.submit(a1.slot_id, "a1", words(50))));
    CHECK_FALSE(w.orch.latency_report(t.id).per_character_coverage.has_value());
    w.clock.set(t0 + 8 * kMinute);
    REQUIRE(accepted(w.orch.submit(a2.slot_id, "a2", words(50))));
    w.clock.set(t0 + 20 * kMinute);
    REQUIRE(accepted(w.orch.submit(b1.slot_id, "b1", words(50))));
    const auto r = w.orch.latency_report(t.id);
    CHECK(r.first_idea == 5 * kMinute);
    CHECK(r.per_character_coverage == 20 * kMinute);
    CHECK(r.last_idea == 20 * kMinute);
  }
  SUBCASE("no ideas") {
    World w;
    const auto t = w.task(1, 1);
    CHECK(code_of([&] { w.orch.latency_report(t.id); }) == ErrorCode::kNoIdeasYet);
  }
}

TEST_CASE("latency ordering property") {
  std::mt19937_64 rng(6);
  for (int iter = 0; iter < 60; ++iter) {
    World w;
    const int size = 1 + static_cast<int>(rng() % 3);
    const auto t = w.task(size, 2);
    const Millis t0 = t.created_at;
    Millis at = t0;
    int n = 1 + static_cast<int>(rng() % (size * 2));
    for (int i = 0; i < n; ++i) {
      const std::string wid = "w" + std::to_string(i);
      const auto offer = w.orch.claim(wid);
      w.orch.attest_read_bottom(offer.slot_id, wid);
      at += w.orch.settings().time_lock_ms() + static_cast<Millis>(rng() % (20 * kMinute));
      w.clock.set(at);
      REQUIRE(accepted(w.orch.submit(offer.slot_id, wid, words(50))));
    }
    const auto r = w.orch.latency_report(t.id);
    REQUIRE(r.first_idea <= r.last_idea);
    if (r.per_character_coverage) {
      REQUIRE(r.first_idea <= *r.per_character_coverage);
      REQUIRE(*r.per_character_coverage <= r.last_idea);
    }
  }
}

TEST_CASE("cancel") {
  World w;
  const auto t = w.task(2, 2);
  REQUIRE(accepted(w.complete_one("a", words(50))));
  REQUIRE(accepted(w.complete_one("b", words(50))));
  const auto held = w.orch.claim("c");
  w.orch.cancel(t.id);
  CHECK(w.ws.get_thread(t.thread_id).replies.size() == 2);
  const auto s = w.orch.status(t.id);
  CHECK(s.state == TaskState::kCancelled);
  CHECK(s.voided == 2);
  CHECK(s.submitted == 2);
  CHECK(code_of([&] { w.orch.cancel(t.id); }) == ErrorCode::kBadState);
  CHECK(code_of([&] { w.orch.claim("d"); }) == ErrorCode::kNoWorkAvailable);
  CHECK(code_of([&] { w.orch.submit(held.slot_id, "c", words(50)); }) == ErrorCode::kBadState);
  // The voided claim no longer pins the worker.
  CHECK(code_of([&] { w.orch.claim("c"); }) == ErrorCode::kNoWorkAvailable);
}

TEST_CASE("slots of characters deleted after task creation are not offered") {
  World w;
  const auto t = w.task(2, 1);
  w.ws.delete_character(*t.slots[0].role);
  const auto offer = w.orch.claim("w");
  CHECK(offer.slot_id == t.slots[1].id);
  CHECK(code_of([&] { w.orch.claim("v"); }) == ErrorCode::kNoWorkAvailable);
}

TEST_CASE("condition parity") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    const int size = 1 + static_cast<int>(rng() % 5);
    const unsigned quota = 1 + static_cast<unsigned>(rng() % 5);
    World a, b;
    CHECK(a.task(size, quota, Strategy::kRolePlay).slots.size() ==
          b.task(size, quota, Strategy::kNoRole).slots.size());
  }
}

TEST_CASE("quota safety under 100 concurrent workers") {
  // Every clock read advances 31 s, so any claim-to-submit gap clears the lock.
  World w(31'000);
  const auto t = w.task(3, 3);
  std::atomic<int> accepted_count{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 100; ++i) {
    threads.emplace_back([&, i] {
      const std::string wid = "w-" + std::to_string(i);
      try {
        const auto offer = w.orch.claim(wid);
        w.orch.attest_read_bottom(offer.slot_id, wid);
        if (accepted(w.orch.submit(offer.slot_id, wid, words(60)))) ++accepted_count;
      } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::kNoWorkAvailable));
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(accepted_count == 9);
  const auto task = w.orch.get_task(t.id);
  CHECK(task.state == TaskState::kComplete);
  std::map<std::string, int> per_role;
  for (const auto& s : task.accepted) ++per_role[*s.role];
  for (const auto& [_, n] : per_role) CHECK(n == 3);
  const auto thread = w.ws.get_thread(t.thread_id);
  CHECK(thread.replies.size() == 9);
}

TEST_CASE("status snapshots stay consistent during submissions") {
  World w(31'000);
  const auto t = w.task(3, 3);
  std::atomic<bool> done{false};
  std::thread reader([&] {
    while (!done) {
      const auto s = w.orch.status(t.id);
      REQUIRE(s.unclaimed + s.claimed + s.submitted == 9);
    }
  });
  std::vector<std::thread> workers;
  for (int i = 0; i < 9; ++i) {
    workers.emplace_back([&, i] {
      const std::string wid = "w-" + std::to_string(i);
      const auto offer = w.orch.claim(wid);
      w.orch.attest_read_bottom(offer.slot_id, wid);
      w.orch.submit(offer.slot_id, wid, words(60));
    });
  }
  for (auto& th : workers) th.join();
  done = true;
  reader.join();
  CHECK(w.orch.status(t.id).submitted == 9);
}

TEST_CASE("idempotent retries return the original outcome") {
  World w;
  w.task(1, 2);
  const auto offer = w.orch.claim("w", "k1");
  const auto retry = w.orch.claim("w", "k1");
  CHECK(retry.slot_id == offer.slot_id);
  w.orch.attest_read_bottom(offer.slot_id, "w", "k2");
  w.orch.attest_read_bottom(offer.slot_id, "w", "k2");
  w.clock.advance(40'000);
  const auto first = w.orch.submit(offer.slot_id, "w", words(60), "k3");
  const auto second = w.orch.submit(offer.slot_id, "w", words(60), "k3");
  REQUIRE(accepted(first));
  REQUIRE(accepted(second));
  CHECK(std::get<IdeaSubmission>(first) == std::get<IdeaSubmission>(second));
  CHECK(w.orch.get_task(offer.task_id).accepted.size() == 1);
}

TEST_CASE("scorer results are stored on the submission") {
  World w;
  w.orch.set_scorer([](std::string_view, std::string_view) {
    return std::map<std::string, double>{{"glove", 0.25}};
  });
  w.task(1, 1);
  const auto out = w.complete_one("w", words(50));
  REQUIRE(accepted(out));
  CHECK(std::get<IdeaSubmission>(out).distance_scores.at("glove") == 0.25);
}

TEST_CASE("event replay reproduces orchestrator state") {
  struct Recorder final : EventSink {
    std::vector<std::pair<std::string, json>> events;
    std::uint64_t append(std::string_view kind, const json& p) override {
      events.emplace_back(std::string(kind), p);
      return events.size();
    }
  } rec;
  ManualClock clock(5'000, 7'000);
  workspace::Workspace ws(clock, rec);
  Orchestrator orch(ws, clock, rec);
  const auto a = ws.create_character("A", "a");
  const auto b = ws.create_character("B", "b");
  const auto team = ws.create_team("T", {a.id, b.id});
  const auto doc = ws.create_document("D", kStory);
  const auto t = orch.create_task({doc.id, 0, 40, team.id, std::nullopt, Strategy::kRolePlay, 2});
  auto offer = orch.claim("w1", "c1");
  orch.attest_read_bottom(offer.slot_id, "w1");
  orch.submit(offer.slot_id, "w1", "short", "s1");  // rejected
  offer = orch.claim("w1");
  orch.attest_read_bottom(offer.slot_id, "w1");
  clock.advance(40'000);
  orch.submit(offer.slot_id, "w1", words(50), "s2");
  orch.claim("w2");
  orch.cancel(t.id);

  ManualClock clock2;
  NullSink null;
  workspace::Workspace ws2(clock2, null);
  Orchestrator orch2(ws2, clock2, null);
  for (const auto& [kind, payload] : rec.events) {
    REQUIRE((ws2.apply(kind, payload) || orch2.apply(kind, payload)));
  }
  CHECK(ws2.snapshot() == ws.snapshot());
  CHECK(orch2.snapshot() == orch.snapshot());

  Orchestrator orch3(ws2, clock2, null);
  orch3.restore(orch.snapshot());
  CHECK(orch3.snapshot() == orch.snapshot());
}
