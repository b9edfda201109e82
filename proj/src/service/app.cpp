#include "hg/service/app.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "hg/common/error.hpp"

namespace hg::service {

namespace {

constexpr const char* kSnapshotFile = "snapshot.json";
constexpr const char* kLogFile = "events.log";

std::optional<distance::Aggregation> sentence_aggregation(std::string_view metric) {
  if (metric == "sentence_mean") return distance::Aggregation::kMean;
  if (metric == "sentence_min") return distance::Aggregation::kMin;
  if (metric == "sentence_median") return distance::Aggregation::kMedian;
  return std::nullopt;
}

}  // namespace

App::App(Config config) : config_(std::move(config)) {
  if (config_.clock == "manual") {
    auto manual = std::make_unique<ManualClock>(config_.manual_clock_start, 0);
    manual_ = manual.get();
    clock_ = std::move(manual);
  } else {
    clock_ = std::make_unique<SystemClock>();
  }

  const bool wants_embeddings = std::any_of(config_.metrics.begin(), config_.metrics.end(),
                                            [](const auto& m) { return m != "sidecar"; });
  if (wants_embeddings || config_.embedding_path) {
    if (!config_.embedding_path || !std::filesystem::is_regular_file(*config_.embedding_path)) {
      fail(ErrorCode::kConfigError,
           "embedding file not found: " +
               (config_.embedding_path ? config_.embedding_path->string() : std::string("(unset)")));
    }
    try {
      embeddings_.emplace(distance::load_embeddings(*config_.embedding_path, config_.case_folding));
    } catch (const Error& e) {
      fail(ErrorCode::kConfigError, std::string("embedding file rejected: ") + e.what());
    }
  }
  if (config_.sidecar_path) {
    if (!std::filesystem::is_regular_file(*config_.sidecar_path)) {
      fail(ErrorCode::kConfigError, "sidecar file not found: " + config_.sidecar_path->string());
    }
    try {
      sidecar_.emplace(distance::load_sidecar(*config_.sidecar_path));
    } catch (const Error& e) {
      fail(ErrorCode::kConfigError, std::string("sidecar file rejected: ") + e.what());
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(config_.data_dir, ec);
  if (ec || !std::filesystem::is_directory(config_.data_dir)) {
    fail(ErrorCode::kConfigError, "data_dir is not usable: " + config_.data_dir.string());
  }
  recover();
}

App::~App() = default;

void App::recover() {
  const auto snap = read_snapshot(config_.data_dir / kSnapshotFile);
  std::vector<EventRecord> records;
  records = read_event_log(config_.data_dir / kLogFile, true);

  std::uint64_t snap_seq = 0;
  Millis latest = 0;
  if (snap) {
    try {
      snap_seq = snap->at("seq").get<std::uint64_t>();
      latest = snap->at("clock").get<Millis>();
    } catch (const std::exception& e) {
      fail(ErrorCode::kRecoveryError, std::string("snapshot header: ") + e.what());
    }
  }
  const std::uint64_t last_seq = records.empty() ? snap_seq : std::max(snap_seq, records.back().seq);

  log_ = std::make_unique<EventLog>(config_.data_dir / kLogFile, *clock_, config_.fsync, last_seq);
  workspace_ = std::make_unique<workspace::Workspace>(*clock_, *log_);
  orchestrator::Settings settings;
  settings.time_lock_seconds = config_.time_lock_seconds;
  settings.min_idea_words = config_.min_idea_words;
  settings.copy_overlap_tokens = config_.copy_overlap_tokens;
  orchestrator_ = std::make_unique<orchestrator::Orchestrator>(*workspace_, *clock_, *log_, settings);
  orchestrator_->set_scorer(
      [this](std::string_view prompt, std::string_view idea) { return score(prompt, idea); });

  try {
    if (snap) {
      workspace_->restore(snap->at("workspace"));
      orchestrator_->restore(snap->at("orchestrator"));
    }
    for (const auto& rec : records) {
      if (rec.seq <= snap_seq) continue;
      if (!workspace_->apply(rec.kind, rec.payload) &&
          !orchestrator_->apply(rec.kind, rec.payload)) {
        fail(ErrorCode::kRecoveryError, "unknown event kind '" + rec.kind + "' at seq " +
                                            std::to_string(rec.seq));
      }
      latest = std::max(latest, rec.at);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kRecoveryError) throw;
    fail(ErrorCode::kRecoveryError, std::string("replay failed: ") + e.what());
  } catch (const std::exception& e) {
    fail(ErrorCode::kRecoveryError, std::string("replay failed: ") + e.what());
  }
  if (manual_) manual_->set(std::max(latest, manual_->peek()));
}

void App::maybe_snapshot() {
  if (log_->size_since_reset() >= config_.snapshot_every) snapshot();
}

std::uint64_t App::snapshot() {
  std::lock_guard one_at_a_time(snapshot_mu_);
  std::unique_lock exclusive(gate_);
  const std::uint64_t seq = log_->last_seq();
  json snap = state();
  snap["seq"] = seq;
  snap["clock"] = manual_ ? manual_->peek() : clock_->now();
  write_file_atomic(config_.data_dir / kSnapshotFile, snap.dump());
  log_->reset();
  return seq;
}

json App::state() const {
  return json{{"workspace", workspace_->snapshot()}, {"orchestrator", orchestrator_->snapshot()}};
}

bool App::has_metric(std::string_view name) const {
  return std::find(config_.metrics.begin(), config_.metrics.end(), name) != config_.metrics.end();
}

std::map<std::string, double> App::score(std::string_view prompt, std::string_view idea) const {
  std::map<std::string, double> out;
  for (const auto& m : config_.metrics) {
    if (m == "sidecar") continue;  // sidecar vectors are looked up at ranking time
    try {
      out[m] = text_distance(m, prompt, idea);
    } catch (const Error&) {
      // Unscorable under this metric; ranking reports it as such.
    }
  }
  return out;
}

double App::text_distance(std::string_view metric, std::string_view a, std::string_view b) const {
  if (!embeddings_) fail(ErrorCode::kInvalidArgument, "no embeddings loaded");
  if (metric == "glove") {
    return distance::cosine_distance(distance::embed_sum(a, *embeddings_).values,
                                     distance::embed_sum(b, *embeddings_).values);
  }
  if (const auto agg = sentence_aggregation(metric)) {
    return distance::sentence_pair_distance(a, b, distance::word_sum_vectorizer(*embeddings_), *agg);
  }
  fail(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(metric) + "'");
}

const std::vector<double>& App::sidecar_vector(const std::string& id) const {
  if (!sidecar_) fail(ErrorCode::kInvalidArgument, "no sidecar vectors loaded");
  const auto it = sidecar_->vectors.find(id);
  if (it == sidecar_->vectors.end()) fail(ErrorCode::kNotFound, "no sidecar vector for " + id);
  return it->second;
}

double App::prompt_distance(std::string_view metric, std::string_view task_id,
                            std::string_view prompt,
                            const orchestrator::IdeaSubmission& idea) const {
  if (metric == "sidecar") {
    return distance::cosine_distance(sidecar_vector(std::string(task_id)), sidecar_vector(idea.id));
  }
  if (const auto it = idea.distance_scores.find(std::string(metric));
      it != idea.distance_scores.end()) {
    return it->second;
  }
  return text_distance(metric, prompt, idea.body);
}

double App::pair_distance(std::string_view metric, const orchestrator::IdeaSubmission& a,
                          const orchestrator::IdeaSubmission& b) const {
  if (metric == "sidecar") {
    return distance::cosine_distance(sidecar_vector(a.id), sidecar_vector(b.id));
  }
  return text_distance(metric, a.body, b.body);
}

json App::ideas(std::string_view task_id, const std::optional<std::string>& metric) {
  if (metric && !has_metric(*metric)) {
    fail(ErrorCode::kInvalidArgument, "metric '" + *metric + "' is not enabled");
  }
  const auto task = orchestrator_->get_task(task_id);
  std::map<std::string, const orchestrator::IdeaSubmission*> by_id;
  std::vector<distance::RankItem> items;
  for (const auto& sub : task.accepted) {
    by_id[sub.id] = &sub;
    items.push_back({sub.id, sub.body, sub.submitted_at});
  }

  std::vector<distance::RankedIdea> order;
  if (metric) {
    order = distance::rank_ideas(items, [&](const distance::RankItem& r) {
      return prompt_distance(*metric, task.id, task.prompt.snapshot, *by_id.at(r.id));
    });
  } else {
    for (const auto& r : items) order.push_back({r.id, std::nullopt, r.submitted_at});
  }

  std::set<std::string> flagged;
  const std::optional<std::string> dup_metric =
      metric ? metric : (config_.metrics.empty() ? std::nullopt
                                                 : std::optional<std::string>(config_.metrics.front()));
  if (dup_metric) {
    for (auto& id : distance::near_duplicate_flags(
             items,
             [&](const distance::RankItem& a, const distance::RankItem& b) {
               return pair_distance(*dup_metric, *by_id.at(a.id), *by_id.at(b.id));
             },
             config_.duplicate_distance_threshold)) {
      flagged.insert(std::move(id));
    }
  }

  json list = json::array();
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& sub = *by_id.at(order[i].id);
    json entry{{"id", sub.id},
               {"slot_id", sub.slot_id},
               {"role_label", sub.role_label},
               {"body", sub.body},
               {"submitted_at", sub.submitted_at},
               {"distance_scores", sub.distance_scores},
               {"duplicate", flagged.count(sub.id) > 0}};
    if (metric) {
      entry["rank"] = i + 1;
      entry["distance"] = order[i].distance ? json(*order[i].distance) : json(nullptr);
      entry["scored"] = order[i].distance.has_value();
    }
    list.push_back(std::move(entry));
  }
  return json{{"task_id", task.id},
              {"metric", metric ? json(*metric) : json(nullptr)},
              {"duplicate_metric", dup_metric ? json(*dup_metric) : json(nullptr)},
              {"duplicate_threshold", config_.duplicate_distance_threshold},
              {"ideas", std::move(list)}};
}

}  // namespace hg::service
