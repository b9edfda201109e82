#include "hg/stats/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"
#include "hg/stats/stats.hpp"

namespace hg::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kPairLabel = "NO_ROLE-ROLE";

struct AspectName {
  Aspect aspect;
  std::string_view name;
};

constexpr AspectName kAspectNames[] = {
    {Aspect::kRelevance, "RELEVANCE"},         {Aspect::kLegitimate, "LEGITIMATE"},
    {Aspect::kCreative, "CREATIVE"},           {Aspect::kInteresting, "INTERESTING"},
    {Aspect::kWillingToRead, "WILLING_TO_READ"}, {Aspect::kSurprising, "SURPRISING"},
};

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

// Minimal RFC 4180 field splitter: commas, double-quoted fields, "" escapes.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) parse_fail(line_no, "unterminated quote");
  out.push_back(std::move(field));
  return out;
}

template <class Fn>
void for_each_row(std::istream& in, std::string_view header, std::size_t columns, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (!seen_header) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (text::trim(line) != header) parse_fail(line_no, "expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    auto fields = split_csv(line, line_no);
    if (fields.size() != columns) {
      parse_fail(line_no, "expected " + std::to_string(columns) + " fields, got " +
                              std::to_string(fields.size()));
    }
    for (auto& f : fields) f = text::trim(f);
    fn(fields, line_no);
  }
  if (!seen_header) fail(ErrorCode::kParseError, "missing header '" + std::string(header) + "'");
}

// Per-item bookkeeping shared by the sections.
struct ItemIndex {
  std::map<std::string, std::pair<std::string, Condition>> where;  // item -> story, condition
  std::map<std::pair<std::string, Aspect>, std::vector<int>> scores;

  explicit ItemIndex(const std::vector<RatingRecord>& records) {
    for (const auto& r : records) {
      const auto [it, fresh] = where.emplace(r.item_id, std::make_pair(r.story_id, r.condition));
      if (!fresh && it->second != std::make_pair(r.story_id, r.condition)) {
        fail(ErrorCode::kParseError, "item " + r.item_id + " appears under two stories or conditions");
      }
      scores[{r.item_id, r.aspect}].push_back(r.score);
    }
  }

  double item_mean(const std::string& item, Aspect aspect) const {
    const auto it = scores.find({item, aspect});
    if (it == scores.end()) {
      fail(ErrorCode::kMissingRatings,
           "item " + item + " has no " + std::string(to_string(aspect)) + " rating");
    }
    double s = 0;
    for (int v : it->second) s += v;
    return s / static_cast<double>(it->second.size());
  }
};

std::vector<LikertMean> story_level(const std::map<std::string, std::vector<double>>& by_story) {
  std::vector<LikertMean> out;
  for (const auto& [story, values] : by_story) out.push_back({story, mean(values)});
  return out;
}

std::vector<double> values_of(const std::vector<LikertMean>& means) {
  std::vector<double> out;
  for (const auto& m : means) out.push_back(m.mean);
  return out;
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return kNaN;
  }
}

class Emitter {
 public:
  explicit Emitter(StudyReport& r) : report_(r) {}

  void value(std::string_view section, std::string_view subject, std::string_view condition,
             std::string_view statistic, double v) {
    report_.rows.push_back({std::string(section), std::string(subject), std::string(condition),
                            std::string(statistic), v, false});
  }
  void count(std::string_view section, std::string_view subject, std::string_view condition,
             std::string_view statistic, std::size_t n) {
    report_.rows.push_back({std::string(section), std::string(subject), std::string(condition),
                            std::string(statistic), static_cast<double>(n), true});
  }

  // n, mean, ci95_low, ci95_high of story-level means.
  void summary(std::string_view section, std::string_view subject, Condition c,
               const std::vector<LikertMean>& means) {
    const auto xs = values_of(means);
    const auto cond = to_string(c);
    count(section, subject, cond, "n", xs.size());
    value(section, subject, cond, "mean", or_nan([&] { return mean(xs); }));
    const Interval ci = [&] {
      try {
        return ci95_mean(xs);
      } catch (const Error&) {
        return Interval{kNaN, kNaN};
      }
    }();
    value(section, subject, cond, "ci95_low", ci.low);
    value(section, subject, cond, "ci95_high", ci.high);
  }

  // NO_ROLE - ROLE over stories present in both; throws kUnpairedStory otherwise.
  void paired(std::string_view section, std::string_view subject,
              const std::vector<LikertMean>& role, const std::vector<LikertMean>& no_role) {
    std::vector<double> a, b;
    std::size_t i = 0, j = 0;
    while (i < role.size() || j < no_role.size()) {
      if (i < role.size() && j < no_role.size() && role[i].id == no_role[j].id) {
        b.push_back(role[i++].mean);
        a.push_back(no_role[j++].mean);
        continue;
      }
      const std::string& lonely =
          (j >= no_role.size() || (i < role.size() && role[i].id < no_role[j].id)) ? role[i].id
                                                                                   : no_role[j].id;
      fail(ErrorCode::kUnpairedStory,
           "story " + lonely + " lacks one condition for " + std::string(subject));
    }
    std::vector<double> delta(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) delta[k] = a[k] - b[k];
    const double diff = or_nan([&] { return mean(delta); });
    TTest t{kNaN, kNaN, kNaN};
    double d = kNaN;
    try {
      t = paired_t_test(a, b);
      d = cohens_d_paired(a, b);
    } catch (const Error&) {
    }
    count(section, subject, kPairLabel, "n", a.size());
    value(section, subject, kPairLabel, "t", t.t);
    if (std::isnan(t.df)) {
      value(section, subject, kPairLabel, "df", kNaN);
    } else {
      count(section, subject, kPairLabel, "df", static_cast<std::size_t>(t.df));
    }
    value(section, subject, kPairLabel, "p_two_tailed", t.p_two_tailed);
    value(section, subject, kPairLabel, "cohens_d", d);
    value(section, subject, kPairLabel, "mean_difference", diff);
  }

 private:
  StudyReport& report_;
};

std::string format_value(const ReportRow& row, bool exact) {
  if (std::isnan(row.value)) return "nan";
  char buf[64];
  if (row.integral) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(row.value));
  } else {
    std::snprintf(buf, sizeof buf, exact ? "%.17g" : "%.4f", row.value);
  }
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string_view section_title(std::string_view section) {
  if (section == "likert") return "Likert ratings: story-level means with 95% CI";
  if (section == "paired") return "Likert ratings: paired t-test, NO_ROLE - ROLE, story level";
  if (section == "distance") return "Semantic distance to prompt: story-level means with 95% CI";
  if (section == "distance_paired") return "Semantic distance: paired t-test, NO_ROLE - ROLE, story level";
  if (section == "correlation") return "Distance metrics vs item-level relevance (expected negative)";
  return section;
}

}  // namespace

std::string_view to_string(Condition c) { return c == Condition::kRole ? "ROLE" : "NO_ROLE"; }

std::string_view to_string(Aspect a) {
  for (const auto& n : kAspectNames) {
    if (n.aspect == a) return n.name;
  }
  return "?";
}

std::optional<Condition> parse_condition(std::string_view s) {
  if (s == "ROLE") return Condition::kRole;
  if (s == "NO_ROLE") return Condition::kNoRole;
  return std::nullopt;
}

std::optional<Aspect> parse_aspect(std::string_view s) {
  for (const auto& n : kAspectNames) {
    if (n.name == s) return n.aspect;
  }
  return std::nullopt;
}

std::vector<RatingRecord> read_ratings(std::istream& in) {
  std::vector<RatingRecord> out;
  for_each_row(in, "item_id,story_id,condition,aspect,rater_id,score", 6,
               [&](const std::vector<std::string>& f, std::size_t line) {
                 RatingRecord r;
                 r.item_id = f[0];
                 r.story_id = f[1];
                 if (r.item_id.empty() || r.story_id.empty()) parse_fail(line, "empty id");
                 const auto cond = parse_condition(f[2]);
                 if (!cond) parse_fail(line, "unknown condition '" + f[2] + "'");
                 const auto aspect = parse_aspect(f[3]);
                 if (!aspect) parse_fail(line, "unknown aspect '" + f[3] + "'");
                 r.condition = *cond;
                 r.aspect = *aspect;
                 r.rater_id = f[4];
                 const auto [ptr, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), r.score);
                 if (ec != std::errc() || ptr != f[5].data() + f[5].size() || r.score < 1 || r.score > 5) {
                   parse_fail(line, "score must be an integer 1..5, got '" + f[5] + "'");
                 }
                 out.push_back(std::move(r));
               });
  return out;
}

std::vector<DistanceRecord> read_distances(std::istream& in) {
  std::vector<DistanceRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_row(in, "item_id,metric,distance", 3,
               [&](const std::vector<std::string>& f, std::size_t line) {
                 DistanceRecord r{f[0], f[1], 0.0};
                 if (r.item_id.empty() || r.metric.empty()) parse_fail(line, "empty id or metric");
                 const auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.distance);
                 if (ec != std::errc() || ptr != f[2].data() + f[2].size() || !std::isfinite(r.distance)) {
                   parse_fail(line, "bad distance '" + f[2] + "'");
                 }
                 if (!seen.emplace(r.item_id, r.metric).second) {
                   parse_fail(line, "duplicate distance for " + r.item_id + "/" + r.metric);
                 }
                 out.push_back(std::move(r));
               });
  return out;
}

std::vector<LikertMean> aggregate_likert(const std::vector<RatingRecord>& records, Aspect aspect,
                                         Condition condition, Level level) {
  const ItemIndex index(records);
  std::vector<LikertMean> items;
  std::map<std::string, std::vector<double>> by_story;
  for (const auto& [item, place] : index.where) {
    if (place.second != condition) continue;
    const double m = index.item_mean(item, aspect);
    items.push_back({item, m});
    by_story[place.first].push_back(m);
  }
  return level == Level::kItem ? items : story_level(by_story);
}

std::optional<double> StudyReport::find(std::string_view section, std::string_view subject,
                                        std::string_view condition,
                                        std::string_view statistic) const {
  for (const auto& r : rows) {
    if (r.section == section && r.subject == subject && r.condition == condition &&
        r.statistic == statistic) {
      return r.value;
    }
  }
  return std::nullopt;
}

StudyReport build_study_report(const std::vector<RatingRecord>& ratings,
                               const std::vector<DistanceRecord>& distances) {
  if (ratings.empty()) fail(ErrorCode::kEmptyFile, "no ratings");
  const ItemIndex index(ratings);
  StudyReport report;
  Emitter emit(report);

  for (Aspect aspect : kAllAspects) {
    bool present = false;
    for (const auto& r : ratings) present = present || r.aspect == aspect;
    if (!present) continue;
    const auto role = aggregate_likert(ratings, aspect, Condition::kRole, Level::kStory);
    const auto no_role = aggregate_likert(ratings, aspect, Condition::kNoRole, Level::kStory);
    const auto name = to_string(aspect);
    emit.summary("likert", name, Condition::kRole, role);
    emit.summary("likert", name, Condition::kNoRole, no_role);
    emit.paired("paired", name, role, no_role);
  }

  // metric -> item -> distance
  std::map<std::string, std::map<std::string, double>> by_metric;
  for (const auto& d : distances) {
    if (!index.where.count(d.item_id)) {
      fail(ErrorCode::kMissingRatings, "distance for unrated item " + d.item_id);
    }
    by_metric[d.metric][d.item_id] = d.distance;
  }

  for (const auto& [metric, items] : by_metric) {
    std::map<std::string, std::vector<double>> per_story[2];
    for (const auto& [item, value] : items) {
      const auto& place = index.where.at(item);
      per_story[place.second == Condition::kRole ? 0 : 1][place.first].push_back(value);
    }
    const auto role = story_level(per_story[0]);
    const auto no_role = story_level(per_story[1]);
    emit.summary("distance", metric, Condition::kRole, role);
    emit.summary("distance", metric, Condition::kNoRole, no_role);
    emit.paired("distance_paired", metric, role, no_role);
  }

  for (const auto& [metric, items] : by_metric) {
    std::vector<double> x, y;
    for (const auto& [item, value] : items) {
      x.push_back(value);
      y.push_back(index.item_mean(item, Aspect::kRelevance));
    }
    const double rho = or_nan([&] { return pearson(x, y); });
    const double tau = or_nan([&] { return kendall_tau(x, y); });
    emit.count("correlation", metric, "RELEVANCE", "n", x.size());
    emit.value("correlation", metric, "RELEVANCE", "pearson_rho", rho);
    emit.value("correlation", metric, "RELEVANCE", "kendall_tau", tau);
    if (std::isnan(rho) || std::isnan(tau)) {
      emit.value("correlation", metric, "RELEVANCE", "negative", kNaN);
    } else {
      emit.count("correlation", metric, "RELEVANCE", "negative", rho < 0 && tau < 0 ? 1 : 0);
    }
  }
  return report;
}

void write_report_csv(const StudyReport& report, std::ostream& out) {
  out << "section,subject,condition,statistic,value\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.section) << ',' << csv_field(r.subject) << ',' << csv_field(r.condition)
        << ',' << csv_field(r.statistic) << ',' << format_value(r, true) << '\n';
  }
}

void write_report_text(const StudyReport& report, std::ostream& out) {
  // Pivot each section into one line per (subject, condition).
  std::vector<std::string> sections;
  for (const auto& r : report.rows) {
    if (std::find(sections.begin(), sections.end(), r.section) == sections.end()) {
      sections.push_back(r.section);
    }
  }
  bool first = true;
  for (const auto& section : sections) {
    std::vector<std::string> columns{"subject", "condition"};
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> cells;
    for (const auto& r : report.rows) {
      if (r.section != section) continue;
      if (std::find(columns.begin(), columns.end(), r.statistic) == columns.end()) {
        columns.push_back(r.statistic);
      }
      const auto key = std::make_pair(r.subject, r.condition);
      if (!cells.count(key)) keys.push_back(key);
      auto& row = cells[key];
      row["subject"] = r.subject;
      row["condition"] = r.condition;
      row[r.statistic] = format_value(r, false);
      if (r.statistic == "p_two_tailed" && !std::isnan(r.value)) {
        row[r.statistic] += r.value < 0.01 ? " **" : r.value < 0.05 ? " *" : "";
      }
    }
    std::vector<std::size_t> width;
    for (const auto& c : columns) {
      std::size_t w = c.size();
      for (const auto& k : keys) w = std::max(w, cells[k][c].size());
      width.push_back(w);
    }
    if (!first) out << '\n';
    first = false;
    out << section_title(section) << '\n';
    auto line = [&](auto&& cell) {
      std::string s;
      for (std::size_t i = 0; i < columns.size(); ++i) {
        std::string v = cell(columns[i]);
        if (i + 1 < columns.size()) v.resize(width[i], ' ');
        s += v;
        if (i + 1 < columns.size()) s += "  ";
      }
      out << s << '\n';
    };
    line([](const std::string& c) { return c; });
    line([&](const std::string& c) { return std::string(width[&c - &columns[0]], '-'); });
    for (const auto& k : keys) line([&](const std::string& c) { return cells[k][c]; });
  }
  out << "\n* p < 0.05, ** p < 0.01 (two-tailed)\n";
}

StudyReport run_report(const std::filesystem::path& ratings_path,
                       const std::filesystem::path& distances_path,
                       const std::filesystem::path& out_dir) {
  std::ifstream rin(ratings_path);
  if (!rin) fail(ErrorCode::kParseError, "cannot open " + ratings_path.string());
  std::ifstream din(distances_path);
  if (!din) fail(ErrorCode::kParseError, "cannot open " + distances_path.string());
  const auto report = build_study_report(read_ratings(rin), read_distances(din));
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / "report.csv");
  write_report_csv(report, csv);
  std::ofstream txt(out_dir / "report.txt");
  write_report_text(report, txt);
  if (!csv || !txt) fail(ErrorCode::kStorageFull, "cannot write report into " + out_dir.string());
  return report;
}

}  // namespace hg::stats
