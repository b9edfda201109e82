#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hg::stats {

enum class Condition { kRole, kNoRole };
enum class Aspect { kRelevance, kLegitimate, kCreative, kInteresting, kWillingToRead, kSurprising };
enum class Level { kItem, kStory };

std::string_view to_string(Condition c);
std::string_view to_string(Aspect a);
std::optional<Condition> parse_condition(std::string_view s);
std::optional<Aspect> parse_aspect(std::string_view s);

inline constexpr Aspect kAllAspects[] = {Aspect::kRelevance,   Aspect::kLegitimate,
                                         Aspect::kCreative,    Aspect::kInteresting,
                                         Aspect::kWillingToRead, Aspect::kSurprising};

struct RatingRecord {
  std::string item_id;
  std::string story_id;
  Condition condition = Condition::kRole;
  Aspect aspect = Aspect::kRelevance;
  std::string rater_id;
  int score = 0;
};

struct DistanceRecord {
  std::string item_id;
  std::string metric;
  double distance = 0;
};

// Header `item_id,story_id,condition,aspect,rater_id,score`. Throws
// kParseError naming the line.
std::vector<RatingRecord> read_ratings(std::istream& in);
// Header `item_id,metric,distance`.
std::vector<DistanceRecord> read_distances(std::istream& in);

struct LikertMean {
  std::string id;  // item or story id
  double mean = 0;
};

// ITEM: mean over raters per item. STORY: mean of item means per story.
// Sorted by id. Throws kMissingRatings if an item of the condition has no
// rating for the aspect.
std::vector<LikertMean> aggregate_likert(const std::vector<RatingRecord>& records, Aspect aspect,
                                         Condition condition, Level level);

// One report cell. `value` is NaN when the statistic is undefined for the data.
struct ReportRow {
  std::string section;
  std::string subject;
  std::string condition;
  std::string statistic;
  double value = 0;
  bool integral = false;
};

struct StudyReport {
  std::vector<ReportRow> rows;

  std::optional<double> find(std::string_view section, std::string_view subject,
                             std::string_view condition, std::string_view statistic) const;
};

// Condition means with 95% CIs over story means, NO_ROLE - ROLE paired tests
// at story level, and Pearson/Kendall of each distance metric against
// item-level relevance. Throws kUnpairedStory, kMissingRatings.
StudyReport build_study_report(const std::vector<RatingRecord>& ratings,
                               const std::vector<DistanceRecord>& distances);

// `section,subject,condition,statistic,value`, values printed with %.17g.
void write_report_csv(const StudyReport& report, std::ostream& out);
void write_report_text(const StudyReport& report, std::ostream& out);

// Reads both files and writes report.txt and report.csv into `out_dir`.
StudyReport run_report(const std::filesystem::path& ratings, const std::filesystem::path& distances,
                       const std::filesystem::path& out_dir);

}  // namespace hg::stats
