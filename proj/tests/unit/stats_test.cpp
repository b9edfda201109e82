#include "hg/stats/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "hg/common/error.hpp"
#include "hg/stats/report.hpp"

using namespace hg;
using namespace hg::stats;
using Vec = std::vector<double>;

namespace {

const std::filesystem::path kData = HG_TEST_DATA_DIR;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hg::Error");
  return ErrorCode::kInvalidArgument;
}

nlohmann::json load_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  return nlohmann::json::parse(in);
}

struct CsvRow {
  std::string key;
  std::string value;
};

std::vector<CsvRow> read_report_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    rows.push_back({line.substr(0, cut), line.substr(cut + 1)});
  }
  return rows;
}

std::vector<RatingRecord> ratings_from(const std::string& csv) {
  std::istringstream in(csv);
  return read_ratings(in);
}

}  // namespace

TEST_CASE("pearson examples") {
  CHECK(pearson(Vec{1, 2, 3}, Vec{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(Vec{1, 2, 3}, Vec{6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(pearson(Vec{1, 2, 3}, Vec{1, 3, 2}) - 0.5) < 1e-15);
  CHECK(code_of([] { pearson(Vec{1, 2, 3}, Vec{1, 2}); }) == ErrorCode::kLengthMismatch);
  CHECK(code_of([] { pearson(Vec{1, 1, 1}, Vec{1, 2, 3}); }) == ErrorCode::kZeroVariance);
}

TEST_CASE("kendall examples") {
  CHECK(kendall_tau(Vec{1, 2, 3}, Vec{1, 2, 3}) == 1.0);
  CHECK(kendall_tau(Vec{1, 2, 3}, Vec{3, 2, 1}) == -1.0);
  CHECK(std::abs(kendall_tau(Vec{1, 2, 3, 4}, Vec{1, 3, 2, 4}) - 4.0 / 6.0) < 1e-15);
  CHECK(code_of([] { kendall_tau(Vec{2, 2, 2}, Vec{1, 2, 3}); }) == ErrorCode::kAllTied);
  CHECK(code_of([] { kendall_tau(Vec{1, 2, 3}, Vec{1, 2}); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("paired t-test, effect size and interval examples") {
  const auto oracle = load_json(kData / "stats_oracle.json")["points"];
  const auto t = paired_t_test(Vec{3, 4, 6}, Vec{1, 2, 3});
  CHECK(std::abs(t.t - 7.0) < 1e-12);
  CHECK(t.df == 2);
  CHECK(std::abs(t.p_two_tailed - oracle["t7_df2_p"].get<double>()) < 1e-12);
  CHECK(std::abs(t.p_two_tailed - 0.0198) < 5e-5);

  CHECK(code_of([] { paired_t_test(Vec{1, 2, 3}, Vec{1, 2, 3}); }) ==
        ErrorCode::kDegenerateDifferences);
  CHECK(code_of([] { paired_t_test(Vec{1, 2}, Vec{0, 1}); }) == ErrorCode::kDegenerateDifferences);

  const double d = cohens_d_paired(Vec{3, 4, 6}, Vec{1, 2, 3});
  CHECK(std::abs(d - oracle["d_346_123"].get<double>()) < 1e-12);
  CHECK(std::abs(d - 4.0415) < 1e-4);
  CHECK(cohens_d_paired(Vec{1, 2, 3}, Vec{3, 4, 6}) == -d);
  CHECK(code_of([] { cohens_d_paired(Vec{5, 6}, Vec{4, 5}); }) == ErrorCode::kDegenerateDifferences);

  const auto ci = ci95_mean(Vec{1, 2, 3});
  CHECK(std::abs(ci.low - oracle["ci_123"][0].get<double>()) < 1e-12);
  CHECK(std::abs(ci.high - oracle["ci_123"][1].get<double>()) < 1e-12);
  CHECK(std::abs(student_t_quantile(0.975, 2) - oracle["t_quantile_975_df2"].get<double>()) < 1e-12);
  CHECK(code_of([] { ci95_mean(Vec{4, 4, 4}); }) == ErrorCode::kZeroVariance);
  CHECK(code_of([] { ci95_mean(Vec{4}); }) == ErrorCode::kTooFew);
}

TEST_CASE("incomplete beta edge values") {
  CHECK(incomplete_beta(2, 3, 0) == 0);
  CHECK(incomplete_beta(2, 3, 1) == 1);
  // I_x(1, 1) = x; I_x(a, 1) = x^a.
  CHECK(std::abs(incomplete_beta(1, 1, 0.3) - 0.3) < 1e-15);
  CHECK(std::abs(incomplete_beta(2.5, 1, 0.7) - std::pow(0.7, 2.5)) < 1e-14);
  CHECK(std::abs(incomplete_beta(3, 4, 0.4) + incomplete_beta(4, 3, 0.6) - 1.0) < 1e-14);
  // df = 1 is Cauchy: P(|T| > 1) = 1/2.
  CHECK(std::abs(student_t_two_tailed(1.0, 1.0) - 0.5) < 1e-14);
  CHECK(student_t_two_tailed(0.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("random datasets against the integration oracle") {
  const auto data = load_json(kData / "stats_oracle.json")["datasets"];
  REQUIRE(data.size() == 500);
  for (const auto& ds : data) {
    const auto x = ds["x"].get<Vec>();
    const auto y = ds["y"].get<Vec>();
    CAPTURE(ds.dump());
    CHECK(std::abs(pearson(x, y) - ds["pearson"].get<double>()) < 1e-8);
    CHECK(std::abs(kendall_tau(x, y) - ds["kendall"].get<double>()) < 1e-8);
    const auto t = paired_t_test(x, y);
    CHECK(std::abs(t.t - ds["t"].get<double>()) < 1e-8);
    CHECK(t.df == ds["df"].get<double>());
    CHECK(std::abs(t.p_two_tailed - ds["p"].get<double>()) < 1e-8);
    CHECK(std::abs(cohens_d_paired(x, y) - ds["d"].get<double>()) < 1e-8);
    const auto ci = ci95_mean(x);
    CHECK(std::abs(ci.low - ds["ci_low"].get<double>()) < 1e-8);
    CHECK(std::abs(ci.high - ds["ci_high"].get<double>()) < 1e-8);
  }
}

TEST_CASE("invariance properties") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 3 + rng() % 12;
    Vec x(n), y(n);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const double r = pearson(x, y);
    const double scale = 0.1 + std::abs(u(rng)), shift = u(rng);
    Vec ax = x, neg = x, cubed = x;
    for (std::size_t i = 0; i < n; ++i) {
      ax[i] = scale * x[i] + shift;
      neg[i] = -x[i];
      cubed[i] = x[i] * x[i] * x[i] + 2.0 * x[i];  // strictly increasing
    }
    CHECK(std::abs(pearson(ax, y) - r) < 1e-12);
    CHECK(std::abs(pearson(neg, y) + r) < 1e-12);
    const double tau = kendall_tau(x, y);
    CHECK(kendall_tau(cubed, y) == tau);
    CHECK(std::abs(tau) <= 1.0);
    const auto ab = paired_t_test(x, y), ba = paired_t_test(y, x);
    CHECK(ab.t == -ba.t);
    CHECK(ab.p_two_tailed == ba.p_two_tailed);
    CHECK(cohens_d_paired(x, y) == -cohens_d_paired(y, x));
    const auto ci = ci95_mean(x);
    CHECK(ci.low <= mean(x));
    CHECK(mean(x) <= ci.high);
  }
}

TEST_CASE("aggregate_likert") {
  const auto records = ratings_from(
      "item_id,story_id,condition,aspect,rater_id,score\n"
      "i1,s1,ROLE,RELEVANCE,a,4\n"
      "i1,s1,ROLE,RELEVANCE,b,4\n"
      "i1,s1,ROLE,RELEVANCE,c,5\n"
      "i1,s1,ROLE,RELEVANCE,d,3\n"
      "i1,s1,ROLE,RELEVANCE,e,4\n"
      "i2,s1,ROLE,RELEVANCE,a,3\n"
      "i2,s1,ROLE,CREATIVE,a,3\n");
  const auto items = aggregate_likert(records, Aspect::kRelevance, Condition::kRole, Level::kItem);
  REQUIRE(items.size() == 2);
  CHECK(items[0].id == "i1");
  CHECK(items[0].mean == 4.0);
  const auto stories = aggregate_likert(records, Aspect::kRelevance, Condition::kRole, Level::kStory);
  REQUIRE(stories.size() == 1);
  CHECK(stories[0].mean == 3.5);
  CHECK(code_of([&] {
          aggregate_likert(records, Aspect::kCreative, Condition::kRole, Level::kItem);
        }) == ErrorCode::kMissingRatings);
  CHECK(aggregate_likert(records, Aspect::kRelevance, Condition::kNoRole, Level::kStory).empty());
}

TEST_CASE("csv readers reject malformed input") {
  CHECK(code_of([] { ratings_from("item,story\n"); }) == ErrorCode::kParseError);
  CHECK(code_of([] {
          ratings_from("item_id,story_id,condition,aspect,rater_id,score\ni,s,ROLE,RELEVANCE,r,6\n");
        }) == ErrorCode::kParseError);
  CHECK(code_of([] {
          ratings_from("item_id,story_id,condition,aspect,rater_id,score\ni,s,BOTH,RELEVANCE,r,3\n");
        }) == ErrorCode::kParseError);
  CHECK(code_of([] {
          ratings_from("item_id,story_id,condition,aspect,rater_id,score\ni,s,ROLE,FUNNY,r,3\n");
        }) == ErrorCode::kParseError);
  std::istringstream dup("item_id,metric,distance\ni,glove,0.1\ni,glove,0.2\n");
  CHECK(code_of([&] { read_distances(dup); }) == ErrorCode::kParseError);
  std::istringstream quoted("item_id,metric,distance\n\"i,1\",glove,0.25\n");
  const auto d = read_distances(quoted);
  CHECK(d.at(0).item_id == "i,1");
  CHECK(d.at(0).distance == 0.25);
}

TEST_CASE("study report matches the golden fixture") {
  const auto dir = kData / "report_fixture";
  const auto out = std::filesystem::temp_directory_path() / "hg_stats_report_test";
  std::filesystem::remove_all(out);
  run_report(dir / "ratings.csv", dir / "distances.csv", out);

  std::ifstream got_in(out / "report.csv"), want_in(dir / "golden_report.csv");
  const auto got = read_report_csv(got_in);
  const auto want = read_report_csv(want_in);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(want[i].key);
    REQUIRE(got[i].key == want[i].key);
    if (i == 0) continue;
    const double g = std::stod(got[i].value), w = std::stod(want[i].value);
    CHECK(std::abs(g - w) <= 1e-9);
  }

  std::ifstream txt(out / "report.txt");
  std::stringstream text;
  text << txt.rdbuf();
  CHECK(text.str().find("paired t-test") != std::string::npos);
  CHECK(text.str().find("WILLING_TO_READ") != std::string::npos);
  std::filesystem::remove_all(out);
}

TEST_CASE("report errors and perfect anticorrelation") {
  std::string csv = "item_id,story_id,condition,aspect,rater_id,score\n";
  for (int s = 0; s < 4; ++s) {
    csv += "a" + std::to_string(s) + ",s" + std::to_string(s) + ",ROLE,RELEVANCE,r," +
           std::to_string(1 + s) + "\n";
  }
  CHECK(code_of([&] { build_study_report(ratings_from(csv), {}); }) == ErrorCode::kUnpairedStory);

  for (int s = 0; s < 4; ++s) {
    csv += "b" + std::to_string(s) + ",s" + std::to_string(s) + ",NO_ROLE,RELEVANCE,r," +
           std::to_string(5 - s % 3) + "\n";
  }
  const auto ratings = ratings_from(csv);
  std::vector<DistanceRecord> dist;
  for (const auto& r : ratings) dist.push_back({r.item_id, "anti", -static_cast<double>(r.score)});
  const auto report = build_study_report(ratings, dist);
  CHECK(report.find("correlation", "anti", "RELEVANCE", "pearson_rho").value() ==
        doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(report.find("correlation", "anti", "RELEVANCE", "negative").value() == 1.0);

  dist.push_back({"ghost", "anti", 0.5});
  CHECK(code_of([&] { build_study_report(ratings, dist); }) == ErrorCode::kMissingRatings);
}
