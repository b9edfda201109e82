#include "hg/distance/distance.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hg/common/error.hpp"
#include "hg/common/text.hpp"
#include "hg/distance/kernels.hpp"

namespace hg::distance {

namespace {

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

std::string strip_punct(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_punct(s[b])) ++b;
  while (e > b && is_ascii_punct(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void line_error(ErrorCode code, std::size_t line, const std::string& what) {
  fail(code, "line " + std::to_string(line) + ": " + what);
}

bool parse_double(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kParseError, "cannot open " + path.string());
  return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// EmbeddingStore

bool EmbeddingStore::add(std::string_view token, std::span<const double> values) {
  if (values.size() != dimension_) {
    fail(ErrorCode::kDimensionMismatch, "vector for '" + std::string(token) + "' has " +
                                            std::to_string(values.size()) + " values, expected " +
                                            std::to_string(dimension_));
  }
  std::string key = case_folding_ ? text::to_lower_ascii(token) : std::string(token);
  if (index_.count(key)) return false;
  index_.emplace(std::move(key), data_.size() / std::max<std::size_t>(dimension_, 1));
  data_.insert(data_.end(), values.begin(), values.end());
  return true;
}

std::optional<std::span<const double>> EmbeddingStore::exact(const std::string& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(data_.data() + it->second * dimension_, dimension_);
}

std::optional<std::span<const double>> EmbeddingStore::find(std::string_view token) const {
  std::string key = case_folding_ ? text::to_lower_ascii(token) : std::string(token);
  if (auto hit = exact(key)) return hit;
  std::string stripped = strip_punct(key);
  if (stripped.empty() || stripped == key) return std::nullopt;
  return exact(stripped);
}

EmbeddingStore read_embeddings(std::istream& in, bool case_folding) {
  std::optional<EmbeddingStore> store;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = text::split_words(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) line_error(ErrorCode::kParseError, line_no, "token without values");
    values.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0;
      if (!parse_double(fields[i], v)) {
        line_error(ErrorCode::kParseError, line_no, "bad number '" + std::string(fields[i]) + "'");
      }
      values.push_back(v);
    }
    if (!store) store.emplace(values.size(), case_folding);
    if (values.size() != store->dimension()) {
      line_error(ErrorCode::kDimensionMismatch, line_no,
                 std::to_string(values.size()) + " values, expected " +
                     std::to_string(store->dimension()));
    }
    store->add(fields[0], values);
  }
  if (!store) fail(ErrorCode::kEmptyFile, "embedding file has no entries");
  return std::move(*store);
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, bool case_folding) {
  auto in = open_or_throw(path);
  return read_embeddings(in, case_folding);
}

SidecarVectors read_sidecar(std::istream& in) {
  SidecarVectors out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) line_error(ErrorCode::kParseError, line_no, "expected id<TAB>values");
    std::vector<double> values;
    for (std::string_view f : split_on(std::string_view(line).substr(tab + 1), ',')) {
      double v = 0;
      if (!parse_double(f, v)) line_error(ErrorCode::kParseError, line_no, "bad number '" + std::string(f) + "'");
      values.push_back(v);
    }
    if (out.vectors.empty()) out.dimension = values.size();
    if (values.size() != out.dimension) {
      line_error(ErrorCode::kDimensionMismatch, line_no,
                 std::to_string(values.size()) + " values, expected " + std::to_string(out.dimension));
    }
    out.vectors.emplace(line.substr(0, tab), std::move(values));
  }
  if (out.vectors.empty()) fail(ErrorCode::kEmptyFile, "sidecar file has no entries");
  return out;
}

SidecarVectors load_sidecar(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_sidecar(in);
}

// ---------------------------------------------------------------------------
// Vectors and distances

DocVector embed_sum(std::string_view text, const EmbeddingStore& store) {
  DocVector doc;
  doc.values.assign(store.dimension(), 0.0);
  for (std::string_view token : text::split_words(text)) {
    if (const auto v = store.find(token)) {
      kernels::accumulate(doc.values, *v);
      ++doc.token_hits;
    } else {
      ++doc.token_misses;
    }
  }
  if (doc.token_hits == 0) fail(ErrorCode::kNoKnownTokens, "no token of the text is in the vocabulary");
  return doc;
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    fail(ErrorCode::kDimensionMismatch, "vectors of dimension " + std::to_string(u.size()) +
                                            " and " + std::to_string(v.size()));
  }
  double terms[3];
  kernels::active().cosine_terms(u.data(), v.data(), u.size(), terms);
  if (terms[1] == 0.0 || terms[2] == 0.0) fail(ErrorCode::kZeroVector, "cosine of a zero vector");
  const double cos = terms[0] / (std::sqrt(terms[1]) * std::sqrt(terms[2]));
  return std::clamp(1.0 - cos, 0.0, 2.0);
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::string s = text::trim(text.substr(start, end - start));
    if (!s.empty()) out.push_back(std::move(s));
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || text::is_space(text[i + 1]))) {
      emit(i + 1);
    }
  }
  emit(text.size());
  return out;
}

SentenceVectorizer word_sum_vectorizer(const EmbeddingStore& store) {
  return [&store](std::string_view sentence) -> std::optional<std::vector<double>> {
    try {
      return embed_sum(sentence, store).values;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNoKnownTokens) return std::nullopt;
      throw;
    }
  };
}

double aggregate(std::vector<double> values, Aggregation agg) {
  if (values.empty()) fail(ErrorCode::kInvalidArgument, "nothing to aggregate");
  switch (agg) {
    case Aggregation::kMean:
      return std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    case Aggregation::kMin:
      return *std::min_element(values.begin(), values.end());
    case Aggregation::kMedian: {
      std::sort(values.begin(), values.end());
      const std::size_t n = values.size();
      return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    }
  }
  return 0.0;
}

double sentence_pair_distance(std::span<const std::string> sentences_a,
                              std::span<const std::string> sentences_b,
                              const SentenceVectorizer& vectorizer, Aggregation agg) {
  auto vectorize = [&](std::span<const std::string> sentences) {
    std::vector<std::vector<double>> out;
    for (const auto& s : sentences) {
      auto v = vectorizer(s);
      if (!v) continue;
      if (kernels::squared_norm(*v) == 0.0) continue;
      out.push_back(std::move(*v));
    }
    if (out.empty()) {
      fail(ErrorCode::kNoVectorizableSentence, "document has no vectorizable sentence");
    }
    return out;
  };
  const auto va = vectorize(sentences_a);
  const auto vb = vectorize(sentences_b);
  std::vector<double> pairs;
  pairs.reserve(va.size() * vb.size());
  for (const auto& a : va) {
    for (const auto& b : vb) pairs.push_back(cosine_distance(a, b));
  }
  return aggregate(std::move(pairs), agg);
}

double sentence_pair_distance(std::string_view doc_a, std::string_view doc_b,
                              const SentenceVectorizer& vectorizer, Aggregation agg) {
  const auto a = split_sentences(doc_a);
  const auto b = split_sentences(doc_b);
  return sentence_pair_distance(std::span<const std::string>(a), std::span<const std::string>(b),
                                vectorizer, agg);
}

// ---------------------------------------------------------------------------
// Ranking

std::vector<RankedIdea> rank_ideas(std::span<const RankItem> ideas, const IdeaDistance& metric) {
  std::vector<RankedIdea> out;
  out.reserve(ideas.size());
  for (const auto& idea : ideas) {
    RankedIdea r{idea.id, std::nullopt, idea.submitted_at};
    try {
      r.distance = metric(idea);
    } catch (const Error&) {
      r.distance.reset();
    }
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedIdea& a, const RankedIdea& b) {
    if (a.distance.has_value() != b.distance.has_value()) return a.distance.has_value();
    if (a.distance && *a.distance != *b.distance) return *a.distance > *b.distance;
    if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
    return a.id < b.id;
  });
  return out;
}

std::vector<std::string> near_duplicate_flags(std::span<const RankItem> ideas,
                                              const PairDistance& metric, double threshold) {
  std::vector<const RankItem*> order;
  for (const auto& idea : ideas) order.push_back(&idea);
  std::stable_sort(order.begin(), order.end(), [](const RankItem* a, const RankItem* b) {
    if (a->submitted_at != b->submitted_at) return a->submitted_at < b->submitted_at;
    return a->id < b->id;
  });
  std::vector<std::string> flagged;
  for (std::size_t j = 1; j < order.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      double d = 0;
      try {
        d = metric(*order[i], *order[j]);
      } catch (const Error&) {
        continue;
      }
      if (d < threshold) {
        flagged.push_back(order[j]->id);
        break;
      }
    }
  }
  return flagged;
}

}  // namespace hg::distance
