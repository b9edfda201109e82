#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hg/common/clock.hpp"

namespace hg::distance {

// Word-vector table, one contiguous row per token. Immutable after load.
class EmbeddingStore {
 public:
  EmbeddingStore(std::size_t dimension, bool case_folding)
      : dimension_(dimension), case_folding_(case_folding) {}

  // Adds a token; returns false if it (after folding) is already present.
  bool add(std::string_view token, std::span<const double> values);

  // Exact lookup after folding; falls back to the token with surrounding ASCII
  // punctuation removed ("dog." -> "dog").
  std::optional<std::span<const double>> find(std::string_view token) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return index_.size(); }
  bool case_folding() const { return case_folding_; }

 private:
  std::optional<std::span<const double>> exact(const std::string& key) const;

  std::size_t dimension_;
  bool case_folding_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// "token v1 v2 ... vD" per line. Throws kParseError / kDimensionMismatch
// (message carries the line number) or kEmptyFile.
EmbeddingStore load_embeddings(const std::filesystem::path& path, bool case_folding);
EmbeddingStore read_embeddings(std::istream& in, bool case_folding);

// Precomputed document vectors from an external encoder, keyed by text id.
struct SidecarVectors {
  std::size_t dimension = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

// "text-id<TAB>v1,v2,...,vD" per line.
SidecarVectors load_sidecar(const std::filesystem::path& path);
SidecarVectors read_sidecar(std::istream& in);

enum class VectorSource { kWordSum, kSidecar };

struct DocVector {
  std::vector<double> values;
  VectorSource source = VectorSource::kWordSum;
  std::size_t token_hits = 0;
  std::size_t token_misses = 0;
};

// Sum of the vectors of in-vocabulary whitespace tokens. Throws
// kNoKnownTokens when nothing hits.
DocVector embed_sum(std::string_view text, const EmbeddingStore& store);

// 1 - cos(u, v), clamped to [0, 2]. Throws kDimensionMismatch, kZeroVector.
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Splits after '.', '!' or '?' when followed by whitespace or end of text.
// Abbreviations such as "Mr." therefore end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

enum class Aggregation { kMean, kMin, kMedian };

// Returns nullopt when a sentence cannot be vectorized.
using SentenceVectorizer =
    std::function<std::optional<std::vector<double>>(std::string_view sentence)>;

SentenceVectorizer word_sum_vectorizer(const EmbeddingStore& store);

// Aggregated cosine distance over every cross-document sentence pair.
// Unvectorizable sentences are dropped; throws kNoVectorizableSentence if a
// side has none left.
double sentence_pair_distance(std::span<const std::string> sentences_a,
                              std::span<const std::string> sentences_b,
                              const SentenceVectorizer& vectorizer, Aggregation agg);
double sentence_pair_distance(std::string_view doc_a, std::string_view doc_b,
                              const SentenceVectorizer& vectorizer, Aggregation agg);

double aggregate(std::vector<double> values, Aggregation agg);

// --- ranking -------------------------------------------------------------

struct RankItem {
  std::string id;
  std::string text;
  Millis submitted_at = 0;
};

struct RankedIdea {
  std::string id;
  std::optional<double> distance;  // empty: UNSCORED
  Millis submitted_at = 0;
};

// Distance of one idea from the prompt; throws hg::Error when unscorable.
using IdeaDistance = std::function<double(const RankItem& idea)>;

// Farthest first; ties go to the earlier submission; unscorable ideas last.
std::vector<RankedIdea> rank_ideas(std::span<const RankItem> ideas, const IdeaDistance& metric);

// Distance between two ideas; throws hg::Error when unscorable.
using PairDistance = std::function<double(const RankItem& a, const RankItem& b)>;

// Ids of ideas closer than `threshold` to some earlier submission.
std::vector<std::string> near_duplicate_flags(std::span<const RankItem> ideas,
                                              const PairDistance& metric, double threshold);

}  // namespace hg::distance
