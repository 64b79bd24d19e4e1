#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trevl/query_set.hpp"
#include "trevl/ranking.hpp"

// Synthetic test collections sampled from Dirichlet-drawn language models, and
// a Dirichlet-smoothed query-likelihood retriever over them.
namespace trevl::synth {

using TokenId = std::uint32_t;

struct SynthConfig {
  std::size_t vocab_size = 1000;
  std::size_t collection_size = 100;
  double mean_doc_length = 200.0;
  double mean_query_length = 3.0;
  std::size_t relevant_per_query = 5;
  std::size_t query_count = 2000;
  double exponential_rate = 1.0;
  /// P(n = 1), P(n = 2) for the n-gram size drawn at each emission.
  std::vector<double> ngram_size_distribution = {0.9, 0.1};
  std::uint64_t seed = 42;
  /// Upper bound on the dense |V|^2 bigram table (4 bytes per entry).
  std::size_t bigram_memory_budget = std::size_t{512} << 20;

  /// |V| = 10000 and |Q| = 100000; everything else as the defaults.
  static SynthConfig large_scale();

  /// Throws ConfigError.
  void validate() const;
};

/// Reads `key = value` lines; '#' starts a comment. Keys are the field names
/// above, with ngram_size_distribution given as "0.9,0.1". Throws ConfigError.
SynthConfig parse_config(std::istream& in);
SynthConfig load_config(const std::filesystem::path& path);
void write_config(const SynthConfig& config, std::ostream& out);

/// Rate of a Poisson whose zero-truncated mean equals `mean` (>= 1).
double zero_truncated_poisson_rate(double mean);

/// Draws from Poisson(rate) conditioned on >= 1. A rate of 0 yields 1.
std::size_t sample_positive_poisson(double rate, std::mt19937_64& rng);

/// Exponential(lambda) concentration parameters: one per term, one per
/// ordered term pair. Bigram values are stored as per-row running sums so a
/// pair can be drawn by choosing a row and bisecting inside it.
class PseudoCounts {
 public:
  /// Throws ConfigError if the bigram table would exceed the memory budget.
  /// The bigram table is skipped when P(n = 2) is zero.
  static PseudoCounts sample(const SynthConfig& config, std::mt19937_64& rng);

  std::size_t vocab_size() const { return unigram_.size(); }
  bool has_bigrams() const { return !bigram_row_mass_.empty(); }
  std::span<const double> unigram() const { return unigram_; }
  double unigram_mass() const { return unigram_mass_; }
  double bigram(TokenId first, TokenId second) const;
  std::span<const double> bigram_row_mass() const { return bigram_row_mass_; }
  double bigram_mass() const { return bigram_mass_; }

  TokenId draw_unigram(std::mt19937_64& rng) const;
  std::pair<TokenId, TokenId> draw_bigram(std::mt19937_64& rng) const;

 private:
  std::vector<double> unigram_;
  double unigram_mass_ = 0.0;
  mutable std::discrete_distribution<TokenId> unigram_draw_;
  std::vector<float> bigram_cumulative_;  // row-major, running sum per row
  std::vector<double> bigram_row_mass_;
  double bigram_mass_ = 0.0;
  mutable std::discrete_distribution<TokenId> row_draw_;
};

struct SyntheticCollection {
  std::size_t vocab_size = 0;
  std::vector<std::vector<TokenId>> documents;
  std::vector<std::size_t> target_lengths;
  std::vector<std::uint64_t> unigram_counts;  // over every emitted token
  std::size_t unigram_draws = 0;
  std::size_t bigram_draws = 0;
};

/// Per document: a target length from a positive Poisson with mean
/// mean_doc_length, then unigram and bigram language models drawn from
/// Dirichlet(pseudo counts). The Dirichlet draws are integrated out with a
/// Polya urn per document. Emission repeatedly picks n in {1, 2} and an
/// n-gram from the matching model, truncating at the target length.
/// Deterministic in config.seed.
SyntheticCollection sample_collection(const SynthConfig& config);

/// "d" followed by the index zero-padded to the width of the largest index,
/// so byte-wise order equals numeric order.
std::string document_id(std::size_t index, std::size_t collection_size);
std::string query_id(std::size_t index, std::size_t query_count);

struct QueryCollection {
  std::vector<std::vector<TokenId>> queries;
  std::vector<std::vector<std::size_t>> relevant;  // sorted document indices
  std::vector<std::string> ids;
  QrelSet qrel;  // relevance 1 for each (q, d in R_q)
};

/// For each query: R_q is `relevant_per_query` documents chosen uniformly;
/// the length is a positive Poisson with mean mean_query_length; terms are
/// drawn with replacement in proportion to P(w|R_q) * (1 - P(w|D)).
/// Throws InputError if some query keeps drawing an R_q with no positive
/// weight (e.g. a collection made of a single term).
QueryCollection sample_queries(const SyntheticCollection& collection,
                               const SynthConfig& config);

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;
};

/// Term-frequency index with the collection language model P(w|D).
class Index {
 public:
  /// Throws InputError on a collection with no tokens.
  explicit Index(const SyntheticCollection& collection);

  std::size_t document_count() const { return doc_lengths_.size(); }
  std::size_t vocab_size() const { return collection_lm_.size(); }
  std::size_t doc_length(std::size_t doc) const { return doc_lengths_[doc]; }
  const std::string& doc_id(std::size_t doc) const { return doc_ids_[doc]; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  /// 0 for terms outside the vocabulary.
  double collection_probability(TokenId term) const;
  std::uint32_t tf(TokenId term, std::size_t doc) const;
  std::span<const Posting> postings(TokenId term) const;
  /// Sorted (term, tf) pairs of one document.
  std::span<const std::pair<TokenId, std::uint32_t>> term_frequencies(std::size_t doc) const {
    return doc_terms_[doc];
  }

 private:
  std::vector<std::size_t> doc_lengths_;
  std::vector<std::string> doc_ids_;
  std::vector<std::vector<std::pair<TokenId, std::uint32_t>>> doc_terms_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> collection_lm_;
  std::uint64_t total_tokens_ = 0;
};

Index build_index(const SyntheticCollection& collection);

/// Probability mass substituted for P(w|D) when a term never occurs.
inline constexpr double kSmoothingFloor = 1e-10;

/// score(d) = sum over query occurrences w of
///            log((tf(w,d) + mu * P(w|D)) / (|d| + mu)),
/// using kSmoothingFloor in place of mu * P(w|D) when P(w|D) = 0.
/// Returns the top_k documents ordered as rank_documents would.
/// Throws std::invalid_argument unless mu > 0 and top_k >= 1.
OrderedRanking retrieve(const Index& index, std::span<const TokenId> query, double mu,
                        std::size_t top_k);

// Line-oriented persistence: one document or query per line, token ids
// separated by spaces. Qrels go through trec_io's qrel format.
void write_token_lines(const std::vector<std::vector<TokenId>>& lines, std::ostream& out);
/// Throws ParseError on a non-numeric token or an id >= vocab_size.
std::vector<std::vector<TokenId>> read_token_lines(std::istream& in, std::size_t vocab_size);

}  // namespace trevl::synth
