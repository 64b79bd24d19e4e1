#include "trevl/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "trevl/errors.hpp"

namespace trevl::synth {
namespace {

// Independent streams for the collection and the queries, so changing
// query_count never perturbs the documents.
constexpr std::uint64_t kCollectionStream = 0;
constexpr std::uint64_t kQueryStream = 1;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double positive_exponential(std::exponential_distribution<double>& dist,
                            std::mt19937_64& rng) {
  double x = 0.0;
  while (x <= 0.0) x = dist(rng);
  return x;
}

/// Dirichlet-categorical draws with the Dirichlet integrated out: a new
/// draw copies a previous one with probability n / (A + n), otherwise it
/// comes from the base measure.
template <typename Item>
class PolyaUrn {
 public:
  explicit PolyaUrn(double base_mass) : base_mass_(base_mass) {}

  template <typename BaseDraw>
  Item draw(std::mt19937_64& rng, BaseDraw&& base) {
    std::uniform_real_distribution<double> u(0.0, base_mass_ + static_cast<double>(drawn_.size()));
    const double x = u(rng);
    Item item;
    if (x < base_mass_ || drawn_.empty()) {
      item = base(rng);
    } else {
      const auto i = std::min(static_cast<std::size_t>(x - base_mass_), drawn_.size() - 1);
      item = drawn_[i];
    }
    drawn_.push_back(item);
    return item;
  }

 private:
  double base_mass_;
  std::vector<Item> drawn_;
};

std::string padded_id(char prefix, std::size_t index, std::size_t count) {
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::string digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename Number>
Number parse_value(std::string_view key, std::string_view text) {
  Number value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("bad value '" + std::string(text) + "' for '" + std::string(key) + "'");
  }
  return value;
}

}  // namespace

SynthConfig SynthConfig::large_scale() {
  SynthConfig config;
  config.vocab_size = 10000;
  config.query_count = 100000;
  return config;
}

void SynthConfig::validate() const {
  if (vocab_size == 0 || collection_size == 0 || relevant_per_query == 0 || query_count == 0) {
    throw ConfigError("sizes must be at least 1");
  }
  if (vocab_size > std::numeric_limits<TokenId>::max()) {
    throw ConfigError("vocab_size does not fit a token id");
  }
  if (relevant_per_query > collection_size) {
    throw ConfigError("relevant_per_query exceeds collection_size");
  }
  if (!(mean_doc_length >= 1.0) || !(mean_query_length >= 1.0)) {
    throw ConfigError("mean lengths must be at least 1 (lengths are never 0)");
  }
  if (!(exponential_rate > 0.0) || !std::isfinite(exponential_rate)) {
    throw ConfigError("exponential_rate must be positive");
  }
  if (ngram_size_distribution.empty() || ngram_size_distribution.size() > 2) {
    throw ConfigError("ngram_size_distribution must list P(n=1) and optionally P(n=2)");
  }
  double total = 0.0;
  for (double p : ngram_size_distribution) {
    if (!(p >= 0.0)) throw ConfigError("ngram probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("ngram probabilities must sum to 1");
}

SynthConfig parse_config(std::istream& in) {
  SynthConfig config;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "vocab_size") {
      config.vocab_size = parse_value<std::size_t>(key, value);
    } else if (key == "collection_size") {
      config.collection_size = parse_value<std::size_t>(key, value);
    } else if (key == "mean_doc_length") {
      config.mean_doc_length = parse_value<double>(key, value);
    } else if (key == "mean_query_length") {
      config.mean_query_length = parse_value<double>(key, value);
    } else if (key == "relevant_per_query") {
      config.relevant_per_query = parse_value<std::size_t>(key, value);
    } else if (key == "query_count") {
      config.query_count = parse_value<std::size_t>(key, value);
    } else if (key == "exponential_rate") {
      config.exponential_rate = parse_value<double>(key, value);
    } else if (key == "ngram_size_distribution") {
      config.ngram_size_distribution.clear();
      std::string_view rest = value;
      while (true) {
        const auto comma = rest.find(',');
        config.ngram_size_distribution.push_back(
            parse_value<double>(key, trim(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    } else if (key == "seed") {
      config.seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "bigram_memory_budget") {
      config.bigram_memory_budget = parse_value<std::size_t>(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  config.validate();
  return config;
}

SynthConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in);
}

void write_config(const SynthConfig& config, std::ostream& out) {
  out << "vocab_size = " << config.vocab_size << '\n'
      << "collection_size = " << config.collection_size << '\n'
      << "mean_doc_length = " << config.mean_doc_length << '\n'
      << "mean_query_length = " << config.mean_query_length << '\n'
      << "relevant_per_query = " << config.relevant_per_query << '\n'
      << "query_count = " << config.query_count << '\n'
      << "exponential_rate = " << config.exponential_rate << '\n'
      << "ngram_size_distribution = ";
  for (std::size_t i = 0; i < config.ngram_size_distribution.size(); ++i) {
    out << (i ? "," : "") << config.ngram_size_distribution[i];
  }
  out << '\n'
      << "seed = " << config.seed << '\n'
      << "bigram_memory_budget = " << config.bigram_memory_budget << '\n';
}

double zero_truncated_poisson_rate(double mean) {
  if (!(mean >= 1.0)) throw ConfigError("a positive length distribution needs mean >= 1");
  if (mean == 1.0) return 0.0;
  // The truncated mean rate / (1 - exp(-rate)) lies in [rate, rate + 1] and
  // increases with rate, so bisect on [mean - 1, mean].
  auto truncated_mean = [](double rate) { return rate / -std::expm1(-rate); };
  double lo = std::max(mean - 1.0, 0.0);
  double hi = mean;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mid > 0.0 && truncated_mean(mid) < mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::size_t sample_positive_poisson(double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return 1;
  std::poisson_distribution<std::size_t> poisson(rate);
  std::size_t n = 0;
  while (n == 0) n = poisson(rng);
  return n;
}

PseudoCounts PseudoCounts::sample(const SynthConfig& config, std::mt19937_64& rng) {
  config.validate();
  const std::size_t v = config.vocab_size;
  const bool needs_bigrams =
      config.ngram_size_distribution.size() > 1 && config.ngram_size_distribution[1] > 0.0;
  if (needs_bigrams && v > config.bigram_memory_budget / sizeof(float) / v) {
    throw ConfigError("bigram table of " + std::to_string(v) + "^2 entries exceeds the " +
                      std::to_string(config.bigram_memory_budget) +
                      "-byte budget; lower vocab_size or raise bigram_memory_budget");
  }

  PseudoCounts counts;
  std::exponential_distribution<double> exponential(config.exponential_rate);
  counts.unigram_.resize(v);
  for (auto& c : counts.unigram_) c = positive_exponential(exponential, rng);
  counts.unigram_mass_ = std::accumulate(counts.unigram_.begin(), counts.unigram_.end(), 0.0);
  counts.unigram_draw_ =
      std::discrete_distribution<TokenId>(counts.unigram_.begin(), counts.unigram_.end());

  if (needs_bigrams) {
    counts.bigram_cumulative_.resize(v * v);
    counts.bigram_row_mass_.resize(v);
    for (std::size_t row = 0; row < v; ++row) {
      float* cells = counts.bigram_cumulative_.data() + row * v;
      double running = 0.0;
      for (std::size_t col = 0; col < v; ++col) {
        running += positive_exponential(exponential, rng);
        cells[col] = static_cast<float>(running);
      }
      counts.bigram_row_mass_[row] = running;
    }
    counts.bigram_mass_ =
        std::accumulate(counts.bigram_row_mass_.begin(), counts.bigram_row_mass_.end(), 0.0);
    counts.row_draw_ = std::discrete_distribution<TokenId>(counts.bigram_row_mass_.begin(),
                                                           counts.bigram_row_mass_.end());
  }
  return counts;
}

double PseudoCounts::bigram(TokenId first, TokenId second) const {
  const std::size_t v = vocab_size();
  const float* row = bigram_cumulative_.data() + std::size_t{first} * v;
  return second == 0 ? row[0] : static_cast<double>(row[second]) - row[second - 1];
}

TokenId PseudoCounts::draw_unigram(std::mt19937_64& rng) const { return unigram_draw_(rng); }

std::pair<TokenId, TokenId> PseudoCounts::draw_bigram(std::mt19937_64& rng) const {
  const std::size_t v = vocab_size();
  const TokenId first = row_draw_(rng);
  const float* row = bigram_cumulative_.data() + std::size_t{first} * v;
  std::uniform_real_distribution<float> u(0.0f, row[v - 1]);
  const float x = u(rng);
  const auto second = static_cast<TokenId>(std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(row, row + v, x) - row), v - 1));
  return {first, second};
}

SyntheticCollection sample_collection(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng = make_rng(config.seed, kCollectionStream);
  const PseudoCounts counts = PseudoCounts::sample(config, rng);

  SyntheticCollection collection;
  collection.vocab_size = config.vocab_size;
  collection.unigram_counts.assign(config.vocab_size, 0);
  collection.documents.reserve(config.collection_size);

  const double length_rate = zero_truncated_poisson_rate(config.mean_doc_length);
  std::discrete_distribution<int> ngram_size(config.ngram_size_distribution.begin(),
                                             config.ngram_size_distribution.end());

  for (std::size_t d = 0; d < config.collection_size; ++d) {
    const std::size_t target = sample_positive_poisson(length_rate, rng);
    PolyaUrn<TokenId> unigram_lm(counts.unigram_mass());
    PolyaUrn<std::pair<TokenId, TokenId>> bigram_lm(counts.bigram_mass());

    std::vector<TokenId> doc;
    doc.reserve(target);
    while (doc.size() < target) {
      if (ngram_size(rng) == 0) {
        doc.push_back(unigram_lm.draw(rng, [&](auto& g) { return counts.draw_unigram(g); }));
        ++collection.unigram_draws;
      } else {
        const auto [x, y] = bigram_lm.draw(rng, [&](auto& g) { return counts.draw_bigram(g); });
        ++collection.bigram_draws;
        doc.push_back(x);
        if (doc.size() < target) doc.push_back(y);
      }
    }
    for (TokenId t : doc) ++collection.unigram_counts[t];
    collection.target_lengths.push_back(target);
    collection.documents.push_back(std::move(doc));
  }
  return collection;
}

std::string document_id(std::size_t index, std::size_t collection_size) {
  return padded_id('d', index, collection_size);
}

std::string query_id(std::size_t index, std::size_t query_count) {
  return padded_id('q', index, query_count);
}

QueryCollection sample_queries(const SyntheticCollection& collection,
                               const SynthConfig& config) {
  config.validate();
  const std::size_t n_docs = collection.documents.size();
  if (n_docs == 0) throw InputError("cannot sample queries from an empty collection");
  if (config.relevant_per_query > n_docs) {
    throw ConfigError("relevant_per_query exceeds the collection size");
  }

  const std::uint64_t total_tokens = std::accumulate(
      collection.unigram_counts.begin(), collection.unigram_counts.end(), std::uint64_t{0});
  if (total_tokens == 0) throw InputError("collection has no tokens");

  std::mt19937_64 rng = make_rng(config.seed, kQueryStream);
  const double length_rate = zero_truncated_poisson_rate(config.mean_query_length);
  constexpr int kMaxRetries = 100;

  std::vector<std::size_t> all_docs(n_docs);
  std::iota(all_docs.begin(), all_docs.end(), std::size_t{0});
  std::vector<std::uint32_t> counts(collection.vocab_size, 0);
  std::vector<TokenId> touched;

  QueryCollection out;
  out.queries.reserve(config.query_count);
  out.relevant.reserve(config.query_count);
  out.ids.reserve(config.query_count);

  for (std::size_t q = 0; q < config.query_count; ++q) {
    std::vector<std::size_t> relevant;
    std::vector<TokenId> terms;
    std::vector<double> weights;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxRetries) {
        throw InputError("no term has positive sampling weight for query " +
                         std::to_string(q) + " after " + std::to_string(kMaxRetries) +
                         " draws of its relevant set");
      }
      relevant.clear();
      std::sample(all_docs.begin(), all_docs.end(), std::back_inserter(relevant),
                  static_cast<std::ptrdiff_t>(config.relevant_per_query), rng);

      std::uint64_t relevant_tokens = 0;
      for (std::size_t d : relevant) {
        for (TokenId t : collection.documents[d]) {
          if (counts[t]++ == 0) touched.push_back(t);
        }
        relevant_tokens += collection.documents[d].size();
      }
      std::sort(touched.begin(), touched.end());

      terms.clear();
      weights.clear();
      for (TokenId t : touched) {
        const double p_rel = static_cast<double>(counts[t]) / static_cast<double>(relevant_tokens);
        const double p_coll =
            static_cast<double>(collection.unigram_counts[t]) / static_cast<double>(total_tokens);
        const double w = p_rel * (1.0 - p_coll);
        if (w > 0.0) {
          terms.push_back(t);
          weights.push_back(w);
        }
        counts[t] = 0;
      }
      touched.clear();
      if (!terms.empty()) break;
    }

    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const std::size_t length = sample_positive_poisson(length_rate, rng);
    std::vector<TokenId> query;
    query.reserve(length);
    for (std::size_t i = 0; i < length; ++i) query.push_back(terms[pick(rng)]);

    std::sort(relevant.begin(), relevant.end());
    std::string qid = query_id(q, config.query_count);
    for (std::size_t d : relevant) out.qrel.add(qid, document_id(d, n_docs), 1);
    out.ids.push_back(std::move(qid));
    out.queries.push_back(std::move(query));
    out.relevant.push_back(std::move(relevant));
  }
  return out;
}

Index::Index(const SyntheticCollection& collection) {
  const std::size_t n_docs = collection.documents.size();
  if (n_docs == 0) throw InputError("cannot index an empty collection");

  const std::size_t v = collection.vocab_size;
  std::vector<std::uint64_t> cf(v, 0);
  postings_.resize(v);
  doc_lengths_.reserve(n_docs);
  doc_ids_.reserve(n_docs);
  doc_terms_.reserve(n_docs);

  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<TokenId> sorted = collection.documents[d];
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<TokenId, std::uint32_t>> tfs;
    for (TokenId t : sorted) {
      if (t >= v) throw InputError("token id " + std::to_string(t) + " outside vocabulary");
      if (!tfs.empty() && tfs.back().first == t) {
        ++tfs.back().second;
      } else {
        tfs.emplace_back(t, 1);
      }
    }
    for (const auto& [t, tf] : tfs) {
      postings_[t].push_back({static_cast<std::uint32_t>(d), tf});
      cf[t] += tf;
    }
    doc_lengths_.push_back(sorted.size());
    doc_ids_.push_back(document_id(d, n_docs));
    doc_terms_.push_back(std::move(tfs));
    total_tokens_ += sorted.size();
  }
  if (total_tokens_ == 0) throw InputError("cannot index a collection with no tokens");

  collection_lm_.resize(v);
  for (std::size_t t = 0; t < v; ++t) {
    collection_lm_[t] = static_cast<double>(cf[t]) / static_cast<double>(total_tokens_);
  }
}

double Index::collection_probability(TokenId term) const {
  return term < collection_lm_.size() ? collection_lm_[term] : 0.0;
}

std::uint32_t Index::tf(TokenId term, std::size_t doc) const {
  const auto& terms = doc_terms_[doc];
  auto it = std::lower_bound(terms.begin(), terms.end(), term,
                             [](const auto& entry, TokenId t) { return entry.first < t; });
  return it != terms.end() && it->first == term ? it->second : 0;
}

std::span<const Posting> Index::postings(TokenId term) const {
  if (term >= postings_.size()) return {};
  return postings_[term];
}

Index build_index(const SyntheticCollection& collection) { return Index(collection); }

OrderedRanking retrieve(const Index& index, std::span<const TokenId> query, double mu,
                        std::size_t top_k) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be positive");
  if (top_k == 0) throw std::invalid_argument("top_k must be at least 1");

  const std::size_t n = index.document_count();
  std::vector<double> log_norm(n);
  for (std::size_t d = 0; d < n; ++d) {
    log_norm[d] = std::log(static_cast<double>(index.doc_length(d)) + mu);
  }

  std::vector<double> scores(n, 0.0);
  for (TokenId term : query) {
    const double p = index.collection_probability(term);
    const double background = p > 0.0 ? mu * p : kSmoothingFloor;
    const double log_background = std::log(background);
    for (std::size_t d = 0; d < n; ++d) scores[d] += log_background - log_norm[d];
    for (const Posting& posting : index.postings(term)) {
      scores[posting.doc] += std::log(posting.tf + background) - log_background;
    }
  }

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(n);
  for (std::size_t d = 0; d < n; ++d) scored.emplace_back(index.doc_id(d), scores[d]);
  OrderedRanking ranking = rank_documents(scored);
  ranking.truncate(top_k);
  return ranking;
}

void write_token_lines(const std::vector<std::vector<TokenId>>& lines, std::ostream& out) {
  for (const auto& line : lines) {
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? " " : "") << line[i];
    out << '\n';
  }
  if (!out) throw std::ios_base::failure("failed writing token lines");
}

std::vector<std::vector<TokenId>> read_token_lines(std::istream& in, std::size_t vocab_size) {
  std::vector<std::vector<TokenId>> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::vector<TokenId> tokens;
    std::string_view rest = raw;
    while (true) {
      const auto start = rest.find_first_not_of(" \t\r");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto end = std::min(rest.find_first_of(" \t\r"), rest.size());
      const std::string_view field = rest.substr(0, end);
      TokenId t = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line_no, "bad token id '" + std::string(field) + "'");
      }
      if (t >= vocab_size) {
        throw ParseError(line_no, "token id " + std::to_string(t) + " outside vocabulary");
      }
      tokens.push_back(t);
      rest.remove_prefix(end);
    }
    lines.push_back(std::move(tokens));
  }
  return lines;
}

}  // namespace trevl::synth
