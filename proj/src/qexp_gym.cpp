#include "trevl/qexp_gym.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <stdexcept>

#include "trevl/errors.hpp"
#include "trevl/ranking.hpp"

namespace trevl::gym {
namespace {

// NDCG is computed as a ratio of identical sums for a perfect ranking, so
// this only absorbs representation noise.
constexpr double kPerfectNdcg = 1.0 - 1e-12;

}  // namespace

QueryExpansionEnv::QueryExpansionEnv(const synth::Index& index,
                                     const synth::QueryCollection& queries, EnvConfig config)
    : index_(index), queries_(queries), config_(config) {
  if (config_.max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (config_.top_k < 1) throw ConfigError("top_k must be at least 1");
  if (!(config_.mu > 0.0)) throw ConfigError("mu must be positive");
}

Observation QueryExpansionEnv::reset(std::size_t query) {
  if (query >= queries_.queries.size()) {
    throw std::out_of_range("unknown query index " + std::to_string(query));
  }
  const auto& terms = queries_.queries[query];
  state_ = EnvState{};
  state_.query = query;
  state_.active_terms.assign(terms.begin(), terms.end());
  std::sort(state_.active_terms.begin(), state_.active_terms.end());
  state_.active_terms.erase(std::unique(state_.active_terms.begin(), state_.active_terms.end()),
                            state_.active_terms.end());
  retrieval_terms_.assign(terms.begin(), terms.end());
  started_ = true;

  state_.initial_ndcg = current_ndcg();
  state_.last_ndcg = state_.initial_ndcg;
  return observation();
}

StepResult QueryExpansionEnv::step(std::size_t action) {
  if (!started_) throw ContractError("step() before reset()");
  if (state_.done) throw ContractError("step() after the episode finished");
  if (action >= action_count()) {
    throw std::out_of_range("action " + std::to_string(action) + " outside action space");
  }

  double ndcg = state_.last_ndcg;
  if (action != null_action()) {
    const auto term = static_cast<TokenId>(action);
    auto pos = std::lower_bound(state_.active_terms.begin(), state_.active_terms.end(), term);
    if (pos == state_.active_terms.end() || *pos != term) {
      state_.active_terms.insert(pos, term);
      retrieval_terms_.push_back(term);
      ndcg = current_ndcg();
    }
  }

  StepResult result;
  result.reward = ndcg - state_.last_ndcg;
  state_.last_ndcg = ndcg;
  ++state_.step_count;
  state_.done = state_.step_count >= config_.max_steps || ndcg >= kPerfectNdcg;
  result.done = state_.done;
  result.observation = observation();
  return result;
}

Observation QueryExpansionEnv::observation() const {
  Observation bits(index_.vocab_size(), false);
  for (TokenId t : state_.active_terms) {
    if (t < bits.size()) bits[t] = true;
  }
  return bits;
}

double QueryExpansionEnv::current_ndcg() const {
  const OrderedRanking ranking =
      synth::retrieve(index_, retrieval_terms_, config_.mu, config_.top_k);
  const Judgments* judgments = queries_.qrel.find(queries_.ids[state_.query]);
  static const Judgments kNone;
  return ndcg(ranking, judgments ? *judgments : kNone);
}

std::size_t StateKeyHash::operator()(const StateKey& key) const noexcept {
  // FNV-1a over the term ids.
  std::uint64_t h = 1469598103934665603ull;
  for (TokenId t : key) {
    h ^= t;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

double QTable::value(const StateKey& state, std::size_t action) const {
  auto it = table_.find(state);
  if (it == table_.end()) return 0.0;
  auto entry = it->second.find(action);
  return entry == it->second.end() ? 0.0 : entry->second;
}

void QTable::set(const StateKey& state, std::size_t action, double value) {
  if (action >= action_count_) throw std::out_of_range("action outside action space");
  table_[state][action] = value;
}

double QTable::max_value(const StateKey& state) const {
  auto it = table_.find(state);
  if (it == table_.end()) return 0.0;
  const auto& row = it->second;
  double best = row.size() < action_count_ ? 0.0 : -std::numeric_limits<double>::infinity();
  for (const auto& [action, v] : row) best = std::max(best, v);
  return best;
}

std::size_t QTable::greedy_action(const StateKey& state) const {
  auto it = table_.find(state);
  if (it == table_.end()) return 0;
  const auto& row = it->second;

  std::size_t lowest_unvisited = action_count_;
  std::size_t expected = 0;
  for (const auto& [action, v] : row) {
    if (action != expected) break;
    ++expected;
  }
  if (expected < action_count_) lowest_unvisited = expected;

  std::size_t best_action = action_count_;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [action, v] : row) {
    if (v > best) {
      best = v;
      best_action = action;
    }
  }
  if (lowest_unvisited < action_count_ &&
      (best < 0.0 || (best == 0.0 && lowest_unvisited < best_action))) {
    return lowest_unvisited;
  }
  return best_action;
}

std::size_t QTable::entry_count() const {
  std::size_t n = 0;
  for (const auto& [state, row] : table_) n += row.size();
  return n;
}

double QTable::max_abs_value() const {
  double m = 0.0;
  for (const auto& [state, row] : table_) {
    for (const auto& [action, v] : row) m = std::max(m, std::abs(v));
  }
  return m;
}

void AgentConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
}

std::size_t select_action(const QTable& table, const StateKey& state, double epsilon,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> any(0, table.action_count() - 1);
    return any(rng);
  }
  return table.greedy_action(state);
}

void q_update(QTable& table, const StateKey& state, std::size_t action, double reward,
              const StateKey& next_state, bool done, double alpha, double gamma) {
  const double current = table.value(state, action);
  const double future = done ? 0.0 : gamma * table.max_value(next_state);
  const double updated = current + alpha * (reward + future - current);
  // Zero entries read the same as absent ones; keep the table sparse.
  if (updated != 0.0 || current != 0.0) table.set(state, action, updated);
}

RewardCurve train(QueryExpansionEnv& env, const AgentConfig& config, QTable* table,
                  const std::function<void(const EpisodeRecord&)>& on_episode) {
  config.validate();
  if (env.query_count() == 0 && config.episodes > 0) {
    throw ConfigError("no training queries");
  }

  QTable local(env.action_count());
  QTable& q = table ? *table : local;
  std::mt19937_64 rng(config.seed);

  RewardCurve curve;
  curve.reserve(config.episodes);
  std::deque<double> window;
  double window_sum = 0.0;

  for (std::size_t e = 0; e < config.episodes; ++e) {
    EpisodeRecord record;
    record.episode = e;
    record.query = e % env.query_count();
    env.reset(record.query);
    record.initial_ndcg = env.state().last_ndcg;

    bool done = false;
    while (!done) {
      StateKey state = env.state().active_terms;
      const std::size_t action = select_action(q, state, config.epsilon, rng);
      const StepResult result = env.step(action);
      done = result.done;
      q_update(q, state, action, result.reward, env.state().active_terms, done, config.alpha,
               config.gamma);
      record.total_reward += result.reward;
      ++record.steps;
    }
    record.final_ndcg = env.state().last_ndcg;
    record.mean_step_reward = record.total_reward / record.steps;

    window.push_back(record.total_reward);
    window_sum += record.total_reward;
    if (window.size() > kRunningMeanWindow) {
      window_sum -= window.front();
      window.pop_front();
    }
    record.running_mean = window_sum / static_cast<double>(window.size());

    if (on_episode) on_episode(record);
    curve.push_back(record);
  }
  return curve;
}

RewardCurve train(const synth::Index& index, const synth::QueryCollection& queries,
                  const AgentConfig& config, EnvConfig env_config) {
  QueryExpansionEnv env(index, queries, env_config);
  return train(env, config);
}

void write_curve_header(std::ostream& out) {
  out << "episode\tquery\tsteps\ttotal_reward\trunning_mean_100\tmean_step_reward\t"
         "initial_ndcg\tfinal_ndcg\n";
}

void write_curve_row(const EpisodeRecord& r, std::ostream& out) {
  out << r.episode << '\t' << r.query << '\t' << r.steps << '\t' << r.total_reward << '\t'
      << r.running_mean << '\t' << r.mean_step_reward << '\t' << r.initial_ndcg << '\t'
      << r.final_ndcg << '\n';
}

void write_curve(const RewardCurve& curve, std::ostream& out) {
  write_curve_header(out);
  for (const auto& record : curve) write_curve_row(record, out);
}

double mean_total_reward(const RewardCurve& curve, std::size_t begin, std::size_t end) {
  end = std::min(end, curve.size());
  if (begin >= end) return 0.0;
  double sum = 0.0;
  for (std::size_t i = begin; i < end; ++i) sum += curve[i].total_reward;
  return sum / static_cast<double>(end - begin);
}

}  // namespace trevl::gym
