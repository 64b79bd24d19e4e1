#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "trevl/synth.hpp"

// Query expansion as a reinforcement-learning problem: actions add one
// vocabulary term to the query, the reward is the change in NDCG of the
// top-k retrieved documents.
namespace trevl::gym {

using synth::TokenId;

struct EnvConfig {
  double mu = 2500.0;
  std::size_t top_k = 10;
  int max_steps = 5;
};

/// One bit per vocabulary term: set iff the term is in the expanded query.
using Observation = std::vector<bool>;

/// Sorted, duplicate-free active term ids. Exact sparse encoding of an
/// Observation.
using StateKey = std::vector<TokenId>;

struct EnvState {
  std::size_t query = 0;
  StateKey active_terms;
  int step_count = 0;
  double initial_ndcg = 0.0;
  double last_ndcg = 0.0;
  bool done = false;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

class QueryExpansionEnv {
 public:
  /// Both referenced objects must outlive the environment.
  QueryExpansionEnv(const synth::Index& index, const synth::QueryCollection& queries,
                    EnvConfig config = {});

  /// Actions 0..|V|-1 add that term; action |V| does nothing.
  std::size_t action_count() const { return index_.vocab_size() + 1; }
  std::size_t null_action() const { return index_.vocab_size(); }
  std::size_t query_count() const { return queries_.queries.size(); }

  /// Starts an episode on `query` with only its own terms active.
  /// Throws std::out_of_range for an unknown query index.
  Observation reset(std::size_t query);

  /// Throws ContractError after the episode is done or before any reset,
  /// std::out_of_range for an action outside the action space.
  StepResult step(std::size_t action);

  const EnvState& state() const { return state_; }
  Observation observation() const;

  /// NDCG of the top-k ranking for the current expanded query.
  double current_ndcg() const;

 private:
  const synth::Index& index_;
  const synth::QueryCollection& queries_;
  EnvConfig config_;
  EnvState state_;
  bool started_ = false;
  std::vector<TokenId> retrieval_terms_;  // original occurrences + added terms
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const noexcept;
};

/// Sparse action values; entries never written read as exactly 0.
class QTable {
 public:
  explicit QTable(std::size_t action_count) : action_count_(action_count) {}

  std::size_t action_count() const { return action_count_; }
  double value(const StateKey& state, std::size_t action) const;
  void set(const StateKey& state, std::size_t action, double value);

  /// max over every action, unvisited ones counting as 0.
  double max_value(const StateKey& state) const;
  /// argmax over every action; ties go to the lowest action index.
  std::size_t greedy_action(const StateKey& state) const;

  std::size_t state_count() const { return table_.size(); }
  std::size_t entry_count() const;
  /// Largest |Q| over stored entries.
  double max_abs_value() const;

 private:
  std::size_t action_count_;
  std::unordered_map<StateKey, std::map<std::size_t, double>, StateKeyHash> table_;
};

struct AgentConfig {
  double alpha = 0.1;
  double gamma = 0.95;
  double epsilon = 0.05;
  std::size_t episodes = 20000;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
};

/// Uniform random action with probability epsilon, greedy otherwise.
std::size_t select_action(const QTable& table, const StateKey& state, double epsilon,
                          std::mt19937_64& rng);

/// Q(s,a) += alpha * (reward + gamma * max_a' Q(s',a') * [not done] - Q(s,a))
void q_update(QTable& table, const StateKey& state, std::size_t action, double reward,
              const StateKey& next_state, bool done, double alpha, double gamma);

struct EpisodeRecord {
  std::size_t episode = 0;
  std::size_t query = 0;
  int steps = 0;
  double total_reward = 0.0;
  double initial_ndcg = 0.0;
  double final_ndcg = 0.0;
  double running_mean = 0.0;      // total_reward over the last 100 episodes
  double mean_step_reward = 0.0;  // total_reward / steps
};

using RewardCurve = std::vector<EpisodeRecord>;

inline constexpr std::size_t kRunningMeanWindow = 100;

/// Epsilon-greedy tabular Q-learning; episode e runs on query e mod |Q|.
/// Pass `table` to keep the learned values. `on_episode` sees each record
/// as it is produced.
RewardCurve train(QueryExpansionEnv& env, const AgentConfig& config, QTable* table = nullptr,
                  const std::function<void(const EpisodeRecord&)>& on_episode = {});

RewardCurve train(const synth::Index& index, const synth::QueryCollection& queries,
                  const AgentConfig& config, EnvConfig env_config = {});

/// Header plus one tab-separated row per episode.
void write_curve_header(std::ostream& out);
void write_curve_row(const EpisodeRecord& record, std::ostream& out);
void write_curve(const RewardCurve& curve, std::ostream& out);

/// Mean of total_reward over episodes [begin, end).
double mean_total_reward(const RewardCurve& curve, std::size_t begin, std::size_t end);

}  // namespace trevl::gym
