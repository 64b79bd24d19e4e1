// Tabular Q-learning for query expansion on a synthetic collection.
//
//   trevl-rl --config synth.conf --episodes 20000 --alpha 0.1 --gamma 0.95 \
//            --epsilon 0.05 --seed 1
//
// Writes the reward curve as TSV on stdout.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trevl/qexp_gym.hpp"
#include "trevl/synth.hpp"
#include "trevl/trec_io.hpp"

namespace {

void dump_collection(const std::filesystem::path& dir,
                     const trevl::synth::SyntheticCollection& collection,
                     const trevl::synth::QueryCollection& queries) {
  std::filesystem::create_directories(dir);
  std::ofstream docs(dir / "documents.txt");
  trevl::synth::write_token_lines(collection.documents, docs);
  std::ofstream query_lines(dir / "queries.txt");
  trevl::synth::write_token_lines(queries.queries, query_lines);
  std::ofstream qrel(dir / "qrels.txt");
  trevl::write_qrel(queries.qrel, qrel);
}

}  // namespace

int main(int argc, char** argv) {
  std::string config_path;
  std::string dump_dir;
  trevl::gym::AgentConfig agent;
  trevl::gym::EnvConfig env_config;
  std::size_t seed_override = 0;
  bool print_config = false;

  CLI::App app{"Q-learning query expansion with an NDCG-delta reward", "trevl-rl"};
  app.add_option("--config", config_path, "Synthetic collection config (key = value lines)");
  app.add_option("--episodes", agent.episodes, "Training episodes")->capture_default_str();
  app.add_option("--alpha", agent.alpha, "Learning rate")->capture_default_str();
  app.add_option("--gamma", agent.gamma, "Discount factor")->capture_default_str();
  app.add_option("--epsilon", agent.epsilon, "Exploration rate")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed_override,
                                  "Seed for the agent and the collection");
  app.add_option("--mu", env_config.mu, "Dirichlet smoothing mu")->capture_default_str();
  app.add_option("--dump", dump_dir, "Also write documents, queries and qrels here");
  app.add_flag("--print-config", print_config, "Print the effective collection config and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    trevl::synth::SynthConfig synth_config;
    if (!config_path.empty()) synth_config = trevl::synth::load_config(config_path);
    if (seed_opt->count() > 0) {
      synth_config.seed = seed_override;
      agent.seed = seed_override;
    }
    if (print_config) {
      trevl::synth::write_config(synth_config, std::cout);
      return 0;
    }
    agent.validate();

    const auto collection = trevl::synth::sample_collection(synth_config);
    const auto queries = trevl::synth::sample_queries(collection, synth_config);
    const trevl::synth::Index index(collection);
    if (!dump_dir.empty()) dump_collection(dump_dir, collection, queries);

    trevl::gym::QueryExpansionEnv env(index, queries, env_config);
    trevl::gym::write_curve_header(std::cout);
    trevl::gym::train(env, agent, nullptr, [](const trevl::gym::EpisodeRecord& record) {
      trevl::gym::write_curve_row(record, std::cout);
    });
  } catch (const std::exception& e) {
    std::cerr << "trevl-rl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
