#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atm/error.hpp"
#include "commands.hpp"

namespace {

using namespace atm::cli;

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kRuntime = 3;

std::size_t default_threads() {
  if (const char* env = std::getenv("ATM_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring ATM_THREADS='" << env << "'\n";
  }
  return 1;
}

void add_data(CLI::App* cmd, DataOptions& data, bool required) {
  auto* c = cmd->add_option("--corpus", data.corpus, "Corpus file (authors | tokens per line)");
  auto* v = cmd->add_option("--vocab", data.vocab, "Vocabulary file, one word per line");
  auto* a = cmd->add_option("--authors", data.authors, "Author file, one name per line");
  for (auto* o : {c, v, a}) {
    o->check(CLI::ExistingFile);
    if (required) o->required();
  }
}

void add_model_dir(CLI::App* cmd, std::string& dir) {
  cmd->add_option("--model-dir", dir, "Directory written by 'train'")->required();
}

void add_precision(CLI::App* cmd, int& precision) {
  cmd->add_option("--precision", precision, "Decimal places in numeric output")
      ->capture_default_str()
      ->check(CLI::Range(0, 17));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author-topic, LDA and author models with collapsed Gibbs sampling", "atm"};
  app.set_version_flag("--version", std::string("atm ") + ATM_VERSION);
  app.require_subcommand(1);

  const std::size_t threads = default_threads();

  TrainOptions train;
  train.threads = threads;
  auto* c_train = app.add_subcommand("train", "Run an ensemble of Gibbs chains and save the samples");
  add_data(c_train, train.data, true);
  c_train->add_option("--out", train.out, "Output model directory")->required();
  c_train->add_option("--model", train.model, "lda, author or at")
      ->capture_default_str()
      ->check(CLI::IsMember({"lda", "author", "at"}));
  c_train->add_option("--topics", train.topics, "Number of topics T (lda, at)")
      ->check(CLI::PositiveNumber);
  c_train->add_option("--iterations", train.iterations, "Sweeps per chain")->capture_default_str();
  c_train->add_option("--chains", train.chains, "Independent chains, one sample each")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_train->add_option("--seed", train.seed, "Base seed")->capture_default_str();
  c_train->add_option("--alpha", train.alpha, "Topic smoothing, or 'auto' for 50/T")
      ->capture_default_str();
  c_train->add_option("--beta", train.beta, "Word smoothing")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_train->add_option("--threads", train.threads, "Chains run at once (default $ATM_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  c_train->add_flag("--quiet", train.quiet, "No progress output");

  SplitOptions split;
  auto* c_split = app.add_subcommand("split", "Split a corpus into train and test files");
  add_data(c_split, split.data, true);
  c_split->add_option("--test-fraction", split.test_fraction, "Fraction of documents for testing")
      ->capture_default_str();
  c_split->add_option("--seed", split.seed, "Shuffle seed")->capture_default_str();
  c_split->add_option("--train-out", split.train_out, "Train corpus output")->required();
  c_split->add_option("--test-out", split.test_out, "Test corpus output")->required();

  TopicsOptions topics;
  auto* c_topics = app.add_subcommand("topics", "Top words and authors per topic");
  add_model_dir(c_topics, topics.model_dir);
  add_data(c_topics, topics.data, false);
  c_topics->add_option("--topic", topics.topics, "Topic id (repeatable; default all)");
  c_topics->add_option("--top-n", topics.top_n, "Entries per block")->capture_default_str();
  c_topics->add_option("--sample", topics.sample, "Which sample to summarize")->capture_default_str();
  add_precision(c_topics, topics.precision);

  PerplexityOptions perp;
  perp.threads = threads;
  auto* c_perp = app.add_subcommand("perplexity", "Held-out perplexity of test documents");
  add_model_dir(c_perp, perp.model_dir);
  add_data(c_perp, perp.data, false);
  c_perp->add_option("--test", perp.test, "Test corpus")->required()->check(CLI::ExistingFile);
  c_perp->add_option("--fold-in-grid", perp.grid, "Held-in word counts, e.g. 0,1,2,4")
      ->delimiter(',');
  c_perp->add_option("--seed", perp.seed, "Seed for held-in selection and fold-in")
      ->capture_default_str();
  c_perp->add_option("--sweeps", perp.sweeps, "Fold-in sweeps")->capture_default_str();
  c_perp->add_option("--threads", perp.threads, "Documents evaluated at once")
      ->check(CLI::PositiveNumber);
  add_precision(c_perp, perp.precision);

  SimilarAuthorsOptions similar;
  auto* c_similar = app.add_subcommand("similar-authors", "Author pairs by symmetric KL divergence");
  add_model_dir(c_similar, similar.model_dir);
  add_data(c_similar, similar.data, false);
  c_similar->add_option("--min-papers", similar.min_papers,
                        "Only authors with more than this many documents")
      ->capture_default_str();
  add_precision(c_similar, similar.precision);

  EntropyOptions ent;
  auto* c_entropy = app.add_subcommand("entropy", "Entropy of each author's topic distribution");
  add_model_dir(c_entropy, ent.model_dir);
  add_data(c_entropy, ent.data, false);
  add_precision(c_entropy, ent.precision);

  RankAuthorsOptions rank;
  auto* c_rank = app.add_subcommand("rank-authors", "Rank every author as the writer of test documents");
  add_model_dir(c_rank, rank.model_dir);
  add_data(c_rank, rank.data, false);
  c_rank->add_option("--test", rank.test, "Documents to attribute")->required()->check(CLI::ExistingFile);
  c_rank->add_option("--true-author", rank.true_author, "Author id or name to report the rank of");
  add_precision(c_rank, rank.precision);

  ValidateOptions val;
  auto* c_validate = app.add_subcommand("validate", "Check snapshot assignments and counts");
  add_model_dir(c_validate, val.model_dir);
  add_data(c_validate, val.data, false);
  c_validate->add_option("--snapshot", val.snapshot, "Single snapshot file (default: all)")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  try {
    if (*c_train) return cmd_train(train, out, err);
    if (*c_split) return cmd_split(split, out, err);
    if (*c_topics) return cmd_topics(topics, out, err);
    if (*c_perp) return cmd_perplexity(perp, out, err);
    if (*c_similar) return cmd_similar_authors(similar, out, err);
    if (*c_entropy) return cmd_entropy(ent, out, err);
    if (*c_rank) return cmd_rank_authors(rank, out, err);
    if (*c_validate) return cmd_validate(val, out, err);
  } catch (const UsageError& e) {
    err << "atm: " << e.what() << '\n';
    return kUsage;
  } catch (const atm::Error& e) {
    err << "atm: " << atm::to_string(e.code()) << ": " << e.what() << '\n';
    return atm::is_data_error(e.code()) ? kData : kRuntime;
  } catch (const std::exception& e) {
    err << "atm: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
