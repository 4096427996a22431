#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace atm::cli {

// Thrown for bad flag combinations detected after parsing; exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data files. Commands that read a model directory default these to the
// paths recorded in its manifest.
struct DataOptions {
  std::string corpus;
  std::string vocab;
  std::string authors;
};

struct TrainOptions {
  DataOptions data;
  std::string out;
  std::string model = "at";
  std::size_t topics = 0;
  std::uint64_t iterations = 2000;
  std::size_t chains = 10;
  std::uint64_t seed = 1;
  std::string alpha = "auto";
  double beta = 0.01;
  std::size_t threads = 1;
  bool quiet = false;
};

struct SplitOptions {
  DataOptions data;
  double test_fraction = 0.1;
  std::uint64_t seed = 1;
  std::string train_out;
  std::string test_out;
};

struct TopicsOptions {
  std::string model_dir;
  DataOptions data;
  std::vector<std::size_t> topics;
  std::size_t top_n = 10;
  std::size_t sample = 0;
  int precision = 4;
};

struct PerplexityOptions {
  std::string model_dir;
  DataOptions data;
  std::string test;
  std::vector<std::size_t> grid;
  std::uint64_t seed = 1;
  std::size_t sweeps = 20;
  std::size_t threads = 1;
  int precision = 4;
};

struct SimilarAuthorsOptions {
  std::string model_dir;
  DataOptions data;
  std::size_t min_papers = 5;
  int precision = 4;
};

struct EntropyOptions {
  std::string model_dir;
  DataOptions data;
  int precision = 4;
};

struct RankAuthorsOptions {
  std::string model_dir;
  DataOptions data;
  std::string test;
  std::string true_author;  // id or name
  int precision = 4;
};

struct ValidateOptions {
  std::string model_dir;
  DataOptions data;
  std::string snapshot;  // one file; default: every snapshot in the manifest
};

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_split(const SplitOptions& opt, std::ostream& out, std::ostream& err);
int cmd_topics(const TopicsOptions& opt, std::ostream& out, std::ostream& err);
int cmd_perplexity(const PerplexityOptions& opt, std::ostream& out, std::ostream& err);
int cmd_similar_authors(const SimilarAuthorsOptions& opt, std::ostream& out, std::ostream& err);
int cmd_entropy(const EntropyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_rank_authors(const RankAuthorsOptions& opt, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace atm::cli
