#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atm/corpus.hpp"
#include "atm/matrix.hpp"

namespace atm {

class Rng;

using Count = std::int32_t;

enum class ModelKind { Lda, Author, AuthorTopic };

// "lda", "author", "at".
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct Hyperparameters {
  double alpha = 0.0;  // symmetric Dirichlet on topic mixtures
  double beta = 0.0;   // symmetric Dirichlet on word distributions

  bool operator==(const Hyperparameters&) const = default;
};

// alpha = 50 / T, beta = 0.01.
Hyperparameters default_hyperparameters(std::size_t topics);

struct ModelConfig {
  ModelKind kind = ModelKind::AuthorTopic;
  // Ignored by the author model, whose latent dimension is the author set.
  std::size_t topics = 1;
  Hyperparameters hyper;

  bool has_topics() const { return kind != ModelKind::Author; }
  bool has_authors() const { return kind != ModelKind::Lda; }
  // Throws Error(InvalidArgument).
  void check() const;

  bool operator==(const ModelConfig&) const = default;
};

struct Dimensions {
  std::size_t words = 0;    // V
  std::size_t topics = 0;   // T
  std::size_t authors = 0;  // A
  std::size_t docs = 0;     // D

  bool operator==(const Dimensions&) const = default;
};

Dimensions dimensions_of(const Corpus& corpus, const ModelConfig& config);

// Per-token topic (z) and author (x) assignments, flat in canonical token
// order with per-document offsets. Each sequence is empty when the model kind
// does not use it.
class AssignmentState {
 public:
  AssignmentState() = default;
  AssignmentState(const Corpus& corpus, bool with_topics, bool with_authors);

  std::size_t num_documents() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_tokens() const { return offsets_.empty() ? 0 : offsets_.back(); }
  std::size_t doc_size(std::size_t d) const { return offsets_[d + 1] - offsets_[d]; }
  bool has_topics() const { return with_topics_; }
  bool has_authors() const { return with_authors_; }

  TopicId& topic(std::size_t d, std::size_t p) { return topics_[offsets_[d] + p]; }
  TopicId topic(std::size_t d, std::size_t p) const { return topics_[offsets_[d] + p]; }
  AuthorId& author(std::size_t d, std::size_t p) { return authors_[offsets_[d] + p]; }
  AuthorId author(std::size_t d, std::size_t p) const { return authors_[offsets_[d] + p]; }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const TopicId> topics() const { return topics_; }
  std::span<const AuthorId> authors() const { return authors_; }

  bool operator==(const AssignmentState&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<TopicId> topics_;
  std::vector<AuthorId> authors_;
  bool with_topics_ = false;
  bool with_authors_ = false;
};

// Sufficient statistics of an assignment. Tables a model kind does not use
// stay empty (0x0):
//   Lda:         word_topic, doc_topic
//   Author:      word_author
//   AuthorTopic: word_topic, author_topic
struct CountTables {
  Matrix<Count> word_topic;    // V x T
  Matrix<Count> doc_topic;     // D x T
  Matrix<Count> author_topic;  // A x T
  Matrix<Count> word_author;   // V x A

  std::vector<Count> topic_totals;         // column sums of word_topic
  std::vector<Count> doc_totals;           // row sums of doc_topic
  std::vector<Count> author_topic_totals;  // row sums of author_topic
  std::vector<Count> author_word_totals;   // column sums of word_author

  static CountTables zeros(ModelKind kind, const Dimensions& dims);

  // Adds delta (+1 or -1) for one token of word `word` in row `doc` with
  // assignment (topic, author). Arguments the kind does not use are ignored.
  void apply(ModelKind kind, WordId word, std::size_t doc, TopicId topic, AuthorId author,
             Count delta) {
    switch (kind) {
      case ModelKind::Lda:
        word_topic(word, topic) += delta;
        topic_totals[topic] += delta;
        doc_topic(doc, topic) += delta;
        doc_totals[doc] += delta;
        break;
      case ModelKind::Author:
        word_author(word, author) += delta;
        author_word_totals[author] += delta;
        break;
      case ModelKind::AuthorTopic:
        word_topic(word, topic) += delta;
        topic_totals[topic] += delta;
        author_topic(author, topic) += delta;
        author_topic_totals[author] += delta;
        break;
    }
  }

  bool operator==(const CountTables&) const = default;
};

struct SamplerState {
  ModelConfig config;
  Dimensions dims;
  AssignmentState assignments;
  CountTables counts;
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;

  bool operator==(const SamplerState&) const = default;
};

// Random initial state: z uniform over topics, x uniform over the document's
// authors. The overload taking an Rng continues from its current position.
SamplerState init_assignments(const Corpus& corpus, const ModelConfig& config, std::uint64_t seed);
SamplerState init_assignments(const Corpus& corpus, const ModelConfig& config, std::uint64_t seed,
                              Rng& rng);

// Recounts every table from the assignments. Throws Error(ShapeMismatch).
CountTables rebuild_counts(const Corpus& corpus, const ModelConfig& config,
                           const AssignmentState& assignments);

// State for given assignments with counts rebuilt from scratch.
SamplerState make_state(const Corpus& corpus, const ModelConfig& config,
                        AssignmentState assignments, std::uint64_t iteration, std::uint64_t seed);

// V x T, columns sum to one.
Matrix<double> phi_word_topic(const CountTables& counts, double beta);
// D x T, rows sum to one.
Matrix<double> theta_doc_topic(const CountTables& counts, double alpha);
// A x T, rows sum to one.
Matrix<double> theta_author_topic(const CountTables& counts, double alpha);
// V x A, columns sum to one.
Matrix<double> phi_word_author(const CountTables& counts, double beta);

struct EstimateMatrices {
  Matrix<double> phi;           // V x T
  Matrix<double> theta_doc;     // D x T
  Matrix<double> theta_author;  // A x T
  Matrix<double> phi_author;    // V x A
};

// The estimates available for the state's kind; the rest stay empty.
EstimateMatrices estimate(const ModelConfig& config, const CountTables& counts);

enum class ViolationKind {
  ShapeMismatch,
  MissingAssignments,
  TopicOutOfRange,
  AuthorNotOnDocument,
  NegativeCount,
  CountMismatch,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Empty iff the assignments are well formed and every table (with its cached
// totals) equals a from-scratch recount.
std::vector<Violation> validate(const SamplerState& state, const Corpus& corpus);

// Text snapshot: a header line, then "d p z x" per token with "-" for an
// assignment the kind does not carry. Counts are not stored.
void write_snapshot(std::ostream& out, const SamplerState& state);
// Throws Error(FormatError) or Error(CorpusMismatch).
SamplerState read_snapshot(std::istream& in, const Corpus& corpus);

}  // namespace atm
