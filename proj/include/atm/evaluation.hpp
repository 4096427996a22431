#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "atm/chains.hpp"
#include "atm/corpus.hpp"
#include "atm/model_state.hpp"

namespace atm {

// Predictive probability of a single word for one document context,
// computed from point estimates of a count state:
//   Lda:         sum_j theta_doc[row][j] phi[w][j]   (uniform theta without a row)
//   AuthorTopic: (1/A_d) sum_{k in a_d} sum_j theta_author[k][j] phi[w][j]
//   Author:      (1/A_d) sum_{k in a_d} phi_author[w][k]
// Holds a reference to `counts`, which must outlive the predictor.
class WordPredictor {
 public:
  WordPredictor(const ModelConfig& config, const CountTables& counts, std::size_t num_words,
                std::optional<std::size_t> doc_row, std::span<const AuthorId> authors);

  double operator()(WordId word) const;

 private:
  const ModelConfig* config_;
  const CountTables* counts_;
  double beta_;
  // Per topic (Lda, AuthorTopic): mixture weight; per listed author (Author): 1/A_d.
  std::vector<double> mixture_;
  // Per topic or per listed author: 1 / (column total + V beta).
  std::vector<double> inv_total_;
  std::vector<AuthorId> authors_;
};

// Natural-log probability of `tokens` given `authors`, averaging the
// per-sample likelihoods on the probability scale (log-sum-exp). For the
// Lda kind the authors are checked but do not enter the prediction.
// Throws Error(EmptyAuthorSet), Error(UnknownAuthor), Error(TokenIdOutOfRange).
double doc_log_likelihood(const SampleSet& samples, std::span<const WordId> tokens,
                          std::span<const AuthorId> authors);

// exp(-doc_log_likelihood / N). Throws Error(EmptyDocument) when N = 0.
double perplexity(const SampleSet& samples, std::span<const WordId> tokens,
                  std::span<const AuthorId> authors);

// A sample's counts with one test document's held-in tokens added and
// resampled while all training assignments stay fixed.
struct FoldedSample {
  ModelConfig config;
  Dimensions dims;
  CountTables counts;
  // Row of doc_topic holding the folded document (Lda only).
  std::size_t doc_row = 0;
  std::vector<AuthorId> authors;
  std::vector<WordId> words;
  std::vector<TopicId> topics;
  std::vector<AuthorId> token_authors;

  WordPredictor predictor() const;
  EstimateMatrices estimates() const;
};

// Adds the held-in tokens with random assignments, then runs `sweeps`
// Gibbs sweeps over those tokens only. The sample is left untouched.
FoldedSample foldin_update(const Sample& sample, const Corpus& train, const Document& doc,
                           std::span<const std::size_t> heldin, std::size_t sweeps,
                           std::uint64_t seed);

struct DocPerplexity {
  std::size_t doc = 0;        // index into the test corpus
  std::size_t n_train = 0;    // held-in tokens actually used
  std::size_t n_heldout = 0;  // tokens scored
  double log_likelihood = 0.0;
  double perplexity = 0.0;
};

struct PerplexityReport {
  std::size_t n_train = 0;  // requested
  std::size_t samples = 0;
  std::vector<DocPerplexity> docs;
  double mean = 0.0;        // over documents
  std::size_t clamped = 0;  // documents whose n_train was reduced to N_d - 1
};

// Whole-document mode: every token scored, no fold-in. Empty documents are
// skipped.
PerplexityReport document_perplexities(const SampleSet& samples, const Corpus& test,
                                       std::size_t threads = 1);

struct FoldInOptions {
  std::size_t sweeps = 20;
  std::size_t threads = 1;
};

// For every grid value: split each test document, fold the held-in part into
// every sample, and score only the held-out positions. n_train larger than
// N_d - 1 is clamped per document and counted in the report.
std::vector<PerplexityReport> perplexity_curve(const SampleSet& samples, const Corpus& train,
                                               const Corpus& test,
                                               std::span<const std::size_t> grid,
                                               std::uint64_t seed,
                                               const FoldInOptions& options = {});

struct AuthorRanking {
  std::size_t rank = 0;  // 1-based position of the true author
  // (author, perplexity), ascending perplexity, ties by author id.
  std::vector<std::pair<AuthorId, double>> ranking;
};

// Scores the document against every author as its sole author.
// Requires the Author or AuthorTopic kind.
AuthorRanking rank_authors_for_doc(const SampleSet& samples, std::span<const WordId> tokens,
                                   AuthorId true_author);

}  // namespace atm
