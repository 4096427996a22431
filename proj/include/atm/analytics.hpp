#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "atm/chains.hpp"
#include "atm/corpus.hpp"
#include "atm/matrix.hpp"

namespace atm {

struct RankedEntry {
  std::uint32_t id = 0;
  double probability = 0.0;

  bool operator==(const RankedEntry&) const = default;
};

// The n largest entries of column `topic` of a V x T matrix, descending,
// ties by word id. n is clamped to V. Throws Error(TopicOutOfRange).
std::vector<RankedEntry> top_words(const Matrix<double>& phi, std::size_t topic, std::size_t n);

// p(author | topic) from the author-topic counts, column-normalized; an
// empty column gives every author 1/A. AuthorTopic kind only.
// Throws Error(TopicOutOfRange), Error(WrongModelKind).
std::vector<double> author_given_topic(const Sample& sample, std::size_t topic);
std::vector<RankedEntry> top_authors(const Sample& sample, std::size_t topic, std::size_t n);

struct NamedEntry {
  std::string name;
  double probability = 0.0;
};

struct TopicSummary {
  std::size_t topic = 0;
  std::vector<NamedEntry> words;
  std::vector<NamedEntry> authors;  // empty for models without authors
};

// Words come from phi (Lda, AuthorTopic); authors only for AuthorTopic.
// The Author kind has no topics and is rejected with Error(WrongModelKind).
TopicSummary summarize_topic(const Sample& sample, const Vocabulary& vocab,
                             const AuthorRegistry& registry, std::size_t topic, std::size_t n);

// TOPIC <j>
// WORD<TAB>PROB.
// <word><TAB><p>
// ...
// (blank line)
// AUTHOR<TAB>PROB.
// <author><TAB><p>
void write_topic_block(std::ostream& out, const TopicSummary& summary, int precision = 4);

// Both inputs must sum to 1 within 1e-9 and have equal length; zero entries
// are rejected. Throws Error(NotADistribution), Error(ZeroComponent).
double symmetric_kl(std::span<const double> p, std::span<const double> q);

// Natural-log entropy. Throws Error(NotADistribution).
double entropy(std::span<const double> p);

struct AuthorPairDistance {
  AuthorId first = 0;
  AuthorId second = 0;
  double value = 0.0;
  std::size_t n_common = 0;
  std::size_t n_first = 0;
  std::size_t n_second = 0;
};

// Pairs of authors with more than `min_papers` documents each, first < second,
// sKL of their topic distributions averaged over samples. Sorted by value,
// then by ids. AuthorTopic kind only.
std::vector<AuthorPairDistance> author_distance_table(const SampleSet& samples,
                                                      std::size_t min_papers, const Corpus& corpus);

struct AuthorEntropy {
  AuthorId author = 0;
  double value = 0.0;
  std::size_t papers = 0;
};

// Per-author topic entropy averaged over samples, descending, ties by id.
// AuthorTopic kind only.
double author_entropy(const SampleSet& samples, AuthorId author);
std::vector<AuthorEntropy> author_entropy_table(const SampleSet& samples, const Corpus& corpus);

}  // namespace atm
