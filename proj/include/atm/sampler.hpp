#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "atm/corpus.hpp"
#include "atm/model_state.hpp"

namespace atm {

class Rng;

inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

struct TokenRef {
  std::size_t doc = 0;
  std::size_t pos = 0;
  WordId word = 0;
};

// Topic and/or author of one token; kNoId for the component a kind lacks.
struct Outcome {
  TopicId topic = kNoId;
  AuthorId author = kNoId;

  bool operator==(const Outcome&) const = default;
};

struct ConditionalWeights {
  // Ascending topic, then ascending author.
  std::vector<Outcome> support;
  // Unnormalized, aligned with support.
  std::vector<double> weights;

  double total() const;
  std::vector<double> normalized() const;
};

// The token's current assignment must already be removed from the counts
// (see unassign_token); otherwise these throw Error(NotDecremented).
ConditionalWeights conditional_lda(const SamplerState& state, const Corpus& corpus,
                                   const TokenRef& token);
ConditionalWeights conditional_author(const SamplerState& state, const Corpus& corpus,
                                      const TokenRef& token);
ConditionalWeights conditional_author_topic(const SamplerState& state, const Corpus& corpus,
                                            const TokenRef& token);
// Dispatches on the state's model kind.
ConditionalWeights conditional(const SamplerState& state, const Corpus& corpus,
                               const TokenRef& token);

Outcome current_outcome(const SamplerState& state, const TokenRef& token);
// Subtract the token's current assignment from the counts.
void unassign_token(SamplerState& state, const Corpus& corpus, const TokenRef& token);
// Record a new assignment for the token and add it to the counts.
void assign_token(SamplerState& state, const Corpus& corpus, const TokenRef& token,
                  const Outcome& outcome);

// One Gibbs sweep over every token, documents then positions ascending. Each
// token consumes exactly one uniform variate.
void sweep(SamplerState& state, const Corpus& corpus, Rng& rng);

}  // namespace atm
