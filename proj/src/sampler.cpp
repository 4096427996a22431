#include "atm/sampler.hpp"

#include <numeric>

#include "atm/rng.hpp"
#include "gibbs_kernel.hpp"

namespace atm {
namespace {

detail::TokenContext context_of(const Corpus& corpus, const TokenRef& token) {
  const auto& doc = corpus.document(token.doc);
  if (token.pos >= doc.size() || doc.tokens[token.pos] != token.word) {
    throw Error(Errc::InvalidArgument, "token reference does not match the corpus");
  }
  return {token.word, token.doc, doc.authors};
}

Count sum(const std::vector<Count>& v) { return std::accumulate(v.begin(), v.end(), Count{0}); }

void require_decremented(const SamplerState& state, const Corpus& corpus, const TokenRef& token) {
  const auto& c = state.counts;
  bool present = false;
  switch (state.config.kind) {
    case ModelKind::Lda:
      present = c.doc_totals[token.doc] == static_cast<Count>(corpus.document(token.doc).size());
      break;
    case ModelKind::Author:
      present = sum(c.author_word_totals) == static_cast<Count>(corpus.total_tokens());
      break;
    case ModelKind::AuthorTopic:
      present = sum(c.topic_totals) == static_cast<Count>(corpus.total_tokens());
      break;
  }
  if (present) {
    throw Error(Errc::NotDecremented, "token (" + std::to_string(token.doc) + ", " +
                                          std::to_string(token.pos) + ") is still counted");
  }
}

ConditionalWeights conditional_for(ModelKind kind, const SamplerState& state, const Corpus& corpus,
                                   const TokenRef& token) {
  if (state.config.kind != kind) {
    throw Error(Errc::WrongModelKind, "conditional requested for a different model kind");
  }
  const auto ctx = context_of(corpus, token);
  require_decremented(state, corpus, token);
  ConditionalWeights out;
  detail::fill_weights(state.counts, state.config, state.dims.words, ctx, out.weights);
  out.support.reserve(out.weights.size());
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    out.support.push_back(detail::outcome_at(state.config, ctx, i));
  }
  return out;
}

}  // namespace

double ConditionalWeights::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<double> ConditionalWeights::normalized() const {
  const double t = total();
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights[i] / t;
  return p;
}

ConditionalWeights conditional_lda(const SamplerState& state, const Corpus& corpus,
                                   const TokenRef& token) {
  return conditional_for(ModelKind::Lda, state, corpus, token);
}

ConditionalWeights conditional_author(const SamplerState& state, const Corpus& corpus,
                                      const TokenRef& token) {
  return conditional_for(ModelKind::Author, state, corpus, token);
}

ConditionalWeights conditional_author_topic(const SamplerState& state, const Corpus& corpus,
                                            const TokenRef& token) {
  return conditional_for(ModelKind::AuthorTopic, state, corpus, token);
}

ConditionalWeights conditional(const SamplerState& state, const Corpus& corpus,
                               const TokenRef& token) {
  return conditional_for(state.config.kind, state, corpus, token);
}

Outcome current_outcome(const SamplerState& state, const TokenRef& token) {
  Outcome o;
  if (state.config.has_topics()) o.topic = state.assignments.topic(token.doc, token.pos);
  if (state.config.has_authors()) o.author = state.assignments.author(token.doc, token.pos);
  return o;
}

void unassign_token(SamplerState& state, const Corpus& corpus, const TokenRef& token) {
  const auto ctx = context_of(corpus, token);
  const Outcome o = current_outcome(state, token);
  state.counts.apply(state.config.kind, ctx.word, token.doc, o.topic, o.author, -1);
}

void assign_token(SamplerState& state, const Corpus& corpus, const TokenRef& token,
                  const Outcome& outcome) {
  const auto ctx = context_of(corpus, token);
  if (state.config.has_topics()) state.assignments.topic(token.doc, token.pos) = outcome.topic;
  if (state.config.has_authors()) state.assignments.author(token.doc, token.pos) = outcome.author;
  state.counts.apply(state.config.kind, ctx.word, token.doc, outcome.topic, outcome.author, +1);
}

void sweep(SamplerState& state, const Corpus& corpus, Rng& rng) {
  const auto& cfg = state.config;
  auto& asg = state.assignments;
  std::vector<double> scratch;
  scratch.reserve(cfg.topics * 4 + 16);

  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    const auto& doc = corpus.document(d);
    for (std::size_t p = 0; p < doc.size(); ++p) {
      const detail::TokenContext ctx{doc.tokens[p], d, doc.authors};
      TopicId z = cfg.has_topics() ? asg.topic(d, p) : 0;
      AuthorId x = cfg.has_authors() ? asg.author(d, p) : 0;
      detail::resample_token(state.counts, cfg, state.dims.words, ctx, z, x, rng, scratch);
      if (cfg.has_topics()) asg.topic(d, p) = z;
      if (cfg.has_authors()) asg.author(d, p) = x;
    }
  }
  ++state.iteration;

#ifndef NDEBUG
  if (auto v = validate(state, corpus); !v.empty()) {
    throw Error(Errc::InvariantViolation, "after sweep: " + v.front().detail);
  }
#endif
}

}  // namespace atm
