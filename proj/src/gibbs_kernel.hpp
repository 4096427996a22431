#pragma once

// Collapsed Gibbs conditionals shared by training sweeps and fold-in.

#include <span>
#include <vector>

#include "atm/model_state.hpp"
#include "atm/rng.hpp"
#include "atm/sampler.hpp"

namespace atm::detail {

struct TokenContext {
  WordId word;
  std::size_t doc_row;                 // row of doc_topic (Lda only)
  std::span<const AuthorId> authors;   // document authors, ascending
};

// Support size of the conditional for one token.
inline std::size_t support_size(const ModelConfig& cfg, const TokenContext& ctx) {
  switch (cfg.kind) {
    case ModelKind::Lda: return cfg.topics;
    case ModelKind::Author: return ctx.authors.size();
    case ModelKind::AuthorTopic: return cfg.topics * ctx.authors.size();
  }
  return 0;
}

// Canonical order: ascending topic, then ascending author.
inline Outcome outcome_at(const ModelConfig& cfg, const TokenContext& ctx, std::size_t index) {
  switch (cfg.kind) {
    case ModelKind::Lda: return {static_cast<TopicId>(index), kNoId};
    case ModelKind::Author: return {kNoId, ctx.authors[index]};
    case ModelKind::AuthorTopic: {
      const std::size_t na = ctx.authors.size();
      return {static_cast<TopicId>(index / na), ctx.authors[index % na]};
    }
  }
  return {};
}

// Product of the word-given-topic ratio and the topic-given-row ratio. The
// LDA and author-topic samplers share this expression so that with one
// unique author per document they produce bit-identical weights.
inline double topic_pair_weight(Count word_topic, Count topic_total, double vbeta, double beta,
                                Count row_topic, Count row_total, double talpha, double alpha) {
  return ((word_topic + beta) / (topic_total + vbeta)) *
         ((row_topic + alpha) / (row_total + talpha));
}

// Writes unnormalized weights in canonical order into `weights` (resized as
// needed) and returns their sum. The token must already be removed from the
// counts.
inline double fill_weights(const CountTables& c, const ModelConfig& cfg, std::size_t num_words,
                           const TokenContext& ctx, std::vector<double>& weights) {
  const double alpha = cfg.hyper.alpha;
  const double beta = cfg.hyper.beta;
  const double vbeta = static_cast<double>(num_words) * beta;
  const double talpha = static_cast<double>(cfg.topics) * alpha;
  weights.resize(support_size(cfg, ctx));
  double total = 0.0;

  switch (cfg.kind) {
    case ModelKind::Lda: {
      const auto wt = c.word_topic.row(ctx.word);
      const auto dt = c.doc_topic.row(ctx.doc_row);
      const Count row_total = c.doc_totals[ctx.doc_row];
      for (std::size_t j = 0; j < cfg.topics; ++j) {
        double w = topic_pair_weight(wt[j], c.topic_totals[j], vbeta, beta, dt[j], row_total,
                                     talpha, alpha);
        weights[j] = w;
        total += w;
      }
      break;
    }
    case ModelKind::Author: {
      const auto wa = c.word_author.row(ctx.word);
      for (std::size_t i = 0; i < ctx.authors.size(); ++i) {
        const AuthorId k = ctx.authors[i];
        double w = (wa[k] + beta) / (c.author_word_totals[k] + vbeta);
        weights[i] = w;
        total += w;
      }
      break;
    }
    case ModelKind::AuthorTopic: {
      const auto wt = c.word_topic.row(ctx.word);
      const std::size_t na = ctx.authors.size();
      for (std::size_t j = 0; j < cfg.topics; ++j) {
        for (std::size_t i = 0; i < na; ++i) {
          const AuthorId k = ctx.authors[i];
          double w = topic_pair_weight(wt[j], c.topic_totals[j], vbeta, beta, c.author_topic(k, j),
                                       c.author_topic_totals[k], talpha, alpha);
          weights[j * na + i] = w;
          total += w;
        }
      }
      break;
    }
  }
  return total;
}

// Inverse CDF: first index whose running sum exceeds u * total.
inline std::size_t draw_index(std::span<const double> weights, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  // Rounding pushed the target to the end: take the last positive weight.
  for (std::size_t i = weights.size(); i > 0; --i) {
    if (weights[i - 1] > 0.0) return i - 1;
  }
  return 0;
}

// Remove, redraw, and re-add one token. `topic` and `author` hold the
// current assignment on entry and the new one on exit.
inline void resample_token(CountTables& c, const ModelConfig& cfg, std::size_t num_words,
                           const TokenContext& ctx, TopicId& topic, AuthorId& author, Rng& rng,
                           std::vector<double>& scratch) {
  c.apply(cfg.kind, ctx.word, ctx.doc_row, topic, author, -1);
  const double total = fill_weights(c, cfg, num_words, ctx, scratch);
  const std::size_t idx = draw_index(scratch, total, rng.uniform01());
  const Outcome o = outcome_at(cfg, ctx, idx);
  if (cfg.has_topics()) topic = o.topic;
  if (cfg.has_authors()) author = o.author;
  c.apply(cfg.kind, ctx.word, ctx.doc_row, topic, author, +1);
}

}  // namespace atm::detail
