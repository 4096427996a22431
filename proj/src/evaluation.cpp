#include "atm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "atm/rng.hpp"
#include "gibbs_kernel.hpp"

namespace atm {
namespace {

double log_mean_exp(std::span<const double> logs) {
  const double hi = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - hi);
  return hi + std::log(acc / static_cast<double>(logs.size()));
}

void check_authors(std::span<const AuthorId> authors, std::size_t num_authors) {
  if (authors.empty()) throw Error(Errc::EmptyAuthorSet, "document has no authors");
  for (AuthorId a : authors) {
    if (a >= num_authors) {
      throw Error(Errc::UnknownAuthor, "author id " + std::to_string(a) + " unknown to the model");
    }
  }
}

void check_tokens(std::span<const WordId> tokens, std::size_t num_words) {
  for (WordId w : tokens) {
    if (w >= num_words) {
      throw Error(Errc::TokenIdOutOfRange, "word id " + std::to_string(w) + " unknown to the model");
    }
  }
}

void check_corpus(const SampleSet& samples, const Corpus& corpus) {
  if (corpus.num_words() != samples.dims().words || corpus.num_authors() != samples.dims().authors) {
    throw Error(Errc::CorpusMismatch, "corpus vocabulary or author registry differs from the model");
  }
}

double summarize(PerplexityReport& report) {
  double sum = 0.0;
  for (const auto& d : report.docs) sum += d.perplexity;
  report.mean = report.docs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : sum / static_cast<double>(report.docs.size());
  return report.mean;
}

}  // namespace

WordPredictor::WordPredictor(const ModelConfig& config, const CountTables& counts,
                             std::size_t num_words, std::optional<std::size_t> doc_row,
                             std::span<const AuthorId> authors)
    : config_(&config), counts_(&counts), beta_(config.hyper.beta) {
  const double vbeta = static_cast<double>(num_words) * beta_;
  const double alpha = config.hyper.alpha;
  const std::size_t T = config.topics;
  const double talpha = static_cast<double>(T) * alpha;

  switch (config.kind) {
    case ModelKind::Lda:
      mixture_.assign(T, 1.0 / static_cast<double>(T));
      if (doc_row) {
        for (std::size_t j = 0; j < T; ++j) {
          mixture_[j] = (counts.doc_topic(*doc_row, j) + alpha) / (counts.doc_totals[*doc_row] + talpha);
        }
      }
      break;
    case ModelKind::AuthorTopic: {
      mixture_.assign(T, 0.0);
      const double share = 1.0 / static_cast<double>(authors.size());
      for (AuthorId k : authors) {
        const double denom = counts.author_topic_totals[k] + talpha;
        for (std::size_t j = 0; j < T; ++j) {
          mixture_[j] += share * (counts.author_topic(k, j) + alpha) / denom;
        }
      }
      break;
    }
    case ModelKind::Author:
      authors_.assign(authors.begin(), authors.end());
      mixture_.assign(authors.size(), 1.0 / static_cast<double>(authors.size()));
      for (AuthorId k : authors) inv_total_.push_back(1.0 / (counts.author_word_totals[k] + vbeta));
      return;
  }
  inv_total_.resize(T);
  for (std::size_t j = 0; j < T; ++j) inv_total_[j] = 1.0 / (counts.topic_totals[j] + vbeta);
}

double WordPredictor::operator()(WordId word) const {
  double p = 0.0;
  if (config_->kind == ModelKind::Author) {
    for (std::size_t i = 0; i < authors_.size(); ++i) {
      p += mixture_[i] * (counts_->word_author(word, authors_[i]) + beta_) * inv_total_[i];
    }
    return p;
  }
  const auto row = counts_->word_topic.row(word);
  for (std::size_t j = 0; j < mixture_.size(); ++j) {
    p += mixture_[j] * (row[j] + beta_) * inv_total_[j];
  }
  return p;
}

double doc_log_likelihood(const SampleSet& samples, std::span<const WordId> tokens,
                          std::span<const AuthorId> authors) {
  const auto& dims = samples.dims();
  check_authors(authors, dims.authors);
  check_tokens(tokens, dims.words);

  std::vector<double> per_sample;
  per_sample.reserve(samples.size());
  for (const auto& s : samples) {
    WordPredictor predict(s.config(), s.counts(), dims.words, std::nullopt, authors);
    double ll = 0.0;
    for (WordId w : tokens) ll += std::log(predict(w));
    per_sample.push_back(ll);
  }
  return log_mean_exp(per_sample);
}

double perplexity(const SampleSet& samples, std::span<const WordId> tokens,
                  std::span<const AuthorId> authors) {
  if (tokens.empty()) throw Error(Errc::EmptyDocument, "perplexity of an empty document");
  return std::exp(-doc_log_likelihood(samples, tokens, authors) /
                  static_cast<double>(tokens.size()));
}

WordPredictor FoldedSample::predictor() const {
  std::optional<std::size_t> row;
  if (config.kind == ModelKind::Lda) row = doc_row;
  return WordPredictor(config, counts, dims.words, row, authors);
}

EstimateMatrices FoldedSample::estimates() const { return estimate(config, counts); }

FoldedSample foldin_update(const Sample& sample, const Corpus& train, const Document& doc,
                           std::span<const std::size_t> heldin, std::size_t sweeps,
                           std::uint64_t seed) {
  const auto& dims = sample.dims();
  if (train.num_words() != dims.words || train.num_authors() != dims.authors ||
      train.num_documents() != dims.docs) {
    throw Error(Errc::CorpusMismatch, "training corpus does not match the sample");
  }
  check_authors(doc.authors, dims.authors);
  check_tokens(doc.tokens, dims.words);

  FoldedSample f;
  f.config = sample.config();
  f.dims = dims;
  f.counts = sample.counts();
  f.authors = doc.authors;
  if (f.config.kind == ModelKind::Lda) {
    f.doc_row = dims.docs;
    f.counts.doc_topic.append_row();
    f.counts.doc_totals.push_back(0);
    ++f.dims.docs;
  }

  const auto& cfg = f.config;
  Rng rng(seed);
  for (std::size_t pos : heldin) {
    if (pos >= doc.size()) throw Error(Errc::InvalidArgument, "held-in position out of range");
    const WordId w = doc.tokens[pos];
    TopicId z = 0;
    AuthorId x = 0;
    if (cfg.has_topics()) z = static_cast<TopicId>(rng.uniform_index(cfg.topics));
    if (cfg.has_authors()) x = doc.authors[rng.uniform_index(doc.authors.size())];
    f.counts.apply(cfg.kind, w, f.doc_row, z, x, +1);
    f.words.push_back(w);
    f.topics.push_back(z);
    f.token_authors.push_back(x);
  }

  std::vector<double> scratch;
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < f.words.size(); ++i) {
      const detail::TokenContext ctx{f.words[i], f.doc_row, f.authors};
      detail::resample_token(f.counts, cfg, dims.words, ctx, f.topics[i], f.token_authors[i], rng,
                             scratch);
    }
  }
  if (!cfg.has_topics()) f.topics.clear();
  if (!cfg.has_authors()) f.token_authors.clear();
  return f;
}

PerplexityReport document_perplexities(const SampleSet& samples, const Corpus& test,
                                       std::size_t threads) {
  check_corpus(samples, test);
  PerplexityReport report;
  report.samples = samples.size();
  std::vector<std::size_t> nonempty;
  for (std::size_t d = 0; d < test.num_documents(); ++d) {
    if (test.document(d).size() > 0) nonempty.push_back(d);
  }
  report.docs.resize(nonempty.size());
  parallel_for(nonempty.size(), threads, [&](std::size_t i) {
    const auto& doc = test.document(nonempty[i]);
    const double ll = doc_log_likelihood(samples, doc.tokens, doc.authors);
    report.docs[i] = {nonempty[i], 0, doc.size(), ll,
                      std::exp(-ll / static_cast<double>(doc.size()))};
  });
  summarize(report);
  return report;
}

std::vector<PerplexityReport> perplexity_curve(const SampleSet& samples, const Corpus& train,
                                               const Corpus& test,
                                               std::span<const std::size_t> grid,
                                               std::uint64_t seed, const FoldInOptions& options) {
  check_corpus(samples, test);
  std::vector<std::size_t> nonempty;
  for (std::size_t d = 0; d < test.num_documents(); ++d) {
    if (test.document(d).size() > 0) nonempty.push_back(d);
  }

  std::vector<PerplexityReport> reports;
  for (std::size_t n_train : grid) {
    PerplexityReport report;
    report.n_train = n_train;
    report.samples = samples.size();
    report.docs.resize(nonempty.size());
    std::vector<char> clamped(nonempty.size(), 0);

    parallel_for(nonempty.size(), options.threads, [&](std::size_t i) {
      const std::size_t d = nonempty[i];
      const auto& doc = test.document(d);
      const std::size_t n_eff = std::min(n_train, doc.size() - 1);
      clamped[i] = n_eff < n_train;
      const std::uint64_t split_seed = derive_seed(derive_seed(seed, d), n_train);
      const auto split = split_document_foldin(doc, n_eff, split_seed);

      std::vector<double> per_sample;
      per_sample.reserve(samples.size());
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto folded = foldin_update(samples[s], train, doc, split.heldin, options.sweeps,
                                          derive_seed(split_seed, s));
        const auto predict = folded.predictor();
        double ll = 0.0;
        for (std::size_t pos : split.heldout) ll += std::log(predict(doc.tokens[pos]));
        per_sample.push_back(ll);
      }
      const double ll = log_mean_exp(per_sample);
      const auto n_out = split.heldout.size();
      report.docs[i] = {d, n_eff, n_out, ll, std::exp(-ll / static_cast<double>(n_out))};
    });

    report.clamped = static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), 1));
    summarize(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

AuthorRanking rank_authors_for_doc(const SampleSet& samples, std::span<const WordId> tokens,
                                   AuthorId true_author) {
  const auto& cfg = samples.config();
  const auto& dims = samples.dims();
  if (cfg.kind == ModelKind::Lda) {
    throw Error(Errc::WrongModelKind, "author ranking needs an author or author-topic model");
  }
  if (true_author >= dims.authors) {
    throw Error(Errc::UnknownAuthor, "author id " + std::to_string(true_author) + " unknown");
  }
  if (tokens.empty()) throw Error(Errc::EmptyDocument, "cannot rank authors for an empty document");
  check_tokens(tokens, dims.words);

  std::map<WordId, std::size_t> bag;
  for (WordId w : tokens) ++bag[w];

  const std::size_t A = dims.authors;
  const std::size_t S = samples.size();
  // ll[a * S + s]: log-likelihood of the document under sample s with author a.
  std::vector<double> ll(A * S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const auto& est = samples[s].estimates();
    for (const auto& [w, count] : bag) {
      const double n = static_cast<double>(count);
      if (cfg.kind == ModelKind::Author) {
        const auto row = est.phi_author.row(w);
        for (std::size_t a = 0; a < A; ++a) ll[a * S + s] += n * std::log(row[a]);
      } else {
        const auto phi_w = est.phi.row(w);
        for (std::size_t a = 0; a < A; ++a) {
          const auto theta = est.theta_author.row(a);
          double p = 0.0;
          for (std::size_t j = 0; j < phi_w.size(); ++j) p += theta[j] * phi_w[j];
          ll[a * S + s] += n * std::log(p);
        }
      }
    }
  }

  AuthorRanking out;
  out.ranking.reserve(A);
  const double N = static_cast<double>(tokens.size());
  for (std::size_t a = 0; a < A; ++a) {
    const double l = log_mean_exp(std::span<const double>(ll).subspan(a * S, S));
    out.ranking.emplace_back(static_cast<AuthorId>(a), std::exp(-l / N));
  }
  std::sort(out.ranking.begin(), out.ranking.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second < y.second : x.first < y.first;
  });
  for (std::size_t i = 0; i < out.ranking.size(); ++i) {
    if (out.ranking[i].first == true_author) out.rank = i + 1;
  }
  return out;
}

}  // namespace atm
