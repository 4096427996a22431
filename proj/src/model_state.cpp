#include "atm/model_state.hpp"

#include <algorithm>

#include "atm/rng.hpp"

namespace atm {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Lda: return "lda";
    case ModelKind::Author: return "author";
    case ModelKind::AuthorTopic: return "at";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "lda") return ModelKind::Lda;
  if (text == "author") return ModelKind::Author;
  if (text == "at") return ModelKind::AuthorTopic;
  throw Error(Errc::InvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

Hyperparameters default_hyperparameters(std::size_t topics) {
  if (topics == 0) throw Error(Errc::InvalidArgument, "topic count must be at least 1");
  return {50.0 / static_cast<double>(topics), 0.01};
}

void ModelConfig::check() const {
  if (has_topics() && topics == 0) {
    throw Error(Errc::InvalidArgument, "topic count must be at least 1");
  }
  if (!(hyper.beta > 0.0)) throw Error(Errc::InvalidArgument, "beta must be positive");
  if (has_topics() && !(hyper.alpha > 0.0)) {
    throw Error(Errc::InvalidArgument, "alpha must be positive");
  }
}

Dimensions dimensions_of(const Corpus& corpus, const ModelConfig& config) {
  return {corpus.num_words(), config.has_topics() ? config.topics : 0, corpus.num_authors(),
          corpus.num_documents()};
}

AssignmentState::AssignmentState(const Corpus& corpus, bool with_topics, bool with_authors)
    : with_topics_(with_topics), with_authors_(with_authors) {
  offsets_.reserve(corpus.num_documents() + 1);
  offsets_.push_back(0);
  for (const auto& doc : corpus.documents()) offsets_.push_back(offsets_.back() + doc.size());
  if (with_topics) topics_.assign(offsets_.back(), 0);
  if (with_authors) authors_.assign(offsets_.back(), 0);
}

CountTables CountTables::zeros(ModelKind kind, const Dimensions& dims) {
  CountTables t;
  if (kind != ModelKind::Author) {
    t.word_topic = Matrix<Count>(dims.words, dims.topics);
    t.topic_totals.assign(dims.topics, 0);
  }
  if (kind == ModelKind::Lda) {
    t.doc_topic = Matrix<Count>(dims.docs, dims.topics);
    t.doc_totals.assign(dims.docs, 0);
  }
  if (kind == ModelKind::AuthorTopic) {
    t.author_topic = Matrix<Count>(dims.authors, dims.topics);
    t.author_topic_totals.assign(dims.authors, 0);
  }
  if (kind == ModelKind::Author) {
    t.word_author = Matrix<Count>(dims.words, dims.authors);
    t.author_word_totals.assign(dims.authors, 0);
  }
  return t;
}

SamplerState init_assignments(const Corpus& corpus, const ModelConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return init_assignments(corpus, config, seed, rng);
}

SamplerState init_assignments(const Corpus& corpus, const ModelConfig& config, std::uint64_t seed,
                              Rng& rng) {
  config.check();
  if (corpus.total_tokens() == 0) throw Error(Errc::EmptyCorpus, "corpus has no tokens");

  SamplerState state;
  state.config = config;
  state.dims = dimensions_of(corpus, config);
  state.assignments = AssignmentState(corpus, config.has_topics(), config.has_authors());
  state.counts = CountTables::zeros(config.kind, state.dims);
  state.seed = seed;

  auto& asg = state.assignments;
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    const auto& doc = corpus.document(d);
    for (std::size_t p = 0; p < doc.size(); ++p) {
      TopicId z = 0;
      AuthorId x = 0;
      if (config.has_topics()) {
        z = static_cast<TopicId>(rng.uniform_index(config.topics));
        asg.topic(d, p) = z;
      }
      if (config.has_authors()) {
        x = doc.authors[rng.uniform_index(doc.authors.size())];
        asg.author(d, p) = x;
      }
      state.counts.apply(config.kind, doc.tokens[p], d, z, x, +1);
    }
  }
  return state;
}

CountTables rebuild_counts(const Corpus& corpus, const ModelConfig& config,
                           const AssignmentState& assignments) {
  const Dimensions dims = dimensions_of(corpus, config);
  if (assignments.num_documents() != corpus.num_documents() ||
      assignments.has_topics() != config.has_topics() ||
      assignments.has_authors() != config.has_authors()) {
    throw Error(Errc::ShapeMismatch, "assignments do not match the corpus and model kind");
  }
  CountTables counts = CountTables::zeros(config.kind, dims);
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    const auto& doc = corpus.document(d);
    if (assignments.doc_size(d) != doc.size()) {
      throw Error(Errc::ShapeMismatch, "document " + std::to_string(d) + " length differs");
    }
    for (std::size_t p = 0; p < doc.size(); ++p) {
      TopicId z = config.has_topics() ? assignments.topic(d, p) : 0;
      AuthorId x = config.has_authors() ? assignments.author(d, p) : 0;
      if ((config.has_topics() && z >= dims.topics) || (config.has_authors() && x >= dims.authors)) {
        throw Error(Errc::ShapeMismatch, "assignment id out of range");
      }
      counts.apply(config.kind, doc.tokens[p], d, z, x, +1);
    }
  }
  return counts;
}

SamplerState make_state(const Corpus& corpus, const ModelConfig& config,
                        AssignmentState assignments, std::uint64_t iteration, std::uint64_t seed) {
  config.check();
  SamplerState state;
  state.config = config;
  state.dims = dimensions_of(corpus, config);
  state.counts = rebuild_counts(corpus, config, assignments);
  state.assignments = std::move(assignments);
  state.iteration = iteration;
  state.seed = seed;
  return state;
}

Matrix<double> phi_word_topic(const CountTables& counts, double beta) {
  const auto& c = counts.word_topic;
  Matrix<double> phi(c.rows(), c.cols());
  const double vbeta = static_cast<double>(c.rows()) * beta;
  for (std::size_t m = 0; m < c.rows(); ++m) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      phi(m, j) = (c(m, j) + beta) / (counts.topic_totals[j] + vbeta);
    }
  }
  return phi;
}

Matrix<double> theta_doc_topic(const CountTables& counts, double alpha) {
  const auto& c = counts.doc_topic;
  Matrix<double> theta(c.rows(), c.cols());
  const double talpha = static_cast<double>(c.cols()) * alpha;
  for (std::size_t d = 0; d < c.rows(); ++d) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      theta(d, j) = (c(d, j) + alpha) / (counts.doc_totals[d] + talpha);
    }
  }
  return theta;
}

Matrix<double> theta_author_topic(const CountTables& counts, double alpha) {
  const auto& c = counts.author_topic;
  Matrix<double> theta(c.rows(), c.cols());
  const double talpha = static_cast<double>(c.cols()) * alpha;
  for (std::size_t k = 0; k < c.rows(); ++k) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      theta(k, j) = (c(k, j) + alpha) / (counts.author_topic_totals[k] + talpha);
    }
  }
  return theta;
}

Matrix<double> phi_word_author(const CountTables& counts, double beta) {
  const auto& c = counts.word_author;
  Matrix<double> phi(c.rows(), c.cols());
  const double vbeta = static_cast<double>(c.rows()) * beta;
  for (std::size_t m = 0; m < c.rows(); ++m) {
    for (std::size_t k = 0; k < c.cols(); ++k) {
      phi(m, k) = (c(m, k) + beta) / (counts.author_word_totals[k] + vbeta);
    }
  }
  return phi;
}

EstimateMatrices estimate(const ModelConfig& config, const CountTables& counts) {
  EstimateMatrices e;
  const double alpha = config.hyper.alpha;
  const double beta = config.hyper.beta;
  switch (config.kind) {
    case ModelKind::Lda:
      e.phi = phi_word_topic(counts, beta);
      e.theta_doc = theta_doc_topic(counts, alpha);
      break;
    case ModelKind::Author:
      e.phi_author = phi_word_author(counts, beta);
      break;
    case ModelKind::AuthorTopic:
      e.phi = phi_word_topic(counts, beta);
      e.theta_author = theta_author_topic(counts, alpha);
      break;
  }
  return e;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ShapeMismatch: return "ShapeMismatch";
    case ViolationKind::MissingAssignments: return "MissingAssignments";
    case ViolationKind::TopicOutOfRange: return "TopicOutOfRange";
    case ViolationKind::AuthorNotOnDocument: return "AuthorNotOnDocument";
    case ViolationKind::NegativeCount: return "NegativeCount";
    case ViolationKind::CountMismatch: return "CountMismatch";
  }
  return "?";
}

namespace {

void check_table(std::vector<Violation>& out, std::string_view name, const Matrix<Count>& have,
                 const std::vector<Count>& have_totals, const Matrix<Count>& want,
                 const std::vector<Count>& want_totals) {
  if (have.rows() != want.rows() || have.cols() != want.cols() ||
      have_totals.size() != want_totals.size()) {
    out.push_back({ViolationKind::CountMismatch, std::string(name) + ": table shape differs"});
    return;
  }
  for (std::size_t r = 0; r < have.rows(); ++r) {
    for (std::size_t c = 0; c < have.cols(); ++c) {
      if (have(r, c) != want(r, c)) {
        out.push_back({ViolationKind::CountMismatch,
                       std::string(name) + "[" + std::to_string(r) + "][" + std::to_string(c) +
                           "] = " + std::to_string(have(r, c)) + ", recount " +
                           std::to_string(want(r, c))});
        return;
      }
    }
  }
  for (std::size_t i = 0; i < have_totals.size(); ++i) {
    if (have_totals[i] != want_totals[i]) {
      out.push_back({ViolationKind::CountMismatch,
                     std::string(name) + " cached total " + std::to_string(i) + " = " +
                         std::to_string(have_totals[i]) + ", recount " +
                         std::to_string(want_totals[i])});
      return;
    }
  }
}

void check_nonnegative(std::vector<Violation>& out, std::string_view name, const Matrix<Count>& m) {
  auto data = m.data();
  auto it = std::find_if(data.begin(), data.end(), [](Count c) { return c < 0; });
  if (it != data.end()) {
    out.push_back({ViolationKind::NegativeCount, std::string(name) + " has a negative entry"});
  }
}

}  // namespace

std::vector<Violation> validate(const SamplerState& state, const Corpus& corpus) {
  std::vector<Violation> out;
  const auto& config = state.config;
  const auto& asg = state.assignments;

  if (state.dims != dimensions_of(corpus, config)) {
    out.push_back({ViolationKind::ShapeMismatch, "state dimensions differ from the corpus"});
    return out;
  }
  if (asg.num_documents() != corpus.num_documents()) {
    out.push_back({ViolationKind::ShapeMismatch, "document count differs from the corpus"});
    return out;
  }
  if (asg.has_topics() != config.has_topics() || asg.has_authors() != config.has_authors()) {
    out.push_back({ViolationKind::MissingAssignments, "assignments do not match the model kind"});
    return out;
  }
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    if (asg.doc_size(d) != corpus.document(d).size()) {
      out.push_back({ViolationKind::ShapeMismatch,
                     "document " + std::to_string(d) + " length differs from the corpus"});
      return out;
    }
  }

  bool ranges_ok = true;
  for (std::size_t d = 0; d < corpus.num_documents(); ++d) {
    const auto& doc = corpus.document(d);
    for (std::size_t p = 0; p < doc.size(); ++p) {
      if (config.has_topics() && asg.topic(d, p) >= state.dims.topics) {
        out.push_back({ViolationKind::TopicOutOfRange, "token (" + std::to_string(d) + ", " +
                                                           std::to_string(p) + ") topic " +
                                                           std::to_string(asg.topic(d, p))});
        ranges_ok = false;
      }
      if (config.has_authors() &&
          !std::binary_search(doc.authors.begin(), doc.authors.end(), asg.author(d, p))) {
        out.push_back({ViolationKind::AuthorNotOnDocument,
                       "token (" + std::to_string(d) + ", " + std::to_string(p) + ") author " +
                           std::to_string(asg.author(d, p))});
        ranges_ok = false;
      }
    }
  }
  if (!ranges_ok) return out;

  const auto& c = state.counts;
  check_nonnegative(out, "word_topic", c.word_topic);
  check_nonnegative(out, "doc_topic", c.doc_topic);
  check_nonnegative(out, "author_topic", c.author_topic);
  check_nonnegative(out, "word_author", c.word_author);

  const CountTables want = rebuild_counts(corpus, config, asg);
  check_table(out, "word_topic", c.word_topic, c.topic_totals, want.word_topic, want.topic_totals);
  check_table(out, "doc_topic", c.doc_topic, c.doc_totals, want.doc_topic, want.doc_totals);
  check_table(out, "author_topic", c.author_topic, c.author_topic_totals, want.author_topic,
              want.author_topic_totals);
  check_table(out, "word_author", c.word_author, c.author_word_totals, want.word_author,
              want.author_word_totals);
  return out;
}

}  // namespace atm
