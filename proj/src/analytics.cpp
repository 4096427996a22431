#include "atm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace atm {
namespace {

constexpr double kSumTolerance = 1e-9;

void check_topic(std::size_t topic, std::size_t topics) {
  if (topic >= topics) {
    throw Error(Errc::TopicOutOfRange, "topic " + std::to_string(topic) + " out of range (T=" +
                                           std::to_string(topics) + ")");
  }
}

void require_author_topic(const ModelConfig& config, const char* what) {
  if (config.kind != ModelKind::AuthorTopic) {
    throw Error(Errc::WrongModelKind,
                std::string(what) + " needs an author-topic model, got " +
                    std::string(to_string(config.kind)));
  }
}

void check_distribution(std::span<const double> p) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(Errc::NotADistribution, "negative or NaN probability");
    sum += v;
  }
  if (p.empty() || std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(Errc::NotADistribution, "probabilities sum to " + std::to_string(sum));
  }
}

std::vector<RankedEntry> top_n(std::span<const double> values, std::size_t n) {
  std::vector<RankedEntry> all;
  all.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    all.push_back({static_cast<std::uint32_t>(i), values[i]});
  }
  n = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [](const RankedEntry& a, const RankedEntry& b) {
                      return a.probability != b.probability ? a.probability > b.probability
                                                            : a.id < b.id;
                    });
  all.resize(n);
  return all;
}

}  // namespace

std::vector<RankedEntry> top_words(const Matrix<double>& phi, std::size_t topic, std::size_t n) {
  check_topic(topic, phi.cols());
  return top_n(phi.column(topic), n);
}

std::vector<double> author_given_topic(const Sample& sample, std::size_t topic) {
  require_author_topic(sample.config(), "top authors");
  check_topic(topic, sample.config().topics);
  const auto& at = sample.counts().author_topic;
  const std::size_t A = at.rows();
  std::vector<double> p(A, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < A; ++k) total += at(k, topic);
  for (std::size_t k = 0; k < A; ++k) {
    p[k] = total > 0 ? at(k, topic) / total : 1.0 / static_cast<double>(A);
  }
  return p;
}

std::vector<RankedEntry> top_authors(const Sample& sample, std::size_t topic, std::size_t n) {
  return top_n(author_given_topic(sample, topic), n);
}

TopicSummary summarize_topic(const Sample& sample, const Vocabulary& vocab,
                             const AuthorRegistry& registry, std::size_t topic, std::size_t n) {
  const auto& config = sample.config();
  if (!config.has_topics()) {
    throw Error(Errc::WrongModelKind, "the author model has no topics");
  }
  TopicSummary s;
  s.topic = topic;
  for (const auto& e : top_words(sample.estimates().phi, topic, n)) {
    s.words.push_back({vocab.name(e.id), e.probability});
  }
  if (config.kind == ModelKind::AuthorTopic) {
    for (const auto& e : top_authors(sample, topic, n)) {
      s.authors.push_back({registry.name(e.id), e.probability});
    }
  }
  return s;
}

void write_topic_block(std::ostream& out, const TopicSummary& summary, int precision) {
  out << "TOPIC " << summary.topic << '\n' << std::fixed << std::setprecision(precision);
  out << "WORD\tPROB.\n";
  for (const auto& e : summary.words) out << e.name << '\t' << e.probability << '\n';
  if (!summary.authors.empty()) {
    out << "\nAUTHOR\tPROB.\n";
    for (const auto& e : summary.authors) out << e.name << '\t' << e.probability << '\n';
  }
}

double symmetric_kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(Errc::NotADistribution, "distributions differ in length");
  check_distribution(p);
  check_distribution(q);
  double d = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t] == 0.0 || q[t] == 0.0) {
      throw Error(Errc::ZeroComponent, "zero probability at component " + std::to_string(t));
    }
    const double log_ratio = std::log(p[t] / q[t]);
    d += (p[t] - q[t]) * log_ratio;
  }
  return d;
}

double entropy(std::span<const double> p) {
  check_distribution(p);
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

std::vector<AuthorPairDistance> author_distance_table(const SampleSet& samples,
                                                      std::size_t min_papers, const Corpus& corpus) {
  require_author_topic(samples.config(), "author distances");
  if (corpus.num_authors() != samples.dims().authors) {
    throw Error(Errc::CorpusMismatch, "author registry differs from the model");
  }
  const auto papers = papers_per_author(corpus);
  std::vector<AuthorId> eligible;
  for (std::size_t a = 0; a < papers.size(); ++a) {
    if (papers[a] > min_papers) eligible.push_back(static_cast<AuthorId>(a));
  }

  std::vector<AuthorPairDistance> table;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      table.push_back({eligible[i], eligible[j], 0.0, 0, papers[eligible[i]], papers[eligible[j]]});
    }
  }
  if (table.empty()) return table;

  for (const auto& doc : corpus.documents()) {
    for (auto& row : table) {
      if (std::binary_search(doc.authors.begin(), doc.authors.end(), row.first) &&
          std::binary_search(doc.authors.begin(), doc.authors.end(), row.second)) {
        ++row.n_common;
      }
    }
  }

  const double S = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    const auto& theta = s.estimates().theta_author;
    for (auto& row : table) row.value += symmetric_kl(theta.row(row.first), theta.row(row.second)) / S;
  }
  std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  return table;
}

double author_entropy(const SampleSet& samples, AuthorId author) {
  require_author_topic(samples.config(), "author entropy");
  if (author >= samples.dims().authors) {
    throw Error(Errc::UnknownAuthor, "author id " + std::to_string(author) + " unknown");
  }
  double h = 0.0;
  for (const auto& s : samples) h += entropy(s.estimates().theta_author.row(author));
  return h / static_cast<double>(samples.size());
}

std::vector<AuthorEntropy> author_entropy_table(const SampleSet& samples, const Corpus& corpus) {
  require_author_topic(samples.config(), "author entropy");
  if (corpus.num_authors() != samples.dims().authors) {
    throw Error(Errc::CorpusMismatch, "author registry differs from the model");
  }
  const auto papers = papers_per_author(corpus);
  std::vector<AuthorEntropy> table;
  for (std::size_t a = 0; a < papers.size(); ++a) {
    const auto id = static_cast<AuthorId>(a);
    table.push_back({id, author_entropy(samples, id), papers[a]});
  }
  std::sort(table.begin(), table.end(), [](const auto& x, const auto& y) {
    return x.value != y.value ? x.value > y.value : x.author < y.author;
  });
  return table;
}

}  // namespace atm
