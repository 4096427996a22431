#include "commands.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <ostream>

#include "atm/analytics.hpp"
#include "atm/chains.hpp"
#include "atm/corpus.hpp"
#include "atm/evaluation.hpp"
#include "atm/model_dir.hpp"

namespace atm::cli {
namespace fs = std::filesystem;
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  return in;
}

// Prefixes parse errors with the file they came from.
template <class F>
auto parse_file(const std::string& path, F&& parse) {
  auto in = open_input(path);
  try {
    return parse(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

struct Registries {
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const AuthorRegistry> authors;
};

Registries load_registries(const DataOptions& data) {
  Registries r;
  r.vocab = std::make_shared<const Vocabulary>(
      parse_file(data.vocab, [](std::istream& in) { return parse_vocabulary(in); }));
  r.authors = std::make_shared<const AuthorRegistry>(
      parse_file(data.authors, [](std::istream& in) { return parse_author_registry(in); }));
  return r;
}

Corpus load_corpus(const std::string& path, const Registries& r) {
  return parse_file(path, [&](std::istream& in) { return parse_corpus(in, r.vocab, r.authors); });
}

void warn_unused(const Corpus& corpus, std::ostream& err) {
  const auto unused = unused_authors(corpus);
  if (unused.empty()) return;
  err << "warning: " << unused.size() << " author(s) appear in no document:";
  for (std::size_t i = 0; i < unused.size() && i < 10; ++i) {
    err << ' ' << corpus.authors().name(unused[i]);
  }
  if (unused.size() > 10) err << " ...";
  err << '\n';
}

struct Model {
  RunManifest manifest;
  Registries registries;
  std::unique_ptr<Corpus> corpus;  // training corpus
  std::unique_ptr<SampleSet> samples;
};

std::string resolve(const std::string& override_path, const DataFile& recorded, const char* what) {
  if (!override_path.empty()) {
    if (file_digest(override_path) != recorded.digest) {
      throw Error(Errc::CorpusMismatch,
                  std::string(what) + " file " + override_path + " differs from the one used in training");
    }
    return override_path;
  }
  if (file_digest(recorded.path) != recorded.digest) {
    throw Error(Errc::CorpusMismatch,
                std::string(what) + " file " + recorded.path + " changed since training");
  }
  return recorded.path;
}

Model open_model(const std::string& dir, const DataOptions& data) {
  if (dir.empty()) throw UsageError("--model-dir is required");
  Model m;
  m.manifest = load_manifest(dir);
  DataOptions paths;
  paths.vocab = resolve(data.vocab, m.manifest.vocab, "vocabulary");
  paths.authors = resolve(data.authors, m.manifest.authors, "authors");
  paths.corpus = resolve(data.corpus, m.manifest.corpus, "corpus");
  m.registries = load_registries(paths);
  m.corpus = std::make_unique<Corpus>(load_corpus(paths.corpus, m.registries));
  m.samples = std::make_unique<SampleSet>(load_model_dir(dir, m.manifest, *m.corpus));
  return m;
}

std::string absolute_path(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

void set_precision(std::ostream& out, int precision) {
  out << std::fixed << std::setprecision(precision);
}

AuthorId parse_author_ref(const std::string& ref, const AuthorRegistry& registry) {
  AuthorId id = 0;
  auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), id);
  if (ec == std::errc() && ptr == ref.data() + ref.size()) {
    if (id >= registry.size()) {
      throw Error(Errc::UnknownAuthor, "author id " + ref + " out of range");
    }
    return id;
  }
  if (auto found = registry.find(ref)) return *found;
  throw Error(Errc::UnknownAuthor, "unknown author '" + ref + "'");
}

void write_summary_row(std::ostream& out, const PerplexityReport& r) {
  out << r.n_train << "\tmean\t-\t-\t" << r.samples << "\t-\t" << r.mean << '\n';
}

void write_doc_rows(std::ostream& out, const PerplexityReport& r) {
  for (const auto& d : r.docs) {
    out << r.n_train << '\t' << d.doc << '\t' << d.n_train << '\t' << d.n_heldout << '\t'
        << r.samples << '\t' << d.log_likelihood << '\t' << d.perplexity << '\n';
  }
}

}  // namespace

int cmd_train(const TrainOptions& opt, std::ostream&, std::ostream& err) {
  if (opt.out.empty()) throw UsageError("--out is required");
  ModelConfig config;
  try {
    config.kind = parse_model_kind(opt.model);
  } catch (const Error&) {
    throw UsageError("unknown model '" + opt.model + "' (expected lda, author or at)");
  }
  if (config.has_topics()) {
    if (opt.topics == 0) throw UsageError("--topics is required for model " + opt.model);
    config.topics = opt.topics;
    config.hyper = default_hyperparameters(opt.topics);
    if (opt.alpha != "auto") {
      double a = 0;
      auto [ptr, ec] = std::from_chars(opt.alpha.data(), opt.alpha.data() + opt.alpha.size(), a);
      if (ec != std::errc() || ptr != opt.alpha.data() + opt.alpha.size() || !(a > 0)) {
        throw UsageError("--alpha must be 'auto' or a positive number");
      }
      config.hyper.alpha = a;
    }
  } else {
    config.topics = 0;
    config.hyper.alpha = 0.0;
  }
  config.hyper.beta = opt.beta;
  if (opt.chains == 0) throw UsageError("--chains must be at least 1");

  const auto registries = load_registries(opt.data);
  const Corpus corpus = load_corpus(opt.data.corpus, registries);
  warn_unused(corpus, err);

  RunManifest manifest;
  manifest.config = config;
  manifest.iterations = opt.iterations;
  manifest.base_seed = opt.seed;
  manifest.corpus = {absolute_path(opt.data.corpus), file_digest(opt.data.corpus)};
  manifest.vocab = {absolute_path(opt.data.vocab), file_digest(opt.data.vocab)};
  manifest.authors = {absolute_path(opt.data.authors), file_digest(opt.data.authors)};
  for (std::size_t c = 0; c < opt.chains; ++c) manifest.chain_seeds.push_back(chain_seed(opt.seed, c));

  err << "training " << to_string(config.kind) << " model: D=" << corpus.num_documents()
      << " V=" << corpus.num_words() << " A=" << corpus.num_authors()
      << " tokens=" << corpus.total_tokens();
  if (config.has_topics()) err << " T=" << config.topics << " alpha=" << config.hyper.alpha;
  err << " beta=" << config.hyper.beta << " chains=" << opt.chains
      << " iterations=" << opt.iterations << '\n';

  std::mutex err_mutex;
  ChainObserver observer;
  if (!opt.quiet) {
    const std::uint64_t every = std::max<std::uint64_t>(1, opt.iterations / 20);
    observer = [&](const ChainProgress& p) {
      if (p.iteration % every != 0 && p.iteration != p.iterations) return;
      std::lock_guard lock(err_mutex);
      err << "chain " << p.chain << " iteration " << p.iteration << '/' << p.iterations << ' '
          << static_cast<std::uint64_t>(p.tokens_per_second) << " tokens/s\n";
    };
  }
  const SampleSet samples =
      run_ensemble(corpus, config, opt.seed, opt.chains, opt.iterations, opt.threads, observer);
  save_model_dir(opt.out, samples, manifest);
  err << "wrote " << samples.size() << " snapshot(s) to " << opt.out << '\n';
  return 0;
}

int cmd_split(const SplitOptions& opt, std::ostream&, std::ostream& err) {
  if (opt.train_out.empty() || opt.test_out.empty()) {
    throw UsageError("--train-out and --test-out are required");
  }
  if (!(opt.test_fraction > 0.0 && opt.test_fraction < 1.0)) {
    throw UsageError("--test-fraction must lie strictly between 0 and 1");
  }
  const auto registries = load_registries(opt.data);
  const Corpus corpus = load_corpus(opt.data.corpus, registries);
  const auto split = split_train_test(corpus, opt.test_fraction, opt.seed);
  for (const auto& [path, part] : {std::pair{&opt.train_out, &split.train},
                                   std::pair{&opt.test_out, &split.test}}) {
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + *path);
    write_corpus(out, *part);
    if (!out) throw Error(Errc::IoError, "failed writing " + *path);
  }
  err << "train " << split.train.num_documents() << " documents, test "
      << split.test.num_documents() << " documents\n";
  if (split.infeasible()) {
    err << "warning: requested " << split.requested_test
        << " test documents; author coverage allowed only " << split.test.num_documents()
        << " (fraction " << split.achieved_fraction << ")\n";
  }
  return 0;
}

int cmd_topics(const TopicsOptions& opt, std::ostream& out, std::ostream&) {
  const Model m = open_model(opt.model_dir, opt.data);
  const auto& config = m.samples->config();
  if (!config.has_topics()) throw Error(Errc::WrongModelKind, "the author model has no topics");
  if (opt.sample >= m.samples->size()) {
    throw UsageError("--sample " + std::to_string(opt.sample) + " out of range (S=" +
                     std::to_string(m.samples->size()) + ")");
  }
  std::vector<std::size_t> topics = opt.topics;
  for (std::size_t j : topics) {
    if (j >= config.topics) {
      throw UsageError("unknown topic " + std::to_string(j) + " (T=" +
                       std::to_string(config.topics) + ")");
    }
  }
  if (topics.empty()) {
    for (std::size_t j = 0; j < config.topics; ++j) topics.push_back(j);
  }
  const Sample& sample = (*m.samples)[opt.sample];
  for (std::size_t i = 0; i < topics.size(); ++i) {
    if (i > 0) out << '\n';
    write_topic_block(out,
                      summarize_topic(sample, *m.registries.vocab, *m.registries.authors,
                                      topics[i], opt.top_n),
                      opt.precision);
  }
  return 0;
}

int cmd_perplexity(const PerplexityOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.test.empty()) throw UsageError("--test is required");
  const Model m = open_model(opt.model_dir, opt.data);
  const Corpus test = load_corpus(opt.test, m.registries);

  set_precision(out, opt.precision);
  out << "n_train_requested\tdoc\tn_train\tn_heldout\tsamples\tlog_likelihood\tperplexity\n";
  if (opt.grid.empty()) {
    const auto report = document_perplexities(*m.samples, test, opt.threads);
    write_doc_rows(out, report);
    write_summary_row(out, report);
    return 0;
  }
  const auto reports = perplexity_curve(*m.samples, *m.corpus, test, opt.grid, opt.seed,
                                        {opt.sweeps, opt.threads});
  for (const auto& r : reports) {
    write_doc_rows(out, r);
    write_summary_row(out, r);
    if (r.clamped > 0) {
      err << "note: n_train=" << r.n_train << " clamped to N_d-1 for " << r.clamped
          << " document(s)\n";
    }
  }
  return 0;
}

int cmd_similar_authors(const SimilarAuthorsOptions& opt, std::ostream& out, std::ostream&) {
  const Model m = open_model(opt.model_dir, opt.data);
  const auto table = author_distance_table(*m.samples, opt.min_papers, *m.corpus);
  const auto& names = *m.registries.authors;
  set_precision(out, opt.precision);
  out << "author_i\tauthor_j\tskl\tn_common\tn_i\tn_j\n";
  for (const auto& r : table) {
    out << names.name(r.first) << '\t' << names.name(r.second) << '\t' << r.value << '\t'
        << r.n_common << '\t' << r.n_first << '\t' << r.n_second << '\n';
  }
  return 0;
}

int cmd_entropy(const EntropyOptions& opt, std::ostream& out, std::ostream&) {
  const Model m = open_model(opt.model_dir, opt.data);
  const auto table = author_entropy_table(*m.samples, *m.corpus);
  set_precision(out, opt.precision);
  out << "author\tentropy\tn\n";
  for (const auto& r : table) {
    out << m.registries.authors->name(r.author) << '\t' << r.value << '\t' << r.papers << '\n';
  }
  return 0;
}

int cmd_rank_authors(const RankAuthorsOptions& opt, std::ostream& out, std::ostream&) {
  if (opt.test.empty()) throw UsageError("--test is required");
  const Model m = open_model(opt.model_dir, opt.data);
  const Corpus test = load_corpus(opt.test, m.registries);
  const auto& names = *m.registries.authors;
  std::optional<AuthorId> true_author;
  if (!opt.true_author.empty()) true_author = parse_author_ref(opt.true_author, names);

  set_precision(out, opt.precision);
  std::vector<AuthorRanking> rankings;
  for (const auto& doc : test.documents()) {
    const AuthorId reference = true_author ? *true_author : doc.authors.front();
    rankings.push_back(rank_authors_for_doc(*m.samples, doc.tokens, reference));
  }
  if (true_author) {
    out << "doc\ttrue_author\trank\n";
    for (std::size_t d = 0; d < rankings.size(); ++d) {
      out << d << '\t' << names.name(*true_author) << '\t' << rankings[d].rank << '\n';
    }
    out << '\n';
  }
  out << "doc\trank\tauthor\tperplexity\n";
  for (std::size_t d = 0; d < rankings.size(); ++d) {
    const auto& ranking = rankings[d].ranking;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      out << d << '\t' << i + 1 << '\t' << names.name(ranking[i].first) << '\t'
          << ranking[i].second << '\n';
    }
  }
  return 0;
}

int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream&) {
  if (opt.model_dir.empty()) throw UsageError("--model-dir is required");
  const RunManifest manifest = load_manifest(opt.model_dir);
  DataOptions paths;
  paths.vocab = resolve(opt.data.vocab, manifest.vocab, "vocabulary");
  paths.authors = resolve(opt.data.authors, manifest.authors, "authors");
  paths.corpus = resolve(opt.data.corpus, manifest.corpus, "corpus");
  const auto registries = load_registries(paths);
  const Corpus corpus = load_corpus(paths.corpus, registries);

  std::vector<std::string> files;
  if (!opt.snapshot.empty()) {
    files.push_back(opt.snapshot);
  } else {
    for (const auto& rel : manifest.snapshots) files.push_back((fs::path(opt.model_dir) / rel).string());
  }
  bool all_ok = true;
  for (const auto& file : files) {
    const Sample sample = load_snapshot(file, corpus);
    const auto violations = validate(sample.state(), corpus);
    if (violations.empty()) {
      out << file << "\tok\n";
      continue;
    }
    all_ok = false;
    for (const auto& v : violations) out << file << '\t' << v.detail << '\n';
  }
  return all_ok ? 0 : 2;
}

}  // namespace atm::cli
