// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//
//   atm_acceptance --atm <path to atm binary> [--only N]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "atm/analytics.hpp"
#include "atm/chains.hpp"
#include "atm/corpus.hpp"
#include "atm/evaluation.hpp"
#include "atm/model_state.hpp"
#include "atm/rng.hpp"
#include "atm/sampler.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

namespace {

using namespace atm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string g_atm;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream o;
  o << std::setprecision(precision) << v;
  return o.str();
}

ModelConfig config_of(ModelKind kind, std::size_t topics, Hyperparameters hyper) {
  ModelConfig c;
  c.kind = kind;
  c.topics = kind == ModelKind::Author ? 0 : topics;
  c.hyper = hyper;
  if (kind == ModelKind::Author) c.hyper.alpha = 0.0;
  return c;
}

ModelConfig default_config(ModelKind kind, std::size_t topics) {
  return config_of(kind, topics, default_hyperparameters(topics));
}

// Corpus and planted truth shared by the synthetic criteria.
struct Synthetic {
  testing::PlantedOptions options;
  testing::PlantedModel model;
  Corpus corpus;
};

// Planted model of the recovery and perplexity criteria. Each topic leaks
// 1 - word_peak of its mass into other topics' blocks, where those topics
// dominate; no sampler can attribute it, so word_peak bounds recoverable phi
// TV from below at about 1 - word_peak.
testing::PlantedOptions recovery_options() {
  testing::PlantedOptions opt;
  opt.word_peak = 0.95;
  return opt;
}

Synthetic planted_corpus(std::uint64_t seed, const testing::PlantedOptions& opt = recovery_options(),
                         const testing::GenerateOptions& gen = {}) {
  Rng rng(seed);
  Synthetic s{opt, testing::planted_author_topic(opt, rng), {}};
  s.corpus = testing::make_corpus(opt.words, opt.authors, testing::generate_documents(s.model, gen, rng));
  return s;
}

// 1 -------------------------------------------------------------------------

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  Rng rng(20240601);
  std::size_t instances = 0, checked = 0;
  double worst = 0.0;
  bool support_ok = true;
  while (instances < 300) {
    const std::size_t V = 1 + rng.uniform_index(3);
    const std::size_t A = 1 + rng.uniform_index(2);
    const auto c = testing::random_corpus(1 + rng.uniform_index(3), V, A, 1, 3, 2, rng);
    if (c.total_tokens() > 8) continue;
    ++instances;
    for (auto kind : {ModelKind::Lda, ModelKind::Author, ModelKind::AuthorTopic}) {
      const Hyperparameters h{0.1 + 49.9 * rng.uniform01(), 0.01 + 0.99 * rng.uniform01()};
      auto s = init_assignments(c, config_of(kind, 1 + rng.uniform_index(2), h), rng.uniform_index(1u << 30));
      // Move away from the initial state on some instances.
      const std::size_t warm = rng.uniform_index(3);
      for (std::size_t i = 0; i < warm; ++i) sweep(s, c, rng);
      for (std::size_t d = 0; d < c.num_documents(); ++d) {
        for (std::size_t p = 0; p < c.document(d).size(); ++p) {
          const TokenRef t{d, p, c.document(d).tokens[p]};
          const auto oracle = testing::brute_force_conditional(c, s.config, s.assignments, d, p);
          const auto keep = current_outcome(s, t);
          unassign_token(s, c, t);
          const auto w = conditional(s, c, t);
          support_ok = support_ok && w.support == testing::enumerate_support(c, s.config, d);
          const auto got = w.normalized();
          if (got.size() != oracle.size()) return {false, "support size differs from oracle"};
          for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - oracle[i]));
          assign_token(s, c, t, keep);
          ++checked;
        }
      }
    }
  }
  const double secs = seconds_since(start);
  const bool pass = worst <= 1e-10 && support_ok && secs < 60.0;
  return {pass, std::to_string(instances) + " instances x 3 kinds, " + std::to_string(checked) +
                    " conditionals, max abs error " + fmt(worst, 3) + " (<= 1e-10), " +
                    fmt(secs, 3) + " s (< 60 s)"};
}

// 2 -------------------------------------------------------------------------

Verdict count_conservation() {
  const auto start = Clock::now();
  Rng gen(7);
  const auto c = testing::random_corpus(20, 50, 5, 100, 100, 2, gen);
  std::string detail = std::to_string(c.total_tokens()) + " tokens";
  bool pass = true;
  for (auto kind : {ModelKind::Lda, ModelKind::Author, ModelKind::AuthorTopic}) {
    auto s = init_assignments(c, default_config(kind, 10), 11);
    Rng rng(12);
    for (int i = 0; i < 100; ++i) sweep(s, c, rng);
    const bool exact = s.counts == rebuild_counts(c, s.config, s.assignments);
    const bool valid = validate(s, c).empty();
    pass = pass && exact && valid;
    detail += std::string(", ") + std::string(to_string(kind)) + (exact && valid ? " ok" : " MISMATCH");
  }
  const double secs = seconds_since(start);
  pass = pass && secs < 10.0;
  return {pass, detail + ", 100 sweeps each, " + fmt(secs, 3) + " s (< 10 s)"};
}

// 3 -------------------------------------------------------------------------

Verdict special_case_reduction() {
  Rng gen(21);
  auto docs = testing::random_corpus(40, 60, 1, 5, 80, 1, gen).documents();
  for (std::size_t d = 0; d < docs.size(); ++d) docs[d].authors = {static_cast<AuthorId>(d)};
  const auto c = testing::make_corpus(60, docs.size(), docs);
  const std::uint64_t seed = 77;
  auto lda = init_assignments(c, default_config(ModelKind::Lda, 8), seed);
  auto at = init_assignments(c, default_config(ModelKind::AuthorTopic, 8), seed);
  auto same = [&] {
    return std::equal(lda.assignments.topics().begin(), lda.assignments.topics().end(),
                      at.assignments.topics().begin(), at.assignments.topics().end());
  };
  if (!same()) return {false, "initial z differs"};
  Rng r1(seed), r2(seed);
  for (int i = 1; i <= 50; ++i) {
    sweep(lda, c, r1);
    sweep(at, c, r2);
    if (!same()) return {false, "z diverged at sweep " + std::to_string(i)};
  }
  const bool tables = lda.counts.doc_topic == at.counts.author_topic &&
                      lda.counts.word_topic == at.counts.word_topic;
  return {tables, std::to_string(c.total_tokens()) + " tokens, z identical over 50 sweeps" +
                      (tables ? ", C_DT == C_AT" : ", count tables differ")};
}

// 4 -------------------------------------------------------------------------

struct Recovery {
  double phi_tv = 0.0;
  double theta_tv = 0.0;
};

Recovery recovery_of(const Synthetic& syn, const SampleSet& set) {
  Recovery r;
  for (const auto& s : set) {
    const auto& e = s.estimates();
    const auto match = testing::greedy_match(syn.model.phi, e.phi);
    r.phi_tv += match.mean_distance / static_cast<double>(set.size());
    r.theta_tv += testing::mean_row_tv(syn.model.theta_author, e.theta_author, match.to_recovered) /
                  static_cast<double>(set.size());
  }
  return r;
}

Verdict synthetic_recovery() {
  const auto start = Clock::now();
  const auto syn = planted_corpus(4);
  const auto set = run_ensemble(syn.corpus, default_config(ModelKind::AuthorTopic, 5), 4, 3, 500);
  const auto r = recovery_of(syn, set);
  const double secs = seconds_since(start);
  const bool pass = r.phi_tv < 0.10 && r.theta_tv < 0.15 && secs < 180.0;
  return {pass, "mean TV phi " + fmt(r.phi_tv) + " (< 0.10), theta_author " + fmt(r.theta_tv) +
                    " (< 0.15), " + fmt(secs, 3) + " s (< 180 s)"};
}

// 5 -------------------------------------------------------------------------

Verdict perplexity_sanity() {
  const double V = 50.0;
  int bound_held = 0, ordered = 0;
  std::ostringstream values;
  for (int rep = 0; rep < 10; ++rep) {
    const auto syn = planted_corpus(500 + static_cast<std::uint64_t>(rep));
    const auto split = split_train_test(syn.corpus, 0.1, 900 + static_cast<std::uint64_t>(rep));
    const auto at = run_ensemble(split.train, default_config(ModelKind::AuthorTopic, 5), rep, 3, 500);
    const auto au = run_ensemble(split.train, config_of(ModelKind::Author, 0, {0.0, 0.01}), rep, 3, 500);
    const double p_at = document_perplexities(at, split.test).mean;
    const double p_au = document_perplexities(au, split.test).mean;
    bound_held += p_at < 0.5 * V;
    ordered += p_au > p_at;
    values << (rep ? " " : "") << fmt(p_at, 4) << "/" << fmt(p_au, 4);
  }
  const bool pass = bound_held == 10 && ordered >= 9;
  return {pass, "AT < 0.5V in " + std::to_string(bound_held) + "/10, author > AT in " +
                    std::to_string(ordered) + "/10 (>= 9); AT/author: " + values.str()};
}

// 6 -------------------------------------------------------------------------

Verdict foldin_monotonicity() {
  int improved = 0;
  std::ostringstream values;
  const std::size_t grid[] = {0, 16};
  for (int rep = 0; rep < 10; ++rep) {
    const auto syn = planted_corpus(600 + static_cast<std::uint64_t>(rep));
    const auto split = split_train_test(syn.corpus, 0.1, 950 + static_cast<std::uint64_t>(rep));
    const auto lda = run_ensemble(split.train, default_config(ModelKind::Lda, 5), rep, 3, 300);
    const auto curve = perplexity_curve(lda, split.train, split.test, grid, rep);
    improved += curve[1].mean < curve[0].mean;
    values << (rep ? " " : "") << fmt(curve[0].mean, 4) << ">" << fmt(curve[1].mean, 4);
  }
  return {improved >= 9, "n_train=16 below n_train=0 in " + std::to_string(improved) +
                             "/10 (>= 9); " + values.str()};
}

// 7 -------------------------------------------------------------------------

Verdict author_ranking() {
  testing::PlantedOptions opt;
  opt.topics = 5;
  opt.authors = 5;
  opt.topics_per_author = 1;
  opt.author_peak = 1.0;
  testing::GenerateOptions gen;
  gen.docs = 100;
  gen.coauthor_probability = 0.0;
  const auto syn = planted_corpus(7, opt, gen);
  for (std::size_t a = 0; a < opt.authors; ++a) {
    for (std::size_t b = a + 1; b < opt.authors; ++b) {
      const auto ta = testing::primary_topics(opt, a), tb = testing::primary_topics(opt, b);
      for (auto j : ta) {
        if (std::find(tb.begin(), tb.end(), j) != tb.end()) return {false, "planted supports overlap"};
      }
    }
  }
  const auto set = run_ensemble(syn.corpus, default_config(ModelKind::AuthorTopic, 5), 7, 3, 300);
  Rng rng(70);
  int first = 0;
  double rank_sum = 0.0;
  for (int i = 0; i < 50; ++i) {
    const AuthorId author = static_cast<AuthorId>(i % opt.authors);
    const AuthorId authors[] = {author};
    const auto tokens = testing::generate_tokens(syn.model, authors, 30, rng);
    const auto r = rank_authors_for_doc(set, tokens, author);
    first += r.rank == 1;
    rank_sum += static_cast<double>(r.rank);
  }
  return {first >= 45, "rank 1 for " + std::to_string(first) + "/50 (>= 45), mean rank " +
                           fmt(rank_sum / 50.0, 3)};
}

// 8 -------------------------------------------------------------------------

Verdict spot_checks() {
  std::vector<std::string> failed;
  const auto h = default_hyperparameters(100);
  if (!(h.alpha == 0.5 && h.beta == 0.01)) failed.push_back("default hyperparameters");

  // Zero counts give phi = 1/V for every topic, hence a uniform predictive.
  const std::size_t V = 100;
  const auto c = testing::make_corpus(V, 1, {{{0}, {0}}});
  ModelConfig cfg = default_config(ModelKind::AuthorTopic, 4);
  auto state = init_assignments(c, cfg, 1);
  state.counts = CountTables::zeros(cfg.kind, state.dims);
  const SampleSet set({Sample(state)});
  std::vector<WordId> tokens(40);
  for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i] = static_cast<WordId>((i * 37) % V);
  const AuthorId authors[] = {0};
  const double pp = perplexity(set, tokens, authors);
  if (std::abs(pp - static_cast<double>(V)) > 1e-9) failed.push_back("uniform perplexity");

  const double skl = symmetric_kl(std::vector<double>{0.5, 0.5}, std::vector<double>{0.9, 0.1});
  if (std::abs(skl - 0.8789) > 1e-4) failed.push_back("sKL");
  const double h4 = entropy(std::vector<double>(4, 0.25));
  if (std::abs(h4 - std::log(4.0)) > 1e-12) failed.push_back("entropy");

  std::string detail = "defaults (" + fmt(h.alpha) + ", " + fmt(h.beta) + "), uniform perplexity " +
                       fmt(pp, 15) + ", sKL " + fmt(skl, 6) + ", H(uniform 4) " + fmt(h4, 15);
  for (const auto& f : failed) detail += "; FAILED " + f;
  return {failed.empty(), detail};
}

// 9 -------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism() {
  if (g_atm.empty()) return {false, "no --atm binary given"};
  const auto dir = fs::temp_directory_path() / "atm_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto syn = planted_corpus(9);
  {
    std::ofstream corpus(dir / "corpus.txt");
    write_corpus(corpus, syn.corpus);
    std::ofstream vocab(dir / "vocab.txt");
    write_names(vocab, syn.corpus.vocabulary().names());
    std::ofstream authors(dir / "authors.txt");
    write_names(authors, syn.corpus.authors().names());
  }
  const std::string flags = " --corpus " + (dir / "corpus.txt").string() + " --vocab " +
                            (dir / "vocab.txt").string() + " --authors " +
                            (dir / "authors.txt").string() +
                            " --model at --topics 5 --iterations 50 --chains 3 --seed 9 --quiet";
  for (const char* run : {"a", "b"}) {
    const auto out = dir / run;
    if (shell(g_atm + " train" + flags + " --out " + out.string()) != 0) return {false, "train failed"};
    if (shell(g_atm + " topics --model-dir " + out.string() + " > " + (dir / (std::string(run) + ".topics")).string()) != 0) {
      return {false, "topics failed"};
    }
  }
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".atm") continue;
    const auto twin = dir / "b" / fs::relative(entry.path(), dir / "a");
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) {
      return {false, "snapshot differs: " + fs::relative(entry.path(), dir).string()};
    }
    ++files;
  }
  const auto ta = slurp(dir / "a.topics");
  if (files != 3) return {false, std::to_string(files) + " snapshots found, expected 3"};
  if (ta.empty() || ta != slurp(dir / "b.topics")) return {false, "topics output differs"};
  return {true, std::to_string(files) + " snapshots and " + std::to_string(ta.size()) +
                    " bytes of topics output identical"};
}

// 10 ------------------------------------------------------------------------

double sweep_seconds(const Corpus& c, std::size_t topics, int repeats) {
  auto s = init_assignments(c, default_config(ModelKind::AuthorTopic, topics), 5);
  Rng rng(6);
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = Clock::now();
    sweep(s, c, rng);
    best = std::min(best, seconds_since(start));
  }
  return best;
}

Verdict throughput() {
  Rng gen(10);
  // 10,000 documents of 100 tokens, one or two authors each.
  const auto c = testing::random_corpus(10000, 10000, 2000, 100, 100, 2, gen);
  const std::size_t grid[] = {25, 50, 100};
  std::vector<double> per_topic;
  std::ostringstream values;
  double t100 = 0.0;
  for (std::size_t T : grid) {
    const double t = sweep_seconds(c, T, 3);
    if (T == 100) t100 = t;
    per_topic.push_back(t / static_cast<double>(T));
    values << " T=" << T << ":" << fmt(t, 3) << "s";
  }
  double mean = 0.0;
  for (double r : per_topic) mean += r / static_cast<double>(per_topic.size());
  double spread = 0.0;
  for (double r : per_topic) spread = std::max(spread, std::abs(r / mean - 1.0));
  const bool pass = t100 <= 10.0 && spread <= 0.30;
  return {pass, std::to_string(c.total_tokens()) + " tokens, author-topic sweep" + values.str() +
                    " (T=100 <= 10 s, " + fmt(c.total_tokens() / t100, 3) +
                    " tokens/s); max deviation of time/T from mean " + fmt(100 * spread, 3) +
                    "% (<= 30%)"};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--atm" && i + 1 < argc) {
      g_atm = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: atm_acceptance --atm <binary> [--only N]\n";
      return 1;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "count conservation", count_conservation},
      {3, "special-case reduction", special_case_reduction},
      {4, "synthetic recovery", synthetic_recovery},
      {5, "perplexity sanity", perplexity_sanity},
      {6, "fold-in monotonicity", foldin_monotonicity},
      {7, "author ranking", author_ranking},
      {8, "formula spot checks", spot_checks},
      {9, "determinism", determinism},
      {10, "throughput", throughput},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = Clock::now();
    Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.name
              << "  [" << fmt(seconds_since(start), 3) << " s]  " << o.detail << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << failures << " failing)" << std::endl;
  return failures ? 1 : 0;
}
