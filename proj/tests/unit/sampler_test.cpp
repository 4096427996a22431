#include <cmath>

#include <gtest/gtest.h>

#include "atm/error.hpp"
#include "atm/rng.hpp"
#include "atm/sampler.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"

namespace atm {
namespace {

using testing::make_corpus;
using testing::random_corpus;

ModelConfig config_of(ModelKind kind, std::size_t T, double alpha, double beta) {
  ModelConfig c;
  c.kind = kind;
  c.topics = T;
  c.hyper = {alpha, beta};
  return c;
}

// One token of word 0 in a document with author 0; other tokens fixed so that
// after removing it the counts are C_WT=[[2,0],[0,1]] and the doc/author row
// is (2,1).
SamplerState hand_state(const Corpus& c, ModelKind kind) {
  const auto cfg = config_of(kind, 2, 1.0, 1.0);
  AssignmentState asg(c, true, kind == ModelKind::AuthorTopic);
  const TopicId z[] = {0, 0, 0, 1};  // token 0 is the one under test
  for (std::size_t p = 0; p < 4; ++p) {
    asg.topic(0, p) = z[p];
    if (asg.has_authors()) asg.author(0, p) = 0;
  }
  auto s = make_state(c, cfg, asg, 0, 0);
  unassign_token(s, c, {0, 0, 0});
  return s;
}

TEST(ConditionalLda, HandArithmetic) {
  const auto c = make_corpus(2, 1, {{{0, 0, 0, 1}, {0}}});
  const auto s = hand_state(c, ModelKind::Lda);
  const auto w = conditional_lda(s, c, {0, 0, 0});
  ASSERT_EQ(w.weights.size(), 2u);
  EXPECT_NEAR(w.weights[0], 0.75 * 0.6, 1e-15);
  EXPECT_NEAR(w.weights[1], (1.0 / 3.0) * 0.4, 1e-15);
  EXPECT_NEAR(w.normalized()[0], 0.45 / (0.45 + 0.4 / 3.0), 1e-12);
  EXPECT_EQ(w.support[1], (Outcome{1, kNoId}));
}

TEST(ConditionalAuthorTopic, SingleAuthorMatchesLdaExample) {
  const auto c = make_corpus(2, 1, {{{0, 0, 0, 1}, {0}}});
  const auto lda = conditional_lda(hand_state(c, ModelKind::Lda), c, {0, 0, 0});
  const auto at = conditional_author_topic(hand_state(c, ModelKind::AuthorTopic), c, {0, 0, 0});
  EXPECT_EQ(at.weights, lda.weights);
  EXPECT_EQ(at.support[0], (Outcome{0, 0}));
}

TEST(ConditionalAuthor, HandArithmetic) {
  // Column 0 of C_WA is (3,1) and column 1 empty once the token is removed.
  const auto c = make_corpus(2, 2, {{{0, 0, 0, 0, 1}, {0, 1}}});
  const auto cfg = config_of(ModelKind::Author, 0, 0.0, 1.0);
  AssignmentState asg(c, false, true);
  for (std::size_t p = 0; p < 5; ++p) asg.author(0, p) = 0;
  auto s = make_state(c, cfg, asg, 0, 0);
  unassign_token(s, c, {0, 0, 0});
  const auto w = conditional_author(s, c, {0, 0, 0});
  EXPECT_NEAR(w.weights[0], 4.0 / 6.0, 1e-15);
  EXPECT_NEAR(w.weights[1], 0.5, 1e-15);
  EXPECT_NEAR(w.normalized()[0], 4.0 / 7.0, 1e-12);
}

TEST(Conditionals, UniformWhenCountsEmpty) {
  const auto c = make_corpus(3, 2, {{{1}, {0, 1}}});
  for (auto kind : {ModelKind::Lda, ModelKind::Author, ModelKind::AuthorTopic}) {
    const std::size_t T = kind == ModelKind::Lda ? 3 : 2;
    auto s = init_assignments(c, config_of(kind, T, 0.7, 0.2), 1);
    unassign_token(s, c, {0, 0, 1});
    const auto p = conditional(s, c, {0, 0, 1}).normalized();
    const double expect = kind == ModelKind::Lda ? 1.0 / 3 : kind == ModelKind::Author ? 0.5 : 0.25;
    for (double v : p) EXPECT_NEAR(v, expect, 1e-15);
  }
}

TEST(Conditionals, SingleAuthorDocumentHasOneOutcome) {
  const auto c = make_corpus(3, 2, {{{1, 2}, {1}}});
  auto s = init_assignments(c, config_of(ModelKind::Author, 0, 0, 0.1), 1);
  unassign_token(s, c, {0, 1, 2});
  const auto w = conditional_author(s, c, {0, 1, 2});
  ASSERT_EQ(w.support.size(), 1u);
  EXPECT_EQ(w.normalized()[0], 1.0);
}

TEST(Conditionals, NotDecrementedDetected) {
  Rng rng(4);
  const auto c = random_corpus(3, 4, 2, 2, 5, 2, rng);
  for (auto kind : {ModelKind::Lda, ModelKind::Author, ModelKind::AuthorTopic}) {
    const auto s = init_assignments(c, config_of(kind, 2, 1, 1), 1);
    const TokenRef t{0, 0, c.document(0).tokens[0]};
    try {
      conditional(s, c, t);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NotDecremented);
    }
  }
}

TEST(Conditionals, WrongKindRejected) {
  const auto c = make_corpus(2, 1, {{{0, 1}, {0}}});
  auto s = init_assignments(c, config_of(ModelKind::Lda, 2, 1, 1), 1);
  unassign_token(s, c, {0, 0, 0});
  EXPECT_THROW(conditional_author_topic(s, c, {0, 0, 0}), Error);
}

TEST(Conditionals, MatchBruteForceJoint) {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t V = 1 + rng.uniform_index(3);
    const std::size_t A = 1 + rng.uniform_index(2);
    const auto c = random_corpus(1 + rng.uniform_index(3), V, A, 1, 3, 2, rng);
    if (c.total_tokens() > 8) continue;
    for (auto kind : {ModelKind::Lda, ModelKind::Author, ModelKind::AuthorTopic}) {
      const auto cfg = config_of(kind, 1 + rng.uniform_index(2), 0.1 + 49.9 * rng.uniform01(),
                                 0.01 + 0.99 * rng.uniform01());
      auto s = init_assignments(c, cfg, rng.uniform_index(1000));
      for (std::size_t d = 0; d < c.num_documents(); ++d) {
        for (std::size_t p = 0; p < c.document(d).size(); ++p) {
          const TokenRef t{d, p, c.document(d).tokens[p]};
          const auto oracle = testing::brute_force_conditional(c, cfg, s.assignments, d, p);
          const Outcome keep = current_outcome(s, t);
          unassign_token(s, c, t);
          const auto w = conditional(s, c, t);
          EXPECT_EQ(w.support, testing::enumerate_support(c, cfg, d));
          const auto got = w.normalized();
          ASSERT_EQ(got.size(), oracle.size());
          for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - oracle[i]));
          assign_token(s, c, t, keep);
        }
      }
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Sweep, SingleOutcomeLeavesStateUnchanged) {
  const auto c = make_corpus(1, 1, {{{0}, {0}}});
  auto s = init_assignments(c, config_of(ModelKind::AuthorTopic, 1, 50, 0.01), 1);
  const auto before = s;
  Rng rng(3);
  sweep(s, c, rng);
  EXPECT_EQ(s.assignments, before.assignments);
  EXPECT_EQ(s.counts, before.counts);
  EXPECT_EQ(s.iteration, 1u);
}

TEST(Sweep, DeterministicAndConserving) {
  Rng gen(6);
  const auto c = random_corpus(10, 20, 4, 0, 30, 3, gen);
  for (auto kind : {ModelKind::Lda, ModelKind::Author, ModelKind::AuthorTopic}) {
    auto a = init_assignments(c, config_of(kind, 5, 0.3, 0.05), 8);
    auto b = a;
    Rng ra(99), rb(99);
    for (int i = 0; i < 10; ++i) {
      sweep(a, c, ra);
      sweep(b, c, rb);
      ASSERT_TRUE(validate(a, c).empty());
      ASSERT_EQ(a.counts, rebuild_counts(c, a.config, a.assignments));
    }
    EXPECT_EQ(a, b);
  }
}

TEST(Sweep, EmptyDocumentsSkipped) {
  const auto c = make_corpus(3, 2, {{{}, {0}}, {{1, 2}, {1}}, {{}, {0, 1}}});
  auto s = init_assignments(c, config_of(ModelKind::Lda, 2, 1, 1), 1);
  Rng rng(1);
  sweep(s, c, rng);
  EXPECT_EQ(s.counts.doc_totals[0], 0);
  EXPECT_EQ(s.counts.doc_totals[2], 0);
  EXPECT_TRUE(validate(s, c).empty());
}

TEST(Sweep, AuthorTopicReducesToLdaWithUniqueAuthors) {
  Rng gen(10);
  auto base = random_corpus(12, 15, 1, 1, 25, 1, gen);
  std::vector<Document> docs = base.documents();
  for (std::size_t d = 0; d < docs.size(); ++d) docs[d].authors = {static_cast<AuthorId>(d)};
  const auto c = make_corpus(15, docs.size(), docs);

  auto lda = init_assignments(c, config_of(ModelKind::Lda, 4, 0.8, 0.05), 31);
  auto at = init_assignments(c, config_of(ModelKind::AuthorTopic, 4, 0.8, 0.05), 31);
  ASSERT_TRUE(std::equal(lda.assignments.topics().begin(), lda.assignments.topics().end(),
                         at.assignments.topics().begin()));
  Rng r1(31), r2(31);
  for (int i = 0; i < 20; ++i) {
    sweep(lda, c, r1);
    sweep(at, c, r2);
    ASSERT_TRUE(std::equal(lda.assignments.topics().begin(), lda.assignments.topics().end(),
                           at.assignments.topics().begin()))
        << "sweep " << i;
  }
  EXPECT_EQ(lda.counts.doc_topic, at.counts.author_topic);
}

}  // namespace
}  // namespace atm
