#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atm/error.hpp"

namespace atm {

using WordId = std::uint32_t;
using AuthorId = std::uint32_t;
using TopicId = std::uint32_t;

struct WordTag {
  static constexpr Errc kDuplicate = Errc::DuplicateWord;
  static constexpr Errc kEmpty = Errc::EmptyWord;
  static constexpr std::string_view kWhat = "word";
};

struct AuthorTag {
  static constexpr Errc kDuplicate = Errc::DuplicateAuthor;
  static constexpr Errc kEmpty = Errc::EmptyAuthor;
  static constexpr std::string_view kWhat = "author";
};

// Ordered list of distinct, non-empty names. The id of a name is its
// zero-based position.
template <class Tag>
class NameTable {
 public:
  NameTable() = default;

  // Throws Error(kDuplicate / kEmpty) with the 1-based position of the
  // offending entry.
  explicit NameTable(std::vector<std::string> names) : names_(std::move(names)) {
    index_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) {
        throw Error(Tag::kEmpty, "empty " + std::string(Tag::kWhat), i + 1);
      }
      auto [it, inserted] = index_.emplace(names_[i], static_cast<std::uint32_t>(i));
      if (!inserted) {
        throw Error(Tag::kDuplicate,
                    "duplicate " + std::string(Tag::kWhat) + " '" + names_[i] + "'", i + 1);
      }
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::uint32_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using Vocabulary = NameTable<WordTag>;
using AuthorRegistry = NameTable<AuthorTag>;

// One name per line; line k becomes id k.
Vocabulary parse_vocabulary(std::istream& in);
AuthorRegistry parse_author_registry(std::istream& in);

void write_names(std::ostream& out, const std::vector<std::string>& names);

struct Document {
  std::vector<WordId> tokens;
  // Distinct, ascending.
  std::vector<AuthorId> authors;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Document&) const = default;
};

class Corpus {
 public:
  Corpus() = default;
  // Validates every id against the tables and that each document has at
  // least one author. Author lists are sorted; duplicates are rejected.
  Corpus(std::shared_ptr<const Vocabulary> vocabulary,
         std::shared_ptr<const AuthorRegistry> authors,
         std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  const Document& document(std::size_t d) const { return documents_.at(d); }
  std::size_t num_documents() const { return documents_.size(); }
  std::size_t total_tokens() const { return total_tokens_; }

  const Vocabulary& vocabulary() const { return *vocabulary_; }
  const AuthorRegistry& authors() const { return *authors_; }
  const std::shared_ptr<const Vocabulary>& vocabulary_ptr() const { return vocabulary_; }
  const std::shared_ptr<const AuthorRegistry>& authors_ptr() const { return authors_; }
  std::size_t num_words() const { return vocabulary_ ? vocabulary_->size() : 0; }
  std::size_t num_authors() const { return authors_ ? authors_->size() : 0; }

  // Same tables, different documents.
  Corpus with_documents(std::vector<Document> documents) const;

 private:
  std::shared_ptr<const Vocabulary> vocabulary_;
  std::shared_ptr<const AuthorRegistry> authors_;
  std::vector<Document> documents_;
  std::size_t total_tokens_ = 0;
};

// Corpus file: one document per line, "a1 a2 | w1 w2 w3". Blank lines and
// lines starting with '#' are skipped. Errors carry the 1-based line number.
Corpus parse_corpus(std::istream& in, std::shared_ptr<const Vocabulary> vocabulary,
                    std::shared_ptr<const AuthorRegistry> authors);

// Canonical form: ascending author ids, " |", then " id" per token.
void write_corpus(std::ostream& out, const Corpus& corpus);
std::string format_document(const Document& doc);

// Author ids that appear in no document.
std::vector<AuthorId> unused_authors(const Corpus& corpus);

// Number of documents listing each author.
std::vector<std::size_t> papers_per_author(const Corpus& corpus);

struct TrainTestSplit {
  Corpus train;
  Corpus test;
  // Original document indices, ascending.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::size_t requested_test = 0;
  double achieved_fraction = 0.0;

  // True when author coverage forced fewer test documents than requested.
  bool infeasible() const { return test_indices.size() < requested_test; }
};

// Moves round(test_fraction * D) documents to the test side, visiting
// documents in a seeded random order and skipping any whose removal would
// leave one of its authors without a training document.
TrainTestSplit split_train_test(const Corpus& corpus, double test_fraction, std::uint64_t seed);

struct FoldInSplit {
  // Token positions, ascending.
  std::vector<std::size_t> heldin;
  std::vector<std::size_t> heldout;
};

// Picks n_train positions uniformly without replacement.
FoldInSplit split_document_foldin(const Document& doc, std::size_t n_train, std::uint64_t seed);

}  // namespace atm
