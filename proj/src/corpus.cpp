#include "atm/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "atm/rng.hpp"

namespace atm {
namespace {

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// Splits on spaces and tabs, dropping empty fields.
std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint32_t parse_id(std::string_view field, std::size_t line) {
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(Errc::BadFormat, "not an id: '" + std::string(field) + "'", line);
  }
  return value;
}

Document parse_document_line(std::string_view text, std::size_t line, std::size_t num_words,
                             std::size_t num_authors) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw Error(Errc::BadFormat, "missing '|' between authors and tokens", line);
  }
  if (text.find('|', bar + 1) != std::string_view::npos) {
    throw Error(Errc::BadFormat, "more than one '|'", line);
  }

  Document doc;
  for (auto f : fields(text.substr(0, bar))) {
    AuthorId id = parse_id(f, line);
    if (id >= num_authors) {
      throw Error(Errc::AuthorIdOutOfRange, "author id " + std::to_string(id) + " >= A", line);
    }
    doc.authors.push_back(id);
  }
  if (doc.authors.empty()) throw Error(Errc::NoAuthors, "document has no authors", line);
  std::sort(doc.authors.begin(), doc.authors.end());
  if (std::adjacent_find(doc.authors.begin(), doc.authors.end()) != doc.authors.end()) {
    throw Error(Errc::BadFormat, "author listed twice on one document", line);
  }

  for (auto f : fields(text.substr(bar + 1))) {
    WordId id = parse_id(f, line);
    if (id >= num_words) {
      throw Error(Errc::TokenIdOutOfRange, "token id " + std::to_string(id) + " >= V", line);
    }
    doc.tokens.push_back(id);
  }
  return doc;
}

}  // namespace

Vocabulary parse_vocabulary(std::istream& in) { return Vocabulary(read_lines(in)); }

AuthorRegistry parse_author_registry(std::istream& in) { return AuthorRegistry(read_lines(in)); }

void write_names(std::ostream& out, const std::vector<std::string>& names) {
  for (const auto& n : names) out << n << '\n';
}

Corpus::Corpus(std::shared_ptr<const Vocabulary> vocabulary,
               std::shared_ptr<const AuthorRegistry> authors, std::vector<Document> documents)
    : vocabulary_(std::move(vocabulary)),
      authors_(std::move(authors)),
      documents_(std::move(documents)) {
  if (!vocabulary_) vocabulary_ = std::make_shared<const Vocabulary>();
  if (!authors_) authors_ = std::make_shared<const AuthorRegistry>();
  const std::size_t V = vocabulary_->size();
  const std::size_t A = authors_->size();
  for (auto& doc : documents_) {
    if (doc.authors.empty()) throw Error(Errc::NoAuthors, "document has no authors");
    std::sort(doc.authors.begin(), doc.authors.end());
    if (std::adjacent_find(doc.authors.begin(), doc.authors.end()) != doc.authors.end()) {
      throw Error(Errc::BadFormat, "author listed twice on one document");
    }
    if (doc.authors.back() >= A) {
      throw Error(Errc::AuthorIdOutOfRange,
                  "author id " + std::to_string(doc.authors.back()) + " >= A");
    }
    for (WordId w : doc.tokens) {
      if (w >= V) throw Error(Errc::TokenIdOutOfRange, "token id " + std::to_string(w) + " >= V");
    }
    total_tokens_ += doc.tokens.size();
  }
}

Corpus Corpus::with_documents(std::vector<Document> documents) const {
  return Corpus(vocabulary_, authors_, std::move(documents));
}

Corpus parse_corpus(std::istream& in, std::shared_ptr<const Vocabulary> vocabulary,
                    std::shared_ptr<const AuthorRegistry> authors) {
  const std::size_t V = vocabulary ? vocabulary->size() : 0;
  const std::size_t A = authors ? authors->size() : 0;
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    docs.push_back(parse_document_line(line, line_no, V, A));
  }
  return Corpus(std::move(vocabulary), std::move(authors), std::move(docs));
}

std::string format_document(const Document& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.authors.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(doc.authors[i]);
  }
  out += " |";
  for (WordId w : doc.tokens) {
    out += ' ';
    out += std::to_string(w);
  }
  return out;
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents()) out << format_document(doc) << '\n';
}

std::vector<std::size_t> papers_per_author(const Corpus& corpus) {
  std::vector<std::size_t> counts(corpus.num_authors(), 0);
  for (const auto& doc : corpus.documents()) {
    for (AuthorId a : doc.authors) ++counts[a];
  }
  return counts;
}

std::vector<AuthorId> unused_authors(const Corpus& corpus) {
  auto counts = papers_per_author(corpus);
  std::vector<AuthorId> unused;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] == 0) unused.push_back(static_cast<AuthorId>(a));
  }
  return unused;
}

TrainTestSplit split_train_test(const Corpus& corpus, double test_fraction, std::uint64_t seed) {
  const std::size_t D = corpus.num_documents();
  if (D == 0) throw Error(Errc::EmptyCorpus, "cannot split an empty corpus");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "test fraction must lie in (0, 1)");
  }

  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  TrainTestSplit split;
  split.requested_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(D)));

  auto remaining = papers_per_author(corpus);
  std::vector<bool> in_test(D, false);
  std::size_t n_test = 0;
  for (std::size_t d : order) {
    if (n_test == split.requested_test) break;
    const auto& authors = corpus.document(d).authors;
    bool keeps_coverage = std::all_of(authors.begin(), authors.end(),
                                      [&](AuthorId a) { return remaining[a] >= 2; });
    if (!keeps_coverage) continue;
    for (AuthorId a : authors) --remaining[a];
    in_test[d] = true;
    ++n_test;
  }

  std::vector<Document> train_docs, test_docs;
  for (std::size_t d = 0; d < D; ++d) {
    if (in_test[d]) {
      split.test_indices.push_back(d);
      test_docs.push_back(corpus.document(d));
    } else {
      split.train_indices.push_back(d);
      train_docs.push_back(corpus.document(d));
    }
  }
  split.train = corpus.with_documents(std::move(train_docs));
  split.test = corpus.with_documents(std::move(test_docs));
  split.achieved_fraction = static_cast<double>(n_test) / static_cast<double>(D);
  return split;
}

FoldInSplit split_document_foldin(const Document& doc, std::size_t n_train, std::uint64_t seed) {
  const std::size_t n = doc.size();
  if (n_train > n) {
    throw Error(Errc::NTrainTooLarge, "n_train " + std::to_string(n_train) +
                                          " exceeds document length " + std::to_string(n));
  }
  std::vector<std::size_t> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  // Partial Fisher-Yates: the first n_train slots end up a uniform subset.
  Rng rng(seed);
  for (std::size_t i = 0; i < n_train; ++i) {
    std::size_t j = i + rng.uniform_index(n - i);
    std::swap(positions[i], positions[j]);
  }
  FoldInSplit split;
  split.heldin.assign(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.heldout.assign(positions.begin() + static_cast<std::ptrdiff_t>(n_train), positions.end());
  std::sort(split.heldin.begin(), split.heldin.end());
  std::sort(split.heldout.begin(), split.heldout.end());
  return split;
}

}  // namespace atm
