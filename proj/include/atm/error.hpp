#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace atm {

enum class Errc {
  // Input files and corpus handling.
  DuplicateWord,
  EmptyWord,
  DuplicateAuthor,
  EmptyAuthor,
  BadFormat,
  TokenIdOutOfRange,
  AuthorIdOutOfRange,
  NoAuthors,
  EmptyCorpus,
  NTrainTooLarge,
  InvalidArgument,
  // Sampler state.
  ShapeMismatch,
  NotDecremented,
  InvariantViolation,
  // Snapshots and model directories.
  IoError,
  FormatError,
  CorpusMismatch,
  // Evaluation and analytics.
  UnknownAuthor,
  EmptyAuthorSet,
  EmptyDocument,
  WrongModelKind,
  TopicOutOfRange,
  NotADistribution,
  ZeroComponent,
};

std::string_view to_string(Errc code);

// True for errors caused by user-supplied data (bad files, unknown ids)
// rather than by internal failures.
bool is_data_error(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::size_t line = 0);

  Errc code() const noexcept { return code_; }
  // 1-based input line the error refers to, or 0.
  std::size_t line() const noexcept { return line_; }

 private:
  Errc code_;
  std::size_t line_;
};

}  // namespace atm
