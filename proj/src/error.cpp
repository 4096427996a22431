#include "atm/error.hpp"

namespace atm {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DuplicateWord: return "DuplicateWord";
    case Errc::EmptyWord: return "EmptyWord";
    case Errc::DuplicateAuthor: return "DuplicateAuthor";
    case Errc::EmptyAuthor: return "EmptyAuthor";
    case Errc::BadFormat: return "BadFormat";
    case Errc::TokenIdOutOfRange: return "TokenIdOutOfRange";
    case Errc::AuthorIdOutOfRange: return "AuthorIdOutOfRange";
    case Errc::NoAuthors: return "NoAuthors";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::NTrainTooLarge: return "NTrainTooLarge";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NotDecremented: return "NotDecremented";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::IoError: return "IoError";
    case Errc::FormatError: return "FormatError";
    case Errc::CorpusMismatch: return "CorpusMismatch";
    case Errc::UnknownAuthor: return "UnknownAuthor";
    case Errc::EmptyAuthorSet: return "EmptyAuthorSet";
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::WrongModelKind: return "WrongModelKind";
    case Errc::TopicOutOfRange: return "TopicOutOfRange";
    case Errc::NotADistribution: return "NotADistribution";
    case Errc::ZeroComponent: return "ZeroComponent";
  }
  return "Unknown";
}

bool is_data_error(Errc code) {
  switch (code) {
    case Errc::ShapeMismatch:
    case Errc::NotDecremented:
    case Errc::InvariantViolation:
    case Errc::InvalidArgument:
      return false;
    default:
      return true;
  }
}

Error::Error(Errc code, const std::string& message, std::size_t line)
    : std::runtime_error(line == 0 ? message
                                   : "line " + std::to_string(line) + ": " + message),
      code_(code),
      line_(line) {}

}  // namespace atm
