#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "atm/model_state.hpp"

namespace atm {
namespace {

void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::FormatError,
                "snapshot: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = s.find(' ', i);
    if (j == std::string_view::npos) j = s.size();
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

void write_snapshot(std::ostream& out, const SamplerState& state) {
  const auto& cfg = state.config;
  const auto& dims = state.dims;
  out << "ATM v1 kind=" << to_string(cfg.kind) << " V=" << dims.words << " T=" << cfg.topics
      << " A=" << dims.authors << " D=" << dims.docs << " alpha=" << format_real(cfg.hyper.alpha)
      << " beta=" << format_real(cfg.hyper.beta) << " iter=" << state.iteration
      << " seed=" << state.seed << '\n';

  const auto& asg = state.assignments;
  std::string buf;
  buf.reserve(1 << 16);
  for (std::size_t d = 0; d < asg.num_documents(); ++d) {
    for (std::size_t p = 0; p < asg.doc_size(d); ++p) {
      append_uint(buf, d);
      buf += ' ';
      append_uint(buf, p);
      buf += ' ';
      if (cfg.has_topics()) {
        append_uint(buf, asg.topic(d, p));
      } else {
        buf += '-';
      }
      buf += ' ';
      if (cfg.has_authors()) {
        append_uint(buf, asg.author(d, p));
      } else {
        buf += '-';
      }
      buf += '\n';
      if (buf.size() > (1 << 16) - 64) {
        out << buf;
        buf.clear();
      }
    }
  }
  out << buf;
  if (!out) throw Error(Errc::IoError, "snapshot: write failed");
}

SamplerState read_snapshot(std::istream& in, const Corpus& corpus) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::FormatError, "snapshot: missing header");
  auto head = split_spaces(line);
  if (head.size() < 2 || head[0] != "ATM" || head[1] != "v1") {
    throw Error(Errc::FormatError, "snapshot: header must start with 'ATM v1'");
  }
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = 2; i < head.size(); ++i) {
    auto eq = head[i].find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::FormatError, "snapshot: bad header field '" + std::string(head[i]) + "'");
    }
    kv.emplace(std::string(head[i].substr(0, eq)), std::string(head[i].substr(eq + 1)));
  }
  for (const char* key : {"kind", "V", "T", "A", "D", "alpha", "beta", "iter", "seed"}) {
    if (!kv.count(key)) {
      throw Error(Errc::FormatError, std::string("snapshot: header lacks '") + key + "'");
    }
  }

  ModelConfig cfg;
  try {
    cfg.kind = parse_model_kind(kv["kind"]);
  } catch (const Error&) {
    throw Error(Errc::FormatError, "snapshot: unknown kind '" + kv["kind"] + "'");
  }
  cfg.topics = parse_number<std::size_t>(kv["T"], "T");
  cfg.hyper.alpha = parse_number<double>(kv["alpha"], "alpha");
  cfg.hyper.beta = parse_number<double>(kv["beta"], "beta");
  auto V = parse_number<std::size_t>(kv["V"], "V");
  auto A = parse_number<std::size_t>(kv["A"], "A");
  auto D = parse_number<std::size_t>(kv["D"], "D");
  auto iter = parse_number<std::uint64_t>(kv["iter"], "iter");
  auto seed = parse_number<std::uint64_t>(kv["seed"], "seed");
  try {
    cfg.check();
  } catch (const Error& e) {
    throw Error(Errc::FormatError, std::string("snapshot: ") + e.what());
  }

  if (V != corpus.num_words() || A != corpus.num_authors() || D != corpus.num_documents()) {
    throw Error(Errc::CorpusMismatch,
                "snapshot V/A/D = " + std::to_string(V) + "/" + std::to_string(A) + "/" +
                    std::to_string(D) + " but corpus has " + std::to_string(corpus.num_words()) +
                    "/" + std::to_string(corpus.num_authors()) + "/" +
                    std::to_string(corpus.num_documents()));
  }

  AssignmentState asg(corpus, cfg.has_topics(), cfg.has_authors());
  std::size_t line_no = 1;
  for (std::size_t d = 0; d < D; ++d) {
    const auto& doc = corpus.document(d);
    for (std::size_t p = 0; p < doc.size(); ++p) {
      ++line_no;
      if (!std::getline(in, line)) {
        throw Error(Errc::FormatError, "snapshot: fewer token lines than corpus tokens", line_no);
      }
      auto f = split_spaces(line);
      if (f.size() != 4) throw Error(Errc::FormatError, "snapshot: expected 'd p z x'", line_no);
      if (parse_number<std::size_t>(f[0], "d") != d || parse_number<std::size_t>(f[1], "p") != p) {
        throw Error(Errc::FormatError, "snapshot: token lines out of canonical order", line_no);
      }
      if (cfg.has_topics()) {
        auto z = parse_number<TopicId>(f[2], "z");
        if (z >= cfg.topics) throw Error(Errc::FormatError, "snapshot: topic out of range", line_no);
        asg.topic(d, p) = z;
      } else if (f[2] != "-") {
        throw Error(Errc::FormatError, "snapshot: z must be '-' for this kind", line_no);
      }
      if (cfg.has_authors()) {
        auto x = parse_number<AuthorId>(f[3], "x");
        if (!std::binary_search(doc.authors.begin(), doc.authors.end(), x)) {
          throw Error(Errc::FormatError, "snapshot: author not on document", line_no);
        }
        asg.author(d, p) = x;
      } else if (f[3] != "-") {
        throw Error(Errc::FormatError, "snapshot: x must be '-' for this kind", line_no);
      }
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) {
      throw Error(Errc::FormatError, "snapshot: more token lines than corpus tokens", line_no);
    }
  }
  return make_state(corpus, cfg, std::move(asg), iter, seed);
}

}  // namespace atm
