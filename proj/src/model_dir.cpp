#include "atm/model_dir.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace atm {
namespace {

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
T parse_field(const std::string& text, const std::string& key) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::FormatError, "manifest: bad value for '" + key + "': '" + text + "'");
  }
  return value;
}

}  // namespace

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  auto [ptr, ec] = std::to_chars(hex, hex + 16, h, 16);
  std::string digits(hex, ptr);
  return "fnv1a64:" + std::string(16 - digits.size(), '0') + digits;
}

std::string snapshot_name(std::size_t chain, std::uint64_t iteration) {
  return "chain" + std::to_string(chain) + "/iter" + std::to_string(iteration) + ".atm";
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "tool=" << m.tool << '\n'
      << "command=" << m.command << '\n'
      << "model=" << to_string(m.config.kind) << '\n'
      << "topics=" << m.config.topics << '\n'
      << "alpha=" << format_real(m.config.hyper.alpha) << '\n'
      << "beta=" << format_real(m.config.hyper.beta) << '\n'
      << "iterations=" << m.iterations << '\n'
      << "chains=" << m.chain_seeds.size() << '\n'
      << "base_seed=" << m.base_seed << '\n'
      << "rng=" << m.rng << '\n'
      << "corpus=" << m.corpus.path << '\n'
      << "corpus_digest=" << m.corpus.digest << '\n'
      << "vocab=" << m.vocab.path << '\n'
      << "vocab_digest=" << m.vocab.digest << '\n'
      << "authors=" << m.authors.path << '\n'
      << "authors_digest=" << m.authors.digest << '\n';
  for (std::size_t c = 0; c < m.chain_seeds.size(); ++c) {
    out << "chain." << c << ".seed=" << m.chain_seeds[c] << '\n';
    if (c < m.snapshots.size()) out << "chain." << c << ".snapshot=" << m.snapshots[c] << '\n';
  }
}

RunManifest read_manifest(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(Errc::FormatError, "manifest: bad line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(Errc::FormatError, "manifest: missing '" + key + "'");
    return it->second;
  };

  RunManifest m;
  m.tool = get("tool");
  m.command = get("command");
  try {
    m.config.kind = parse_model_kind(get("model"));
  } catch (const Error&) {
    throw Error(Errc::FormatError, "manifest: unknown model '" + get("model") + "'");
  }
  m.config.topics = parse_field<std::size_t>(get("topics"), "topics");
  m.config.hyper.alpha = parse_field<double>(get("alpha"), "alpha");
  m.config.hyper.beta = parse_field<double>(get("beta"), "beta");
  m.iterations = parse_field<std::uint64_t>(get("iterations"), "iterations");
  m.base_seed = parse_field<std::uint64_t>(get("base_seed"), "base_seed");
  m.rng = get("rng");
  m.corpus = {get("corpus"), get("corpus_digest")};
  m.vocab = {get("vocab"), get("vocab_digest")};
  m.authors = {get("authors"), get("authors_digest")};
  const auto chains = parse_field<std::size_t>(get("chains"), "chains");
  for (std::size_t c = 0; c < chains; ++c) {
    const std::string prefix = "chain." + std::to_string(c);
    m.chain_seeds.push_back(parse_field<std::uint64_t>(get(prefix + ".seed"), prefix + ".seed"));
    m.snapshots.push_back(get(prefix + ".snapshot"));
  }
  return m;
}

void save_model_dir(const std::filesystem::path& dir, const SampleSet& samples,
                    RunManifest manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  manifest.snapshots.clear();
  for (std::size_t c = 0; c < samples.size(); ++c) {
    const std::string rel = snapshot_name(c, samples[c].iteration());
    std::filesystem::create_directories((dir / rel).parent_path(), ec);
    if (ec) throw Error(Errc::IoError, "cannot create directory under " + dir.string());
    save_snapshot(samples[c], dir / rel);
    manifest.snapshots.push_back(rel);
  }
  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + (dir / "manifest.txt").string());
  write_manifest(out, manifest);
  if (!out) throw Error(Errc::IoError, "failed writing manifest");
}

RunManifest load_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt", std::ios::binary);
  if (!in) throw Error(Errc::IoError, "no manifest.txt in " + dir.string());
  return read_manifest(in);
}

SampleSet load_model_dir(const std::filesystem::path& dir, const RunManifest& manifest,
                         const Corpus& corpus) {
  std::vector<Sample> samples;
  for (const auto& rel : manifest.snapshots) {
    Sample s = load_snapshot(dir / rel, corpus);
    if (s.config() != manifest.config) {
      throw Error(Errc::FormatError, rel + ": configuration differs from the manifest");
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw Error(Errc::FormatError, "manifest lists no snapshots");
  return SampleSet(std::move(samples));
}

}  // namespace atm
