#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "atm/chains.hpp"
#include "atm/model_state.hpp"

namespace atm {

// Input file recorded in a manifest: where it was and what it contained.
struct DataFile {
  std::string path;
  std::string digest;  // "fnv1a64:<16 hex digits>"

  bool operator==(const DataFile&) const = default;
};

// Everything needed to repeat a training run. Stored as <dir>/manifest.txt,
// one "key=value" per line.
struct RunManifest {
  std::string tool = "atm " ATM_VERSION;
  std::string command = "train";
  ModelConfig config;
  std::uint64_t iterations = 0;
  std::uint64_t base_seed = 0;
  std::string rng = "mt19937_64";
  DataFile corpus;
  DataFile vocab;
  DataFile authors;
  std::vector<std::uint64_t> chain_seeds;
  // Relative to the model directory.
  std::vector<std::string> snapshots;

  bool operator==(const RunManifest&) const = default;
};

// 64-bit FNV-1a over the file bytes. Throws Error(IoError).
std::string file_digest(const std::filesystem::path& path);

void write_manifest(std::ostream& out, const RunManifest& manifest);
// Throws Error(FormatError).
RunManifest read_manifest(std::istream& in);

// Relative path of chain c's snapshot: chain<c>/iter<n>.atm.
std::string snapshot_name(std::size_t chain, std::uint64_t iteration);

// Writes every sample and the manifest. The manifest's snapshot list is
// filled in here.
void save_model_dir(const std::filesystem::path& dir, const SampleSet& samples,
                    RunManifest manifest);

RunManifest load_manifest(const std::filesystem::path& dir);
SampleSet load_model_dir(const std::filesystem::path& dir, const RunManifest& manifest,
                         const Corpus& corpus);

}  // namespace atm
