#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "atm/corpus.hpp"
#include "atm/model_state.hpp"

namespace atm {

// A frozen sampler state. Copies share the same immutable data; the
// estimate matrices are computed on first use.
class Sample {
 public:
  explicit Sample(SamplerState state);

  const SamplerState& state() const;
  const ModelConfig& config() const { return state().config; }
  const Dimensions& dims() const { return state().dims; }
  const CountTables& counts() const { return state().counts; }
  std::uint64_t iteration() const { return state().iteration; }

  // Safe to call from several threads.
  const EstimateMatrices& estimates() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Samples that agree on kind, V, T, A, D, alpha and beta.
class SampleSet {
 public:
  // Throws Error(InvalidArgument) on an empty list or disagreeing samples.
  explicit SampleSet(std::vector<Sample> samples);

  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const ModelConfig& config() const { return samples_.front().config(); }
  const Dimensions& dims() const { return samples_.front().dims(); }
  auto begin() const { return samples_.begin(); }
  auto end() const { return samples_.end(); }

 private:
  std::vector<Sample> samples_;
};

struct ChainProgress {
  std::size_t chain = 0;
  std::uint64_t iteration = 0;
  std::uint64_t iterations = 0;
  double tokens_per_second = 0.0;
};

// Called after every sweep, possibly from worker threads.
using ChainObserver = std::function<void(const ChainProgress&)>;

// Initializes from `seed`, runs `iterations` sweeps, and captures a Sample
// at each iteration listed in `snapshot_at` (0 is the initial state).
// Validates the state at every capture and throws Error(InvariantViolation)
// if it fails.
std::vector<Sample> run_chain(const Corpus& corpus, const ModelConfig& config, std::uint64_t seed,
                              std::uint64_t iterations, std::span<const std::uint64_t> snapshot_at,
                              const ChainObserver& observer = {}, std::size_t chain_index = 0);

// Seed used by chain `c` of an ensemble: derive_seed(base_seed, c).
std::uint64_t chain_seed(std::uint64_t base_seed, std::size_t chain);

// S independent chains, each contributing its final sample, in chain order.
// Up to `threads` chains run at once; the result does not depend on it.
SampleSet run_ensemble(const Corpus& corpus, const ModelConfig& config, std::uint64_t base_seed,
                       std::size_t chains, std::uint64_t iterations, std::size_t threads = 1,
                       const ChainObserver& observer = {});

// Throws Error(IoError).
void save_snapshot(const Sample& sample, const std::filesystem::path& path);
// Throws Error(IoError), Error(FormatError) or Error(CorpusMismatch).
Sample load_snapshot(const std::filesystem::path& path, const Corpus& corpus);

// Runs fn(i) for i in [0, n) on up to `threads` threads.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace atm
