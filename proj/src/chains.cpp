#include "atm/chains.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "atm/rng.hpp"
#include "atm/sampler.hpp"

namespace atm {

struct Sample::Impl {
  explicit Impl(SamplerState s) : state(std::move(s)) {}

  SamplerState state;
  mutable std::once_flag once;
  mutable EstimateMatrices estimates;
};

Sample::Sample(SamplerState state) : impl_(std::make_shared<const Impl>(std::move(state))) {}

const SamplerState& Sample::state() const { return impl_->state; }

const EstimateMatrices& Sample::estimates() const {
  std::call_once(impl_->once,
                 [this] { impl_->estimates = estimate(impl_->state.config, impl_->state.counts); });
  return impl_->estimates;
}

SampleSet::SampleSet(std::vector<Sample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw Error(Errc::InvalidArgument, "a sample set needs at least one sample");
  for (const auto& s : samples_) {
    if (s.config() != samples_.front().config() || s.dims() != samples_.front().dims()) {
      throw Error(Errc::InvalidArgument, "samples disagree on model configuration or dimensions");
    }
  }
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Sample> run_chain(const Corpus& corpus, const ModelConfig& config, std::uint64_t seed,
                              std::uint64_t iterations, std::span<const std::uint64_t> snapshot_at,
                              const ChainObserver& observer, std::size_t chain_index) {
  for (auto it : snapshot_at) {
    if (it > iterations) {
      throw Error(Errc::InvalidArgument, "snapshot iteration " + std::to_string(it) +
                                             " beyond the run length " +
                                             std::to_string(iterations));
    }
  }
  auto wanted = [&](std::uint64_t it) {
    return std::find(snapshot_at.begin(), snapshot_at.end(), it) != snapshot_at.end();
  };
  auto capture = [&](const SamplerState& state, std::vector<Sample>& out) {
    if (auto v = validate(state, corpus); !v.empty()) {
      throw Error(Errc::InvariantViolation,
                  "state invalid at iteration " + std::to_string(state.iteration) + ": " +
                      v.front().detail);
    }
    out.emplace_back(state);
  };

  Rng rng(seed);
  SamplerState state = init_assignments(corpus, config, seed, rng);
  std::vector<Sample> samples;
  if (wanted(0)) capture(state, samples);

  const double tokens = static_cast<double>(corpus.total_tokens());
  for (std::uint64_t it = 1; it <= iterations; ++it) {
    auto start = std::chrono::steady_clock::now();
    sweep(state, corpus, rng);
    if (observer) {
      std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      observer({chain_index, it, iterations, dt.count() > 0 ? tokens / dt.count() : 0.0});
    }
    if (wanted(it)) capture(state, samples);
  }
  return samples;
}

std::uint64_t chain_seed(std::uint64_t base_seed, std::size_t chain) {
  return derive_seed(base_seed, chain);
}

SampleSet run_ensemble(const Corpus& corpus, const ModelConfig& config, std::uint64_t base_seed,
                       std::size_t chains, std::uint64_t iterations, std::size_t threads,
                       const ChainObserver& observer) {
  if (chains == 0) throw Error(Errc::InvalidArgument, "need at least one chain");
  std::vector<std::optional<Sample>> slots(chains);
  const std::uint64_t last[] = {iterations};
  parallel_for(chains, threads, [&](std::size_t c) {
    auto samples = run_chain(corpus, config, chain_seed(base_seed, c), iterations, last, observer, c);
    slots[c] = std::move(samples.front());
  });
  std::vector<Sample> samples;
  samples.reserve(chains);
  for (auto& s : slots) samples.push_back(std::move(*s));
  return SampleSet(std::move(samples));
}

void save_snapshot(const Sample& sample, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  write_snapshot(out, sample.state());
  out.close();
  if (!out) throw Error(Errc::IoError, "failed writing " + path.string());
}

Sample load_snapshot(const std::filesystem::path& path, const Corpus& corpus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  return Sample(read_snapshot(in, corpus));
}

}  // namespace atm
