#include "ruinkit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "ruinkit/errors.hpp"

namespace ruinkit {

namespace {

constexpr std::size_t kChunkPaths = 4096;

struct ChunkSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

PathSimulator::PathSimulator(const FluidBlocks& blocks, std::size_t s_cap)
    : kind_(blocks.kind()), s_cap_(s_cap), claims_(blocks.model(), s_cap) {
  if (s_cap < 1) throw DimensionMismatch("s_cap must be at least 1");
  switch (kind_) {
    case FluidKind::poisson:
      lambda_ = blocks.lambda();
      premium_ = blocks.premium();
      break;
    case FluidKind::ph_arrival: {
      const PhaseTypeRep& arr = *blocks.arrival();
      premium_ = blocks.premium();
      arrival_initial_ = arr.alpha;
      arrival_table_ = JumpTable(arr.A, Matrix(arr.exit_vector()));
      break;
    }
    case FluidKind::environment: {
      const Environment& env = *blocks.environment();
      const Eigen::Index n = env.generator.rows();
      env_initial_ = env.initial;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double leave = -env.generator(i, i);
        const double total = env.lambda(i) + leave;
        env_total_rate_.push_back(total);
        env_claim_prob_.push_back(env.lambda(i) / total);
        env_premium_.push_back(env.premium(i));
        std::vector<double> cdf;
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j != i && leave > 0.0) acc += env.generator(i, j) / leave;
          cdf.push_back(acc);
        }
        if (leave > 0.0) {
          // Force the last reachable state to absorb rounding in the cumulative sum.
          for (Eigen::Index j = n - 1; j >= 0; --j)
            if (j != i && env.generator(i, j) > 0.0) {
              cdf[static_cast<std::size_t>(j)] = 2.0;
              break;
            }
        }
        env_jump_cdf_.push_back(std::move(cdf));
      }
      break;
    }
  }
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RUINKIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

Estimate estimate_transform(const FluidBlocks& blocks, const RuinQuery& query, std::size_t n_paths,
                            std::uint64_t seed) {
  validate_query(query);
  if (n_paths < 1) throw DimensionMismatch("n_paths must be at least 1");
  const std::size_t chunks = (n_paths + kChunkPaths - 1) / kChunkPaths;
  std::vector<ChunkSums> sums(chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    PathSimulator sim(blocks, query.s);
    for (std::size_t c = next++; c < chunks; c = next++) {
      auto rng = make_stream(seed, c);
      const std::size_t begin = c * kChunkPaths;
      const std::size_t end = std::min(n_paths, begin + kChunkPaths);
      ChunkSums acc;
      for (std::size_t i = begin; i < end; ++i) {
        const PathOutcome o = sim.run(query.u, rng);
        if (!o.ruined || o.deficit < query.y) continue;
        const double x = query.theta == 0.0 ? 1.0 : std::exp(-query.theta * o.T);
        acc.sum += x;
        acc.sum_sq += x * x;
      }
      sums[c] = acc;
    }
  };

  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  double sum = 0.0, sum_sq = 0.0;
  for (const auto& s : sums) {
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return Estimate{mean, std::sqrt(var / n), n_paths};
}

}  // namespace ruinkit
