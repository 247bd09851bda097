#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "ruinkit/embedding.hpp"
#include "ruinkit/mph.hpp"
#include "ruinkit/solver.hpp"

namespace ruinkit {

/// Ruin time, deficit -R(T) and claim count N(T); the last three are
/// meaningful only when `ruined`.
struct PathOutcome {
  bool ruined = false;
  double T = 0.0;
  double deficit = 0.0;
  std::size_t claims = 0;
};

struct Estimate {
  double value;
  double std_error;
  std::size_t n_paths;
};

/// Simulates R(t) = u + (premium income) - (claims) claim by claim, carrying
/// the claim-process phase from one claim to the next.  Holds precomputed
/// jump tables and may be reused for many paths.
class PathSimulator {
 public:
  PathSimulator(const FluidBlocks& blocks, std::size_t s_cap);

  template <class Urbg>
  PathOutcome run(double u, Urbg& rng);

 private:
  template <class Urbg>
  double next_arrival(Urbg& rng, double& income);

  FluidKind kind_;
  std::size_t s_cap_;
  ClaimSampler claims_;
  double lambda_ = 0.0;
  double premium_ = 0.0;
  // environment
  RowVector env_initial_;
  std::vector<double> env_total_rate_;
  std::vector<double> env_claim_prob_;
  std::vector<double> env_premium_;
  std::vector<std::vector<double>> env_jump_cdf_;
  Eigen::Index env_state_ = 0;
  // PH arrivals
  RowVector arrival_initial_;
  JumpTable arrival_table_;
};

/// One path with a freshly built simulator.
template <class Urbg>
PathOutcome simulate_path(const FluidBlocks& blocks, double u, std::size_t s_cap, Urbg& rng) {
  PathSimulator sim(blocks, s_cap);
  return sim.run(u, rng);
}

/// Seeded stream for chunk `stream` of a run.  Paths are split into fixed
/// chunks, so results do not depend on the number of worker threads.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Worker count: RUINKIT_THREADS if set, else the hardware concurrency.
unsigned worker_threads();

/// Mean of e^{-theta T} 1{ruined, N(T) <= s, -R(T) >= y} over n_paths paths.
Estimate estimate_transform(const FluidBlocks& blocks, const RuinQuery& query, std::size_t n_paths,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------

template <class Urbg>
double PathSimulator::next_arrival(Urbg& rng, double& income) {
  std::exponential_distribution<double> unit(1.0);
  switch (kind_) {
    case FluidKind::poisson: {
      const double dt = unit(rng) / lambda_;
      income = premium_ * dt;
      return dt;
    }
    case FluidKind::ph_arrival: {
      Eigen::Index stage = sample_index(arrival_initial_, rng);
      const double dt = arrival_table_.run(stage, rng);
      income = premium_ * dt;
      return dt;
    }
    case FluidKind::environment: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double elapsed = 0.0;
      income = 0.0;
      for (;;) {
        const auto i = static_cast<std::size_t>(env_state_);
        const double dt = unit(rng) / env_total_rate_[i];
        elapsed += dt;
        income += env_premium_[i] * dt;
        if (unif(rng) < env_claim_prob_[i]) return elapsed;
        const auto& cdf = env_jump_cdf_[i];
        const double r = unif(rng);
        std::size_t j = 0;
        while (j + 1 < cdf.size() && cdf[j] <= r) ++j;
        env_state_ = static_cast<Eigen::Index>(j);
      }
    }
  }
  return 0.0;
}

template <class Urbg>
PathOutcome PathSimulator::run(double u, Urbg& rng) {
  PathOutcome out;
  if (kind_ == FluidKind::environment) env_state_ = sample_index(env_initial_, rng);
  claims_.reset(rng);
  double reserve = u;
  double t = 0.0;
  for (std::size_t k = 1; k <= s_cap_; ++k) {
    double income = 0.0;
    t += next_arrival(rng, income);
    reserve += income - claims_.next(rng);
    if (reserve < 0.0) {
      out.ruined = true;
      out.T = t;
      out.deficit = -reserve;
      out.claims = k;
      return out;
    }
  }
  return out;
}

}  // namespace ruinkit
