#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kbbm/offspring.hpp"
#include "kbbm/special_math.hpp"

namespace kbbm {

struct SimConfig {
  DriftParams params;
  OffspringLaw law = OffspringLaw::binary();
  double start_x = 1.0;
  /// Observation times, strictly increasing and positive.
  std::vector<double> schedule;
  std::size_t max_population = 10'000'000;
  std::uint64_t seed = 0;
  /// Workers used inside one trajectory between observation barriers.
  unsigned threads = 1;
  /// Kill particles whose path reaches (-inf, 0]. Turning this off is a
  /// test switch for checking the free branching law.
  bool absorbing = true;

  /// Throws std::invalid_argument on a malformed configuration. A branching
  /// rate of 0 is accepted here (single-particle mode).
  void validate() const;
};

/// The never-absorbed particles alive at `time`.
struct Snapshot {
  double time = 0.0;
  std::vector<double> positions;
  /// Lineage identifiers, parallel to positions.
  std::vector<std::uint64_t> ids;
  std::uint64_t total_ever_branched = 0;
  std::uint64_t absorbed_count = 0;

  std::size_t size() const { return positions.size(); }
};

enum class SimStatus { kCompleted, kPopulationCapExceeded };

struct SimResult {
  /// One snapshot per completed schedule time, in order.
  std::vector<Snapshot> snapshots;
  SimStatus status = SimStatus::kCompleted;
  std::string message;

  bool ok() const { return status == SimStatus::kCompleted; }
};

/// Probability that a Brownian bridge from x0 to x1 over dt stays > 0.
double bridge_survival_prob(double x0, double x1, double dt);

using SnapshotObserver = std::function<void(const Snapshot&)>;

/// Exact-law event-driven simulation from a single particle at start_x.
/// Each particle's randomness comes from its own counter-based stream keyed
/// by (seed, lineage id), so output is independent of `threads`.
SimResult simulate(const SimConfig& config);

/// As simulate(), but hands each snapshot to `observer` instead of storing
/// it. Returns the status with an empty snapshot list.
SimResult simulate(const SimConfig& config, const SnapshotObserver& observer);

/// Continues from `start` (all particles alive at start.time) with fresh
/// streams keyed by config.seed. Schedule times must exceed start.time.
SimResult simulate_from(const Snapshot& start, const SimConfig& config);

/// Runs `replicates` independent copies of `config` (replicate i seeded by
/// replicate_seed(config.seed, i), one worker each) and returns
/// stats(result) per replicate, in replicate order. Throws
/// PopulationCapExceeded if any replicate hits the cap.
using ReplicateStatistic = std::function<std::vector<double>(const SimResult&)>;
std::vector<std::vector<double>> replicate_statistics(const SimConfig& config, std::size_t replicates,
                                                      unsigned threads, const ReplicateStatistic& stats);

/// Number of positions in A = (a, b].
std::size_t count_in(const Snapshot& s, const Interval& a);

}  // namespace kbbm
