#include "kbbm/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kbbm/errors.hpp"
#include "kbbm/parallel.hpp"
#include "kbbm/rng.hpp"

namespace kbbm {
namespace {

constexpr std::uint64_t kRootId = 1;
// Below this many particles per worker the barrier runs single-threaded.
constexpr std::size_t kMinParticlesPerWorker = 4096;

struct Particle {
  double x;
  double t;
  double death;
  std::uint64_t id;
  std::uint64_t key;
  std::uint64_t stream_pos;
};

struct IntervalTally {
  std::vector<Particle> survivors;
  std::uint64_t branched = 0;
  std::uint64_t absorbed = 0;
  bool overflow = false;
};

Particle newborn(double x, double t, std::uint64_t id, std::uint64_t seed, double beta) {
  const std::uint64_t key = stream_key(seed, id);
  Stream s(key);
  const double death = beta > 0.0 ? t + s.exponential(beta) : kInf;
  return {x, t, death, id, key, s.position()};
}

class Engine {
 public:
  explicit Engine(const SimConfig& c) : cfg_(c), theta_(c.params.theta), beta_(c.params.beta) {}

  // Advances one particle and all its descendants to time `until`,
  // appending survivors to `tally`.
  void advance(const Particle& start, double until, IntervalTally& tally, const std::atomic<bool>& abort) const {
    std::vector<Particle> stack{start};
    std::size_t produced = 0;
    while (!stack.empty()) {
      if (abort.load(std::memory_order_relaxed)) return;
      if (produced + stack.size() > cfg_.max_population) {
        tally.overflow = true;
        return;
      }
      Particle q = stack.back();
      stack.pop_back();
      Stream rng(q.key, q.stream_pos);
      const double target = std::min(q.death, until);
      const double dt = target - q.t;
      if (dt > 0.0) {
        const double x1 = q.x - theta_ * dt + std::sqrt(dt) * rng.normal();
        if (cfg_.absorbing) {
          const bool killed = x1 <= 0.0 || rng.uniform() >= bridge_survival_prob(q.x, x1, dt);
          if (killed) {
            ++tally.absorbed;
            continue;
          }
        }
        q.x = x1;
        q.t = target;
      }
      if (q.death <= until) {
        const int k = cfg_.law.sample(rng.uniform());
        ++tally.branched;
        // Push in reverse so child 0 is processed first.
        for (int j = k - 1; j >= 0; --j) {
          stack.push_back(newborn(q.x, q.t, child_id(q.id, static_cast<std::uint64_t>(j)), cfg_.seed, beta_));
        }
        continue;
      }
      q.stream_pos = rng.position();
      tally.survivors.push_back(q);
      ++produced;
    }
  }

  IntervalTally step(const std::vector<Particle>& alive, double until) const {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(cfg_.threads, alive.size() / kMinParticlesPerWorker));
    std::vector<IntervalTally> parts(workers);
    std::atomic<bool> abort{false};
    parallel_chunks(alive.size(), static_cast<unsigned>(workers), [&](std::size_t b, std::size_t e, std::size_t w) {
      IntervalTally& part = parts[w];
      for (std::size_t i = b; i < e; ++i) {
        advance(alive[i], until, part, abort);
        if (part.overflow || part.survivors.size() > cfg_.max_population) {
          part.overflow = true;
          abort.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
    IntervalTally total;
    std::size_t n = 0;
    for (const auto& p : parts) {
      n += p.survivors.size();
      total.overflow = total.overflow || p.overflow;
    }
    if (total.overflow || n > cfg_.max_population) {
      total.overflow = true;
      return total;
    }
    total.survivors.reserve(n);
    for (auto& p : parts) {
      total.survivors.insert(total.survivors.end(), p.survivors.begin(), p.survivors.end());
      total.branched += p.branched;
      total.absorbed += p.absorbed;
    }
    return total;
  }

  SimResult run(std::vector<Particle> alive, double now, const SnapshotObserver* observer) const {
    SimResult result;
    std::uint64_t branched = 0;
    std::uint64_t absorbed = 0;
    for (double until : cfg_.schedule) {
      if (!(until > now)) throw std::invalid_argument("simulate: schedule times must exceed the start time");
      IntervalTally tally = step(alive, until);
      if (tally.overflow) {
        std::ostringstream os;
        os << "population exceeded cap " << cfg_.max_population << " before t=" << until;
        result.status = SimStatus::kPopulationCapExceeded;
        result.message = os.str();
        return result;
      }
      alive = std::move(tally.survivors);
      branched += tally.branched;
      absorbed += tally.absorbed;
      now = until;

      Snapshot snap;
      snap.time = until;
      snap.positions.reserve(alive.size());
      snap.ids.reserve(alive.size());
      for (const Particle& p : alive) {
        snap.positions.push_back(p.x);
        snap.ids.push_back(p.id);
      }
      snap.total_ever_branched = branched;
      snap.absorbed_count = absorbed;
      if (observer) {
        (*observer)(snap);
      } else {
        result.snapshots.push_back(std::move(snap));
      }
    }
    return result;
  }

 private:
  const SimConfig& cfg_;
  double theta_;
  double beta_;
};

}  // namespace

void SimConfig::validate() const {
  if (!(params.theta >= 0.0) || !std::isfinite(params.theta)) {
    throw std::invalid_argument("SimConfig: theta must be finite and >= 0");
  }
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    throw std::invalid_argument("SimConfig: beta must be finite and >= 0");
  }
  if (std::abs(law.mean() - params.mu) > 1e-9) {
    throw std::invalid_argument("SimConfig: params.mu does not match the offspring law mean");
  }
  if (!(start_x > 0.0)) throw std::invalid_argument("SimConfig: start_x must be > 0");
  if (max_population < 1) throw std::invalid_argument("SimConfig: max_population must be >= 1");
  if (threads < 1) throw std::invalid_argument("SimConfig: threads must be >= 1");
  double prev = 0.0;
  for (double t : schedule) {
    if (!(t > prev) || !std::isfinite(t)) {
      throw std::invalid_argument("SimConfig: schedule must be strictly increasing and positive");
    }
    prev = t;
  }
}

double bridge_survival_prob(double x0, double x1, double dt) {
  if (!(x0 > 0.0) || !(x1 > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("bridge_survival_prob: x0, x1 and dt must be > 0");
  }
  return -std::expm1(-2.0 * x0 * x1 / dt);
}

SimResult simulate(const SimConfig& config) {
  config.validate();
  Engine engine(config);
  return engine.run({newborn(config.start_x, 0.0, kRootId, config.seed, config.params.beta)}, 0.0, nullptr);
}

SimResult simulate(const SimConfig& config, const SnapshotObserver& observer) {
  config.validate();
  Engine engine(config);
  return engine.run({newborn(config.start_x, 0.0, kRootId, config.seed, config.params.beta)}, 0.0, &observer);
}

SimResult simulate_from(const Snapshot& start, const SimConfig& config) {
  config.validate();
  if (start.ids.size() != start.positions.size()) {
    throw std::invalid_argument("simulate_from: snapshot ids and positions differ in length");
  }
  std::vector<Particle> alive;
  alive.reserve(start.size());
  for (std::size_t i = 0; i < start.size(); ++i) {
    alive.push_back(newborn(start.positions[i], start.time, start.ids[i], config.seed, config.params.beta));
  }
  Engine engine(config);
  SimResult r = engine.run(std::move(alive), start.time, nullptr);
  for (Snapshot& s : r.snapshots) {
    s.total_ever_branched += start.total_ever_branched;
    s.absorbed_count += start.absorbed_count;
  }
  return r;
}

std::vector<std::vector<double>> replicate_statistics(const SimConfig& config, std::size_t replicates,
                                                      unsigned threads, const ReplicateStatistic& stats) {
  config.validate();
  std::vector<std::vector<double>> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t i) {
    SimConfig cfg = config;
    cfg.threads = 1;
    cfg.seed = replicate_seed(config.seed, i);
    const SimResult r = simulate(cfg);
    if (!r.ok()) throw PopulationCapExceeded("replicate " + std::to_string(i) + ": " + r.message);
    out[i] = stats(r);
  });
  return out;
}

std::size_t count_in(const Snapshot& s, const Interval& a) {
  return static_cast<std::size_t>(
      std::count_if(s.positions.begin(), s.positions.end(), [&](double y) { return a.contains(y); }));
}

}  // namespace kbbm
