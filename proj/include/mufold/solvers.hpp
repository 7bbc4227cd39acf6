#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "mufold/encoder.hpp"
#include "mufold/quadratizer.hpp"

namespace mufold {

class SolverError : public std::runtime_error {
 public:
  enum class Kind { SearchSpaceTooLarge, AllRestartsInfeasible };
  SolverError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Clock behind deadlines and trace timestamps. Deterministic runs use the
/// tick clock (one tick per unit of work, a fixed virtual duration each);
/// wall-clock mode gives real timings but not byte-reproducible output.
class TraceClock {
 public:
  virtual ~TraceClock() = default;
  virtual void tick(uint64_t units) = 0;
  virtual double now() const = 0;  // seconds since construction
};

class WallClock final : public TraceClock {
 public:
  WallClock();
  void tick(uint64_t) override {}
  double now() const override;

 private:
  double start_;
};

class TickClock final : public TraceClock {
 public:
  explicit TickClock(double seconds_per_tick = 1e-6)
      : unit_(seconds_per_tick) {}
  void tick(uint64_t units) override { ticks_ += units; }
  double now() const override { return static_cast<double>(ticks_) * unit_; }

 private:
  double unit_;
  uint64_t ticks_ = 0;
};

struct SolverRun {
  std::string solver;
  uint64_t seed = 0;
  nlohmann::ordered_json config;  // resolved parameter snapshot
  TorsionAssignment best_angles;  // radians
  double best_value = 0.0;        // geometric fragment objective, A^2
  int64_t occurrences = 1;
  double wall_time_s = 0.0;
  std::vector<std::pair<double, double>> trace;  // (elapsed s, best so far)

  nlohmann::ordered_json to_json() const;
  static SolverRun from_json(const nlohmann::ordered_json& j);
};

struct SaConfig {
  int epochs = 500;
  int sweeps_per_epoch = 1;
  int restarts = 10;
  double t_max = 0.0;          // 0: derived from coefficient magnitudes
  double t_min = 1e-3;
  double cooling_ratio = 0.0;  // 0: (t_min/t_max)^(1/epochs)
  uint64_t seed = 0;
  bool repair = false;         // project infeasible torsions instead of discarding
  bool debug_checksum = false; // verify incremental energy every 50 epochs
};

/// Enumerates the full d^M grid and returns the maximum of the fragment
/// objective (ties: lexicographically smallest index vector). Guarded at
/// d^M <= 1e7.
SolverRun exhaustive(const TorsionModel& tm, const AngleGrid& grid, TraceClock& clock);

/// Uniform sampling of grid assignments until the deadline; at least one
/// sample is always evaluated. jobs > 1 splits sampling across threads (the
/// merge is deterministic only for jobs == 1).
SolverRun random_search(const TorsionModel& tm, const AngleGrid& grid,
                        double time_limit_s, uint64_t seed, TraceClock& clock,
                        int jobs = 1);

/// Greedy one-torsion-at-a-time sweeps in model (centrality) order, repeated
/// until a full pass yields no improvement or the round cap is hit. Works on
/// the geometry only.
SolverRun geodock_greedy(const TorsionModel& tm, const AngleGrid& grid, int max_rounds,
                         TraceClock& clock);

/// Simulated annealing on the QUBO: per restart, random start, one sweep of
/// single-bit-flip proposals per epoch in random order, Metropolis
/// acceptance exp(-dE/T), geometric cooling clamped at t_min. Restart bests
/// are decoded; infeasible ones are discarded (or repaired when configured).
/// Occurrences count restarts tying the best energy within 1e-9.
SolverRun simulated_annealing(const QuboProblem& q, const HuboProblem& h,
                              const TorsionModel& tm, const SaConfig& cfg,
                              TraceClock& clock);

/// Exhaustive minimum of a polynomial over all 2^n assignments via Gray-code
/// incremental evaluation. Oracle support; n is capped at 30.
std::pair<double, std::vector<uint8_t>> enumerate_minimum(const BinaryPolynomial& poly,
                                                          uint32_t n_vars);

/// Same for a QUBO over all its variables.
std::pair<double, std::vector<uint8_t>> enumerate_minimum(const QuboProblem& q);

/// Deterministic helpers shared by the stochastic solvers.
uint64_t derive_seed(uint64_t master, uint64_t stream);

}  // namespace mufold
