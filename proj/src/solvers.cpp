#include "mufold/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

namespace mufold {
namespace {

constexpr double kTieEps = 1e-9;

double steady_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// xorshift-free bounded sampling on top of mt19937_64; unbiased (Lemire).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  uint32_t below(uint32_t bound) {
    const uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(static_cast<uint32_t>(x)) * bound;
    auto low = static_cast<uint32_t>(m);
    if (low < bound) {
      const uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        m = static_cast<__uint128_t>(static_cast<uint32_t>(next())) * bound;
        low = static_cast<uint32_t>(m);
      }
    }
    return static_cast<uint32_t>(m >> 32);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(static_cast<uint32_t>(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<int> decode_indices(uint64_t flat, int d, int m) {
  std::vector<int> idx(static_cast<size_t>(m), 0);
  for (int i = m - 1; i >= 0; --i) {
    idx[static_cast<size_t>(i)] = static_cast<int>(flat % static_cast<uint64_t>(d));
    flat /= static_cast<uint64_t>(d);
  }
  return idx;
}

TorsionAssignment to_angles(const std::vector<int>& idx, const AngleGrid& grid) {
  TorsionAssignment t(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) t[i] = grid.value(idx[i]);
  return t;
}

nlohmann::ordered_json angles_to_degrees(const TorsionAssignment& t) {
  auto arr = nlohmann::ordered_json::array();
  for (double a : t) arr.push_back(a * 180.0 / 3.14159265358979323846);
  return arr;
}

}  // namespace

WallClock::WallClock() : start_(steady_seconds()) {}

double WallClock::now() const { return steady_seconds() - start_; }

uint64_t derive_seed(uint64_t master, uint64_t stream) {
  // splitmix64 over the combined value
  uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

nlohmann::ordered_json SolverRun::to_json() const {
  nlohmann::ordered_json j;
  j["solver"] = solver;
  j["seed"] = seed;
  j["config"] = config;
  j["best_value"] = best_value;
  j["best_angles_deg"] = angles_to_degrees(best_angles);
  j["occurrences"] = occurrences;
  j["wall_time_s"] = wall_time_s;
  auto& tr = j["trace"] = nlohmann::ordered_json::array();
  for (const auto& [t, v] : trace) tr.push_back({t, v});
  return j;
}

SolverRun SolverRun::from_json(const nlohmann::ordered_json& j) {
  SolverRun run;
  run.solver = j.at("solver").get<std::string>();
  run.seed = j.at("seed").get<uint64_t>();
  run.config = j.at("config");
  run.best_value = j.at("best_value").get<double>();
  for (const auto& a : j.at("best_angles_deg")) {
    run.best_angles.push_back(a.get<double>() * 3.14159265358979323846 / 180.0);
  }
  run.occurrences = j.at("occurrences").get<int64_t>();
  run.wall_time_s = j.at("wall_time_s").get<double>();
  for (const auto& p : j.at("trace")) {
    run.trace.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  return run;
}

SolverRun exhaustive(const TorsionModel& tm, const AngleGrid& grid, TraceClock& clock) {
  const int m = tm.torsion_count();
  double space = 1.0;
  for (int i = 0; i < m; ++i) space *= grid.d;
  if (space > 1e7) {
    throw SolverError(SolverError::Kind::SearchSpaceTooLarge,
                      "exhaustive search over " + std::to_string(space) +
                          " assignments exceeds the 1e7 guard");
  }
  const auto total = static_cast<uint64_t>(space);

  SolverRun run;
  run.solver = "exhaustive";
  run.config = {{"granularity", grid.d}, {"torsions", m}};

  double best = -1.0;
  std::vector<int> best_idx;
  int64_t occurrences = 0;
  for (uint64_t flat = 0; flat < total; ++flat) {
    const auto idx = decode_indices(flat, grid.d, m);
    const double v = objective_fragment(tm, to_angles(idx, grid));
    clock.tick(1);
    if (v > best + kTieEps) {
      best = v;
      best_idx = idx;
      occurrences = 1;
      run.trace.emplace_back(clock.now(), v);
    } else if (v >= best - kTieEps) {
      ++occurrences;
    }
  }
  run.best_angles = to_angles(best_idx, grid);
  run.best_value = best;
  run.occurrences = occurrences;
  run.wall_time_s = clock.now();
  return run;
}

SolverRun random_search(const TorsionModel& tm, const AngleGrid& grid,
                        double time_limit_s, uint64_t seed, TraceClock& clock,
                        int jobs) {
  if (time_limit_s <= 0) throw std::invalid_argument("time limit must be positive");
  const int m = tm.torsion_count();

  struct WorkerResult {
    double best = -1.0;
    std::vector<int> best_idx;
    int64_t occurrences = 0;
    uint64_t samples = 0;
    std::vector<std::pair<double, double>> trace;
  };

  auto work = [&](uint64_t worker_seed, WorkerResult& out) {
    Rng rng(worker_seed);
    std::vector<int> idx(static_cast<size_t>(m));
    do {
      for (int i = 0; i < m; ++i)
        idx[static_cast<size_t>(i)] =
            static_cast<int>(rng.below(static_cast<uint32_t>(grid.d)));
      const double v = objective_fragment(tm, to_angles(idx, grid));
      clock.tick(1);
      ++out.samples;
      if (v > out.best + kTieEps) {
        out.best = v;
        out.best_idx = idx;
        out.occurrences = 1;
        out.trace.emplace_back(clock.now(), v);
      } else if (v >= out.best - kTieEps) {
        ++out.occurrences;
      }
    } while (clock.now() < time_limit_s);
  };

  std::vector<WorkerResult> results(static_cast<size_t>(std::max(1, jobs)));
  if (jobs <= 1) {
    work(derive_seed(seed, 0), results[0]);
  } else {
    std::vector<std::thread> threads;
    for (size_t w = 0; w < results.size(); ++w) {
      threads.emplace_back(
          [&, w]() { work(derive_seed(seed, static_cast<uint64_t>(w)), results[w]); });
    }
    for (auto& t : threads) t.join();
  }

  size_t winner = 0;
  for (size_t w = 1; w < results.size(); ++w) {
    if (results[w].best > results[winner].best + kTieEps) winner = w;
  }
  SolverRun run;
  run.solver = "random";
  run.seed = seed;
  uint64_t samples = 0;
  int64_t occurrences = 0;
  for (const auto& r : results) {
    samples += r.samples;
    if (std::abs(r.best - results[winner].best) <= kTieEps) occurrences += r.occurrences;
  }
  run.config = {{"granularity", grid.d},
                {"torsions", m},
                {"time_limit_s", time_limit_s},
                {"jobs", std::max(1, jobs)},
                {"samples", samples}};
  run.best_angles = to_angles(results[winner].best_idx, grid);
  run.best_value = results[winner].best;
  run.occurrences = occurrences;
  if (jobs <= 1) {
    run.trace = std::move(results[0].trace);
  } else {
    for (const auto& r : results)
      run.trace.insert(run.trace.end(), r.trace.begin(), r.trace.end());
    std::sort(run.trace.begin(), run.trace.end());
    // keep the monotone envelope of the merged improvement events
    std::vector<std::pair<double, double>> envelope;
    for (const auto& p : run.trace) {
      if (envelope.empty() || p.second > envelope.back().second) envelope.push_back(p);
    }
    run.trace = std::move(envelope);
  }
  run.wall_time_s = clock.now();
  return run;
}

SolverRun geodock_greedy(const TorsionModel& tm, const AngleGrid& grid, int max_rounds,
                         TraceClock& clock) {
  const int m = tm.torsion_count();
  std::vector<int> idx(static_cast<size_t>(m), 0);
  double best = objective_fragment(tm, to_angles(idx, grid));
  clock.tick(1);

  SolverRun run;
  run.solver = "geodock";
  run.config = {{"granularity", grid.d}, {"torsions", m}, {"max_rounds", max_rounds}};
  run.trace.emplace_back(clock.now(), best);

  for (int round = 0; round < max_rounds; ++round) {
    bool improved = false;
    for (int t = 0; t < m; ++t) {  // model order: most central torsion first
      int best_k = idx[static_cast<size_t>(t)];
      double best_here = best;
      for (int k = 0; k < grid.d; ++k) {
        idx[static_cast<size_t>(t)] = k;
        const double v = objective_fragment(tm, to_angles(idx, grid));
        clock.tick(1);
        if (v > best_here + kTieEps) {
          best_here = v;
          best_k = k;
        }
      }
      idx[static_cast<size_t>(t)] = best_k;
      if (best_here > best + kTieEps) {
        best = best_here;
        improved = true;
        run.trace.emplace_back(clock.now(), best);
      }
    }
    if (!improved) break;
  }
  run.best_angles = to_angles(idx, grid);
  run.best_value = best;
  run.occurrences = 1;
  run.wall_time_s = clock.now();
  return run;
}

namespace {

// flip-oriented view of a QUBO for O(degree) energy deltas
struct SaProblem {
  uint32_t n = 0;
  std::vector<double> linear;
  std::vector<std::vector<std::pair<uint32_t, double>>> neighbors;
  double constant = 0.0;

  explicit SaProblem(const QuboProblem& q) : n(q.n_total), constant(q.constant) {
    linear.assign(n, 0.0);
    neighbors.assign(n, {});
    for (const auto& [v, c] : q.linear) linear[v] = c;
    for (const auto& [pair, c] : q.quadratic) {
      neighbors[pair.first].emplace_back(pair.second, c);
      neighbors[pair.second].emplace_back(pair.first, c);
    }
  }

  double energy(const std::vector<uint8_t>& bits) const {
    double e = constant;
    for (uint32_t i = 0; i < n; ++i) {
      if (!bits[i]) continue;
      e += linear[i];
      for (const auto& [j, c] : neighbors[i]) {
        if (j > i && bits[j]) e += c;
      }
    }
    return e;
  }

  double delta(const std::vector<uint8_t>& bits, uint32_t i) const {
    double field = linear[i];
    for (const auto& [j, c] : neighbors[i]) {
      if (bits[j]) field += c;
    }
    return bits[i] ? -field : field;
  }

  double default_t_max() const {
    double worst = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
      double mag = std::abs(linear[i]);
      for (const auto& [j, c] : neighbors[i]) mag += std::abs(c);
      worst = std::max(worst, mag);
    }
    return worst > 0 ? worst : 1.0;
  }
};

}  // namespace

SolverRun simulated_annealing(const QuboProblem& q, const HuboProblem& h,
                              const TorsionModel& tm, const SaConfig& cfg,
                              TraceClock& clock) {
  if (cfg.epochs <= 0 || cfg.restarts <= 0 || cfg.sweeps_per_epoch <= 0)
    throw std::invalid_argument("epochs, sweeps and restarts must be positive");
  if (cfg.t_min <= 0) throw std::invalid_argument("t_min must be positive");

  const SaProblem sa(q);
  const double t_max = cfg.t_max > 0 ? cfg.t_max : sa.default_t_max();
  if (t_max <= cfg.t_min) throw std::invalid_argument("t_max must exceed t_min");
  const double ratio = cfg.cooling_ratio > 0
                           ? cfg.cooling_ratio
                           : std::pow(cfg.t_min / t_max, 1.0 / cfg.epochs);

  SolverRun run;
  run.solver = "sa";
  run.seed = cfg.seed;
  run.config = {{"epochs", cfg.epochs},
                {"sweeps_per_epoch", cfg.sweeps_per_epoch},
                {"restarts", cfg.restarts},
                {"t_max", t_max},
                {"t_min", cfg.t_min},
                {"cooling_ratio", ratio},
                {"repair", cfg.repair},
                {"n_total", q.n_total},
                {"n_original", q.n_original}};

  struct Candidate {
    double energy = 0.0;
    TorsionAssignment angles;
    double geometric = 0.0;
  };
  std::vector<Candidate> feasible;
  double best_geo_traced = -1.0;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(restart)));
    std::vector<uint8_t> bits(q.n_total);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.below(2));
    double energy = sa.energy(bits);
    double best_energy = energy;
    std::vector<uint8_t> best_bits = bits;

    std::vector<uint32_t> order(q.n_total);
    for (uint32_t i = 0; i < q.n_total; ++i) order[i] = i;

    double temp = t_max;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (int sweep = 0; sweep < cfg.sweeps_per_epoch; ++sweep) {
        rng.shuffle(order);
        for (uint32_t i : order) {
          const double de = sa.delta(bits, i);
          if (de < 0 || rng.uniform01() < std::exp(-de / temp)) {
            bits[i] = !bits[i];
            energy += de;
            if (energy < best_energy) {
              best_energy = energy;
              best_bits = bits;
            }
          }
        }
      }
      clock.tick(1);
      if (cfg.debug_checksum && epoch % 50 == 0) {
        const double full = sa.energy(bits);
        if (std::abs(full - energy) > 1e-9 * std::max(1.0, std::abs(full)))
          throw std::logic_error("incremental SA energy diverged from full evaluation");
      }
      temp = std::max(temp * ratio, cfg.t_min);
    }

    std::vector<uint8_t> original(best_bits.begin(),
                                  best_bits.begin() + q.n_original);
    DecodeResult decoded = decode(h.vm, original, h.grid);
    if (std::holds_alternative<Infeasible>(decoded)) {
      if (!cfg.repair) continue;  // discarded, as invalid shapes are
      for (int i = 0; i < h.vm.torsions; ++i) {
        int first_hot = 0;
        for (int k = 0; k < h.vm.d; ++k) {
          if (original[h.vm.var(i, k)]) {
            first_hot = k;
            break;
          }
        }
        for (int k = 0; k < h.vm.d; ++k) original[h.vm.var(i, k)] = (k == first_hot);
      }
      decoded = decode(h.vm, original, h.grid);
      best_energy = q.evaluate(lift_assignment(q, original));
    }
    Candidate c;
    c.energy = best_energy;
    c.angles = std::get<TorsionAssignment>(decoded);
    c.geometric = objective_fragment(tm, c.angles);
    if (c.geometric > best_geo_traced) {
      best_geo_traced = c.geometric;
      run.trace.emplace_back(clock.now(), c.geometric);
    }
    feasible.push_back(std::move(c));
  }

  if (feasible.empty()) {
    throw SolverError(SolverError::Kind::AllRestartsInfeasible,
                      "every SA restart decoded infeasible; increase a_const");
  }
  size_t winner = 0;
  for (size_t i = 1; i < feasible.size(); ++i) {
    if (feasible[i].energy < feasible[winner].energy) winner = i;
  }
  int64_t occurrences = 0;
  for (const auto& c : feasible) {
    if (std::abs(c.energy - feasible[winner].energy) <= kTieEps) ++occurrences;
  }
  run.best_angles = feasible[winner].angles;
  run.best_value = feasible[winner].geometric;
  run.occurrences = occurrences;
  run.wall_time_s = clock.now();
  return run;
}

std::pair<double, std::vector<uint8_t>> enumerate_minimum(const BinaryPolynomial& poly,
                                                          uint32_t n_vars) {
  if (n_vars > 30) throw SolverError(SolverError::Kind::SearchSpaceTooLarge,
                                     "polynomial enumeration capped at 30 variables");
  struct TermState {
    double coeff;
    int zeros;
  };
  std::vector<TermState> terms;
  std::vector<std::vector<uint32_t>> incident(n_vars);
  for (const auto& [mono, coeff] : poly.terms()) {
    for (uint32_t v : mono) incident.at(v).push_back(static_cast<uint32_t>(terms.size()));
    terms.push_back({coeff, static_cast<int>(mono.size())});
  }

  std::vector<uint8_t> bits(n_vars, 0);
  double value = poly.constant();  // all terms inactive at the origin
  double best = value;
  std::vector<uint8_t> best_bits = bits;

  const uint64_t total = 1ull << n_vars;
  for (uint64_t step = 1; step < total; ++step) {
    const auto bit = static_cast<uint32_t>(__builtin_ctzll(step));  // Gray code flip
    const bool now_on = !bits[bit];
    bits[bit] = now_on;
    for (uint32_t t : incident[bit]) {
      TermState& ts = terms[t];
      if (now_on) {
        if (--ts.zeros == 0) value += ts.coeff;
      } else {
        if (ts.zeros++ == 0) value -= ts.coeff;
      }
    }
    if (value < best) {
      best = value;
      best_bits = bits;
    }
  }
  return {best, best_bits};
}

std::pair<double, std::vector<uint8_t>> enumerate_minimum(const QuboProblem& q) {
  BinaryPolynomial poly(q.constant);
  for (const auto& [v, c] : q.linear) poly.add_term({v}, c);
  for (const auto& [pair, c] : q.quadratic) poly.add_term({pair.first, pair.second}, c);
  return enumerate_minimum(poly, q.n_total);
}

}  // namespace mufold
