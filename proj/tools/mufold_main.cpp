#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mufold/bench.hpp"
#include "mufold/mol2.hpp"

namespace fs = std::filesystem;
using namespace mufold;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::vector<std::string> inputs;
  std::string out = "out";
  int granularity = 8;
  int max_torsions = -1;
  double chop_hubo = 0.0;
  double chop_qubo = 0.0;
  std::vector<double> aconst_factors = {2.0};
  std::string solver = "all";
  double time_limit = 1.0;
  uint64_t seed = 0;
  int jobs = 1;
  bool json = false;
  std::string from_runs;
  std::vector<int> m_levels = {2, 4};
  std::string clock_mode = "auto";  // auto | tick | wall
  double tick_seconds = 1e-6;
  int sa_epochs = 500;
  int sa_restarts = 10;
  int geodock_rounds = 10;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

TorsionModel load_model(const std::string& path, int max_torsions) {
  const Molecule mol = parse_mol2(read_file(path));
  const PruneResult pruned = prune_terminal_hydrogens(mol);
  TorsionModel tm = build_torsion_model(pruned.molecule, max_torsions);
  tm.original_ids = pruned.original_ids;
  return tm;
}

std::unique_ptr<TraceClock> make_clock(const Options& opt) {
  const bool tick = opt.clock_mode == "tick" ||
                    (opt.clock_mode == "auto" && opt.jobs <= 1);
  if (tick) return std::make_unique<TickClock>(opt.tick_seconds);
  return std::make_unique<WallClock>();
}

std::vector<std::string> solver_list(const std::string& spec) {
  if (spec == "all") return {"exhaustive", "random", "geodock", "sa"};
  std::vector<std::string> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "exhaustive" && item != "random" && item != "geodock" && item != "sa") {
      throw CLI::ValidationError("--solver", "unknown solver '" + item + "'");
    }
    out.push_back(item);
  }
  if (out.empty()) throw CLI::ValidationError("--solver", "empty solver list");
  return out;
}

void attach_instance(SolverRun& run, const std::string& ligand, const TorsionModel& tm,
                     const Options& opt) {
  run.config["instance"] = {{"ligand", ligand},
                            {"torsions", tm.torsion_count()},
                            {"granularity", opt.granularity}};
}

int cmd_inspect(const Options& opt) {
  const std::string& path = opt.inputs.front();
  const Molecule mol = parse_mol2(read_file(path));
  const PruneResult pruned = prune_terminal_hydrogens(mol);
  TorsionModel tm = build_torsion_model(pruned.molecule, opt.max_torsions);
  tm.original_ids = pruned.original_ids;
  if (opt.json) {
    std::cout << model_to_json(tm) << "\n";
    return kExitOk;
  }
  std::cout << "molecule:   " << mol.name << "\n"
            << "atoms:      " << mol.atom_count() << " (" << pruned.molecule.atom_count()
            << " after hydrogen pruning)\n"
            << "bonds:      " << mol.bond_count() << " ("
            << pruned.molecule.bond_count() << " after pruning)\n"
            << "center:     atom " << tm.center_atom << "\n"
            << "torsions:   " << tm.torsion_count() << "\n";
  for (int i = 0; i < tm.torsion_count(); ++i) {
    const RotatableBond& rb = tm.rotatable_bonds[static_cast<size_t>(i)];
    std::cout << "  t" << i << ": " << rb.a << "-" << rb.b << " (near " << rb.near
              << ")\n";
  }
  std::cout << "fragments:  " << tm.fragment_count() << "\n";
  for (int f = 0; f < tm.fragment_count(); ++f) {
    const Fragment& frag = tm.fragments[static_cast<size_t>(f)];
    std::cout << "  f" << f << ": rep " << frag.representative << ", atoms {";
    for (size_t i = 0; i < frag.atoms.size(); ++i) {
      std::cout << (i ? "," : "") << frag.atoms[i];
    }
    std::cout << "}, influence {";
    for (size_t i = 0; i < frag.influence.size(); ++i) {
      std::cout << (i ? "," : "") << "t" << frag.influence[i];
    }
    std::cout << "}\n";
  }
  return kExitOk;
}

int cmd_encode(const Options& opt) {
  const std::string& path = opt.inputs.front();
  const TorsionModel tm = load_model(path, opt.max_torsions);
  const AngleGrid grid(opt.granularity);
  const HuboProblem hubo =
      build_hubo_with_factor(tm, grid, opt.aconst_factors.front(), opt.chop_hubo);
  QuboProblem qubo = quadratize(hubo);
  if (opt.chop_qubo > 0) qubo = chop_qubo(qubo, opt.chop_qubo);

  const BinaryPolynomial combined = hubo.combined();
  const fs::path out(opt.out);
  write_file(out / "hubo.txt", combined.to_text(hubo.vm.n()));
  write_file(out / "qubo.txt", qubo_to_text(qubo));
  write_file(out / "ancillas.json", ancillas_to_json(qubo) + "\n");

  size_t higher = 0;
  for (const auto& [mono, coeff] : combined.terms()) {
    if (mono.size() > 2) ++higher;
  }
  std::cout << "torsions:        " << tm.torsion_count() << "\n"
            << "variables:       " << hubo.vm.n() << "\n"
            << "a_const:         " << hubo.a_const << " (factor "
            << opt.aconst_factors.front() << ")\n"
            << "hubo linear:     " << combined.count_terms_of_degree(1) << "\n"
            << "hubo quadratic:  " << combined.count_terms_of_degree(2) << "\n"
            << "hubo higher:     " << higher << " (degree " << combined.degree() << ")\n"
            << "qubo variables:  " << qubo.n_total << " (" << qubo.ancillas.size()
            << " ancillas)\n"
            << "qubo linear:     " << qubo.linear.size() << "\n"
            << "qubo quadratic:  " << qubo.quadratic.size() << "\n";
  return kExitOk;
}

int cmd_solve(const Options& opt) {
  const std::string& path = opt.inputs.front();
  const std::string ligand = stem_of(path);
  const TorsionModel tm = load_model(path, opt.max_torsions);
  const AngleGrid grid(opt.granularity);
  const auto solvers = solver_list(opt.solver);
  const fs::path run_dir = fs::path(opt.out) / "runs";
  fs::create_directories(run_dir);

  std::vector<SolverRun> runs;
  for (const std::string& name : solvers) {
    if (name == "sa") {
      const HuboProblem hubo =
          build_hubo_with_factor(tm, grid, opt.aconst_factors.front(), opt.chop_hubo);
      for (double factor : opt.aconst_factors) {
        HuboProblem h = hubo;
        if (factor != hubo.a_const_factor) {
          h = build_hubo_with_factor(tm, grid, factor, opt.chop_hubo);
        }
        QuboProblem q = quadratize(h);
        if (opt.chop_qubo > 0) q = chop_qubo(q, opt.chop_qubo);
        SaConfig cfg;
        cfg.seed = opt.seed;
        cfg.epochs = opt.sa_epochs;
        cfg.restarts = opt.sa_restarts;
        auto clock = make_clock(opt);
        SolverRun run = simulated_annealing(q, h, tm, cfg, *clock);
        run.config["a_const_factor"] = factor;
        run.config["a_const"] = h.a_const;
        attach_instance(run, ligand, tm, opt);
        runs.push_back(std::move(run));
      }
      continue;
    }
    auto clock = make_clock(opt);
    SolverRun run;
    if (name == "exhaustive") {
      run = exhaustive(tm, grid, *clock);
    } else if (name == "random") {
      run = random_search(tm, grid, opt.time_limit, opt.seed, *clock, opt.jobs);
    } else {
      run = geodock_greedy(tm, grid, opt.geodock_rounds, *clock);
    }
    attach_instance(run, ligand, tm, opt);
    runs.push_back(std::move(run));
  }

  for (const SolverRun& run : runs) {
    std::string name = ligand + "_M" + std::to_string(tm.torsion_count()) + "_" +
                       run.solver;
    if (run.solver == "sa") {
      std::ostringstream f;
      f << "_f" << run.config.at("a_const_factor").get<double>();
      name += f.str();
    }
    write_file(run_dir / (name + ".json"), run.to_json().dump(2) + "\n");
    std::cout << run.solver << ": best " << run.best_value << " A^2, occurrences "
              << run.occurrences << ", time " << run.wall_time_s << " s\n";
  }

  // best vdW-valid conformation across solvers goes out as MOL2
  const SolverRun* best = nullptr;
  Molecule best_conf;
  for (const SolverRun& run : runs) {
    if (best && run.best_value <= best->best_value) continue;
    Molecule conf = apply_torsions(tm, run.best_angles);
    if (vdw_validity(conf, bondi_radii()).empty()) {
      best = &run;
      best_conf = std::move(conf);
    }
  }
  if (best) {
    write_file(fs::path(opt.out) / "unfolded.mol2", write_mol2(best_conf));
    std::cout << "wrote unfolded conformation from '" << best->solver << "' ("
              << best->best_value << " A^2)\n";
  } else {
    std::cout << "no vdW-valid conformation found; nothing written\n";
  }
  return kExitOk;
}

int cmd_bench(const Options& opt) {
  const fs::path out(opt.out);
  fs::path run_dir;
  if (!opt.from_runs.empty()) {
    run_dir = opt.from_runs;
  } else {
    run_dir = out / "runs";
    fs::create_directories(run_dir);
    const auto solvers = solver_list(opt.solver);
    for (const std::string& path : opt.inputs) {
      const std::string ligand = stem_of(path);
      for (int m : opt.m_levels) {
        TorsionModel tm;
        try {
          tm = load_model(path, m);
        } catch (const TopologyError& e) {
          std::cerr << "skipping " << ligand << " at M=" << m << ": " << e.what()
                    << "\n";
          continue;
        }
        const AngleGrid grid(opt.granularity);
        std::vector<SolverRun> runs;
        for (const std::string& name : solvers) {
          if (name == "sa") {
            for (double factor : opt.aconst_factors) {
              const HuboProblem h =
                  build_hubo_with_factor(tm, grid, factor, opt.chop_hubo);
              QuboProblem q = quadratize(h);
              if (opt.chop_qubo > 0) q = chop_qubo(q, opt.chop_qubo);
              SaConfig cfg;
              cfg.seed = opt.seed;
              cfg.epochs = opt.sa_epochs;
              cfg.restarts = opt.sa_restarts;
              auto clock = make_clock(opt);
              SolverRun run = simulated_annealing(q, h, tm, cfg, *clock);
              run.config["a_const_factor"] = factor;
              run.config["a_const"] = h.a_const;
              attach_instance(run, ligand, tm, opt);
              runs.push_back(std::move(run));
            }
            continue;
          }
          auto clock = make_clock(opt);
          SolverRun run;
          if (name == "exhaustive") {
            run = exhaustive(tm, grid, *clock);
          } else if (name == "random") {
            run = random_search(tm, grid, opt.time_limit, opt.seed, *clock, opt.jobs);
          } else {
            run = geodock_greedy(tm, grid, opt.geodock_rounds, *clock);
          }
          attach_instance(run, ligand, tm, opt);
          runs.push_back(std::move(run));
        }
        for (const SolverRun& run : runs) {
          std::string name = ligand + "_M" + std::to_string(tm.torsion_count()) + "_" +
                             run.solver;
          if (run.solver == "sa") {
            std::ostringstream f;
            f << "_f" << run.config.at("a_const_factor").get<double>();
            name += f.str();
          }
          write_file(run_dir / (name + ".json"), run.to_json().dump(2) + "\n");
        }
      }
    }
  }

  const std::vector<SolverRun> runs = load_runs(run_dir.string());
  if (runs.empty()) {
    std::cerr << "no runs found under " << run_dir << "\n";
    return kExitInput;
  }
  const BenchmarkReport report = build_report(runs);
  write_report(report, (out / "report").string());
  std::cout << "report: " << report.rows.size() << " rows over " << runs.size()
            << " runs -> " << (out / "report").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"molecular unfolding toolkit: torsion search over MOL2 ligands"};
  app.set_config("--config");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd, bool needs_input, bool multi_input = false) {
    if (needs_input) {
      auto* o = cmd->add_option("input", opt.inputs, "MOL2 ligand file(s)");
      o->required();
      if (!multi_input) o->expected(1);
    }
    cmd->add_option("--out", opt.out, "output directory")->capture_default_str();
    cmd->add_option("--granularity", opt.granularity, "grid steps per torsion (d)")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
    cmd->add_option("--max-torsions", opt.max_torsions,
                    "use only the first M torsions in model order (-1: all)")
        ->capture_default_str();
    cmd->add_option("--chop-hubo", opt.chop_hubo, "HUBO coefficient threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--chop-qubo", opt.chop_qubo, "QUBO coefficient threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--aconst-factors", opt.aconst_factors,
                    "penalty factors (x max optimization coefficient)")
        ->capture_default_str();
    cmd->add_option("--solver", opt.solver,
                    "all or comma list of exhaustive,random,geodock,sa")
        ->capture_default_str();
    cmd->add_option("--time-limit", opt.time_limit, "random search budget, seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "master RNG seed")->capture_default_str();
    cmd->add_option("--jobs", opt.jobs, "worker bound; 1 is bit-reproducible")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    cmd->add_flag("--json", opt.json, "machine-readable output");
    cmd->add_option("--clock", opt.clock_mode, "auto, tick or wall trace clock")
        ->check(CLI::IsMember({"auto", "tick", "wall"}))
        ->capture_default_str();
    cmd->add_option("--tick-seconds", opt.tick_seconds,
                    "virtual seconds per work unit for the tick clock")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sa-epochs", opt.sa_epochs, "annealing epochs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sa-restarts", opt.sa_restarts, "annealing restarts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--geodock-rounds", opt.geodock_rounds, "greedy pass cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  CLI::App* inspect = app.add_subcommand("inspect", "parse a ligand and print its torsion model");
  add_common(inspect, true);
  CLI::App* encode = app.add_subcommand("encode", "write HUBO/QUBO exports for a ligand");
  add_common(encode, true);
  CLI::App* solve = app.add_subcommand("solve", "run solvers and write run JSON + unfolded MOL2");
  add_common(solve, true);
  CLI::App* bench = app.add_subcommand("bench", "sweep torsion levels and emit the benchmark report");
  add_common(bench, false, true);
  bench->add_option("input", opt.inputs, "MOL2 ligand files");
  bench->add_option("--m-levels", opt.m_levels, "torsion-count levels to sweep")
      ->capture_default_str();
  bench->add_option("--from-runs", opt.from_runs,
                    "rebuild the report from persisted run JSONs only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.got_subcommand(inspect)) return cmd_inspect(opt);
    if (app.got_subcommand(encode)) return cmd_encode(opt);
    if (app.got_subcommand(solve)) return cmd_solve(opt);
    if (app.got_subcommand(bench)) {
      if (opt.from_runs.empty() && opt.inputs.empty()) {
        std::cerr << "error: bench needs input ligands or --from-runs\n";
        return kExitConfig;
      }
      return cmd_bench(opt);
    }
  } catch (const Mol2Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const TopologyError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EncoderError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    if (e.kind() == SolverError::Kind::AllRestartsInfeasible) {
      std::cerr << "hint: raise --aconst-factors so the one-hot penalty dominates\n";
    }
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
