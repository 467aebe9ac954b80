// Command-line front end: state/channel files in, JSON or CSV reports out.
// Exit codes: 0 success, 1 property failure, 2 malformed input,
// 3 dimension/backend mismatch.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "selfrep/axioms.hpp"
#include "selfrep/broadcast.hpp"
#include "selfrep/clone_search.hpp"
#include "selfrep/io.hpp"
#include "selfrep/species.hpp"
#include "selfrep/toymodel.hpp"

namespace {

using namespace selfrep;

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitMalformed = 2;
constexpr int kExitMismatch = 3;

struct MismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json tolerance_record() {
  return Json{{"construction", tol::construction},
              {"state_equality", tol::state_equality},
              {"a1", tol::a1},
              {"a2", tol::a2},
              {"a3", tol::a3},
              {"a4", tol::a4},
              {"commutator", tol::commutator},
              {"parent_preserved", tol::parent_preserved},
              {"clone_certificate", tol::clone_certificate},
              {"separability_certificate", tol::separability_certificate}};
}

// Every report carries the seed, the tolerance set, and digests of its
// inputs, so a re-run is verifiable byte for byte.
Json report_envelope(const std::string& command, std::uint64_t seed,
                     const std::map<std::string, std::string>& input_paths) {
  Json inputs = Json::object();
  for (const auto& [label, path] : input_paths) {
    inputs[label] = Json{{"path", path}, {"digest", file_digest(path)}};
  }
  return Json{{"command", command},
              {"seed", seed},
              {"tolerances", tolerance_record()},
              {"inputs", inputs}};
}

void emit(const Json& report, const std::string& out_path) {
  std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

// ---------------------------------------------------------------------------
// overlap

int cmd_overlap(const std::string& path_a, const std::string& path_b,
                const std::string& out_path, std::uint64_t seed) {
  LoadedState a = load_state(path_a);
  LoadedState b = load_state(path_b);
  if (a.classical() != b.classical()) {
    throw MismatchError("overlap: mixed classical/quantum inputs");
  }
  double value = 0.0;
  std::string backend;
  if (a.classical()) {
    backend = "classical";
    if (a.prob().flat().dim() != b.prob().flat().dim()) {
      throw MismatchError("overlap: dimension mismatch");
    }
    value = bhattacharyya(a.prob().flat(), b.prob().flat());
  } else {
    backend = "quantum";
    if (a.density().dim() != b.density().dim()) {
      throw MismatchError("overlap: dimension mismatch");
    }
    value = uhlmann_fidelity(a.density(), b.density());
  }
  Json report = report_envelope("overlap", seed, {{"a", path_a}, {"b", path_b}});
  report["backend"] = backend;
  report["overlap"] = value;
  std::printf("overlap = %s (%s)\n", format_double(value).c_str(), backend.c_str());
  if (!out_path.empty()) emit(report, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-axioms

int cmd_verify_axioms(const std::string& backend, std::vector<std::size_t> dims,
                      long trials, std::uint64_t seed, const std::string& out_path) {
  std::vector<SuiteConfig> configs;
  if (backend == "classical" || backend == "both") {
    SuiteConfig c;
    c.backend = Backend::classical;
    c.dims = dims.empty() ? std::vector<std::size_t>{2, 3, 4} : dims;
    c.trials = trials;
    c.seed = seed;
    configs.push_back(c);
  }
  if (backend == "quantum" || backend == "both") {
    SuiteConfig c;
    c.backend = Backend::quantum;
    c.dims = dims.empty() ? std::vector<std::size_t>{2, 3} : dims;
    c.trials = trials;
    c.seed = seed;
    configs.push_back(c);
  }
  if (configs.empty()) {
    throw io_error("verify-axioms: backend must be classical, quantum, or both");
  }

  bool all_passed = true;
  std::string lines;
  for (const auto& config : configs) {
    const char* name = config.backend == Backend::classical ? "classical" : "quantum";
    for (const AxiomReport& r : run_axiom_suite(config)) {
      Json line = r.to_json();
      line["backend"] = name;
      line["seed"] = seed;
      line["tolerance"] = r.tolerance;
      lines += line.dump() + "\n";
      all_passed = all_passed && r.passed;
      std::printf("%s %-9s %s  worst violation %s over %ld trials\n",
                  r.passed ? "[pass]" : "[FAIL]", name, r.axiom.c_str(),
                  format_double(r.worst_violation).c_str(), r.trials);
    }
  }
  if (!out_path.empty()) {
    write_text_file(out_path, lines);
  } else {
    std::cout << lines;
  }
  return all_passed ? kExitOk : kExitPropertyFailure;
}

// ---------------------------------------------------------------------------
// clone-search

int cmd_clone_search(const std::string& targets_path, const std::string& env_path,
                     const std::string& backend, std::size_t remainder,
                     std::size_t restarts, std::size_t evals, std::uint64_t seed,
                     const std::string& out_path) {
  Json spec = read_json_file(targets_path);
  const Json& list = spec.is_array() ? spec : spec.at("targets");
  if (!list.is_array() || list.empty()) {
    throw io_error("clone-search: targets must be a non-empty array of states");
  }

  CloneSearchConfig config;
  config.restarts = restarts;
  config.max_evals = evals;
  config.seed = seed;
  config.remainder_dim = remainder;

  std::map<std::string, std::string> inputs{{"targets", targets_path}};
  if (!env_path.empty()) inputs["env"] = env_path;
  Json report = report_envelope("clone-search", seed, inputs);
  report["backend"] = backend;

  CloneSearchResult result{identity_channel(1), 0.0, {}, false, {}};
  if (backend == "classical") {
    std::vector<ProbVec> targets;
    for (const auto& j : list) {
      LoadedState s = state_from_json(j);
      if (!s.classical()) throw MismatchError("clone-search: expected classical targets");
      targets.push_back(s.prob().flat());
    }
    ProbVec env = env_path.empty() ? ProbVec({1.0}) : [&] {
      LoadedState s = load_state(env_path);
      if (!s.classical()) throw MismatchError("clone-search: env backend mismatch");
      return s.prob().flat();
    }();
    result = clone_search(targets, env, config);
    report["best_channel"] = to_json(std::get<StochasticChannel>(result.best_channel));
  } else if (backend == "quantum") {
    std::vector<DensityMatrix> targets;
    for (const auto& j : list) {
      LoadedState s = state_from_json(j);
      if (s.classical()) throw MismatchError("clone-search: expected density targets");
      targets.push_back(s.density());
    }
    DensityMatrix env = env_path.empty() ? DensityMatrix(ComplexMatrix::Identity(1, 1)) : [&] {
      LoadedState s = load_state(env_path);
      if (s.classical()) throw MismatchError("clone-search: env backend mismatch");
      return s.density();
    }();
    result = clone_search(targets, env, config);
    report["best_channel"] = to_json(std::get<KrausChannel>(result.best_channel));
  } else {
    throw io_error("clone-search: backend must be classical or quantum");
  }

  report["objective"] = result.objective;
  report["converged"] = result.converged;
  report["dims"] = Json{{"system", result.dims.system},
                        {"env", result.dims.env},
                        {"remainder", result.dims.remainder}};
  Json trace = Json::array();
  for (auto [e, f] : result.trace) trace.push_back(Json::array({e, f}));
  report["trace"] = trace;
  std::printf("objective = %s (converged: %s)\n", format_double(result.objective).c_str(),
              result.converged ? "true" : "false");
  emit(report, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// broadcast-check

Json inequality_json(const InequalityCheck& c) {
  return Json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"margin", c.margin}, {"pass", c.pass}};
}

int cmd_broadcast_check(const std::string& channel_path, const std::string& env_path,
                        const std::string& env2_path, const std::string& state_a_path,
                        const std::string& state_b_path, std::uint64_t seed,
                        const std::string& out_path) {
  LoadedChannel channel = load_channel(channel_path);
  LoadedState env = load_state(env_path);
  LoadedState env2 = env2_path.empty() ? env : load_state(env2_path);
  LoadedState sa = load_state(state_a_path);
  LoadedState sb = load_state(state_b_path);

  const bool classical = channel.index() == 0;
  for (const LoadedState* s : {&env, &env2, &sa, &sb}) {
    if (s->classical() != classical) {
      throw MismatchError("broadcast-check: backend mismatch between channel and states");
    }
  }

  std::map<std::string, std::string> inputs{
      {"channel", channel_path}, {"env", env_path}, {"a", state_a_path}, {"b", state_b_path}};
  if (!env2_path.empty()) inputs["env2"] = env2_path;
  Json report = report_envelope("broadcast-check", seed, inputs);

  BroadcastInequalityVerdict verdict;
  CloneVerdict clone;
  if (classical) {
    const auto& ch = std::get<StochasticChannel>(channel);
    const std::size_t d = sa.prob().flat().dim();
    const std::size_t e = env.prob().flat().dim();
    if (sb.prob().flat().dim() != d || env2.prob().flat().dim() != e) {
      throw MismatchError("broadcast-check: state dimension mismatch");
    }
    if (ch.in_dim() != d * e || ch.out_dim() % (d * d) != 0) {
      throw MismatchError("broadcast-check: channel shape incompatible with states");
    }
    BroadcastDims dims{d, e, ch.out_dim() / (d * d)};
    ClassicalBroadcastSetup setup_a{ch, env.prob().flat(), dims};
    ClassicalBroadcastSetup setup_b{ch, env2.prob().flat(), dims};
    verdict = verify_broadcast_inequalities(setup_a, sa.prob().flat(), setup_b, sb.prob().flat());
    clone = verify_wigner_clone(setup_a, sa.prob().flat(), sb.prob().flat(),
                                tol::clone_certificate);
    report["dims"] = Json{{"system", d}, {"env", e}, {"remainder", dims.remainder}};
  } else {
    const auto& ch = std::get<KrausChannel>(channel);
    const std::size_t d = sa.density().dim();
    const std::size_t e = env.density().dim();
    if (sb.density().dim() != d || env2.density().dim() != e) {
      throw MismatchError("broadcast-check: state dimension mismatch");
    }
    if (ch.in_dim() != d * e || ch.out_dim() % (d * d) != 0) {
      throw MismatchError("broadcast-check: channel shape incompatible with states");
    }
    BroadcastDims dims{d, e, ch.out_dim() / (d * d)};
    QuantumBroadcastSetup setup_a{ch, env.density(), dims};
    QuantumBroadcastSetup setup_b{ch, env2.density(), dims};
    verdict = verify_broadcast_inequalities(setup_a, sa.density(), setup_b, sb.density());
    clone = verify_wigner_clone(setup_a, sa.density(), sb.density(), tol::clone_certificate);
    report["dims"] = Json{{"system", d}, {"env", e}, {"remainder", dims.remainder}};
  }

  report["input_overlap"] = verdict.input_overlap;
  report["joint_overlap"] = verdict.joint_overlap;
  report["parent_overlap"] = verdict.parent_overlap;
  report["offspring_overlap"] = verdict.offspring_overlap;
  report["env_shared"] = verdict.env_shared;
  report["parent_preserved"] = verdict.parent_preserved;
  report["parent_ge_joint"] = inequality_json(verdict.parent_ge_joint);
  report["offspring_ge_joint"] = inequality_json(verdict.offspring_ge_joint);
  report["joint_ge_input"] = inequality_json(verdict.joint_ge_input);
  if (verdict.offspring_ge_input) {
    report["offspring_ge_input"] = inequality_json(*verdict.offspring_ge_input);
  }
  if (verdict.joint_eq_input) {
    report["joint_eq_input"] = inequality_json(*verdict.joint_eq_input);
  }
  report["all_pass"] = verdict.all_pass;
  report["clone"] = Json{{"first_cloned", clone.first_cloned},
                         {"second_cloned", clone.second_cloned},
                         {"first_residual", clone.first_residual},
                         {"second_residual", clone.second_residual},
                         {"overlap", clone.overlap},
                         {"dichotomy_ok", clone.dichotomy_ok},
                         {"chain_lhs", clone.chain_lhs},
                         {"chain_mid", clone.chain_mid},
                         {"chain_rhs", clone.chain_rhs},
                         {"chain_holds", clone.chain_holds}};
  std::printf("%s input=%s joint=%s parent=%s offspring=%s\n",
              verdict.all_pass ? "[pass]" : "[FAIL]",
              format_double(verdict.input_overlap).c_str(),
              format_double(verdict.joint_overlap).c_str(),
              format_double(verdict.parent_overlap).c_str(),
              format_double(verdict.offspring_overlap).c_str());
  emit(report, out_path);
  return verdict.all_pass && clone.dichotomy_ok ? kExitOk : kExitPropertyFailure;
}

// ---------------------------------------------------------------------------
// toy

int cmd_toy(const std::string& state_path, double epsilon, bool run_search, std::size_t k,
            std::size_t iters, std::uint64_t seed, const std::string& out_path) {
  LoadedState s = load_state(state_path);
  if (!s.classical()) {
    throw MismatchError("toy: the entropy-floor model is classical; got a density matrix");
  }
  const JointProb& joint = s.prob();
  if (joint.num_subsystems() != 2) {
    throw MismatchError("toy: state must declare exactly 2 subsystems in dims");
  }
  ToyStateSpace space(epsilon);
  if (space.empty_for_dim(joint.subsystem_dims()[0]) ||
      space.empty_for_dim(joint.subsystem_dims()[1])) {
    std::fprintf(stderr, "warning: epsilon exceeds ln(dim) for a subsystem; "
                         "that subsystem's state set is empty\n");
  }

  std::size_t components =
      k == 0 ? joint.subsystem_dims()[0] * joint.subsystem_dims()[1] : k;
  SeparabilityVerdict verdict =
      run_search ? separability_search(joint, space, components, iters, seed)
                 : entropy_witness(joint, space);

  Json report = report_envelope("toy", seed, {{"state", state_path}});
  report["epsilon"] = epsilon;
  report["witness_fired"] = verdict.witness_fired;
  report["entropy"] = verdict.entropy;
  if (verdict.search_residual) {
    report["search_residual"] = *verdict.search_residual;
    report["certified_separable"] = verdict.certified_separable;
    Json comps = Json::array();
    for (const auto& c : *verdict.components) {
      comps.push_back(Json{{"weight", c.weight},
                           {"factor_a", to_json(c.factor_a)},
                           {"factor_b", to_json(c.factor_b)}});
    }
    report["components"] = comps;
  }
  std::printf("entropy = %s, witness_fired = %s\n", format_double(verdict.entropy).c_str(),
              verdict.witness_fired ? "true" : "false");
  emit(report, out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// species

Json resolve_ref(const Json& ref, const std::filesystem::path& base) {
  if (ref.is_string()) {
    std::filesystem::path p = ref.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_json_file(p.string());
  }
  return ref;
}

int cmd_species(const std::string& scenario_path, std::uint64_t cli_seed,
                const std::string& out_prefix, const std::string& format) {
  Json sc = read_json_file(scenario_path);
  const std::filesystem::path base = std::filesystem::path(scenario_path).parent_path();

  std::vector<ProbVec> states;
  for (const auto& ref : sc.at("species")) {
    LoadedState s = state_from_json(resolve_ref(ref, base));
    if (!s.classical()) throw MismatchError("species: quantum species need a kraus channel scenario");
    states.push_back(s.prob().flat());
  }
  if (states.empty()) throw io_error("species: empty species list");

  const Json& policy = sc.at("env_policy");
  EnvironmentPolicy<ProbVec> env;
  const std::string kind = policy.at("kind").get<std::string>();
  if (kind == "homogeneous") {
    env.omegas.push_back(state_from_json(resolve_ref(policy.at("omega"), base)).prob().flat());
  } else if (kind == "map") {
    for (const auto& ref : policy.at("omegas")) {
      env.omegas.push_back(state_from_json(resolve_ref(ref, base)).prob().flat());
    }
  } else {
    throw io_error("species: env_policy.kind must be homogeneous or map");
  }

  LoadedChannel channel = channel_from_json(resolve_ref(sc.at("channel"), base));
  if (channel.index() != 0) throw MismatchError("species: expected a stochastic channel");

  const auto generations = sc.at("generations").get<std::size_t>();
  const std::uint64_t seed = sc.contains("seed") ? sc.at("seed").get<std::uint64_t>() : cli_seed;

  const std::size_t d = states[0].dim();
  const std::size_t e = env.omegas[0].dim();
  const auto& ch = std::get<StochasticChannel>(channel);
  if (ch.in_dim() != d * e || ch.out_dim() % (d * d) != 0) {
    throw MismatchError("species: channel shape incompatible with species/env dims");
  }
  BroadcastDims dims{d, e, ch.out_dim() / (d * d)};

  ClassicalSpeciesScenario scenario{states, env, ch, dims, generations};
  SpeciesTrajectory traj = species_simulate(scenario, seed);

  Json meta = report_envelope("species", seed, {{"scenario", scenario_path}});
  meta["generations"] = generations;
  meta["species_count"] = traj.species_count;

  if (format == "json") {
    Json overlaps = Json::array();
    for (std::size_t g = 0; g < traj.overlap_matrices.size(); ++g) {
      for (std::size_t i = 0; i < traj.species_count; ++i) {
        for (std::size_t j = i + 1; j < traj.species_count; ++j) {
          overlaps.push_back(Json::array(
              {g, i, j,
               traj.overlap_matrices[g](static_cast<Eigen::Index>(i),
                                        static_cast<Eigen::Index>(j))}));
        }
      }
    }
    Json joint = Json::array();
    for (std::size_t g = 0; g < traj.joint_product_overlap.size(); ++g) {
      for (std::size_t i = 0; i < traj.species_count; ++i) {
        joint.push_back(Json::array({g, i, traj.joint_product_overlap[g][i]}));
      }
    }
    meta["overlap"] = overlaps;
    meta["joint_product_overlap"] = joint;
    emit(meta, out_prefix.empty() ? "" : out_prefix + ".json");
    return kExitOk;
  }

  std::string overlap_csv = "generation,i,j,overlap\n";
  for (std::size_t g = 0; g < traj.overlap_matrices.size(); ++g) {
    for (std::size_t i = 0; i < traj.species_count; ++i) {
      for (std::size_t j = i + 1; j < traj.species_count; ++j) {
        overlap_csv += std::to_string(g) + "," + std::to_string(i) + "," + std::to_string(j) +
                       "," +
                       format_double(traj.overlap_matrices[g](
                           static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) +
                       "\n";
      }
    }
  }
  std::string joint_csv = "generation,species,joint_product_overlap\n";
  for (std::size_t g = 0; g < traj.joint_product_overlap.size(); ++g) {
    for (std::size_t i = 0; i < traj.species_count; ++i) {
      joint_csv += std::to_string(g) + "," + std::to_string(i) + "," +
                   format_double(traj.joint_product_overlap[g][i]) + "\n";
    }
  }
  if (out_prefix.empty()) {
    std::cout << overlap_csv << joint_csv;
  } else {
    write_text_file(out_prefix + ".overlap.csv", overlap_csv);
    write_text_file(out_prefix + ".joint.csv", joint_csv);
    emit(meta, out_prefix + ".meta.json");
  }
  std::printf("simulated %zu generations of %zu species\n", generations, traj.species_count);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selfrep: overlap axioms, broadcasting limits, and the entropy-floor toy model"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_path;
  std::string format;
  app.add_option("--seed", seed, "master seed for all randomized work")->capture_default_str();
  app.add_option("--out", out_path, "output path (or prefix for species)");
  app.add_option("--format", format, "output format: json, or csv (species default)")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* overlap = app.add_subcommand("overlap", "overlap of two states");
  std::string file_a, file_b;
  overlap->add_option("a", file_a, "first state file")->required();
  overlap->add_option("b", file_b, "second state file")->required();

  auto* axioms = app.add_subcommand("verify-axioms", "run the seeded axiom suite");
  std::string backend = "both";
  std::vector<std::size_t> dims;
  long trials = 1000;
  axioms->add_option("--backend", backend, "classical, quantum, or both")
      ->check(CLI::IsMember({"classical", "quantum", "both"}))
      ->capture_default_str();
  axioms->add_option("--dims", dims, "system dimensions to sample");
  axioms->add_option("--trials", trials, "trials per axiom")->capture_default_str();

  auto* clone = app.add_subcommand("clone-search", "search channel space for the best copier");
  std::string targets_path, env_path, clone_backend = "classical";
  std::size_t remainder = 0, restarts = 20, evals = 2000;
  clone->add_option("--targets", targets_path, "JSON file with the target states")->required();
  clone->add_option("--env", env_path, "environment state file (default: trivial)");
  clone->add_option("--backend", clone_backend, "classical or quantum")
      ->check(CLI::IsMember({"classical", "quantum"}))
      ->capture_default_str();
  clone->add_option("--remainder", remainder, "remainder dimension (0: same as env)");
  clone->add_option("--restarts", restarts, "optimizer restarts")->capture_default_str();
  clone->add_option("--evals", evals, "evaluations per restart")->capture_default_str();

  auto* bcast = app.add_subcommand("broadcast-check", "verify the overlap inequality chain");
  std::string channel_path, benv_path, benv2_path, bstate_a, bstate_b;
  bcast->add_option("--channel", channel_path, "channel file")->required();
  bcast->add_option("--env", benv_path, "environment state file")->required();
  bcast->add_option("--env2", benv2_path, "second environment (non-homogeneous case)");
  bcast->add_option("--state", bstate_a, "first parent state")->required();
  bcast->add_option("--state2", bstate_b, "second parent state")->required();

  auto* toy = app.add_subcommand("toy", "entropy witness and separable-decomposition search");
  std::string toy_state;
  double epsilon = std::log(2.0);
  bool run_search = false;
  std::size_t k = 0, iters = 2000;
  toy->add_option("--state", toy_state, "two-subsystem classical joint state file")->required();
  toy->add_option("--epsilon", epsilon, "entropy floor in nats")->capture_default_str();
  toy->add_flag("--search", run_search, "also run the decomposition search");
  toy->add_option("--k", k, "decomposition components (0: dim_A * dim_B)");
  toy->add_option("--iters", iters, "search sweeps per restart")->capture_default_str();

  auto* species = app.add_subcommand("species", "multi-generation replication dynamics");
  std::string scenario_path;
  species->add_option("--scenario", scenario_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (overlap->parsed()) return cmd_overlap(file_a, file_b, out_path, seed);
    if (axioms->parsed()) return cmd_verify_axioms(backend, dims, trials, seed, out_path);
    if (clone->parsed()) {
      return cmd_clone_search(targets_path, env_path, clone_backend, remainder, restarts,
                              evals, seed, out_path);
    }
    if (bcast->parsed()) {
      return cmd_broadcast_check(channel_path, benv_path, benv2_path, bstate_a, bstate_b,
                                 seed, out_path);
    }
    if (toy->parsed()) {
      return cmd_toy(toy_state, epsilon, run_search, k, iters, seed, out_path);
    }
    if (species->parsed()) {
      return cmd_species(scenario_path, seed, out_path, format.empty() ? "csv" : format);
    }
  } catch (const MismatchError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMismatch;
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMalformed;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitMalformed;
  }
  return kExitOk;
}
