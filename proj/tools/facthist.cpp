// facthist: command-line front end for histories, structural independence and
// the product-distribution checks. Reports are JSON on stdout; diagnostics go to
// stderr. Exit status: 0 affirmative/pass, 1 negative verdict, 2 usage or input
// error, 3 size cap exceeded.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "facthist/dag.hpp"
#include "facthist/distributions.hpp"
#include "facthist/history.hpp"
#include "facthist/io.hpp"
#include "facthist/verification.hpp"

using namespace facthist;

namespace {

constexpr int kExitNegative = 1;
constexpr int kExitInput = 2;
constexpr int kExitTooLarge = 3;

SpaceLimits limits_from_env() {
  SpaceLimits limits;
  if (const char* env = std::getenv("FACTHIST_MAX_OUTCOMES")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size() || v == 0) throw std::invalid_argument(env);
      limits.max_outcomes = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse_error, std::string("FACTHIST_MAX_OUTCOMES is not a positive integer: ") + env);
    }
  }
  return limits;
}

std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SpaceModel load_space(const std::string& path) { return space_from_json(read_json_file(path), limits_from_env()); }

std::string block_label(const RandomVariable& z, std::uint32_t v) { return z.codomain().at(v); }

Json violation_json(const RandomVariable& x, const RandomVariable& y, const RandomVariable& z, const CiViolation& v) {
  return {{"z", block_label(z, v.z)},
          {"x", x.codomain().at(v.x)},
          {"y", y.codomain().at(v.y)},
          {"joint", to_fraction_string(v.joint)},
          {"product", to_fraction_string(v.product)}};
}

void emit(const Json& doc, bool pretty) { std::cout << (pretty ? doc.dump(2) : doc.dump()) << '\n'; }

struct Query {
  std::string space_file;
  std::string x;
  std::string y;
  std::string given;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Histories and structural independence over finite factored spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  bool pretty = false;
  app.add_flag("--pretty", pretty, "Indented, human-oriented output");

  // history
  Query hq;
  bool unconditional = false;
  auto* history_cmd = app.add_subcommand("history", "Conditional history of a variable, per block of the conditioning variable");
  history_cmd->add_option("space", hq.space_file, "Space file")->required();
  history_cmd->add_option("--var", hq.x, "Variable or factor name")->required();
  auto* given_opt = history_cmd->add_option("--given", hq.given, "Comma-separated conditioning variables");
  auto* uncond_flag = history_cmd->add_flag("--unconditional", unconditional, "Condition on nothing");
  given_opt->excludes(uncond_flag);

  // indep
  Query iq;
  auto* indep_cmd = app.add_subcommand("indep", "Structural independence of X and Y given Z (exit 0 independent, 1 not)");
  indep_cmd->add_option("space", iq.space_file, "Space file")->required();
  indep_cmd->add_option("X", iq.x)->required();
  indep_cmd->add_option("Y", iq.y)->required();
  indep_cmd->add_option("--given", iq.given, "Comma-separated conditioning variables");

  // dsep
  std::string dag_file, dx, dy;
  std::vector<std::string> dgiven;
  auto* dsep_cmd = app.add_subcommand("dsep", "d-separation of two nodes (exit 0 separated, 1 connected)");
  dsep_cmd->add_option("dag", dag_file, "DAG file")->required();
  dsep_cmd->add_option("X", dx)->required();
  dsep_cmd->add_option("Y", dy)->required();
  dsep_cmd->add_option("--given", dgiven, "Conditioning nodes (repeatable or comma-separated)")->delimiter(',');

  // embed
  std::string embed_in, embed_out;
  auto* embed_cmd = app.add_subcommand("embed", "Write the response-function embedding of a DAG as a space file");
  embed_cmd->add_option("dag", embed_in, "DAG file")->required();
  embed_cmd->add_option("-o,--output", embed_out, "Space file to write")->required();

  // verify
  Query vq;
  std::size_t samples = 50, tries = 64;
  std::uint64_t seed = 1;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Check the structural verdict against sampled product distributions (soundness or witness search)");
  verify_cmd->add_option("space", vq.space_file, "Space file")->required();
  verify_cmd->add_option("X", vq.x)->required();
  verify_cmd->add_option("Y", vq.y)->required();
  verify_cmd->add_option("--given", vq.given, "Comma-separated conditioning variables");
  verify_cmd->add_option("--samples", samples, "Distributions sampled when structurally independent");
  verify_cmd->add_option("--tries", tries, "Witness budget when structurally dependent");
  verify_cmd->add_option("--seed", seed, "Master seed");

  // witness
  Query wq;
  std::string witness_out;
  auto* witness_cmd = app.add_subcommand("witness", "Search for a product distribution violating X _||_ Y | Z");
  witness_cmd->add_option("space", wq.space_file, "Space file")->required();
  witness_cmd->add_option("X", wq.x)->required();
  witness_cmd->add_option("Y", wq.y)->required();
  witness_cmd->add_option("--given", wq.given, "Comma-separated conditioning variables");
  witness_cmd->add_option("--tries", tries, "Witness budget");
  witness_cmd->add_option("--seed", seed, "Master seed");
  witness_cmd->add_option("-o,--output", witness_out, "Also write the witness as a distribution file");

  // axioms
  SuiteConfig cfg;
  bool with_dag = false;
  auto* axioms_cmd = app.add_subcommand("axioms", "Run the randomized law suite");
  axioms_cmd->add_option("--seed", cfg.seed, "Master seed");
  axioms_cmd->add_option("--iters", cfg.iterations, "Instances per suite");
  axioms_cmd->add_option("--max-factors", cfg.max_factors, "Largest number of factors");
  axioms_cmd->add_option("--max-domain", cfg.max_domain, "Largest factor domain");
  axioms_cmd->add_option("--samples", cfg.sample_count, "Distributions per soundness check");
  axioms_cmd->add_option("--budget", cfg.witness_budget, "Witness budget");
  axioms_cmd->add_option("--perturbations", cfg.perturbation_budget, "Perturbations per factor");
  axioms_cmd->add_flag("--dag", with_dag, "Also run the d-separation and structural time suite");

  // atoms
  Query aq;
  auto* atoms_cmd = app.add_subcommand("atoms", "Disintegration atoms and constant factors per block");
  atoms_cmd->add_option("space", aq.space_file, "Space file")->required();
  atoms_cmd->add_option("--given", aq.given, "Comma-separated conditioning variables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*history_cmd) {
      if (!unconditional && hq.given.empty()) {
        std::cerr << "history: pass --given Z or --unconditional\n";
        return kExitInput;
      }
      const auto model = load_space(hq.space_file);
      const auto x = model.resolve(hq.x);
      const auto z = model.resolve_tuple(split_names(hq.given));
      const auto h = conditional_history(model.space, x, z);
      Json out = Json::object();
      for (const auto& [zv, set] : h.per_block) out[block_label(z, zv)] = index_set_names(model.space, set);
      emit(out, pretty);
      return 0;
    }

    if (*indep_cmd) {
      const auto model = load_space(iq.space_file);
      const auto x = model.resolve(iq.x);
      const auto y = model.resolve(iq.y);
      const auto z = model.resolve_tuple(split_names(iq.given));
      const auto v = structurally_independent(model.space, x, y, z);
      Json overlaps = Json::object();
      for (const auto& [zv, set] : v.overlaps) overlaps[block_label(z, zv)] = index_set_names(model.space, set);
      emit({{"independent", v.independent}, {"overlaps", overlaps}}, pretty);
      return v.independent ? 0 : kExitNegative;
    }

    if (*dsep_cmd) {
      const auto dag = dag_from_json(read_json_file(dag_file));
      NodeSet zs;
      for (const auto& g : dgiven) {
        for (const auto& name : split_names(g)) zs.insert(dag.index_of(name));
      }
      const bool sep = d_separated(dag, {dag.index_of(dx)}, {dag.index_of(dy)}, zs);
      emit({{"d_separated", sep}}, pretty);
      return sep ? 0 : kExitNegative;
    }

    if (*embed_cmd) {
      const auto dag = dag_from_json(read_json_file(embed_in));
      const auto emb = embed_dag(dag, limits_from_env());
      write_json_file(embed_out, space_to_json(embedding_model(emb)));
      emit({{"output", embed_out},
            {"factors", emb.space.factor_count()},
            {"outcomes", emb.space.outcome_count()},
            {"variables", emb.node_vars.size()}},
           pretty);
      return 0;
    }

    if (*verify_cmd) {
      const auto model = load_space(vq.space_file);
      const auto x = model.resolve(vq.x);
      const auto y = model.resolve(vq.y);
      const auto z = model.resolve_tuple(split_names(vq.given));
      const auto verdict = structurally_independent(model.space, x, y, z);
      if (verdict.independent) {
        const auto s = verify_soundness(model.space, x, y, z, samples, seed);
        Json violations = Json::array();
        for (const auto& [k, v] : s.violations) {
          auto j = violation_json(x, y, z, v);
          j["sample"] = k;
          violations.push_back(std::move(j));
        }
        emit({{"structural", true},
              {"mode", "soundness"},
              {"samples", s.samples},
              {"holds", s.holds},
              {"violations", violations},
              {"passed", s.passed()}},
             pretty);
        return s.passed() ? 0 : kExitNegative;
      }
      const auto w = find_witness(model.space, x, y, z, tries, seed);
      Json out = {{"structural", false}, {"mode", "witness"}, {"budget", tries}, {"passed", w.has_value()}};
      if (w) {
        out["tries"] = w->tries;
        out["witness"] = distribution_to_json(w->distribution);
        out["violation"] = violation_json(x, y, z, w->violation);
      }
      emit(out, pretty);
      return w ? 0 : kExitNegative;
    }

    if (*witness_cmd) {
      const auto model = load_space(wq.space_file);
      const auto x = model.resolve(wq.x);
      const auto y = model.resolve(wq.y);
      const auto z = model.resolve_tuple(split_names(wq.given));
      const auto w = find_witness(model.space, x, y, z, tries, seed);
      if (!w) {
        emit({{"found", false}, {"budget", tries}}, pretty);
        return kExitNegative;
      }
      if (!witness_out.empty()) write_json_file(witness_out, distribution_to_json(w->distribution));
      emit({{"found", true},
            {"tries", w->tries},
            {"distribution", distribution_to_json(w->distribution)},
            {"violation", violation_json(x, y, z, w->violation)}},
           pretty);
      return 0;
    }

    if (*axioms_cmd) {
      auto report = run_suite(cfg);
      if (with_dag && cfg.iterations > 0) report.merge(run_dag_suite(cfg));
      Json out = report.to_json();
      out["config"] = config_to_json(cfg);
      emit(out, pretty);
      return report.passed() ? 0 : kExitNegative;
    }

    if (*atoms_cmd) {
      const auto model = load_space(aq.space_file);
      const auto z = model.resolve_tuple(split_names(aq.given));
      Json out = Json::object();
      for (const auto& [zv, block] : blocks_of(model.space, z)) {
        const auto a = disintegration_atoms(model.space, block);
        Json atoms = Json::array();
        for (const auto& atom : a.atoms) atoms.push_back(index_set_names(model.space, atom));
        out[block_label(z, zv)] = {{"atoms", atoms}, {"trivial", index_set_names(model.space, a.trivial_part)}};
      }
      emit(out, pretty);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "facthist: " << e.what() << '\n';
    return e.kind() == ErrorKind::space_too_large ? kExitTooLarge : kExitInput;
  }
  return kExitInput;
}
