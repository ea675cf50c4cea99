#include "riam/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "riam/error.hpp"
#include "riam/experiment.hpp"
#include "riam/machine.hpp"
#include "riam/proof_structure.hpp"
#include "riam/system_r.hpp"

namespace riam::cli {

namespace {

constexpr std::size_t kOracleWarnCells = 12;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct StructureArgs {
  std::string file;
  std::string point;
  std::string point_file;
  std::size_t max_steps = 0;
  std::string fresh_prefix = "?_g";
  bool trace = false;
};

void add_structure_options(CLI::App* cmd, StructureArgs& a, bool machine_flags) {
  cmd->add_option("structure", a.file, "proof-structure in .mllps format")->required();
  auto* point = cmd->add_option("--point", a.point, "conclusion points, comma separated");
  auto* point_file = cmd->add_option("--point-file", a.point_file, "file holding the conclusion points");
  point->excludes(point_file);
  if (machine_flags) {
    cmd->add_option("--max-steps", a.max_steps, "displacement budget (default: twice the number of cells)");
    cmd->add_option("--fresh-prefix", a.fresh_prefix, "prefix for fresh variables");
  }
}

struct Loaded {
  mll::IndexedStructure ps;
  std::vector<rel::Term> point;
};

Loaded load(const StructureArgs& a) {
  mll::IndexedStructure ps(mll::parse_proof_structure(read_file(a.file)));
  std::string text = a.point_file.empty() ? a.point : read_file(a.point_file);
  std::vector<rel::Term> point = rel::parse_point(text, ps.conclusions().size());
  rel::require_conclusion_point(ps, point);
  return {std::move(ps), std::move(point)};
}

int run_machine(const StructureArgs& a, bool print_trace, std::ostream& out, std::ostream& err) {
  Loaded in = load(a);
  machine::RunOptions options;
  options.max_displacements = a.max_steps;
  options.fresh_prefix = a.fresh_prefix;
  machine::RunResult run = machine::normal_run(in.ps, in.point, options);
  if (print_trace) out << machine::format_trace(in.ps, run);
  if (run.accepted) return kHolds;
  err << "rejected: " << run.reason << '\n'
      << "configuration: " << machine::to_string(in.ps, run.final_config) << '\n';
  return kFails;
}

int run_oracle(const StructureArgs& a, std::ostream& out, std::ostream& err) {
  Loaded in = load(a);
  if (in.ps.cell_count() > kOracleWarnCells) {
    err << "warning: exhaustive search over " << in.ps.cell_count() << " cells may take a long time\n";
  }
  auto e = rel::find_experiment(in.ps, in.point);
  if (!e) {
    err << "no experiment has this result\n";
    return kFails;
  }
  for (mll::PortIndex p = 0; p < in.ps.port_count(); ++p) {
    out << in.ps.port_id(p) << " = " << rel::to_string(e->values[p]) << '\n';
  }
  return kHolds;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic type checking of MLL proof-structures and simply-typed λ-terms"};
  app.require_subcommand(1, 1);

  StructureArgs check_args, oracle_args, trace_args;
  auto* check = app.add_subcommand("check", "decide ⊳ Φ : x with the token machine");
  add_structure_options(check, check_args, true);
  check->add_flag("--trace", check_args.trace, "also print the event trace");
  auto* oracle = app.add_subcommand("oracle", "decide ⊳ Φ : x by exhaustive search over experiments");
  add_structure_options(oracle, oracle_args, false);
  auto* trace = app.add_subcommand("trace", "run the machine and print its event trace");
  add_structure_options(trace, trace_args, true);

  std::string term_text, type_text, point_text;
  auto* lcheck = app.add_subcommand("lambda-check", "decide ⊳ M : point : type for a closed λ-term");
  lcheck->add_option("term", term_text, "closed λ-term, e.g. \\x:o.\\y:o.x")->required();
  lcheck->add_option("--type", type_text, "simple type, e.g. o -> o -> o")->required();
  lcheck->add_option("--point", point_text, "point, e.g. [*] -> [] -> *")->required();
  std::string bool_text;
  auto* lbool = app.add_subcommand("lambda-bool", "evaluate a closed Church boolean semantically");
  lbool->add_option("term", bool_text, "closed λ-term of type o -> o -> o")->required();

  std::vector<const char*> argv{"riam"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kHolds : kBadInput;
  }

  auto need_point = [&](const StructureArgs& a) {
    if (a.point.empty() && a.point_file.empty()) throw PreconditionError("one of --point or --point-file is required");
  };

  try {
    if (check->parsed()) {
      need_point(check_args);
      return run_machine(check_args, check_args.trace, out, err);
    }
    if (trace->parsed()) {
      need_point(trace_args);
      return run_machine(trace_args, true, out, err);
    }
    if (oracle->parsed()) {
      need_point(oracle_args);
      return run_oracle(oracle_args, out, err);
    }
    if (lcheck->parsed()) {
      lambda::Term m = lambda::parse_term(term_text);
      lambda::Type t = lambda::parse_type(type_text);
      lambda::Point p = lambda::parse_point(point_text);
      if (!lambda::refines(p, t)) throw PreconditionError("point does not refine " + lambda::to_string(t));
      bool holds = lambda::check_judgment(m, t, p);
      out << (holds ? "holds" : "fails") << '\n';
      return holds ? kHolds : kFails;
    }
    if (lbool->parsed()) {
      auto verdict = lambda::boolean_eval(lambda::parse_term(bool_text));
      out << (verdict == lambda::BoolVerdict::IsTrue ? "true" : "false") << '\n';
      return verdict == lambda::BoolVerdict::IsTrue ? kHolds : kFails;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const mll::ValidationError& e) {
    err << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const lambda::TypeError& e) {
    err << "type error: " << e.what() << '\n';
  }
  return kBadInput;
}

} // namespace riam::cli
