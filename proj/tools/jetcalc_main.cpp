#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jetcalc/errors.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/fock.hpp"
#include "jetcalc/forms.hpp"
#include "jetcalc/multiindex.hpp"
#include "jetcalc/prolong.hpp"
#include "jetcalc/variational.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

// Output phases for the UnsupportedDivision dual mapping: during input
// assembly it is malformed input (exit 2), afterwards a precondition
// failure (exit 3).
enum class Phase { Input, Compute };

struct Report {
  std::vector<std::string> lines;
  ordered_json spec = ordered_json::object();
  ordered_json result = ordered_json::object();
  std::vector<std::string> warnings;
};

const char* kSyntacticZeroWarning =
    "elementary functions are compared syntactically; zero tests may miss "
    "identities among them";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw jetcalc::ShapeError("cannot read input file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Field {
  std::string key;
  std::string value;
  std::size_t offset;
};

/// Splits structured text into "key: value" fields, skipping blank lines
/// and '#' comments.
std::vector<Field> read_fields(const std::string& text) {
  std::vector<Field> fields;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    std::size_t offset = start;
    start = end + 1;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t colon = line.find(':', first);
    if (colon == std::string::npos)
      throw jetcalc::ParseError("expected a 'key: value' line",
                                offset + first);
    std::string key = line.substr(first, colon - first);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    fields.push_back({key, line.substr(colon + 1), offset + first});
  }
  return fields;
}

int parse_int(const std::string& text, std::size_t offset) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw jetcalc::ParseError("expected an integer", offset);
  }
  if (text.find_first_not_of(" \t\r", used) != std::string::npos)
    throw jetcalc::ParseError("trailing characters after integer", offset);
  return value;
}

/// Splits a whitespace-separated list of integers.
std::vector<int> parse_int_list(const std::string& text, std::size_t offset) {
  std::vector<int> values;
  std::istringstream in(text);
  std::string token;
  while (in >> token) values.push_back(parse_int(token, offset));
  return values;
}

// The payload and chart description shared by the expression subcommands,
// assembled from an optional problem file and the command-line flags (the
// flags win).
struct Problem {
  int n = 1;
  int m = 1;
  int order = 1;
  std::optional<std::string> lagrangian;
  std::vector<std::string> equations;
  std::optional<std::string> form;
};

struct ProblemFlags {
  int n = 1;
  int m = 1;
  int order = 1;
  std::string lagrangian;
  std::vector<std::string> equations;
  std::string form;
  std::string input;
  std::string format = "text";
  CLI::Option* n_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* order_opt = nullptr;
  CLI::Option* lagrangian_opt = nullptr;
  CLI::Option* form_opt = nullptr;

  void attach(CLI::App* cmd) {
    n_opt = cmd->add_option("--n", n, "number of base coordinates");
    m_opt = cmd->add_option("--m", m, "number of fibre coordinates");
    order_opt = cmd->add_option("--order", order, "jet order of the chart");
    lagrangian_opt =
        cmd->add_option("--lagrangian", lagrangian, "Lagrangian density");
    cmd->add_option("--equation", equations,
                    "equation component (repeat for each fibre coordinate)");
    form_opt = cmd->add_option("--form", form, "differential form");
    cmd->add_option("--input", input, "problem file");
    cmd->add_option("--format", format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
  }

  /// Merges the problem file (unless the subcommand consumes --input
  /// itself) with the flags; flags win.
  Problem resolve(bool input_is_problem_file = true) const {
    Problem p;
    if (input_is_problem_file && !input.empty()) {
      for (const Field& field : read_fields(read_file(input))) {
        if (field.key == "n")
          p.n = parse_int(field.value, field.offset);
        else if (field.key == "m")
          p.m = parse_int(field.value, field.offset);
        else if (field.key == "order")
          p.order = parse_int(field.value, field.offset);
        else if (field.key == "lagrangian")
          p.lagrangian = field.value;
        else if (field.key == "equation")
          p.equations.push_back(field.value);
        else if (field.key == "form")
          p.form = field.value;
        else
          throw jetcalc::ParseError("unknown field '" + field.key + "'",
                                    field.offset);
      }
    }
    if (n_opt->count()) p.n = n;
    if (m_opt->count()) p.m = m;
    if (order_opt->count()) p.order = order;
    if (lagrangian_opt->count()) p.lagrangian = lagrangian;
    if (!equations.empty()) p.equations = equations;
    if (form_opt->count()) p.form = form;
    return p;
  }

  jetcalc::JetSpec spec(const Problem& p) const {
    jetcalc::JetSpec spec{p.n, p.m, p.order};
    jetcalc::validate(spec);
    return spec;
  }
};

void put_spec(Report& report, const jetcalc::JetSpec& spec) {
  report.spec["n"] = spec.n;
  report.spec["m"] = spec.m;
  report.spec["order"] = spec.r;
}

jetcalc::Lagrangian require_lagrangian(const ProblemFlags& flags,
                                       const Problem& p, Report& report,
                                       bool warn_on_atoms) {
  if (!p.lagrangian)
    throw jetcalc::ShapeError("a Lagrangian is required (--lagrangian)");
  jetcalc::JetSpec spec = flags.spec(p);
  jetcalc::Expr density = jetcalc::parse_expr(*p.lagrangian, spec);
  if (warn_on_atoms && density.has_function_atoms())
    report.warnings.push_back(kSyntacticZeroWarning);
  put_spec(report, spec);
  return jetcalc::Lagrangian(spec, density);
}

jetcalc::SourceForm require_equation(const ProblemFlags& flags,
                                     const Problem& p, Report& report,
                                     bool warn_on_atoms) {
  if (p.equations.empty())
    throw jetcalc::ShapeError(
        "equation components are required (--equation, one per fibre "
        "coordinate)");
  jetcalc::JetSpec spec = flags.spec(p);
  std::vector<jetcalc::Expr> components;
  bool atoms = false;
  for (const std::string& text : p.equations) {
    components.push_back(jetcalc::parse_expr(text, spec));
    atoms = atoms || components.back().has_function_atoms();
  }
  if (warn_on_atoms && atoms)
    report.warnings.push_back(kSyntacticZeroWarning);
  put_spec(report, spec);
  return jetcalc::SourceForm(spec, std::move(components));
}

jetcalc::DiffForm require_form(const ProblemFlags& flags, const Problem& p,
                               Report& report) {
  if (!p.form) throw jetcalc::ShapeError("a form is required (--form)");
  jetcalc::JetSpec spec = flags.spec(p);
  put_spec(report, spec);
  return jetcalc::parse_form(*p.form, spec);
}

std::string bool_text(bool value) { return value ? "true" : "false"; }

void run_el(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::Lagrangian lag = require_lagrangian(flags, p, report, false);
  phase = Phase::Compute;
  jetcalc::SourceForm source = jetcalc::euler_lagrange(lag);
  ordered_json components = ordered_json::array();
  for (int sigma = 1; sigma <= source.spec.m; ++sigma) {
    std::string rendered = jetcalc::render(source.component(sigma));
    report.lines.push_back("T" + std::to_string(sigma) + " = " + rendered);
    components.push_back(rendered);
  }
  report.result["components"] = components;
}

void run_helmholtz(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::SourceForm source = require_equation(flags, p, report, true);
  phase = Phase::Compute;
  jetcalc::HelmholtzTable table = jetcalc::helmholtz(source);
  ordered_json entries = ordered_json::array();
  for (const auto& [J, row] : table.entries) {
    for (int sigma = 1; sigma <= source.spec.m; ++sigma) {
      for (int nu = 1; nu <= source.spec.m; ++nu) {
        std::string rendered = jetcalc::render(table.entry(J, sigma, nu));
        report.lines.push_back("H" + jetcalc::render(J) + "(" +
                               std::to_string(sigma) + "," +
                               std::to_string(nu) + ") = " + rendered);
        entries.push_back({{"J", jetcalc::render(J)},
                           {"sigma", sigma},
                           {"nu", nu},
                           {"expression", rendered}});
      }
    }
  }
  bool flat = table.all_zero();
  report.lines.push_back("variational: " + bool_text(flat));
  report.result["entries"] = entries;
  report.result["variational"] = flat;
}

void run_variational(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::SourceForm source = require_equation(flags, p, report, true);
  phase = Phase::Compute;
  bool verdict = jetcalc::is_locally_variational(source);
  report.lines.push_back("variational: " + bool_text(verdict));
  report.result["variational"] = verdict;
}

void run_tonti(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::SourceForm source = require_equation(flags, p, report, false);
  phase = Phase::Compute;
  jetcalc::Lagrangian lag = jetcalc::tonti_lagrangian(source);
  std::string rendered = jetcalc::render(lag.density);
  report.lines.push_back("L = " + rendered);
  report.result["lagrangian"] = rendered;
}

void run_trivial(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::Lagrangian lag = require_lagrangian(flags, p, report, true);
  phase = Phase::Compute;
  bool verdict = jetcalc::is_variationally_trivial(lag);
  report.lines.push_back("trivial: " + bool_text(verdict));
  report.result["trivial"] = verdict;
}

void run_check_system(const ProblemFlags& flags, Phase& phase,
                      Report& report) {
  Problem p = flags.resolve();
  jetcalc::Lagrangian lag = require_lagrangian(flags, p, report, true);
  phase = Phase::Compute;
  bool verdict = jetcalc::check_highest_order_system(lag);
  report.lines.push_back("holds: " + bool_text(verdict));
  report.result["holds"] = verdict;
}

void run_hyperjac(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve(false);
  if (flags.input.empty())
    throw jetcalc::ShapeError("a key file is required (--input)");
  std::vector<jetcalc::JetCouple> couples;
  std::vector<int> tail;
  int n = p.n;
  int m = p.m;
  int order = p.order;
  for (const Field& field : read_fields(read_file(flags.input))) {
    if (field.key == "n")
      n = parse_int(field.value, field.offset);
    else if (field.key == "m")
      m = parse_int(field.value, field.offset);
    else if (field.key == "order")
      order = parse_int(field.value, field.offset);
    else if (field.key == "couple") {
      std::size_t open = field.value.find('[');
      std::size_t close = field.value.find(']');
      if (open == std::string::npos || close == std::string::npos ||
          close < open)
        throw jetcalc::ParseError("expected 'couple: [entries] sigma'",
                                  field.offset);
      std::vector<int> entries = parse_int_list(
          field.value.substr(open + 1, close - open - 1), field.offset);
      int sigma = parse_int(field.value.substr(close + 1), field.offset);
      couples.emplace_back(jetcalc::MultiIndex::canonicalize(entries, n),
                           sigma);
    } else if (field.key == "tail")
      tail = parse_int_list(field.value, field.offset);
    else
      throw jetcalc::ParseError("unknown field '" + field.key + "'",
                                field.offset);
  }
  if (flags.n_opt->count()) n = flags.n;
  if (flags.m_opt->count()) m = flags.m;
  if (flags.order_opt->count()) order = flags.order;
  jetcalc::JetSpec spec{n, m, order};
  jetcalc::validate(spec);
  put_spec(report, spec);
  phase = Phase::Compute;
  std::string rendered =
      jetcalc::render(jetcalc::hyper_jacobian(spec, couples, tail));
  report.lines.push_back("value = " + rendered);
  report.result["expression"] = rendered;
}

void run_decompose(const ProblemFlags& flags, const CLI::Option* k_opt, int k,
                   Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::DiffForm rho = require_form(flags, p, report);
  phase = Phase::Compute;
  if (k_opt->count()) {
    std::string rendered = jetcalc::render(jetcalc::contact_component(rho, k));
    report.lines.push_back(rendered);
    report.result["component"] = rendered;
    return;
  }
  ordered_json components = ordered_json::array();
  for (int grade = 0; grade <= rho.degree(); ++grade) {
    std::string rendered =
        jetcalc::render(jetcalc::contact_component(rho, grade));
    report.lines.push_back("p" + std::to_string(grade) + ": " + rendered);
    components.push_back({{"k", grade}, {"form", rendered}});
  }
  report.result["components"] = components;
}

void run_homotopy(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve();
  jetcalc::DiffForm rho = require_form(flags, p, report);
  phase = Phase::Compute;
  std::string rendered = jetcalc::render(jetcalc::contact_homotopy(rho));
  report.lines.push_back(rendered);
  report.result["form"] = rendered;
}

void run_strong_contact(const ProblemFlags& flags, Phase& phase,
                        Report& report) {
  Problem p = flags.resolve();
  jetcalc::DiffForm rho = require_form(flags, p, report);
  phase = Phase::Compute;
  bool verdict = jetcalc::is_strongly_contact(rho);
  report.lines.push_back("strongly contact: " + bool_text(verdict));
  report.result["strongly_contact"] = verdict;
}

void run_prolong(const ProblemFlags& flags, Phase& phase, Report& report) {
  Problem p = flags.resolve(false);
  if (flags.input.empty())
    throw jetcalc::ShapeError("a morphism file is required (--input)");
  jetcalc::JetSpec spec = flags.spec(p);
  put_spec(report, spec);
  jetcalc::BundleMorphism phi =
      jetcalc::parse_morphism(read_file(flags.input), spec);
  phase = Phase::Compute;
  ordered_json components = ordered_json::array();
  for (const auto& [slot, value] : jetcalc::prolong_morphism(phi, spec.r)) {
    std::string rendered = jetcalc::render(value);
    report.lines.push_back("F" + std::to_string(slot.first) + "_" +
                           jetcalc::render(slot.second) + " = " + rendered);
    components.push_back({{"sigma", slot.first},
                          {"J", jetcalc::render(slot.second)},
                          {"expression", rendered}});
  }
  report.result["components"] = components;
}

void put_fock_spec(Report& report, const jetcalc::FockShape& shape) {
  report.spec["n"] = shape.n;
  report.spec["fermionic"] = shape.k;
  report.spec["bosonic"] = shape.bosons;
}

void append_tensor(Report& report, const std::string& label,
                   const jetcalc::FockTensor& x) {
  report.lines.push_back(label + ":");
  std::istringstream body(jetcalc::write_tensor(x));
  std::string line;
  while (std::getline(body, line)) report.lines.push_back(line);
}

void run_fock_trace(const ProblemFlags& flags, Phase& phase, Report& report) {
  if (flags.input.empty())
    throw jetcalc::ShapeError("a tensor file is required (--input)");
  jetcalc::FockTensor x = jetcalc::parse_tensor(read_file(flags.input));
  put_fock_spec(report, x.shape());
  phase = Phase::Compute;
  jetcalc::TraceDecomposition split = jetcalc::trace_decompose(x);
  append_tensor(report, "traceless", split.traceless);
  report.result["traceless"] = jetcalc::write_tensor(split.traceless);
  ordered_json parts = ordered_json::array();
  for (std::size_t alpha = 0; alpha < split.parts.size(); ++alpha) {
    append_tensor(report, "part " + std::to_string(alpha + 1),
                  split.parts[alpha]);
    parts.push_back(jetcalc::write_tensor(split.parts[alpha]));
  }
  report.result["parts"] = parts;
}

void run_fock_solve(const ProblemFlags& flags, Phase& phase, Report& report) {
  if (flags.input.empty())
    throw jetcalc::ShapeError("a tensor file is required (--input)");
  jetcalc::FockTensor x = jetcalc::parse_tensor(read_file(flags.input));
  put_fock_spec(report, x.shape());
  phase = Phase::Compute;
  std::vector<jetcalc::FockTensor> parts =
      jetcalc::solve_kernel_representation(x, x.shape().groups());
  ordered_json rendered = ordered_json::array();
  for (std::size_t alpha = 0; alpha < parts.size(); ++alpha) {
    append_tensor(report, "part " + std::to_string(alpha + 1), parts[alpha]);
    rendered.push_back(jetcalc::write_tensor(parts[alpha]));
  }
  report.result["parts"] = rendered;
}

void emit(const Report& report, const std::string& format) {
  if (format == "json") {
    ordered_json out;
    out["spec"] = report.spec;
    out["result"] = report.result;
    out["warnings"] = report.warnings;
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const std::string& line : report.lines) std::cout << line << "\n";
  for (const std::string& warning : report.warnings)
    std::cout << "warning: " << warning << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact variational calculus on jet bundles"};
  app.require_subcommand(1);

  std::map<std::string, ProblemFlags> flags;
  const std::vector<std::string> names = {
      "el",       "helmholtz", "variational",    "tonti",      "trivial",
      "hyperjac", "decompose", "homotopy",       "strong-contact",
      "prolong",  "fock-trace", "fock-solve",    "check-system"};
  const std::map<std::string, std::string> blurbs = {
      {"el", "Euler-Lagrange expressions of a Lagrangian"},
      {"helmholtz", "obstruction table of a differential equation"},
      {"variational", "decide local variationality of an equation"},
      {"tonti", "reconstruct a Lagrangian from a variational equation"},
      {"trivial", "decide variational triviality of a Lagrangian"},
      {"hyperjac", "evaluate a hyper-Jacobian determinant"},
      {"decompose", "contact components of a differential form"},
      {"homotopy", "contact homotopy operator applied to a form"},
      {"strong-contact", "decide strong contactness of a form"},
      {"prolong", "prolonged components of a fibred map"},
      {"fock-trace", "trace decomposition of a mixed-symmetry tensor"},
      {"fock-solve", "kernel representation of a mixed-symmetry tensor"},
      {"check-system", "highest-order system check for a Lagrangian"}};
  std::map<std::string, CLI::App*> commands;
  for (const std::string& name : names) {
    CLI::App* cmd = app.add_subcommand(name, blurbs.at(name));
    flags[name].attach(cmd);
    commands[name] = cmd;
  }
  int k = 0;
  CLI::Option* k_opt =
      commands["decompose"]->add_option("--k", k, "contact grade to extract");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const ProblemFlags& chosen = flags.at(name);
  Phase phase = Phase::Input;
  Report report;
  try {
    if (name == "el")
      run_el(chosen, phase, report);
    else if (name == "helmholtz")
      run_helmholtz(chosen, phase, report);
    else if (name == "variational")
      run_variational(chosen, phase, report);
    else if (name == "tonti")
      run_tonti(chosen, phase, report);
    else if (name == "trivial")
      run_trivial(chosen, phase, report);
    else if (name == "hyperjac")
      run_hyperjac(chosen, phase, report);
    else if (name == "decompose")
      run_decompose(chosen, k_opt, k, phase, report);
    else if (name == "homotopy")
      run_homotopy(chosen, phase, report);
    else if (name == "strong-contact")
      run_strong_contact(chosen, phase, report);
    else if (name == "prolong")
      run_prolong(chosen, phase, report);
    else if (name == "fock-trace")
      run_fock_trace(chosen, phase, report);
    else if (name == "fock-solve")
      run_fock_solve(chosen, phase, report);
    else
      run_check_system(chosen, phase, report);
  } catch (const jetcalc::UnsupportedDivision& e) {
    std::cerr << "error: " << e.what() << "\n";
    return phase == Phase::Input ? 2 : 3;
  } catch (const jetcalc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const jetcalc::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  emit(report, chosen.format);
  return 0;
}
