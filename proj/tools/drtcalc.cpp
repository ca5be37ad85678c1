// drtcalc: workbench for processes with discrete relative timing.
//
// Subcommands: parse, lts, normalize, check, par, axioms.
// Exit codes: 0 on success / all checks pass, 1 on any failed check,
// 2 on error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "drt/equiv.hpp"
#include "drt/model.hpp"
#include "drt/par.hpp"
#include "drt/props.hpp"
#include "drt/rewrite.hpp"
#include "drt/sos.hpp"
#include "drt/statespace.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw drt::TermError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw drt::TermError("cannot write '" + path + "'");
  out << text;
}

size_t default_max_states() {
  if (const char* env = std::getenv("DRTCALC_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return size_t(v);
  }
  return 100000;
}

int run_parse(const std::string& file, unsigned guard_depth) {
  drt::Model m = drt::parse_model(read_file(file), guard_depth);
  std::cout << "model ok: " << m.acts.action_count() << " actions, "
            << m.procs.size() << " processes, " << m.specs.size()
            << " specifications, " << m.checks.size() << " check directives\n";
  return 0;
}

int run_lts(const std::string& file, const std::string& proc,
            size_t max_states, const std::string& out) {
  drt::Model m = drt::parse_model(read_file(file));
  drt::TermRef t = drt::expand_time_iteration(m.proc(proc));
  drt::Sos sos(m.acts);
  drt::TwoPhaseLts l = drt::explore(sos, t, max_states);
  std::string dump = drt::dump_lts(l, m.acts);
  if (out.empty())
    std::cout << dump;
  else
    write_file(out, dump);
  return 0;
}

int run_normalize(const std::string& file, const std::string& proc,
                  const std::string& form, size_t max_states) {
  drt::Model m = drt::parse_model(read_file(file));
  drt::TermRef t = m.proc(proc);
  drt::Sos sos(m.acts);
  if (form == "basic") {
    drt::TermRef b = drt::to_basic_term(sos, drt::expand_time_iteration(t));
    std::cout << drt::term_to_text(b, m.acts) << "\n";
  } else if (form == "ts-basic") {
    drt::TermRef b = drt::to_basic_term(sos, drt::expand_time_iteration(t));
    std::cout << drt::term_to_text(drt::to_ts_basic(b), m.acts) << "\n";
  } else if (form == "linear") {
    drt::LinearSpec ls = drt::linearize(sos, t, max_states);
    std::cout << "root " << drt::var_name(ls.root_var) << "\n";
    for (const auto& eq : ls.spec->eqs)
      std::cout << drt::var_name(eq.var) << " = "
                << drt::term_to_text(eq.rhs, m.acts) << "\n";
  } else {
    throw drt::TermError("unknown normal form '" + form +
                         "' (use basic | ts-basic | linear)");
  }
  return 0;
}

int run_check(const std::string& file, size_t max_states,
              const std::string& report_path, unsigned guard_depth) {
  drt::Model m = drt::parse_model(read_file(file), guard_depth);
  if (m.checks.empty()) {
    std::cout << "no check directives\n";
    return 0;
  }
  bool all_pass = true;
  std::ostringstream report;
  report << "[";
  for (size_t i = 0; i < m.checks.size(); ++i) {
    const auto& d = m.checks[i];
    drt::Sos sos(m.acts);
    drt::Verdict v =
        drt::check_relation(sos, d.rel, d.lhs, d.rhs, max_states);
    bool expected = d.expect.value_or(true);
    bool pass = (v.answer == drt::Answer::Yes) == expected &&
                v.answer != drt::Answer::Unknown;
    if (d.expect && !*d.expect) pass = v.answer == drt::Answer::No;
    all_pass = all_pass && pass;
    std::cout << (pass ? "pass" : "FAIL") << "  check " << d.rel_text << " "
              << d.lhs_text << " ~ " << d.rhs_text << " -> "
              << drt::answer_name(v.answer);
    if (d.expect)
      std::cout << " (expected " << (*d.expect ? "yes" : "no") << ")";
    if (!v.yes() && !v.evidence.empty())
      std::cout << "\n      " << v.evidence.front();
    if (v.answer == drt::Answer::Unknown && !v.note.empty())
      std::cout << "\n      " << v.note;
    std::cout << "\n";
    if (i) report << ",";
    report << drt::verdict_to_json(d.rel_text, v);
  }
  report << "]";
  if (!report_path.empty()) write_file(report_path, report.str());
  return all_pass ? 0 : 1;
}

int run_par(const drt::ParParams& p, const std::string& mode,
            const std::string& report_path, size_t max_states) {
  p.validate();
  bool pass = true;
  std::string report;
  if (mode == "functional") {
    drt::FunctionalResult fr = drt::check_functional_correctness(p, max_states);
    std::cout << "PAR functional (" << p.describe() << "): buffer equivalence "
              << drt::answer_name(fr.verdict.answer) << ", expected "
              << (fr.expected_yes ? "yes" : "no")
              << (fr.deadlock_reachable ? " [deadlock reachable]" : "") << "\n";
    pass = fr.pass();
    report = drt::par_report_json(p, mode, &fr, nullptr, nullptr, nullptr);
  } else if (mode == "performance") {
    drt::PerformanceResult pr = drt::check_performance_spec(p, max_states);
    drt::DeliveryTiming dt = drt::delivery_timing(p, 20, max_states);
    std::cout << "PAR performance (" << p.describe() << "):\n"
              << "  system ~ X''  (rb-ts): "
              << drt::answer_name(pr.sys_vs_xpp_rbts.answer) << "\n"
              << "  system ~ X''' (da-rb): "
              << drt::answer_name(pr.sys_vs_xppp_da.answer) << "\n"
              << "  X'' ~ X'''    (rb-ts): "
              << drt::answer_name(pr.xpp_vs_xppp_rbts.answer) << "\n"
              << "  X'' ~ X'''    (da-rb): "
              << drt::answer_name(pr.xpp_vs_xppp_da.answer) << "\n"
              << "  first delivery after " << dt.first << " time slices\n";
    pass = pr.pass();
    report = drt::par_report_json(p, mode, nullptr, &pr, nullptr, &dt);
  } else if (mode == "spec-match") {
    drt::Verdict v = drt::check_spec_match(p, max_states);
    std::cout << "PAR spec-match (" << p.describe()
              << "): system ~ expanded specification (rb-ts): "
              << drt::answer_name(v.answer) << "\n";
    pass = v.yes();
    report = drt::par_report_json(p, mode, nullptr, nullptr, &v, nullptr);
  } else {
    throw drt::TermError("unknown par check '" + mode +
                         "' (use functional | performance | spec-match)");
  }
  if (!report_path.empty()) write_file(report_path, report);
  return pass ? 0 : 1;
}

int run_axioms(const std::string& which, int samples, uint64_t seed,
               const std::string& report_path) {
  std::vector<drt::AxiomReport> reports;
  if (which == "all") {
    reports = drt::check_all_axioms(samples, seed);
  } else {
    reports.push_back(drt::check_axiom_soundness(which, samples, seed));
  }
  bool all_ok = true;
  for (const auto& r : reports) {
    std::cout << (r.ok() ? "pass" : "FAIL") << "  " << r.id << " under "
              << r.relation << ": " << r.passed << "/" << r.samples << "\n";
    for (const auto& f : r.failures) std::cout << "      " << f << "\n";
    all_ok = all_ok && r.ok();
  }
  if (!report_path.empty())
    write_file(report_path, drt::axiom_reports_json(reports));
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drtcalc: a workbench for processes with discrete relative timing"};
  app.require_subcommand(1);
  size_t max_states = default_max_states();

  std::string file, proc, out, form, report;
  unsigned guard_depth = 8;

  auto* parse_cmd = app.add_subcommand("parse", "parse and validate a model file");
  parse_cmd->add_option("file", file)->required();
  parse_cmd->add_option("--guard-depth", guard_depth);

  auto* lts_cmd = app.add_subcommand("lts", "explore a process and dump its state graph");
  lts_cmd->add_option("file", file)->required();
  lts_cmd->add_option("--proc", proc)->required();
  lts_cmd->add_option("--max-states", max_states);
  lts_cmd->add_option("-o,--output", out);

  auto* norm_cmd = app.add_subcommand("normalize", "normalize a process");
  norm_cmd->add_option("file", file)->required();
  norm_cmd->add_option("--proc", proc)->required();
  norm_cmd->add_option("--form", form)->required();
  norm_cmd->add_option("--max-states", max_states);

  auto* check_cmd = app.add_subcommand("check", "run the model's check directives");
  check_cmd->add_option("file", file)->required();
  check_cmd->add_option("--max-states", max_states);
  check_cmd->add_option("--report", report);
  check_cmd->add_option("--guard-depth", guard_depth);

  drt::ParParams pp;
  std::string par_mode = "functional";
  auto* par_cmd = app.add_subcommand("par", "analyze the PAR protocol");
  par_cmd->add_option("--tS", pp.tS);
  par_cmd->add_option("--tR", pp.tR);
  par_cmd->add_option("--tK", pp.tK);
  par_cmd->add_option("--tL", pp.tL);
  par_cmd->add_option("--tSp", pp.tSp);
  par_cmd->add_option("--tRp", pp.tRp);
  par_cmd->add_option("--data", pp.data);
  par_cmd->add_option("--check", par_mode);
  par_cmd->add_option("--report", report);
  par_cmd->add_option("--max-states", max_states);

  std::string axiom_id = "all";
  int samples = 100;
  uint64_t seed = 1;
  auto* ax_cmd = app.add_subcommand("axioms", "validate the axiom system on random instances");
  ax_cmd->add_option("--axiom", axiom_id);
  ax_cmd->add_option("--samples", samples);
  ax_cmd->add_option("--seed", seed);
  ax_cmd->add_option("--report", report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (parse_cmd->parsed()) return run_parse(file, guard_depth);
    if (lts_cmd->parsed()) return run_lts(file, proc, max_states, out);
    if (norm_cmd->parsed()) return run_normalize(file, proc, form, max_states);
    if (check_cmd->parsed()) return run_check(file, max_states, report, guard_depth);
    if (par_cmd->parsed()) return run_par(pp, par_mode, report, max_states);
    if (ax_cmd->parsed()) return run_axioms(axiom_id, samples, seed, report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
