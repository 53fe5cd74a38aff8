// Batch command-line front end: load instances/allocations, run checkers,
// allocators, the MNW solver and counterexample verification; emit JSON and
// human-readable reports.
//
// Exit codes: 0 = criterion satisfied / artifact produced,
//             1 = criterion violated (certificate on stdout),
//             2 = usage or validation error.
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixedfair/allocators.hpp"
#include "mixedfair/cake.hpp"
#include "mixedfair/fairness.hpp"
#include "mixedfair/mnw.hpp"
#include "mixedfair/model.hpp"
#include "mixedfair/oracle.hpp"

namespace mixedfair::cli {

constexpr const char* kVersion = "mixedfair 1.0.0";

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error(path, "cannot open for writing");
  out << content;
}

inline std::string decimal6(const Rat& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6Lf", to_long_double(r));
  return buf;
}

inline std::string pretty(const Rat& r) { return to_string(r) + " (" + decimal6(r) + ")"; }

inline json meta_block(const std::vector<std::string>& args) {
  return json{{"tool", kVersion}, {"args", args}};
}

}  // namespace detail

// Runs the CLI on the given arguments (without the program name). Output is
// deterministic for fixed inputs; --meta attaches tool/argument metadata.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact-arithmetic fair division of mixed divisible and indivisible goods"};
  app.require_subcommand(1);
  bool meta = false;
  app.add_flag("--meta", meta, "attach run metadata to JSON output");

  // ---- check ----
  auto* check_cmd = app.add_subcommand("check", "check an allocation against a criterion");
  std::string check_instance, check_allocation, check_criterion, check_report_path;
  bool propmm_literal = false;
  check_cmd->add_option("--instance", check_instance)->required();
  check_cmd->add_option("--allocation", check_allocation)->required();
  check_cmd->add_option("--criterion", check_criterion)->required();
  check_cmd->add_option("--report", check_report_path, "also write the report to a file");
  check_cmd->add_flag("--propmm-literal", propmm_literal,
                      "use the displayed PROPmM formula (min over own bundle)");

  // ---- allocate ----
  auto* alloc_cmd = app.add_subcommand("allocate", "run an allocation algorithm");
  std::string alg_name, alloc_instance, alloc_out, alloc_trace;
  alloc_cmd->add_option("--algorithm", alg_name, "alg1 | ef2 | efpo2 | greedyid")->required();
  alloc_cmd->add_option("--instance", alloc_instance)->required();
  alloc_cmd->add_option("--out", alloc_out)->required();
  alloc_cmd->add_option("--trace", alloc_trace, "write the round trace (alg1 only)");

  // ---- mnw ----
  auto* mnw_cmd = app.add_subcommand("mnw", "maximum Nash welfare solve");
  std::string mnw_instance, mnw_out;
  mnw_cmd->add_option("--instance", mnw_instance)->required();
  mnw_cmd->add_option("--out", mnw_out, "write the canonical optimum allocation");

  // ---- counterexample ----
  auto* cx_cmd = app.add_subcommand("counterexample",
                                    "generate a named counterexample instance and verify its "
                                    "(non-)existence claim or relation");
  std::string cx_template, cx_eps, cx_x, cx_beta, cx_c, cx_criterion, cx_out_instance;
  int cx_n = 3, cx_K = 60;
  cx_cmd->add_option("--template", cx_template)->required();
  cx_cmd->add_option("--n", cx_n);
  cx_cmd->add_option("--eps", cx_eps);
  cx_cmd->add_option("--x", cx_x);
  cx_cmd->add_option("--beta", cx_beta);
  cx_cmd->add_option("--c", cx_c, "EFfA/PROPfA coefficient for the falsifier");
  cx_cmd->add_option("--criterion", cx_criterion, "criterion token for the falsifier");
  cx_cmd->add_option("--K", cx_K, "cake grid resolution");
  cx_cmd->add_option("--out-instance", cx_out_instance, "write the generated instance");

  // ---- mms ----
  auto* mms_cmd = app.add_subcommand("mms", "exact maximin share of an agent");
  std::string mms_instance, mms_report;
  int mms_agent = 0;
  mms_cmd->add_option("--instance", mms_instance)->required();
  mms_cmd->add_option("--agent", mms_agent)->required();
  mms_cmd->add_option("--report", mms_report, "also write the certificate to a file");

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "human-readable multi-criterion report");
  std::string rep_instance, rep_allocation, rep_criteria = "ef,prop,ef1,prop1,efalpha,propalpha,efm";
  report_cmd->add_option("--instance", rep_instance)->required();
  report_cmd->add_option("--allocation", rep_allocation)->required();
  report_cmd->add_option("--criteria", rep_criteria, "comma-separated criterion tokens");

  const std::vector<std::string> orig_args = args;
  try {
    std::reverse(args.begin(), args.end());  // CLI11's vector parse is reversed
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (*check_cmd) {
      Instance inst = parse_instance(detail::read_file(check_instance));
      Allocation alloc = parse_allocation(detail::read_file(check_allocation), inst);
      Criterion crit = Criterion::from_token(check_criterion);
      CheckOptions opts;
      opts.propmm_literal_formula = propmm_literal;
      FairnessReport report = check(inst, alloc, crit, opts);
      json j = report_to_json(report);
      if (meta) j["meta"] = detail::meta_block(orig_args);
      if (!check_report_path.empty()) detail::write_file(check_report_path, j.dump(2) + "\n");
      out << j.dump(2) << "\n";
      return report.satisfied ? 0 : 1;
    }

    if (*alloc_cmd) {
      Instance inst = parse_instance(detail::read_file(alloc_instance));
      QueryLog log;
      Allocation alloc;
      std::optional<AlgTrace> trace;
      if (alg_name == "alg1") {
        auto [a, t] = alg1_propalpha(inst, &log);
        alloc = a;
        trace = t;
      } else if (alg_name == "ef2") {
        alloc = two_agent_efalpha(inst, &log);
      } else if (alg_name == "efpo2") {
        alloc = two_agent_efalpha_po(inst);
      } else if (alg_name == "greedyid") {
        alloc = identical_greedy(inst, &log);
      } else {
        err << "unknown algorithm '" << alg_name << "'\n";
        return 2;
      }
      detail::write_file(alloc_out, serialize_allocation(alloc));
      if (!alloc_trace.empty()) {
        if (!trace) {
          err << "--trace is only available for alg1\n";
          return 2;
        }
        detail::write_file(alloc_trace, trace->to_json().dump(2) + "\n");
      }
      json j;
      j["algorithm"] = alg_name;
      j["queries"] = {{"eval", log.eval_count()}, {"cut", log.cut_count()}};
      json utilities = json::array();
      for (int i = 0; i < inst.n; ++i)
        utilities.push_back(to_string(bundle_value(inst, i, alloc.bundles[i])));
      j["utilities"] = utilities;
      if (meta) j["meta"] = detail::meta_block(orig_args);
      out << j.dump(2) << "\n";
      return 0;
    }

    if (*mnw_cmd) {
      Instance inst = parse_instance(detail::read_file(mnw_instance));
      MnwSolution sol = solve_mnw(inst);
      json ties = json::array();
      for (const auto& cand : sol.ties) {
        json utilities = json::array();
        for (const auto& u : cand.utilities) utilities.push_back(to_string(u));
        ties.push_back({{"assignment", cand.assignment},
                        {"utilities", utilities},
                        {"exact", cand.exact}});
      }
      json j;
      j["positive_count"] = sol.best().positive_count;
      j["tie_count"] = sol.ties.size();
      j["ties"] = ties;
      j["allocation"] = allocation_to_json(sol.best().allocation);
      if (meta) j["meta"] = detail::meta_block(orig_args);
      if (!mnw_out.empty())
        detail::write_file(mnw_out, serialize_allocation(sol.best().allocation));
      out << j.dump(2) << "\n";
      return 0;
    }

    if (*cx_cmd) {
      TemplateParams params;
      params.n = cx_n;
      if (!cx_eps.empty()) params.eps = parse_rat(cx_eps, "--eps");
      if (!cx_x.empty()) params.x = parse_rat(cx_x, "--x");
      if (!cx_beta.empty()) params.beta = parse_rat(cx_beta, "--beta");
      Template tmpl = template_from_token(cx_template);
      if (tmpl == Template::T6 && !params.eps) params.eps = rat(2, 5);

      bool falsify_mode = tmpl == Template::T3 || tmpl == Template::T6 ||
                          !cx_c.empty() || !cx_criterion.empty();
      if (falsify_mode) {
        TemplateInstance gen = gen_instance(tmpl, params);
        if (!cx_out_instance.empty())
          detail::write_file(cx_out_instance, serialize_instance(gen.instance));
        Criterion crit = Criterion::efalpha();
        if (!cx_criterion.empty())
          crit = Criterion::from_token(cx_criterion);
        else if (!cx_c.empty())
          crit = Criterion::effa(parse_rat(cx_c, "--c"));
        else if (tmpl == Template::T6)
          crit = Criterion::propfa(Rat(params.n - 1, params.n) - gen.eps);
        FalsifierResult fr = falsify(gen.instance, crit, cx_K);
        json j;
        j["template"] = template_token(tmpl);
        j["criterion"] = crit.token();
        j["family"] = fr.family;
        j["exact"] = fr.exact;
        j["satisfiable"] = fr.satisfiable;
        j["best_slack"] = to_string(fr.best_slack);
        j["best_allocation"] = allocation_to_json(fr.best_allocation);
        if (meta) j["meta"] = detail::meta_block(orig_args);
        out << j.dump(2) << "\n";
        return fr.satisfiable ? 0 : 1;
      }

      RelationReport rep = verify_relation(tmpl, params);
      if (!cx_out_instance.empty())
        detail::write_file(cx_out_instance, serialize_instance(rep.generated.instance));
      json checks = json::array();
      for (const auto& c : rep.checks)
        checks.push_back({{"label", c.label},
                          {"expected", c.expected ? "satisfied" : "violated"},
                          {"actual", c.actual ? "satisfied" : "violated"},
                          {"lhs", to_string(c.lhs)},
                          {"rhs", to_string(c.rhs)}});
      json j;
      j["template"] = template_token(tmpl);
      j["x"] = to_string(rep.generated.x);
      j["eps"] = to_string(rep.generated.eps);
      j["checks"] = checks;
      j["allocation"] = allocation_to_json(rep.allocation);
      j["ok"] = rep.ok;
      if (meta) j["meta"] = detail::meta_block(orig_args);
      out << j.dump(2) << "\n";
      return rep.ok ? 0 : 1;
    }

    if (*mms_cmd) {
      Instance inst = parse_instance(detail::read_file(mms_instance));
      if (mms_agent < 0 || mms_agent >= inst.n) {
        err << "agent index out of range\n";
        return 2;
      }
      MmsCertificate cert = compute_mms(inst, mms_agent);
      json shares = json::array();
      for (const auto& s : cert.cake_shares) shares.push_back(to_string(s));
      json j;
      j["agent"] = cert.agent;
      j["mms"] = to_string(cert.value);
      j["witness"] = {{"partition", cert.partition_goods}, {"cake_shares", shares}};
      if (meta) j["meta"] = detail::meta_block(orig_args);
      if (!mms_report.empty()) detail::write_file(mms_report, j.dump(2) + "\n");
      out << j.dump(2) << "\n";
      return 0;
    }

    if (*report_cmd) {
      Instance inst = parse_instance(detail::read_file(rep_instance));
      Allocation alloc = parse_allocation(detail::read_file(rep_allocation), inst);
      std::vector<std::string> tokens;
      std::stringstream ss(rep_criteria);
      for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) tokens.push_back(tok);
      out << "instance: " << inst.n << " agents, " << inst.m << " goods, "
          << inst.segments() << " cake segments\n";
      for (int i = 0; i < inst.n; ++i)
        out << "  agent " << i << ": u(A_" << i
            << ") = " << detail::pretty(bundle_value(inst, i, alloc.bundles[i]))
            << ", alpha = " << detail::pretty(indivisibility_ratio(inst, i)) << "\n";
      bool all_ok = true;
      for (const auto& tok : tokens) {
        FairnessReport r = check(inst, alloc, Criterion::from_token(tok));
        all_ok = all_ok && r.satisfied;
        out << tok << ": " << (r.satisfied ? "satisfied" : "VIOLATED") << "\n";
        if (const Witness* w = r.first_violation()) {
          out << "  agent " << w->agent;
          if (w->against) out << " vs " << *w->against;
          out << ": " << detail::pretty(w->lhs) << " < " << detail::pretty(w->rhs);
          if (w->good) out << "  (best good " << *w->good << ")";
          out << "\n";
        }
      }
      return all_ok ? 0 : 1;
    }
  } catch (const parse_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace mixedfair::cli
