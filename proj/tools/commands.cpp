#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "signalflow/discrete.hpp"
#include "signalflow/dynamics.hpp"
#include "signalflow/montecarlo.hpp"

#ifndef SIGNALFLOW_VERSION
#define SIGNALFLOW_VERSION "0.0.0"
#endif

namespace signalflow::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ostream& logs(const CommandOptions& opt) {
  static std::ostringstream sink;
  if (opt.log) return *opt.log;
  sink.str("");
  return sink;
}

std::string fmt(double x, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

json config_json(const RunConfig& cfg) {
  json fields = json::object();
  for (const auto& [k, v] : cfg.doc.entries()) fields[k] = v.raw;
  return {{"path", cfg.path}, {"text", cfg.text}, {"fields", fields}};
}

json base_artifact(const std::string& command, const RunConfig& cfg) {
  return {{"command", command}, {"version", version()}, {"config", config_json(cfg)}};
}

std::string out_dir(const RunConfig& cfg, const CommandOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return ".";
}

std::string write_file(const RunConfig& cfg, const CommandOptions& opt, const std::string& name,
                       const std::string& content) {
  const fs::path dir = out_dir(cfg, opt);
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  return p.string();
}

void finish(CommandResult& res, const RunConfig& cfg, const CommandOptions& opt,
            const std::string& command, Clock::time_point t0) {
  res.artifact["timing_seconds"] = seconds_since(t0);
  res.artifact["exit_code"] = res.exit_code;
  if (opt.write_files) res.files.push_back(write_file(cfg, opt, command + ".json", res.artifact.dump(2) + "\n"));
}

const Game& need_game(const RunConfig& cfg) {
  if (!cfg.game) throw ConfigError("model", 0, "required section missing");
  return *cfg.game;
}

json thresholds_json(const Thresholds& t) {
  return {{"l_under", number(t.l_under.value())},
          {"l_0", number(t.l_0.value())},
          {"l_1", number(t.l_1.value())},
          {"l_over", number(t.l_over.value())}};
}

json table_json(const ValueTable& t) {
  json j = {{"l", t.grid},
            {"V_G", t.good},
            {"V_B", t.bad},
            {"e_B", t.bad_effort},
            {"jump", t.jump},
            {"V_G_at_l_under", t.good_at_under},
            {"V_B_at_l_under", t.bad_at_under}};
  if (t.stasis) {
    j["stasis"] = {{"V_G", t.stasis->good},     {"V_B", t.stasis->bad},
                   {"w", t.stasis->w},          {"lambda_bad", t.stasis->lambda_bad},
                   {"e_plus", t.stasis->e_plus}, {"j_minus", number(t.stasis->j_minus)},
                   {"j_plus", number(t.stasis->j_plus)}};
  }
  return j;
}

json failure_json(const ConstructionFailure& f) {
  return {{"condition", f.condition}, {"at", number(f.at)}, {"message", f.message}};
}

json values_json(const ValueFunction& vf) {
  const std::vector<double> grid = export_grid(vf);
  json rows = json::array();
  for (double l : grid) {
    const EffortPair e = vf.profile().effort_at(l);
    rows.push_back({belief_of(l), l, vf(SenderType::Good, l), vf(SenderType::Bad, l), e.bad, e.good});
  }
  return {{"columns", {"mu", "l", "V_G", "V_B", "e_B_star", "e_G_star"}}, {"rows", rows}};
}

json profile_json(const StrategyProfile& p) {
  json rs = json::array();
  for (const Region& r : p.regions()) {
    json j = {{"lower", number(r.lower.value())},
              {"upper", number(r.upper.value())},
              {"lower_closed", r.lower_closed},
              {"upper_closed", r.upper_closed},
              {"kind", to_string(r.kind)}};
    if (r.kind == RegionKind::Custom) j["efforts"] = {r.custom.good, r.custom.bad};
    if (r.kind == RegionKind::Switched) j["bad_effort"] = {{"l", r.bad_effort.l}, {"e", r.bad_effort.e}};
    rs.push_back(j);
  }
  json out = {{"regions", rs}};
  if (p.thresholds()) out["thresholds"] = thresholds_json(*p.thresholds());
  return out;
}

json br_json(const BestResponseCheck& b) {
  return {{"max_violation", b.max_violation},
          {"at", number(b.at)},
          {"type", to_string(b.type)},
          {"points", b.points},
          {"equilibrium", b.equilibrium}};
}

}  // namespace

const char* version() { return SIGNALFLOW_VERSION; }

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json report_json(const EquilibriumReport& r) {
  json conds = json::array();
  for (const auto& c : r.conditions) {
    json j = {{"name", c.name},     {"lhs", number(c.lhs)},  {"rhs", number(c.rhs)},
              {"margin", number(c.margin)}, {"strict", c.strict}, {"pass", c.pass}};
    if (!c.note.empty()) j["note"] = c.note;
    conds.push_back(j);
  }
  json out = {{"proposition", r.proposition}, {"verdict", to_string(r.verdict)}, {"conditions", conds},
              {"notes", r.notes}};
  if (r.extrema) {
    const RegionExtrema& e = *r.extrema;
    out["extrema"] = {{"sup_switched_good", e.sup_switched_good}, {"inf_switched_good", e.inf_switched_good},
                      {"sup_switched_bad", e.sup_switched_bad},   {"inf_switched_bad", e.inf_switched_bad},
                      {"sup_scrutiny_good", e.sup_scrutiny_good}, {"inf_scrutiny_good", e.inf_scrutiny_good},
                      {"sup_scrutiny_bad", e.sup_scrutiny_bad},   {"inf_scrutiny_bad", e.inf_scrutiny_bad}};
  }
  if (!r.conditions.empty()) out["min_margin"] = number(r.min_margin());
  return out;
}

Solved solve_config(const RunConfig& cfg) {
  const Game& g = need_game(cfg);
  Solved s;
  if (cfg.search) {
    s.search = find_equilibrium(g, *cfg.search, cfg.numerics, cfg.tolerances);
    s.switched = s.search->solution;
  } else if (cfg.profile) {
    const ProfileSpec& p = *cfg.profile;
    switch (p.kind) {
      case ProfileKind::Pooling:
        s.profile = StrategyProfile::pooling();
        s.values = std::make_shared<ValueFunction>(s.profile, g, cfg.numerics);
        return s;
      case ProfileKind::Extremal:
        s.profile = StrategyProfile::extremal(LogOdds(p.l_1), LogOdds(p.l_over));
        s.values = std::make_shared<ValueFunction>(s.profile, g, cfg.numerics);
        return s;
      case ProfileKind::Switched: {
        const Thresholds t{LogOdds(p.l_under), LogOdds(p.l_0), LogOdds(p.l_1), LogOdds(p.l_over)};
        try {
          s.switched = switched_value_solve(t, g, cfg.numerics);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("profile", cfg.doc.line_of("profile.kind"), e.what());
        }
        break;
      }
    }
  } else {
    throw ConfigError("profile", 0, "no profile and no search spec");
  }
  s.profile = s.switched->profile;
  if (s.switched->ok()) s.values = s.switched->values;
  else s.failure = s.switched->failure;
  return s;
}

CommandResult cmd_solve(const RunConfig& cfg, const CommandOptions& opt) {
  const auto t0 = Clock::now();
  CommandResult res;
  res.artifact = base_artifact("solve", cfg);
  const Solved s = solve_config(cfg);
  json& a = res.artifact;
  a["profile"] = profile_json(s.profile);
  if (s.search) {
    a["search"] = {{"evaluated", s.search->evaluated},
                   {"passing", s.search->passing.size()},
                   {"best", thresholds_json(s.search->best)}};
  }
  std::ostream& log = logs(opt);
  if (s.failure) {
    a["failure"] = failure_json(*s.failure);
    res.exit_code = 1;
    log << "solve: construction failed " << s.failure->condition << " at l=" << fmt(s.failure->at)
        << ": " << s.failure->message << "\n";
  } else {
    if (s.switched) a["switched_table"] = table_json(s.switched->table);
    a["values"] = values_json(*s.values);
    a["notes"] = s.values->notes();
    log << "solve: ok";
    if (s.switched) log << ", " << s.switched->table.grid.size() << " switched nodes";
    log << "\n";
  }
  finish(res, cfg, opt, "solve", t0);
  return res;
}

namespace {

json verify_json(const RunConfig& cfg, const Solved& s, bool& pass, std::ostream& log) {
  const Game& g = need_game(cfg);
  json v;
  v["profile"] = profile_json(s.profile);
  pass = false;
  if (s.search) {
    json passing = json::array();
    for (const auto& t : s.search->passing) passing.push_back(thresholds_json(t));
    v["search"] = {{"evaluated", s.search->evaluated}, {"found", s.search->found},
                   {"best", thresholds_json(s.search->best)}, {"passing", passing}};
  }

  const ScrutinyBounds sb = scrutiny_bounds(g);
  json bounds = {{"n_star", sb.n_star}, {"applicable", sb.applicable}};
  if (sb.applicable) {
    bounds["jump_length"] = sb.jump_length;
    bounds["width_bound"] = sb.width_bound;
  }

  if (s.failure) {
    const EquilibriumReport rep = check_solution(*s.switched, cfg.tolerances);
    v["prop1"] = report_json(rep);
    v["failure"] = failure_json(*s.failure);
    log << "verify: construction failed " << s.failure->condition << " at l=" << fmt(s.failure->at) << "\n";
  } else {
    const ValueFunction& vf = *s.values;
    const EquilibriumReport p1 = check_prop1(vf, cfg.tolerances);
    const BestResponseCheck br = best_response_verify(vf, cfg.br_tolerance);
    v["prop1"] = report_json(p1);
    v["best_response"] = br_json(br);
    pass = br.equilibrium && p1.verdict != Verdict::Fail;
    log << "verify: prop1 " << to_string(p1.verdict) << ", best-response max violation "
        << fmt(br.max_violation, "%.3e") << (br.equilibrium ? " (ok)" : " (FAIL)") << "\n";
    for (const auto& c : p1.conditions)
      log << "  " << c.name << " margin " << fmt(c.margin, "%.6e") << (c.pass ? "" : "  FAIL") << "\n";
    if (const auto& th = s.profile.thresholds()) {
      const double lu = th->l_under.value();
      const double l1 = th->l_1.value();
      const double lo = th->l_over.value();
      if (g.params.d == 0.0 && g.params.is_symmetric())
        v["prop2"] = report_json(check_prop2_primitives(lu, l1, g, cfg.tolerances));
      if (g.params.d > 0.0 && std::isfinite(lo))
        v["prop3"] = report_json(check_prop3_primitives(lu, l1, lo, g, cfg.tolerances));
      if (sb.applicable) bounds["scrutiny_width"] = number(lo - l1);
      if (g.params.d > 0.0 && (!g.params.is_symmetric() || !cfg.dtheta_deltas.empty())) {
        const DthetaReport dr = check_dtheta(*th, g, cfg.dtheta_deltas, cfg.numerics);
        json sweep = json::array();
        for (const auto& p : dr.sweep)
          sweep.push_back({{"delta", p.delta}, {"pass", p.pass}, {"min_margin", number(p.min_margin)}});
        v["dtheta"] = {{"verdict", to_string(dr.verdict)},
                       {"symmetric", report_json(dr.symmetric)},
                       {"perturbed", report_json(dr.perturbed)},
                       {"sweep", sweep}};
        if (dr.largest_passing_delta) v["dtheta"]["largest_passing_delta"] = *dr.largest_passing_delta;
        if (dr.stasis) v["dtheta"]["stasis"] = {{"V_G", dr.stasis->good}, {"V_B", dr.stasis->bad}, {"w", dr.stasis->w}};
      }
    }
  }
  if (sb.applicable && s.search) {
    double widest = 0.0;
    for (const auto& t : s.search->passing) widest = std::max(widest, t.l_over.value() - t.l_1.value());
    bounds["widest_passing_scrutiny"] = number(widest);
    bounds["within_bound"] = widest <= sb.width_bound;
  }
  v["scrutiny_bounds"] = bounds;
  v["verdict"] = pass ? "pass" : "fail";
  return v;
}

}  // namespace

CommandResult cmd_verify(const RunConfig& cfg, const CommandOptions& opt) {
  const auto t0 = Clock::now();
  CommandResult res;
  res.artifact = base_artifact("verify", cfg);
  const Solved s = solve_config(cfg);
  bool pass = false;
  res.artifact["report"] = verify_json(cfg, s, pass, logs(opt));
  res.exit_code = pass ? 0 : 1;
  logs(opt) << "verify: " << (pass ? "pass" : "fail") << "\n";
  finish(res, cfg, opt, "verify", t0);
  return res;
}

CommandResult cmd_simulate(const RunConfig& cfg, const CommandOptions& opt) {
  const auto t0 = Clock::now();
  const Game& g = need_game(cfg);
  std::optional<std::uint64_t> seed = opt.seed ? opt.seed : cfg.simulation.seed;
  if (!seed) throw ConfigError("simulation.seed", 0, "required for simulate (or pass --seed)");
  CommandResult res;
  res.artifact = base_artifact("simulate", cfg);
  res.artifact["seed"] = *seed;
  const Solved s = solve_config(cfg);
  std::ostream& log = logs(opt);
  if (s.failure) {
    res.artifact["failure"] = failure_json(*s.failure);
    res.exit_code = 1;
    log << "simulate: no solved profile to simulate\n";
    finish(res, cfg, opt, "simulate", t0);
    return res;
  }
  const ValueFunction& vf = *s.values;
  double l0 = 0.0;
  if (cfg.simulation.l0) l0 = *cfg.simulation.l0;
  else if (s.profile.thresholds()) l0 = s.profile.thresholds()->l_0.value();

  MonteCarloOptions mc;
  mc.paths = cfg.simulation.paths;
  mc.seed = *seed;
  mc.horizon = cfg.simulation.horizon > 0.0 ? cfg.simulation.horizon : default_horizon(g);
  mc.rk_step = cfg.simulation.rk_step;
  json& a = res.artifact;
  a["l_start"] = number(l0);
  a["horizon"] = mc.horizon;
  a["paths"] = mc.paths;
  bool ok = true;

  json est = json::object();
  for (SenderType t : {SenderType::Good, SenderType::Bad}) {
    const ValueEstimate e = estimate_value(s.profile, g, t, l0, mc);
    const double v = vf(t, l0);
    const bool consistent = std::abs(e.mean - v) <= 3.0 * e.std_error + e.tail_bound;
    ok = ok && consistent;
    est[to_string(t)] = {{"mean", e.mean},     {"std_error", e.std_error}, {"tail_bound", e.tail_bound},
                         {"solver", v},        {"consistent", consistent}};
    log << "simulate: V_" << to_string(t) << " mc " << fmt(e.mean) << " +- " << fmt(e.std_error, "%.2g")
        << " solver " << fmt(v) << (consistent ? "" : "  MISMATCH") << "\n";
  }
  a["estimates"] = est;

  SimOptions so;
  so.horizon = mc.horizon;
  so.rk_step = mc.rk_step;
  so.record_samples = false;
  const Simulator sim(s.profile, g, so);
  const PathEnsemble ens = ensemble(sim, l0, std::nullopt, mc.paths, derive_seed(*seed, 99), false);
  const double mu0 = belief_of(l0);
  const double se = std::sqrt(ens.summary.var_terminal_belief / static_cast<double>(ens.summary.n));
  const bool martingale = std::abs(ens.summary.mean_terminal_belief - mu0) <= 3.0 * se;
  ok = ok && martingale;
  a["mixture"] = {{"prior", mu0},
                  {"n_good", ens.summary.n_good},
                  {"mean_terminal_belief", ens.summary.mean_terminal_belief},
                  {"std_error", se},
                  {"martingale_ok", martingale},
                  {"mean_payoff", ens.summary.mean_payoff},
                  {"var_payoff", ens.summary.var_payoff},
                  {"histogram_edges", ens.summary.histogram_edges},
                  {"histogram", ens.summary.histogram}};

  const ReputationStats rs = reputation_stats(s.profile, g, l0, mc);
  auto rep = [](const TypeReputation& t) {
    return json{{"p_above", t.p_above},     {"se_above", t.se_above}, {"p_below", t.p_below},
                {"se_below", t.se_below},   {"mean_belief", t.mean_belief}, {"se_belief", t.se_belief}};
  };
  a["reputation"] = {{"reference", number(rs.reference)}, {"permanent", rs.permanent},
                     {"G", rep(rs.good)}, {"B", rep(rs.bad)}};
  log << "simulate: P(B ends above start) " << fmt(rs.bad.p_above) << ", P(G ends below start) "
      << fmt(rs.good.p_below) << "\n";

  if (cfg.simulation.deviations) {
    json devs = json::array();
    for (const DeviationResult& d : deviation_test(vf, standard_deviation_library(s.profile), l0, mc)) {
      ok = ok && !d.profitable;
      devs.push_back({{"type", to_string(d.spec.type)}, {"label", d.spec.label}, {"gain", d.gain},
                      {"std_error", d.std_error}, {"tail_bound", d.tail_bound},
                      {"deviation_value", d.deviation_value}, {"profitable", d.profitable}});
      if (d.profitable) log << "simulate: profitable deviation " << d.spec.label << " for " << to_string(d.spec.type) << "\n";
    }
    a["deviations"] = devs;
  }
  res.exit_code = ok ? 0 : 1;
  a["verdict"] = ok ? "pass" : "fail";
  finish(res, cfg, opt, "simulate", t0);
  return res;
}

namespace {

json discrete_report_json(const DiscreteReport& r) {
  auto ineq = [](const Inequality& i) {
    return json{{"lhs", i.lhs}, {"rhs", i.rhs}, {"margin", i.margin}, {"pass", i.pass}};
  };
  return {{"scrutiny_good", ineq(r.scrutiny_good)},
          {"scrutiny_bad", ineq(r.scrutiny_bad)},
          {"bad_first_period", ineq(r.bad_first_period)},
          {"indifference_lhs", r.indifference_lhs},
          {"indifference_rhs", r.indifference_rhs},
          {"good_indifference_residual", r.good_indifference_residual},
          {"separating", r.separating},
          {"notes", r.notes}};
}

}  // namespace

CommandResult cmd_discrete(const RunConfig& cfg, const CommandOptions& opt) {
  const auto t0 = Clock::now();
  if (!cfg.discrete) throw ConfigError("discrete", 0, "required section missing");
  const DiscreteSpec& ds = *cfg.discrete;
  CommandResult res;
  res.artifact = base_artifact("discrete", cfg);
  json& a = res.artifact;
  std::ostream& log = logs(opt);
  bool ok = true;
  if (ds.candidate) {
    DiscreteCandidate c = *ds.candidate;
    const auto q = solve_q(ds.params, c.e0, c.e1);
    a["solve_q"] = q ? json(*q) : json(nullptr);
    if (c.q_good < 0.0) {
      if (!q) throw ConfigError("discrete.q", 0, "not given and the indifference equation has no root in (0,1)");
      c.q_good = *q;
    }
    const DiscreteReport r = check_discrete(ds.params, c);
    a["candidate"] = {{"e0", c.e0}, {"q", c.q_good}, {"e1", c.e1}};
    a["report"] = discrete_report_json(r);
    ok = r.inequalities_pass() && !r.separating;
    log << "discrete: scrutiny_G " << fmt(r.scrutiny_good.lhs) << " >= " << fmt(r.scrutiny_good.rhs)
        << ", scrutiny_B " << fmt(r.scrutiny_bad.lhs) << " >= " << fmt(r.scrutiny_bad.rhs)
        << ", first period " << fmt(r.bad_first_period.lhs) << " >= " << fmt(r.bad_first_period.rhs)
        << ", residual " << fmt(r.good_indifference_residual, "%+.6g") << "\n";
    if (q) log << "discrete: exact q = " << fmt(*q, "%.12g") << "\n";
  }
  const auto found = search_discrete(ds.params, ds.grid);
  json list = json::array();
  for (const auto& s : found)
    list.push_back({{"e0", s.candidate.e0}, {"q", s.candidate.q_good}, {"e1", s.candidate.e1},
                    {"residual", s.report.good_indifference_residual}});
  a["search"] = {{"divisions", ds.grid.divisions}, {"found", list.size()}, {"candidates", list}};
  log << "discrete: search found " << found.size() << " candidates\n";
  if (!ds.candidate) ok = !found.empty();
  res.exit_code = ok ? 0 : 1;
  finish(res, cfg, opt, "discrete", t0);
  return res;
}

CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& opt) {
  const auto t0 = Clock::now();
  if (!cfg.sweep) throw ConfigError("sweep", 0, "required section missing");
  CommandResult res;
  res.artifact = base_artifact("sweep", cfg);
  json rows = json::array();
  std::ostream& log = logs(opt);
  for (const std::string& value : cfg.sweep->values) {
    Document doc = cfg.doc;
    doc.set(cfg.sweep->field, value);
    RunConfig c = config_from_document(doc, cfg.text, cfg.path);
    const Solved s = solve_config(c);
    bool pass = false;
    std::ostringstream quiet;
    json v = verify_json(c, s, pass, quiet);
    json row = {{"value", value}, {"verdict", pass ? "pass" : "fail"}};
    if (v["prop1"].contains("min_margin")) row["min_margin"] = v["prop1"]["min_margin"];
    if (v.contains("best_response")) row["max_violation"] = v["best_response"]["max_violation"];
    if (v.contains("failure")) row["failure"] = v["failure"];
    rows.push_back(row);
    log << "sweep: " << cfg.sweep->field << " = " << value << " -> " << (pass ? "pass" : "fail") << "\n";
  }
  res.artifact["field"] = cfg.sweep->field;
  res.artifact["rows"] = rows;
  finish(res, cfg, opt, "sweep", t0);
  return res;
}

std::vector<double> export_grid(const ValueFunction& vf) {
  double lo = -12.0;
  double hi = 12.0;
  if (const auto& t = vf.profile().thresholds()) {
    lo = std::min(lo, t->l_under.value() - 4.0);
    hi = std::max(hi, t->l_1.value() + 8.0);
  }
  std::vector<double> grid;
  const int n = static_cast<int>(std::round((hi - lo) / 0.05));
  for (int i = 0; i <= n; ++i) grid.push_back(lo + (hi - lo) * i / n);
  if (const ValueTable* t = vf.table()) grid.insert(grid.end(), t->grid.begin(), t->grid.end());
  const auto& rs = vf.profile().regions();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (const RegionCurve* c = vf.curve(SenderType::Good, i)) {
      const auto& z = c->nodes();
      for (std::size_t k = 0; k < z.size(); k += 4)
        if (z[k] >= lo && z[k] <= hi && rs[i].contains(z[k])) grid.push_back(z[k]);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void write_values_csv(std::ostream& out, const ValueFunction& vf, const std::vector<double>& grid) {
  out << "mu,l,V_G,V_B,e_B_star,e_G_star\n";
  char buf[256];
  for (double l : grid) {
    const EffortPair e = vf.profile().effort_at(l);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", belief_of(l), l,
                  vf(SenderType::Good, l), vf(SenderType::Bad, l), e.bad, e.good);
    out << buf;
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size()) throw std::runtime_error("bad CSV number on line " + std::to_string(line_no));
      row.push_back(v);
    }
    if (row.size() != t.header.size()) throw std::runtime_error("ragged CSV row on line " + std::to_string(line_no));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CommandResult cmd_export(const RunConfig& cfg, const CommandOptions& opt) {
  const auto t0 = Clock::now();
  if (opt.format != "csv" && opt.format != "json")
    throw ConfigError("--format", 0, "expected csv or json");
  CommandResult res;
  res.artifact = base_artifact("export", cfg);
  const Solved s = solve_config(cfg);
  std::ostream& log = logs(opt);
  if (s.failure) {
    res.artifact["failure"] = failure_json(*s.failure);
    res.exit_code = 1;
    log << "export: construction failed, nothing to export\n";
    finish(res, cfg, opt, "export", t0);
    return res;
  }
  if (opt.format == "csv") {
    std::ostringstream csv;
    write_values_csv(csv, *s.values, export_grid(*s.values));
    if (opt.write_files) res.files.push_back(write_file(cfg, opt, "values.csv", csv.str()));
    res.artifact["csv"] = csv.str();
  } else {
    bool pass = false;
    std::ostringstream quiet;
    json rep = base_artifact("report", cfg);
    rep["report"] = verify_json(cfg, s, pass, quiet);
    rep["values"] = values_json(*s.values);
    if (opt.write_files) res.files.push_back(write_file(cfg, opt, "report.json", rep.dump(2) + "\n"));
  }
  for (const auto& f : res.files) log << "export: wrote " << f << "\n";
  res.artifact["files"] = res.files;
  finish(res, cfg, opt, "export", t0);
  return res;
}

int run(int argc, char** argv) {
  CLI::App app{"Solver, verifier and simulator for repeated signalling with Poisson monitoring"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  std::string config_path;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  const std::vector<std::pair<std::string, std::string>> cmds{
      {"solve", "solve values and the switched effort table"},
      {"verify", "check equilibrium conditions and best responses"},
      {"simulate", "Monte Carlo values, reputation statistics and deviation tests"},
      {"discrete", "discrete-time construction checks and search"},
      {"sweep", "verify over a list of values for one field"},
      {"export", "write plot data (csv) or a report (json)"}};
  for (const auto& [name, help] : cmds) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file")->required();
    sub->add_option("--seed", seed, "override simulation.seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  CommandOptions opt;
  opt.out_dir = out;
  opt.format = format;
  opt.seed = seed;
  opt.log = &std::cout;
  try {
    const RunConfig cfg = load_config(config_path);
    CommandResult r;
    if (name == "solve") r = cmd_solve(cfg, opt);
    else if (name == "verify") r = cmd_verify(cfg, opt);
    else if (name == "simulate") r = cmd_simulate(cfg, opt);
    else if (name == "discrete") r = cmd_discrete(cfg, opt);
    else if (name == "sweep") r = cmd_sweep(cfg, opt);
    else r = cmd_export(cfg, opt);
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace signalflow::cli
