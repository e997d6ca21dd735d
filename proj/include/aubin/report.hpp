#pragma once

#include "aubin/oracle.hpp"
#include "aubin/verifier.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace aubin {

enum class ReportFormat { Text, Json };

struct RunConfig {
  std::string problem_path;
  std::vector<RatVec> directions;
  Route route = Route::Auto;
  ReportFormat format = ReportFormat::Text;
  std::optional<std::size_t> oracle_samples;
  std::uint64_t oracle_seed = 1;
};

namespace report {

using Json = nlohmann::ordered_json;

inline std::string active_label(const std::vector<std::size_t>& active) {
  std::string s = "{";
  for (std::size_t i = 0; i < active.size(); ++i) s += (i ? "," : "") + std::to_string(active[i] + 1);
  return s + "}";
}

inline std::string vec(const RatVec& v) { return to_string(v); }

inline std::string point_set(const std::vector<RatVec>& pts) {
  std::string s = "{";
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ", " : "") + vec(pts[i]);
  return s + "}";
}

inline std::string verdict_line(const Verdict& v) {
  if (!v.fatal.empty()) return "Aubin property not established (" + v.fatal + ")";
  if (!v.established) return "Aubin property not established";
  return v.sampled_directions ? "Aubin property established (verified on sampled directions only)" : "Aubin property established";
}

inline std::string witness_text(const Witness& w) {
  std::string s = to_string(w.kind);
  auto field = [&](const std::string& name, const RatVec& x, bool always = false) {
    if (always || !x.empty()) s += " " + name + "=" + vec(x);
  };
  const bool located = w.kind != WitnessKind::AViolation && w.kind != WitnessKind::NondirectionalSolution;
  if (located) field("h", w.h, true);
  if (!w.k.empty() || !w.eta.empty()) {
    field("k", w.k);
    field("eta", w.eta);
  }
  if (w.has_pair) s += " pair=" + active_label(w.f1) + "|" + active_label(w.f2);
  field("lam", w.lam);
  field("mu", w.mu);
  field("w", w.w);
  field("v", w.v);
  field("p*", w.pstar);
  return s;
}

/// Pads columns to a common width; the last column is not padded.
inline void table(std::ostream& out, const std::vector<std::vector<std::string>>& rows, const std::string& indent) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (width.size() <= j) width.push_back(0);
      width[j] = std::max(width[j], r[j].size());
    }
  for (const auto& r : rows) {
    std::string line = indent;
    for (std::size_t j = 0; j < r.size(); ++j) {
      line += r[j];
      if (j + 1 < r.size()) line += std::string(width[j] - r[j].size() + 2, ' ');
    }
    out << line << "\n";
  }
}

struct LocatedCondition {
  std::string name;
  const ConditionResult* result;
};

inline std::vector<LocatedCondition> conditions(const BranchReport& b) {
  return {{"span-injective", &b.span_injective},         {"face-positivity", &b.face_positivity},
          {"parameter-annihilation", &b.parameter_annihilation}, {"face-injective", &b.face_injective},
          {"subregular", &b.subregular},                 {"coderivative", &b.coderivative}};
}

inline void write_text(std::ostream& out, const ProblemSpec& spec, const Verdict& v) {
  const auto names = spec.layout().names();
  out << "problem: m=" << spec.m << " n=" << spec.n << " s=" << spec.s << "\n";
  for (std::size_t i = 0; i < spec.f.size(); ++i) out << "  f" << i + 1 << " = " << spec.f[i].str(names) << "\n";
  const auto qt = spec.qtilde();
  for (std::size_t i = 0; i < qt.size(); ++i) out << "  q~" << i + 1 << " = " << qt[i].str(names) << "\n";
  out << "reference point: p = " << vec(spec.pbar) << ", x = " << vec(spec.xbar) << "\n";
  out << "q~(p,x) = " << vec(spec.qtilde_value()) << "\n\n";

  out << "assumption (A): " << (v.assumption.result.status == Status::Holds ? "holds" : "FAILS") << "\n";
  out << "  span N_D(q~(p,x)) basis: " << (v.assumption.normal_span.empty() ? "{0}" : point_set(v.assumption.normal_span)) << "\n";
  out << "  nondegeneracy b R^n + lin T_D = R^s: " << (v.assumption.nondegenerate ? "yes" : "no") << "\n";
  if (v.assumption.result.witness) out << "  witness: " << witness_text(*v.assumption.result.witness) << "\n";
  if (!v.fatal.empty()) {
    out << "\nverdict: " << verdict_line(v) << "\n";
    return;
  }

  out << "\nmultiplier lam = " << vec(*v.lam) << "\n";
  out << "critical cone K:\n";
  const auto dump = v.critical->dump();
  if (dump.empty()) out << "  (whole space R^" << spec.s << ")\n";
  for (const auto& line : dump) out << "  " << line << "\n";
  out << "faces of K:";
  const FaceLattice lattice(*v.critical);
  for (const auto& f : lattice.faces()) out << " " << f.label();
  out << "\n";
  out << "existence: " << to_string(v.existence.status) << "\n";
  out << "directions: "
      << (v.sampled_directions ? "sampled (user list, cube-boundary grid, and 0)"
                               : spec.m == 1 ? "exact (h = 1, -1 by homogeneity, plus h = 0)" : "exact")
      << "\n";

  for (const auto& d : v.directions) {
    out << "\nT(h) for h = " << vec(d.h) << ":";
    out << (d.branches.empty() ? " empty\n" : "\n");
    if (!d.branches.empty()) {
      std::vector<std::vector<std::string>> rows{{"face", "k", "eta", "face pairs", "branch"}};
      for (const auto& b : d.branches) {
        std::string pairs;
        for (const auto& p : b.pairs) pairs += (pairs.empty() ? "" : " ") + p;
        if (b.trivial) pairs = "(trivial)";
        for (std::size_t i = 0; i < b.points.size(); ++i)
          rows.push_back({b.face, vec(b.points[i].k), vec(b.points[i].eta), i == 0 ? pairs : "",
                          i == 0 ? (b.continuum ? "continuum" : "isolated") : ""});
      }
      table(out, rows, "  ");
    }
    out << "  DS(h) = " << point_set(d.ds.k) << (d.ds.continuum ? " (continuum; representatives listed)" : "") << "\n";
  }

  out << "\ncondition matrix:\n";
  const BranchReport header;
  std::vector<std::vector<std::string>> rows{{"h", "face"}};
  for (const auto& c : conditions(header)) rows[0].push_back(c.name);
  for (const auto& d : v.directions)
    for (const auto& b : d.branches) {
      std::vector<std::string> row{vec(d.h), b.face};
      for (const auto& c : conditions(b)) row.push_back(b.trivial ? "-" : to_string(c.result->status));
      rows.push_back(std::move(row));
    }
  table(out, rows, "  ");

  out << "\nroutes:\n";
  for (const auto& r : v.routes)
    out << "  " << to_string(r.route) << ": " << to_string(r.status) << (r.reason.empty() ? "" : " (" + r.reason + ")") << "\n";
  out << "route requested: " << to_string(v.requested) << "\n";
  out << "route used: " << (v.used ? to_string(*v.used) : std::string("none")) << "\n";
  out << "verdict: " << verdict_line(v) << "\n";
  out << "non-directional check: " << (v.nondirectional->status == Status::Holds ? "holds" : "FAILS") << "\n";
  if (v.nondirectional->witness) out << "  witness: " << witness_text(*v.nondirectional->witness) << "\n";

  std::vector<std::string> witnesses;
  if (v.existence.witness) witnesses.push_back("existence: " + witness_text(*v.existence.witness));
  for (const auto& d : v.directions)
    for (const auto& b : d.branches)
      for (const auto& c : conditions(b)) {
        if (c.result->witness) witnesses.push_back(c.name + " at face " + b.face + ": " + witness_text(*c.result->witness));
        else if (c.result->status == Status::Indeterminate)
          witnesses.push_back(c.name + " at h=" + vec(d.h) + " face " + b.face + ": indeterminate (" + c.result->reason + ")");
      }
  out << "\nwitnesses:" << (witnesses.empty() ? " none" : "") << "\n";
  for (const auto& w : witnesses) out << "  " << w << "\n";
  out << "warnings:" << (v.warnings.empty() ? " none" : "") << "\n";
  for (const auto& w : v.warnings) out << "  " << w << "\n";
}

inline Json rat_vec(const RatVec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

inline Json rat_vecs(const std::vector<RatVec>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back(rat_vec(v));
  return a;
}

inline Json witness_json(const Witness& w) {
  Json j;
  j["kind"] = to_string(w.kind);
  j["h"] = rat_vec(w.h);
  j["k"] = rat_vec(w.k);
  j["eta"] = rat_vec(w.eta);
  j["pair"] = w.has_pair ? Json::array({active_label(w.f1), active_label(w.f2)}) : Json(nullptr);
  j["lam"] = rat_vec(w.lam);
  j["mu"] = rat_vec(w.mu);
  j["w"] = rat_vec(w.w);
  j["v"] = rat_vec(w.v);
  j["pstar"] = rat_vec(w.pstar);
  return j;
}

inline Json condition_json(const ConditionResult& c) {
  Json j;
  j["status"] = to_string(c.status);
  j["reason"] = c.reason.empty() ? Json(nullptr) : Json(c.reason);
  j["witness"] = c.witness ? witness_json(*c.witness) : Json(nullptr);
  return j;
}

inline Json to_json(const ProblemSpec& spec, const Verdict& v) {
  const auto names = spec.layout().names();
  Json j;
  Json prob;
  prob["m"] = spec.m;
  prob["n"] = spec.n;
  prob["s"] = spec.s;
  prob["f"] = Json::array();
  for (const auto& f : spec.f) prob["f"].push_back(f.str(names));
  prob["qtilde"] = Json::array();
  for (const auto& q : spec.qtilde()) prob["qtilde"].push_back(q.str(names));
  prob["p"] = rat_vec(spec.pbar);
  prob["x"] = rat_vec(spec.xbar);
  prob["qtilde_value"] = rat_vec(spec.qtilde_value());
  j["problem"] = prob;

  Json a = condition_json(v.assumption.result);
  a["normal_span"] = rat_vecs(v.assumption.normal_span);
  a["nondegenerate"] = v.assumption.nondegenerate;
  j["assumption_A"] = a;
  j["fatal"] = v.fatal.empty() ? Json(nullptr) : Json(v.fatal);
  j["multiplier"] = v.lam ? rat_vec(*v.lam) : Json(nullptr);
  j["critical_cone"] = v.critical ? Json(v.critical->dump()) : Json(nullptr);
  Json faces = Json::array();
  if (v.critical) {
    const FaceLattice lattice(*v.critical);
    for (const auto& f : lattice.faces()) faces.push_back(f.label());
  }
  j["faces"] = faces;
  j["existence"] = condition_json(v.existence);
  j["sampled_directions"] = v.sampled_directions;

  Json dirs = Json::array();
  for (const auto& d : v.directions) {
    Json dj;
    dj["h"] = rat_vec(d.h);
    Json branches = Json::array();
    for (const auto& b : d.branches) {
      Json bj;
      bj["face"] = b.face;
      bj["continuum"] = b.continuum;
      bj["eta_unique"] = b.eta_unique;
      bj["trivial"] = b.trivial;
      Json pts = Json::array();
      for (const auto& p : b.points) pts.push_back({{"k", rat_vec(p.k)}, {"eta", rat_vec(p.eta)}});
      bj["points"] = pts;
      bj["face_pairs"] = b.pairs;
      Json conds;
      for (const auto& c : conditions(b)) conds[c.name] = condition_json(*c.result);
      bj["conditions"] = conds;
      branches.push_back(bj);
    }
    dj["branches"] = branches;
    dj["ds"] = {{"k", rat_vecs(d.ds.k)}, {"continuum", d.ds.continuum}};
    dirs.push_back(dj);
  }
  j["directions"] = dirs;

  Json routes = Json::array();
  for (const auto& r : v.routes)
    routes.push_back({{"route", to_string(r.route)}, {"status", to_string(r.status)},
                      {"reason", r.reason.empty() ? Json(nullptr) : Json(r.reason)}});
  j["routes"] = routes;
  j["route_requested"] = to_string(v.requested);
  j["route_used"] = v.used ? Json(to_string(*v.used)) : Json(nullptr);
  j["established"] = v.established;
  j["verdict"] = verdict_line(v);
  j["nondirectional"] = v.nondirectional ? condition_json(*v.nondirectional) : Json(nullptr);
  j["warnings"] = v.warnings;
  return j;
}

inline void write_oracle_text(std::ostream& out, const OracleReport& rep, std::size_t samples, std::uint64_t seed) {
  out << "oracle: samples=" << samples << " seed=" << seed << "\n";
  for (const auto& c : rep.checks) {
    out << "check " << c.name << ": checked " << c.checked << ", skipped " << c.skipped << ", disagreements "
        << c.disagreements.size() << "\n";
    for (const auto& d : c.disagreements) out << "  disagreement: " << d << "\n";
  }
  out << "oracle result: " << (rep.ok() ? "no disagreements" : "DISAGREEMENTS FOUND") << "\n";
}

inline Json oracle_json(const OracleReport& rep, std::size_t samples, std::uint64_t seed) {
  Json j;
  j["samples"] = samples;
  j["seed"] = seed;
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"checked", c.checked}, {"skipped", c.skipped}, {"disagreements", c.disagreements}});
  j["checks"] = checks;
  j["ok"] = rep.ok();
  return j;
}

inline std::string error_kind(const ProblemError& e) {
  switch (e.kind()) {
    case ProblemError::Kind::Syntax: return "syntax";
    case ProblemError::Kind::Dimension: return "dimension";
    case ProblemError::Kind::Infeasible: return "infeasible-reference";
    case ProblemError::Kind::Io: return "io";
  }
  return "error";
}

}  // namespace report

/// Runs one configuration. Exit codes: 0 established (or oracle without
/// disagreements), 1 not established (or oracle disagreements), 2 fatal.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto fatal = [&](const std::string& kind, const std::string& msg) {
    err << "error: " << msg << "\n";
    if (cfg.format == ReportFormat::Json)
      out << report::Json{{"error", {{"kind", kind}, {"message", msg}}}}.dump(2) << "\n";
    return 2;
  };
  try {
    if (cfg.oracle_samples && *cfg.oracle_samples == 0)
      return fatal("precondition", "--oracle needs a positive number of samples");
    const ProblemSpec spec = load_problem(cfg.problem_path);
    for (const auto& h : cfg.directions)
      if (h.size() != spec.m)
        return fatal("dimension", "direction " + to_string(h) + " has dimension " + std::to_string(h.size()) +
                                      ", expected m=" + std::to_string(spec.m));
    if (cfg.oracle_samples) {
      const OracleReport rep = oracle::run_oracle(spec, *cfg.oracle_samples, cfg.oracle_seed);
      if (cfg.format == ReportFormat::Json) out << report::oracle_json(rep, *cfg.oracle_samples, cfg.oracle_seed).dump(2) << "\n";
      else report::write_oracle_text(out, rep, *cfg.oracle_samples, cfg.oracle_seed);
      return rep.ok() ? 0 : 1;
    }
    const Verdict v = verdict(spec, {cfg.route, cfg.directions});
    if (cfg.format == ReportFormat::Json) out << report::to_json(spec, v).dump(2) << "\n";
    else report::write_text(out, spec, v);
    return v.established ? 0 : 1;
  } catch (const ProblemError& e) {
    return fatal(report::error_kind(e), e.what());
  } catch (const PipelineError& e) {
    return fatal(e.kind() == PipelineError::Kind::InfeasibleMultiplier ? "infeasible-multiplier" : "internal", e.what());
  } catch (const std::exception& e) {
    return fatal("internal", e.what());
  }
}

}  // namespace aubin
