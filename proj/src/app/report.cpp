#include "ggmlrt/app/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ggmlrt/app/format.hpp"
#include "ggmlrt/error.hpp"
#include "ggmlrt/special.hpp"

namespace ggmlrt::app {

using nlohmann::json;

namespace {

json rate_grid_to_json(const RateGrid& g) {
  json out = json::object();
  for (const Adjustment m : {Adjustment::kBonferroni, Adjustment::kHolm}) {
    json per = json::object();
    for (const Statistic s : {Statistic::kW, Statistic::kT}) {
      const auto& v = g[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)];
      per[std::string(statistic_name(s))] = v ? json(*v) : json(nullptr);
    }
    out[std::string(adjustment_name(m))] = per;
  }
  return out;
}

RateGrid rate_grid_from_json(const json& j) {
  RateGrid g;
  for (const Adjustment m : {Adjustment::kBonferroni, Adjustment::kHolm}) {
    for (const Statistic s : {Statistic::kW, Statistic::kT}) {
      const json& v = j.at(std::string(adjustment_name(m))).at(std::string(statistic_name(s)));
      if (!v.is_null()) g[static_cast<std::size_t>(m)][static_cast<std::size_t>(s)] = v.get<double>();
    }
  }
  return g;
}

json pair_to_json(const std::array<double, 2>& a) { return json{{"W", a[0]}, {"T", a[1]}}; }
std::array<double, 2> pair_from_json(const json& j) {
  return {j.at("W").get<double>(), j.at("T").get<double>()};
}

json spec_to_json(const ScenarioSpec& s) {
  return json{{"name", s.name},       {"p", s.p},
              {"rho", s.rho},         {"n1", s.n1},
              {"n2", s.n2},           {"delta_mu", s.delta_mu},
              {"xi", s.xi},           {"altered", s.altered},
              {"replicates", s.b},    {"master_seed", s.master_seed},
              {"alpha", s.alpha},     {"l_values", s.l_values}};
}

ScenarioSpec spec_from_json(const json& j) {
  ScenarioSpec s;
  s.name = j.at("name").get<std::string>();
  s.p = j.at("p").get<int>();
  s.rho = j.at("rho").get<double>();
  s.n1 = j.at("n1").get<int>();
  s.n2 = j.at("n2").get<int>();
  s.delta_mu = j.at("delta_mu").get<double>();
  s.xi = j.at("xi").get<double>();
  s.altered = j.at("altered").get<std::vector<int>>();
  s.b = j.at("replicates").get<int>();
  s.master_seed = j.at("master_seed").get<std::uint64_t>();
  s.alpha = j.at("alpha").get<double>();
  s.l_values = j.at("l_values").get<std::vector<int>>();
  return s;
}

json global_to_json(const GlobalTestResult& g) {
  return json{{"w", g.w},     {"mu_bartlett", g.mu_bartlett}, {"delta_bartlett", g.delta_bartlett},
              {"t", g.t},     {"dof", g.dof},                 {"p_w", g.p_w},
              {"p_t", g.p_t}};
}

GlobalTestResult global_from_json(const json& j) {
  GlobalTestResult g;
  g.w = j.at("w").get<double>();
  g.mu_bartlett = j.at("mu_bartlett").get<double>();
  g.delta_bartlett = j.at("delta_bartlett").get<double>();
  g.t = j.at("t").get<double>();
  g.dof = j.at("dof").get<int>();
  g.p_w = j.at("p_w").get<double>();
  g.p_t = j.at("p_t").get<double>();
  return g;
}

std::string members_label(const std::vector<int>& m) {
  std::string s = "{";
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
  return s + "}";
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? ";" : "") + labels[i];
  return s;
}

// RFC 4180 quoting for free-text label columns.
std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string num(double v) { return format_number(v); }
std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

json cell_to_json(const CellRecord& c) {
  json j{{"cell_id", c.cell_id},
         {"spec", spec_to_json(c.spec)},
         {"error_code", c.error_code ? json(*c.error_code) : json(nullptr)},
         {"error_message", c.error_message ? json(*c.error_message) : json(nullptr)},
         {"completed", c.completed},
         {"failures", c.failures},
         {"global_reject", pair_to_json(c.global_reject)},
         {"global_ks_uniform_t", c.global_ks_uniform_t},
         {"lambda_hat", c.lambda_hat}};
  json fams = json::array();
  for (const auto& f : c.families) {
    json subs = json::array();
    for (const auto& s : f.subsets) {
      subs.push_back(json{{"members", s.members},
                          {"dof", s.dof},
                          {"reject", pair_to_json(s.reject)},
                          {"mean_delta", pair_to_json(s.mean_delta)},
                          {"ks", pair_to_json(s.ks)}});
    }
    fams.push_back(json{{"l", f.l},
                        {"subsets", subs},
                        {"fwer", rate_grid_to_json(f.fwer)},
                        {"power_any", rate_grid_to_json(f.power_any)},
                        {"power_all", rate_grid_to_json(f.power_all)}});
  }
  j["families"] = fams;
  json nc = json::array();
  for (const auto& f : c.noncentral) {
    nc.push_back(json{{"node", f.node},
                      {"lambda_hat", f.lambda_hat},
                      {"ks_noncentral", f.ks_noncentral},
                      {"ks_central", f.ks_central}});
  }
  j["noncentral"] = nc;
  return j;
}

CellRecord cell_from_json(const json& j) {
  CellRecord c;
  c.cell_id = j.at("cell_id").get<std::string>();
  c.spec = spec_from_json(j.at("spec"));
  if (!j.at("error_code").is_null()) c.error_code = j.at("error_code").get<std::string>();
  if (!j.at("error_message").is_null()) c.error_message = j.at("error_message").get<std::string>();
  c.completed = j.at("completed").get<int>();
  c.failures = j.at("failures").get<int>();
  c.global_reject = pair_from_json(j.at("global_reject"));
  c.global_ks_uniform_t = j.at("global_ks_uniform_t").get<double>();
  c.lambda_hat = j.at("lambda_hat").get<std::vector<double>>();
  for (const auto& fj : j.at("families")) {
    FamilyRates f;
    f.l = fj.at("l").get<int>();
    for (const auto& sj : fj.at("subsets")) {
      SubsetRates s;
      s.members = sj.at("members").get<std::vector<int>>();
      s.dof = sj.at("dof").get<int>();
      s.reject = pair_from_json(sj.at("reject"));
      s.mean_delta = pair_from_json(sj.at("mean_delta"));
      s.ks = pair_from_json(sj.at("ks"));
      f.subsets.push_back(std::move(s));
    }
    f.fwer = rate_grid_from_json(fj.at("fwer"));
    f.power_any = rate_grid_from_json(fj.at("power_any"));
    f.power_all = rate_grid_from_json(fj.at("power_all"));
    c.families.push_back(std::move(f));
  }
  for (const auto& nj : j.at("noncentral")) {
    NoncentralFit f;
    f.node = nj.at("node").get<int>();
    f.lambda_hat = nj.at("lambda_hat").get<double>();
    f.ks_noncentral = nj.at("ks_noncentral").get<double>();
    f.ks_central = nj.at("ks_central").get<double>();
    c.noncentral.push_back(f);
  }
  return c;
}

json plot_to_json(const PlotSeries& p) {
  json bins = json::array();
  for (const auto& b : p.bins) bins.push_back(json::array({b.left, b.right, b.density, b.theory_density}));
  json ecdf = json::array();
  for (const auto& e : p.ecdf) ecdf.push_back(json::array({e.x, e.ecdf, e.theory_cdf}));
  return json{{"name", p.name},       {"cell_id", p.cell_id}, {"kind", p.kind},
              {"l", p.l},             {"members", p.members}, {"dof", p.dof},
              {"lambda", p.lambda},   {"bins", bins},         {"ecdf", ecdf}};
}

PlotSeries plot_from_json(const json& j) {
  PlotSeries p;
  p.name = j.at("name").get<std::string>();
  p.cell_id = j.at("cell_id").get<std::string>();
  p.kind = j.at("kind").get<std::string>();
  p.l = j.at("l").get<int>();
  p.members = j.at("members").get<std::vector<int>>();
  p.dof = j.at("dof").get<double>();
  p.lambda = j.at("lambda").get<double>();
  for (const auto& b : j.at("bins")) {
    p.bins.push_back({b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                      b.at(3).get<double>()});
  }
  for (const auto& e : j.at("ecdf")) {
    p.ecdf.push_back({e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()});
  }
  return p;
}

json to_json(const ReportBundle& b) {
  json j{{"schema_version", kReportSchemaVersion},
         {"command", b.command},
         {"alpha", b.alpha},
         {"adjustment", b.adjustment},
         {"statistic", b.statistic},
         {"node_labels", b.node_labels},
         {"global", b.global ? global_to_json(*b.global) : json(nullptr)}};
  json nodes = json::array();
  for (const auto& r : b.node_table) {
    nodes.push_back(json{{"label", r.label},          {"delta_w", r.delta_w},
                         {"delta_t", r.delta_t},      {"dof", r.dof},
                         {"p_raw", r.p_raw},          {"p_holm", r.p_holm},
                         {"p_bonferroni", r.p_bonferroni}, {"selected", r.selected}});
  }
  j["node_table"] = nodes;
  json tables = json::array();
  for (const auto& t : b.subset_tables) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      rows.push_back(json{{"members", r.members},   {"labels", r.labels},
                          {"delta_w", r.delta_w},   {"delta_t", r.delta_t},
                          {"dof", r.dof},           {"p_w", r.p_w},
                          {"p_t", r.p_t},           {"p_holm", r.p_holm},
                          {"p_bonferroni", r.p_bonferroni}, {"selected", r.selected}});
    }
    tables.push_back(json{{"l", t.l}, {"rows", rows}});
  }
  j["subset_tables"] = tables;
  json cells = json::array();
  for (const auto& c : b.cells) cells.push_back(cell_to_json(c));
  j["cells"] = cells;
  json plots = json::array();
  for (const auto& p : b.plots) plots.push_back(plot_to_json(p));
  j["plots"] = plots;
  return j;
}

ReportBundle bundle_from_json(const json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
    throw ParseError("unsupported report schema version");
  }
  ReportBundle b;
  b.command = j.at("command").get<std::string>();
  b.alpha = j.at("alpha").get<double>();
  b.adjustment = j.at("adjustment").get<std::string>();
  b.statistic = j.at("statistic").get<std::string>();
  b.node_labels = j.at("node_labels").get<std::vector<std::string>>();
  if (!j.at("global").is_null()) b.global = global_from_json(j.at("global"));
  for (const auto& r : j.at("node_table")) {
    NodeRow n;
    n.label = r.at("label").get<std::string>();
    n.delta_w = r.at("delta_w").get<double>();
    n.delta_t = r.at("delta_t").get<double>();
    n.dof = r.at("dof").get<int>();
    n.p_raw = r.at("p_raw").get<double>();
    n.p_holm = r.at("p_holm").get<double>();
    n.p_bonferroni = r.at("p_bonferroni").get<double>();
    n.selected = r.at("selected").get<bool>();
    b.node_table.push_back(std::move(n));
  }
  for (const auto& tj : j.at("subset_tables")) {
    SubsetTable t;
    t.l = tj.at("l").get<int>();
    for (const auto& r : tj.at("rows")) {
      SubsetRow s;
      s.members = r.at("members").get<std::vector<int>>();
      s.labels = r.at("labels").get<std::vector<std::string>>();
      s.delta_w = r.at("delta_w").get<double>();
      s.delta_t = r.at("delta_t").get<double>();
      s.dof = r.at("dof").get<int>();
      s.p_w = r.at("p_w").get<double>();
      s.p_t = r.at("p_t").get<double>();
      s.p_holm = r.at("p_holm").get<double>();
      s.p_bonferroni = r.at("p_bonferroni").get<double>();
      s.selected = r.at("selected").get<bool>();
      t.rows.push_back(std::move(s));
    }
    b.subset_tables.push_back(std::move(t));
  }
  for (const auto& c : j.at("cells")) b.cells.push_back(cell_from_json(c));
  for (const auto& p : j.at("plots")) b.plots.push_back(plot_from_json(p));
  return b;
}

ReportBundle read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return bundle_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

PlotSeries make_plot(std::string name, std::string cell_id, std::string kind, int l,
                     std::vector<int> members, double dof, double lambda, std::vector<double> draws,
                     int bins, std::size_t ecdf_points) {
  PlotSeries p{std::move(name), std::move(cell_id), std::move(kind), l, std::move(members), dof, lambda};
  if (draws.empty() || bins < 1) return p;
  std::sort(draws.begin(), draws.end());
  auto cdf = [dof, lambda](double x) {
    return lambda > 0.0 ? 1.0 - noncentral_chi2_sf(x, dof, lambda) : chi2_cdf(x, dof);
  };

  const double lo = std::min(0.0, draws.front());
  double hi = draws.back();
  if (!(hi > lo)) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (const double x : draws) {
    const auto k = static_cast<std::size_t>(std::clamp((x - lo) / width, 0.0, bins - 1.0));
    ++counts[k];
  }
  const double n = static_cast<double>(draws.size());
  for (int k = 0; k < bins; ++k) {
    const double left = lo + k * width;
    const double right = k + 1 == bins ? hi : lo + (k + 1) * width;
    p.bins.push_back({left, right, counts[static_cast<std::size_t>(k)] / (n * width),
                      (cdf(right) - cdf(left)) / (right - left)});
  }

  const std::size_t points = std::min(ecdf_points, draws.size());
  for (std::size_t k = 0; k < points; ++k) {
    const std::size_t i = points == draws.size() ? k : ((2 * k + 1) * draws.size()) / (2 * points);
    p.ecdf.push_back({draws[i], (i + 1) / n, cdf(draws[i])});
  }
  return p;
}

CellRecord cell_from_summary(const MonteCarloSummary& s) {
  CellRecord c;
  c.spec = s.spec;
  c.cell_id = s.spec.cell_id();
  c.completed = s.completed;
  c.failures = s.failures;
  c.global_reject = s.global_reject;
  c.global_ks_uniform_t = s.global_ks_uniform_t;
  c.lambda_hat = s.lambda_hat;
  for (const auto& f : s.families) {
    FamilyRates r;
    r.l = f.l;
    r.fwer = f.fwer;
    r.power_any = f.power_any;
    r.power_all = f.power_all;
    for (const auto& sub : f.subsets) {
      r.subsets.push_back({sub.m.members(), sub.dof, sub.reject, sub.mean_delta, sub.ks});
    }
    c.families.push_back(std::move(r));
  }
  if (!s.spec.altered.empty() && s.family(1)) c.noncentral = conjecture_check(s);
  return c;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

std::string nodes_csv(const ReportBundle& b) {
  std::ostringstream o;
  o << "label,delta_w,delta_t,dof,p_raw,p_holm,p_bonferroni,selected\n";
  for (const auto& r : b.node_table) {
    o << csv_text(r.label) << ',' << num(r.delta_w) << ',' << num(r.delta_t) << ',' << r.dof << ','
      << num(r.p_raw) << ',' << num(r.p_holm) << ',' << num(r.p_bonferroni) << ','
      << (r.selected ? "true" : "false") << '\n';
  }
  return o.str();
}

std::string subsets_csv(const SubsetTable& t) {
  std::ostringstream o;
  o << "subset,labels,delta_w,delta_t,dof,p_w,p_t,p_holm,p_bonferroni,selected\n";
  for (const auto& r : t.rows) {
    o << csv_text(members_label(r.members)) << ',' << csv_text(join_labels(r.labels)) << ','
      << num(r.delta_w) << ',' << num(r.delta_t) << ',' << r.dof << ',' << num(r.p_w) << ','
      << num(r.p_t) << ',' << num(r.p_holm) << ',' << num(r.p_bonferroni) << ','
      << (r.selected ? "true" : "false") << '\n';
  }
  return o.str();
}

// One row per subset, W/T rejection frequency per cell.
std::string summary_csv(const ReportBundle& b) {
  std::vector<const CellRecord*> ok;
  for (const auto& c : b.cells) {
    if (!c.error_code) ok.push_back(&c);
  }
  std::vector<std::pair<int, std::vector<int>>> rows;
  std::map<std::pair<int, std::vector<int>>, std::size_t> row_index;
  for (const auto* c : ok) {
    for (const auto& f : c->families) {
      for (const auto& s : f.subsets) {
        auto key = std::make_pair(f.l, s.members);
        if (row_index.emplace(key, rows.size()).second) rows.push_back(key);
      }
    }
  }
  std::ostringstream o;
  o << "l,subset";
  for (const auto* c : ok) o << ',' << c->cell_id << "_W," << c->cell_id << "_T";
  o << '\n';
  for (const auto& [l, members] : rows) {
    o << l << ',' << csv_text(members_label(members));
    for (const auto* c : ok) {
      const SubsetRates* hit = nullptr;
      for (const auto& f : c->families) {
        if (f.l != l) continue;
        for (const auto& s : f.subsets) {
          if (s.members == members) hit = &s;
        }
      }
      if (hit) {
        o << ',' << num(hit->reject[0]) << ',' << num(hit->reject[1]);
      } else {
        o << ",,";
      }
    }
    o << '\n';
  }
  return o.str();
}

std::string cells_csv(const ReportBundle& b) {
  std::ostringstream o;
  o << "cell_id,scenario,p,rho,n1,n2,delta_mu,xi,replicates,completed,failures,"
       "global_reject_w,global_reject_t,global_ks_uniform_t,error_code\n";
  for (const auto& c : b.cells) {
    const auto& s = c.spec;
    o << c.cell_id << ',' << s.name << ',' << s.p << ',' << num(s.rho) << ',' << s.n1 << ',' << s.n2
      << ',' << num(s.delta_mu) << ',' << num(s.xi) << ',' << s.b << ',' << c.completed << ','
      << c.failures << ',' << num(c.global_reject[0]) << ',' << num(c.global_reject[1]) << ','
      << num(c.global_ks_uniform_t) << ',' << c.error_code.value_or("") << '\n';
  }
  return o.str();
}

std::string grid_rows_csv(const ReportBundle& b, bool power) {
  std::ostringstream o;
  o << "cell_id,scenario,n1,n2,delta_mu,xi,l,method,statistic,"
    << (power ? "power_any,power_all\n" : "fwer\n");
  for (const auto& c : b.cells) {
    if (c.error_code) continue;
    for (const auto& f : c.families) {
      for (const Adjustment m : {Adjustment::kBonferroni, Adjustment::kHolm}) {
        for (const Statistic st : {Statistic::kW, Statistic::kT}) {
          const auto mi = static_cast<std::size_t>(m);
          const auto si = static_cast<std::size_t>(st);
          const auto& first = power ? f.power_any[mi][si] : f.fwer[mi][si];
          if (!first) continue;
          o << c.cell_id << ',' << c.spec.name << ',' << c.spec.n1 << ',' << c.spec.n2 << ','
            << num(c.spec.delta_mu) << ',' << num(c.spec.xi) << ',' << f.l << ','
            << adjustment_name(m) << ',' << statistic_name(st) << ',' << opt_num(first);
          if (power) o << ',' << opt_num(f.power_all[mi][si]);
          o << '\n';
        }
      }
    }
  }
  return o.str();
}

std::string noncentral_csv(const ReportBundle& b) {
  std::ostringstream o;
  o << "cell_id,node,lambda_hat,ks_noncentral,ks_central\n";
  for (const auto& c : b.cells) {
    for (const auto& f : c.noncentral) {
      o << c.cell_id << ',' << f.node << ',' << num(f.lambda_hat) << ',' << num(f.ks_noncentral) << ','
        << num(f.ks_central) << '\n';
    }
  }
  return o.str();
}

}  // namespace

void emit_report(const ReportBundle& b, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());

  write_text_file(dir / "report.json", to_json(b).dump(2) + "\n");
  if (!b.node_table.empty()) write_text_file(dir / "nodes.csv", nodes_csv(b));
  for (const auto& t : b.subset_tables) {
    write_text_file(dir / ("subsets_l" + std::to_string(t.l) + ".csv"), subsets_csv(t));
  }
  if (!b.cells.empty()) {
    write_text_file(dir / "summary.csv", summary_csv(b));
    write_text_file(dir / "cells.csv", cells_csv(b));
    write_text_file(dir / "noncentral.csv", noncentral_csv(b));
  }
  if (!b.plots.empty() || !b.cells.empty()) {
    const auto plotdir = dir / "plotdata";
    std::filesystem::create_directories(plotdir, ec);
    if (ec) throw IoError("cannot create directory " + plotdir.string());
    if (!b.cells.empty()) {
      write_text_file(plotdir / "fwer.csv", grid_rows_csv(b, false));
      write_text_file(plotdir / "power.csv", grid_rows_csv(b, true));
    }
    for (const auto& p : b.plots) {
      std::ostringstream h;
      h << "bin_left,bin_right,density,theory_density\n";
      for (const auto& bin : p.bins) {
        h << num(bin.left) << ',' << num(bin.right) << ',' << num(bin.density) << ','
          << num(bin.theory_density) << '\n';
      }
      write_text_file(plotdir / (p.name + ".csv"), h.str());
      std::ostringstream e;
      e << "x,ecdf,theory_cdf\n";
      for (const auto& pt : p.ecdf) e << num(pt.x) << ',' << num(pt.ecdf) << ',' << num(pt.theory_cdf) << '\n';
      write_text_file(plotdir / (p.name + "_ecdf.csv"), e.str());
    }
  }
}

}  // namespace ggmlrt::app
