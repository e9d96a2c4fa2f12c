#include "pvmincq/harness/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace pvmincq::harness {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.6f}", v);
}

nlohmann::json maybe(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

TableCell table_cell(const BenchmarkSummary& summary, std::size_t shift, std::size_t method) {
  TableCell cell;
  double sum = 0.0;
  for (std::size_t s = 0; s < summary.seeds.size(); ++s) {
    const RunResult& r = summary.run(shift, method, s);
    if (r.error)
      ++cell.failed;
    else if (r.single_label)
      ++cell.degenerate;
    else {
      ++cell.runs;
      sum += r.accuracy;
    }
  }
  if (cell.runs > 0) cell.mean_accuracy = sum / static_cast<double>(cell.runs);
  return cell;
}

std::string table_csv(const BenchmarkSummary& summary) {
  std::string out = "method";
  for (const ShiftCase& s : summary.shifts) out += "," + s.name;
  out += "\n";
  for (std::size_t m = 0; m < summary.methods.size(); ++m) {
    out += method_name(summary.methods[m]);
    for (std::size_t s = 0; s < summary.shifts.size(); ++s) {
      const TableCell cell = table_cell(summary, s, m);
      out += ",";
      if (cell.mean_accuracy)
        out += fmt::format("{:.1f}", 100.0 * *cell.mean_accuracy);
      else if (cell.degenerate > 0)
        out += no_result_marker;
      else
        out += "n/a";
    }
    out += "\n";
  }
  return out;
}

std::string per_seed_csv(const BenchmarkSummary& summary) {
  std::string out =
      "method,shift,seed,accuracy,single_label,error,mu,eps,gamma,neighbors,criterion,train_size,pv,"
      "eps_hat,gibbs_gap,dis_hat,dis_bound,diagnostics_hold\n";
  for (std::size_t s = 0; s < summary.shifts.size(); ++s)
    for (std::size_t m = 0; m < summary.methods.size(); ++m)
      for (std::size_t k = 0; k < summary.seeds.size(); ++k) {
        const RunResult& r = summary.run(s, m, k);
        out += fmt::format("{},{},{},", method_name(r.method), r.shift, r.seed);
        if (r.error) {
          out += fmt::format(",0,\"{}\",,,,,,,,,,,,\n", *r.error);
          continue;
        }
        out += r.single_label ? std::string(no_result_marker) : number(r.accuracy);
        out += fmt::format(",{},,{},{},{},{},{},{},", r.single_label ? 1 : 0, number(r.chosen.mu),
                           number(r.chosen.eps), number(r.chosen.gamma),
                           r.chosen.neighbors ? std::to_string(r.chosen.neighbors) : std::string(),
                           number(r.criterion), r.train_size);
        if (r.diagnostics) {
          const auto& d = *r.diagnostics;
          out += fmt::format("{},{},{},{},{},{}\n", number(d.pv), number(d.eps_hat), number(d.gibbs_gap),
                             number(d.dis_hat), number(d.dis_bound), d.holds() ? 1 : 0);
        } else {
          out += ",,,,,\n";
        }
      }
  return out;
}

nlohmann::json grid_cell_json(const GridCell& cell) {
  nlohmann::json j;
  j["mu"] = maybe(cell.mu);
  j["eps"] = maybe(cell.eps);
  j["gamma"] = maybe(cell.gamma);
  j["neighbors"] = cell.neighbors ? nlohmann::json(cell.neighbors) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json report_json(const ValidationReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellResult& c : report.cells) {
    nlohmann::json j = grid_cell_json(c.cell);
    j["feasible"] = c.feasible;
    j["fold_risks"] = c.fold_risks;
    j["source_risk"] = maybe(c.source_risk);
    j["pv"] = c.pv;
    j["criterion"] = maybe(c.criterion);
    if (!c.note.empty()) j["note"] = c.note;
    cells.push_back(std::move(j));
  }
  nlohmann::json out;
  out["procedure"] = report.procedure;
  out["chosen"] = report.chosen ? nlohmann::json(*report.chosen) : nlohmann::json(nullptr);
  out["cells"] = std::move(cells);
  return out;
}

nlohmann::json run_json(const RunResult& r) {
  nlohmann::json j;
  j["method"] = method_name(r.method);
  j["shift"] = r.shift;
  j["seed"] = r.seed;
  if (r.error) {
    j["error"] = *r.error;
  } else {
    j["accuracy"] = r.accuracy;
    j["single_label"] = r.single_label;
    j["chosen"] = grid_cell_json(r.chosen);
    j["criterion"] = r.criterion;
    j["fallbacks"] = r.fallbacks;
    j["train_size"] = r.train_size;
  }
  if (r.diagnostics) {
    const AdaptationDiagnostics& d = *r.diagnostics;
    j["diagnostics"] = {
        {"eps_hat", d.eps_hat},
        {"gibbs_source", d.gibbs_source},
        {"gibbs_target", d.gibbs_target},
        {"gibbs_gap", d.gibbs_gap},
        {"dis_hat", d.dis_hat},
        {"mean_abs_score", d.mean_abs_score},
        {"dis_bound", d.dis_bound},
        {"dis_bound_simplified", d.dis_bound_simplified},
        {"pv", d.pv},
        {"matched", d.matched},
        {"gibbs_bound_holds", d.gibbs_bound_holds},
        {"dis_bound_holds", d.dis_bound_holds},
    };
  }
  if (r.bounds) {
    const BoundReport& b = *r.bounds;
    j["bounds"] = {
        {"gibbs_risk", b.gibbs_risk},
        {"bayes_risk", b.bayes_risk},
        {"cbound", b.cbound ? nlohmann::json(*b.cbound) : nlohmann::json(nullptr)},
        {"self_bayes_risk", b.self_bayes_risk},
        {"self_cbound", b.self_cbound},
        {"label_divergence", b.label_divergence},
        {"label_disagreement", b.label_disagreement},
        {"corollary_bound", b.corollary_bound},
    };
  }
  j["validation"] = report_json(r.report);
  return j;
}

std::string validation_csv(const ValidationReport& report) {
  std::string out = "index,mu,eps,gamma,neighbors,feasible,source_risk,pv,criterion,chosen,note\n";
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const CellResult& c = report.cells[i];
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", i, number(c.cell.mu), number(c.cell.eps),
                       number(c.cell.gamma), c.cell.neighbors ? std::to_string(c.cell.neighbors) : std::string(),
                       c.feasible ? 1 : 0, number(c.source_risk), number(c.pv), number(c.criterion),
                       report.chosen && *report.chosen == i ? 1 : 0, c.note);
  }
  return out;
}

nlohmann::json chosen_json(const ValidationReport& report) {
  nlohmann::json j;
  j["procedure"] = report.procedure;
  if (!report.chosen) {
    j["chosen"] = nullptr;
    return j;
  }
  const CellResult& c = report.best();
  j["index"] = *report.chosen;
  j["cell"] = grid_cell_json(c.cell);
  j["source_risk"] = maybe(c.source_risk);
  j["pv"] = c.pv;
  j["criterion"] = maybe(c.criterion);
  return j;
}

std::filesystem::path run_json_path(const std::filesystem::path& out, const RunResult& r) {
  return out / "runs" / r.shift / fmt::format("{}-seed{}.json", method_name(r.method), r.seed);
}

std::filesystem::path plot_path(const std::filesystem::path& out, const RunResult& r) {
  return out / "plots" / fmt::format("{}-{}-seed{}.svg", r.shift, method_name(r.method), r.seed);
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const BenchmarkSummary& summary, const BenchmarkConfig& config) {
  const auto& out = config.out_dir;
  write_file_atomically(out / "table.csv", table_csv(summary));
  write_file_atomically(out / "per_seed.csv", per_seed_csv(summary));
  write_file_atomically(out / "config.ini", render_config(config));

  nlohmann::json j;
  j["seconds"] = summary.seconds;
  j["runs"] = summary.runs.size();
  j["diagnostic_violations"] = summary.diagnostic_violations();
  nlohmann::json table = nlohmann::json::object();
  for (std::size_t m = 0; m < summary.methods.size(); ++m) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t s = 0; s < summary.shifts.size(); ++s) {
      const TableCell cell = table_cell(summary, s, m);
      row[summary.shifts[s].name] = {
          {"mean_accuracy", cell.mean_accuracy ? nlohmann::json(*cell.mean_accuracy) : nlohmann::json(nullptr)},
          {"runs", cell.runs},
          {"single_label", cell.degenerate},
          {"failed", cell.failed},
      };
    }
    table[std::string(method_name(summary.methods[m]))] = std::move(row);
  }
  j["table"] = std::move(table);
  write_file_atomically(out / "summary.json", j.dump(2) + "\n");
}

}  // namespace pvmincq::harness
