#include "g2pinch/cli.hpp"

#include "g2pinch/errors.hpp"
#include "g2pinch/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace g2pinch {

namespace {

using nlohmann::json;

struct Common {
  std::string family;
  std::vector<std::string> params;
  double tol = 1e-9;
  std::string format;
  std::string output;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--family", c.family, "catalog family (see 'catalog list')");
  cmd->add_option("--param", c.params, "family parameters k=v[,k=v]");
  cmd->add_option("--tol", c.tol, "vanishing tolerance on |mu| = 1 normalized input")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--output", c.output, "output file (default stdout)");
}

ParamMap merged_params(const Common& c) {
  ParamMap p;
  for (const auto& s : c.params)
    for (const auto& [k, v] : parse_params(s)) p[k] = v;
  return p;
}

const std::string& require_family(const Common& c) {
  if (c.family.empty()) throw ValidationError("--family is required");
  return c.family;
}

// Writes to the -o target or to out; returns true when a file was used.
bool emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.output.empty()) {
    out << text;
    return false;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file " + c.output);
  f << text;
  if (!f) throw ValidationError("failed writing " + c.output);
  return true;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream s;
  s << std::setprecision(17) << *v;
  return s.str();
}

int cmd_analyze(const Common& c, const std::string& path, std::uint64_t seed, std::ostream& out) {
  StructureInput in;
  if (!path.empty() && !c.family.empty()) throw ValidationError("give either an input file or --family");
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read " + path);
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    in = parse_structure_json(doc);
  } else {
    in = structure_from_family(require_family(c), merged_params(c));
  }
  const json rep = analysis_report(in, {c.tol, seed});
  if (c.format == "csv") {
    std::ostringstream s;
    const char* keys[] = {"closed", "torsion_free", "flat", "scal", "tau_norm2", "F", "einstein_residual"};
    for (std::size_t i = 0; i < std::size(keys); ++i) s << (i ? "," : "") << keys[i];
    s << ",class_flags\r\n";
    for (std::size_t i = 0; i < std::size(keys); ++i) {
      const json& v = rep[keys[i]];
      s << (i ? "," : "");
      if (v.is_boolean()) s << (v.get<bool>() ? "true" : "false");
      else if (v.is_number()) s << csv_number(v.get<double>());
    }
    std::string classes;
    for (const auto& n : rep["classes"]) classes += (classes.empty() ? "" : ";") + n.get<std::string>();
    s << ',' << csv_field(classes) << "\r\n";
    emit(c, out, s.str());
  } else {
    emit(c, out, dump(rep));
  }
  return kExitOk;
}

int cmd_scan(const Common& c, const std::string& grid_text, unsigned threads, std::ostream& out,
             std::ostream& err) {
  const std::string& family = require_family(c);
  if (grid_text.empty()) throw ValidationError("--grid is required");
  const Grid grid = parse_grid(grid_text);
  const ScanResult r = scan(family, grid, merged_params(c), threads, c.tol);

  std::size_t failed = 0;
  for (const auto& row : r.rows)
    if (!row.error.empty()) {
      ++failed;
      err << "row " << grid.param << "=" << row.params.at(grid.param) << ": " << row.error << "\n";
    }

  std::ostringstream s;
  if (c.format == "json") {
    s << dump(scan_json(family, r, c.tol));
  } else {
    write_scan_csv(s, r);
  }
  const bool to_file = emit(c, out, s.str());
  std::ostream& summary = to_file ? out : err;
  summary << "scan " << family << ": " << r.rows.size() << " rows, " << failed << " failed, n_hat="
          << fmt(r.F_inf) << ", N_hat=" << fmt(r.F_sup) << ", argmax " << grid.param << "="
          << fmt(r.argmax) << "\n";
  return failed == r.rows.size() && !r.rows.empty() ? kExitValidation : kExitOk;
}

int cmd_extremize(const Common& c, const std::string& dir_text, std::ostream& out, std::ostream& err) {
  const std::string& family = require_family(c);
  const CatalogEntry e = catalog(family, merged_params(c));
  if (!e.spec) throw ValidationError("extremize needs an almost-abelian family");
  const Direction dir = dir_text == "min" ? Direction::min : Direction::max;
  const ExtremizeResult r = extremize_F(*e.spec, dir);

  std::ostringstream s;
  if (c.format == "json")
    s << dump(extremize_json(family, r, dir));
  else
    write_extremize_csv(s, r);
  const bool to_file = emit(c, out, s.str());
  (to_file ? out : err) << "extremize " << family << " (" << dir_text << "): F*=" << fmt(r.F)
                        << ", |grad|=" << fmt(r.grad_norm) << ", iterations=" << r.iterations
                        << (r.converged ? ", converged" : ", not converged")
                        << (r.escapes_to_degeneration ? ", escapes to degeneration" : "") << "\n";
  return kExitOk;
}

int cmd_flow(const Common& c, double t_end, double dt, std::ostream& out, std::ostream& err) {
  const std::string& family = require_family(c);
  const CatalogEntry e = catalog(family, merged_params(c));
  if (dt <= 0.0) dt = t_end > 0.0 ? t_end / 200.0 : 1e-3;
  const FlowResult r = laplacian_flow(G2Structure::standard(e.mu), t_end, dt);

  std::ostringstream s;
  if (c.format == "json")
    s << dump(flow_json(family, r, t_end));
  else
    write_flow_csv(s, r);
  const bool to_file = emit(c, out, s.str());
  (to_file ? out : err) << "flow " << family << ": " << r.samples.size() << " samples to t="
                        << fmt(r.samples.back().t) << ", F " << to_string(flow_monotonicity(r))
                        << (r.truncated ? ", truncated (positivity lost)" : "")
                        << (r.aborted ? ", aborted (closedness drift)" : "") << "\n";
  return r.samples.size() > 1 || t_end == 0.0 ? kExitOk : kExitValidation;
}

int cmd_catalog(std::ostream& out) {
  for (const auto& f : family_specs()) {
    out << f.name << "  " << f.description;
    if (!f.params.empty()) {
      out << "  [";
      for (std::size_t i = 0; i < f.params.size(); ++i) out << (i ? "; " : "") << f.params[i].describe();
      out << "]";
    }
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Left-invariant G2-structures on 7-dimensional solvable Lie groups"};
  app.require_subcommand(1);

  Common analyze_opts, scan_opts, ext_opts, flow_opts;
  std::string path, grid_text, dir_text = "max";
  std::uint64_t seed = 12345;
  unsigned threads = 0;
  double t_end = 1.0, dt = 0.0;

  auto* analyze = app.add_subcommand("analyze", "full report for one structure (JSON)");
  add_common(analyze, analyze_opts, "json");
  analyze->add_option("input", path, "structure-constant JSON file");
  analyze->add_option("--seed", seed, "seed for sampled spectral estimates");

  auto* scan_cmd = app.add_subcommand("scan", "evaluate a family over a parameter grid");
  add_common(scan_cmd, scan_opts, "csv");
  scan_cmd->add_option("--grid", grid_text, "k=a:b:step");
  scan_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* ext = app.add_subcommand("extremize", "gradient ascent/descent of F along the orbit");
  add_common(ext, ext_opts, "csv");
  ext->add_option("--dir", dir_text, "max or min")->check(CLI::IsMember({"max", "min"}));

  auto* flow = app.add_subcommand("flow", "Laplacian flow of the 3-form with the bracket fixed");
  add_common(flow, flow_opts, "csv");
  flow->add_option("--t-end", t_end, "final time")->check(CLI::NonNegativeNumber);
  flow->add_option("--dt", dt, "initial step (default t_end/200)");

  auto* cat = app.add_subcommand("catalog", "built-in families");
  auto* cat_list = cat->add_subcommand("list", "list families and parameter ranges");
  cat->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_opts, path, seed, out);
    if (scan_cmd->parsed()) return cmd_scan(scan_opts, grid_text, threads, out, err);
    if (ext->parsed()) return cmd_extremize(ext_opts, dir_text, out, err);
    if (flow->parsed()) return cmd_flow(flow_opts, t_end, dt, out, err);
    if (cat_list->parsed()) return cmd_catalog(out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InconsistencyError& e) {
    err << "internal inconsistency: " << e.what() << "\n";
    return kExitInconsistency;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInconsistency;
  }
  return kExitValidation;
}

}  // namespace g2pinch
