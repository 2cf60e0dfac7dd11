#include "parest/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include <json.hpp>

#include "parest/picard.hpp"
#include "parest/sharpness.hpp"

namespace parest::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::InvalidConfig, what); }

const json& require_field(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) config_error("config missing field '" + path + "'");
  return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_number()) config_error("config field '" + path + "' must be a number");
  return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require_field(obj, key, path);
  if (!v.is_number_integer()) config_error("config field '" + path + "' must be an integer");
  return v.get<int>();
}

double number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) config_error(std::string("config field '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

int int_or(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<int>();
}

std::string string_or(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<std::string>();
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) config_error("referenced table file does not exist: " + path);
}

struct Setup {
  Mesh1D mesh;
  TimeGrid tg;
  double theta = 0.5;
};

Setup parse_problem(const json& root) {
  const json& p = require_field(root, "problem", "problem");
  const json& dom = require_field(p, "domain", "problem.domain");
  if (!dom.is_array() || dom.size() != 2) config_error("problem.domain must be [a, b]");
  Setup s{
      Mesh1D(dom[0].get<double>(), dom[1].get<double>(), require_int(p, "n_cells", "problem.n_cells")),
      TimeGrid(require_number(p, "T", "problem.T"), require_int(p, "n_steps", "problem.n_steps")),
      number_or(p, "theta", 0.5)};
  return s;
}

CoefficientSet parse_coefficients(const json& root) {
  if (!root.contains("coefficients")) return CoefficientSet::heat();
  const json& c = root.at("coefficients");
  const double delta = number_or(c, "delta", 0.5);
  const double sup = number_or(c, "sup_bound", 100.0);
  if (c.contains("table")) {
    const std::string path = c.at("table").get<std::string>();
    require_file(path);
    return load_coefficient_table(path, delta, sup);
  }
  return CoefficientSet::constants(number_or(c, "b", 1.0), number_or(c, "f", 0.0),
                                   number_or(c, "lambda", 0.0), delta, sup);
}

SourceTerm parse_source(const json& block, const Setup& setup, double shift_K) {
  if (block.contains("table")) {
    const std::string path = block.at("table").get<std::string>();
    require_file(path);
    return load_source_table(path);
  }
  const std::string preset = string_or(block, "preset", "constant");
  if (preset == "sharpness") {
    SharpCase c{require_int(block, "m", "source.m"), number_or(block, "K", shift_K), setup.tg.T};
    return make_case(c).source;
  }
  if (preset == "constant") {
    const double F = number_or(block, "F", 0.0);
    const double F0 = number_or(block, "F0", 0.0);
    SourceTerm s;
    s.F = [F](double, double) { return F; };
    s.F0 = [F0](double, double) { return F0; };
    return s;
  }
  if (preset == "sine") {
    const double k = number_or(block, "k", 1.0);
    const double amp_F = number_or(block, "amp_F", 1.0);
    const double amp_F0 = number_or(block, "amp_F0", 0.0);
    const double growth = number_or(block, "growth", 0.0);
    SourceTerm s;
    s.F = [=](double x, double t) { return amp_F * std::cos(k * x) * std::exp(growth * t); };
    s.F0 = [=](double x, double t) { return amp_F0 * std::sin(k * x) * std::exp(growth * t); };
    return s;
  }
  config_error("unknown source preset: " + preset);
}

struct EstimateParams {
  bool auto_K = true;
  double K = 0.0;
  double M = 1.0;
  double epsilon = 0.05;
  double K_max = 2048.0;
};

EstimateParams parse_estimate(const json& root) {
  EstimateParams e;
  if (!root.contains("estimate")) return e;
  const json& b = root.at("estimate");
  if (b.contains("K")) {
    if (b.at("K").is_string()) {
      if (b.at("K").get<std::string>() != "auto") config_error("estimate.K must be a number or \"auto\"");
      e.auto_K = true;
    } else {
      e.auto_K = false;
      e.K = b.at("K").get<double>();
    }
  }
  e.M = number_or(b, "M", 1.0);
  e.epsilon = number_or(b, "epsilon", 0.05);
  e.K_max = number_or(b, "K_max", 2048.0);
  return e;
}

NonlocalSpec parse_nonlocal(const json& root) {
  if (!root.contains("nonlocal")) config_error("config missing field 'nonlocal'");
  const json& b = root.at("nonlocal");
  NonlocalSpec spec;
  spec.variant = variant_from_name(require_field(b, "variant", "nonlocal.variant").get<std::string>());

  const double c = number_or(b, "c", 1.0);
  const std::string beta = string_or(b, "beta", "linear");
  std::function<double(double)> shape;
  if (beta == "linear")
    shape = [c](double z) { return c * z; };
  else if (beta == "sin")
    shape = [c](double z) { return c * std::sin(z); };
  else
    config_error("unknown beta preset: " + beta);
  spec.C_L = number_or(b, "C_L", std::abs(c));

  switch (spec.variant) {
    case NonlocalVariant::Local:
    case NonlocalVariant::Distributional:
      spec.beta_local = [shape](double z, double, double) { return shape(z); };
      break;
    case NonlocalVariant::IntegralSpace:
    case NonlocalVariant::IntegralSpaceDistributional:
      spec.beta_space = [shape](double z, double, double, double) { return shape(z); };
      break;
    case NonlocalVariant::IntegralSpaceTime:
    case NonlocalVariant::IntegralSpaceTimeDistributional:
      spec.beta_spacetime = [shape](double z, double, double, double, double) { return shape(z); };
      break;
    case NonlocalVariant::Delay: {
      spec.delay_beta_plain = [shape](double z, double, double) { return shape(z); };
      if (b.contains("delay_table")) {
        const std::string path = b.at("delay_table").get<std::string>();
        require_file(path);
        spec.tau = load_delay_table(path);
        spec.theta_delay = number_or(b, "theta_delay", 0.0);
      } else {
        const double lag = require_number(b, "delay", "nonlocal.delay");
        spec.tau = [lag](double t) { return std::max(0.0, t - lag); };
        spec.theta_delay = number_or(b, "theta_delay", lag);
      }
      break;
    }
    case NonlocalVariant::JumpKernel: {
      if (b.contains("kernel_table")) {
        const std::string path = b.at("kernel_table").get<std::string>();
        require_file(path);
        spec.kernel_r = load_kernel_table(path);
      } else {
        const double kc = number_or(b, "kernel_c", 1.0);
        spec.kernel_r = [kc](double x, double z, double) { return kc * std::cos(x - z); };
      }
      const double m0 = number_or(b, "moment0", 0.0);
      const double m1 = number_or(b, "moment1", 0.0);
      if (m0 != 0.0) spec.moment0 = [m0](double, double) { return m0; };
      if (m1 != 0.0) spec.moment1 = [m1](double, double) { return m1; };
      break;
    }
  }
  return spec;
}

// --- Output helpers ---------------------------------------------------------

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_.is_open()) config_error("cannot write output file: " + path.string());
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

struct Report {
  std::string theorem;
  bool pass = true;
  std::vector<std::string> lines;

  void note(const std::string& line) { lines.push_back(line); }

  void write(const fs::path& dir) const {
    std::ofstream out(dir / "report.txt", std::ios::binary);
    out << "THEOREM: " << theorem << "\n";
    for (const auto& l : lines) out << l << "\n";
    out << "VERDICT: " << (pass ? "PASS" : "FAIL") << "\n";
  }
};

void write_estimate_csv(CsvWriter& csv, const EstimateReport& rep) {
  for (size_t j = 0; j < rep.t.size(); ++j) {
    const bool row_pass = rep.ratio[j] <= 1.0 + kRatioTolerance;
    csv.row({format_number(rep.t[j]), format_number(rep.K), format_number(rep.M),
             format_number(rep.epsilon), format_number(rep.lhs[j]), format_number(rep.rhs_F[j]),
             format_number(rep.rhs_F0[j]), format_number(rep.ratio[j]), row_pass ? "1" : "0"});
  }
}

// --- Commands ---------------------------------------------------------------

int cmd_solve(const json& root, const Setup& setup, const fs::path& out_dir) {
  CoefficientSet coeffs = parse_coefficients(root);
  ValidationReport vr = validate(coeffs, setup.mesh, setup.tg);
  if (!vr.pass)
    throw Error(vr.issue->code, vr.issue->message + " at (x,t)=(" + std::to_string(vr.issue->x) +
                                    "," + std::to_string(vr.issue->t) + ")");
  EstimateParams est = parse_estimate(root);
  const double K = est.auto_K ? 0.0 : est.K;
  SourceTerm src = parse_source(require_field(root, "source", "source"), setup, K);
  SpaceTimeSeries u = solve_ibvp(coeffs, src, setup.mesh, setup.tg, {setup.theta, K});

  CsvWriter csv(out_dir / "solution.csv", "t,x,u");
  for (int j = 0; j < setup.tg.n_nodes(); ++j) {
    const double t = setup.tg.node(j);
    csv.row({format_number(t), format_number(setup.mesh.node(0)), "0"});
    for (int i = 0; i < u.frames[j].size(); ++i)
      csv.row({format_number(t), format_number(u.frames[j].x(i)), format_number(u.frames[j][i])});
    csv.row({format_number(t), format_number(setup.mesh.node(setup.mesh.n_cells)), "0"});
  }

  Report rep;
  rep.theorem = "well-posedness";
  rep.note("solved " + std::to_string(setup.tg.n_steps) + " steps on " +
           std::to_string(setup.mesh.n_cells) + " cells, K = " + format_number(K));
  rep.note("final-time H0 norm = " + format_number(norm_h0(u.frames.back())));
  rep.write(out_dir);
  return 0;
}

int cmd_verify(const json& root, const Setup& setup, const fs::path& out_dir) {
  CoefficientSet coeffs = parse_coefficients(root);
  ValidationReport vr = validate(coeffs, setup.mesh, setup.tg);
  if (!vr.pass)
    throw Error(vr.issue->code, vr.issue->message + " at (x,t)=(" + std::to_string(vr.issue->x) +
                                    "," + std::to_string(vr.issue->t) + ")");
  EstimateParams est = parse_estimate(root);

  std::vector<SourceTerm> family;
  if (root.contains("sources")) {
    for (const json& b : root.at("sources")) family.push_back(parse_source(b, setup, 0.0));
  } else {
    family.push_back(parse_source(require_field(root, "source", "source"), setup, 0.0));
  }

  Report rep;
  rep.theorem = "corollary-1";
  ParamPack pack = param_pack(coeffs, setup.mesh, setup.tg);
  rep.note("parameters: T = " + format_number(pack.T) + ", D = (" +
           format_number(pack.domain_a) + ", " + format_number(pack.domain_b) +
           "), delta = " + format_number(pack.delta) +
           ", sup_bound = " + format_number(pack.sup_bound));
  double K = est.K;
  if (est.auto_K) {
    KSearchResult found =
        search_K(coeffs, family, setup.mesh, setup.tg, setup.theta, est.M, est.epsilon, est.K_max);
    if (!found.found) {
      rep.pass = false;
      rep.note("no shift <= K_max = " + format_number(est.K_max) + " passes");
      rep.write(out_dir);
      throw Error(Errc::NotFound, "no shift <= K_max passes; raise estimate.K_max");
    }
    K = found.K;
    rep.note("search_K tested " + std::to_string(found.tested.size()) + " shifts, found K = " +
             format_number(K));
  } else {
    rep.note("fixed K = " + format_number(K));
  }

  CsvWriter csv(out_dir / "estimate_report.csv", "t,K,M,epsilon,lhs,rhs_F,rhs_F0,ratio,pass");
  bool all_pass = true;
  for (size_t s = 0; s < family.size(); ++s) {
    SpaceTimeSeries u = solve_ibvp(coeffs, family[s], setup.mesh, setup.tg, {setup.theta, K});
    EstimateReport er = check_inequality(u, family[s], coeffs, K, est.M, est.epsilon);
    write_estimate_csv(csv, er);
    rep.note("source " + std::to_string(s) + ": max ratio = " + format_number(er.max_ratio) +
             (er.pass ? " (pass)" : " (fail)"));
    all_pass = all_pass && er.pass;
  }
  rep.pass = all_pass;
  rep.write(out_dir);
  return all_pass ? 0 : 1;
}

int cmd_sharpness(const json& root, const Setup& setup, const fs::path& out_dir) {
  const json& b = require_field(root, "sharpness", "sharpness");
  const std::string mode = string_or(b, "mode", "fixed");
  const double tolerance = number_or(b, "tolerance", 0.02);

  CsvWriter csv(out_dir / "sharpness.csv", "m,K,T,gamma,ratio_numeric,ratio_closed,discrepancy");
  Report rep;

  std::vector<SweepRow> rows;
  if (mode == "fixed") {
    const json& ml = require_field(b, "m_list", "sharpness.m_list");
    std::vector<int> m_list;
    for (const json& v : ml) m_list.push_back(v.get<int>());
    rows = sweep(m_list, number_or(b, "K", 0.0), setup.tg.T, setup.mesh.n_cells,
                 setup.tg.n_steps);
    rep.theorem = "7";
  } else if (mode == "initial_time") {
    const int i_max = int_or(b, "i_max", 6);
    for (int i = 1; i <= i_max; ++i) {
      SharpCase c{i + 1, number_or(b, "K", 0.0), 1.0 / i};
      const int n_cells = std::max(setup.mesh.n_cells, 32 * c.m);
      rows.push_back(sweep_one(c, n_cells, setup.tg.n_steps));
    }
    rep.theorem = "8";
  } else {
    config_error("sharpness.mode must be \"fixed\" or \"initial_time\"");
  }

  bool pass = true;
  for (const SweepRow& r : rows) {
    csv.row({std::to_string(r.m), format_number(r.K), format_number(r.T), format_number(r.gamma),
             format_number(r.ratio_numeric), format_number(r.ratio_closed),
             format_number(r.discrepancy)});
    pass = pass && r.discrepancy < tolerance;
  }
  if (mode == "initial_time" && !rows.empty())
    pass = pass && rows.back().ratio_numeric >= number_or(b, "target", 0.45);

  rep.pass = pass;
  rep.note("rows: " + std::to_string(rows.size()) + ", tolerance: " + format_number(tolerance));
  if (!rows.empty())
    rep.note("last ratio_numeric = " + format_number(rows.back().ratio_numeric) +
             " vs closed form " + format_number(rows.back().ratio_closed));
  rep.write(out_dir);
  return pass ? 0 : 1;
}

int cmd_asymptotic(const json& root, const Setup& setup, const fs::path& out_dir) {
  const json& b = require_field(root, "asymptotic", "asymptotic");
  const std::string kind_name = string_or(b, "kind", "hminus1");
  const SourceKind kind = kind_name == "h0" ? SourceKind::H0Source : SourceKind::HminusSource;

  CoefficientSet coeffs = parse_coefficients(root);
  ValidationReport vr = validate(coeffs, setup.mesh, setup.tg);
  if (!vr.pass) throw Error(vr.issue->code, vr.issue->message);
  SourceTerm src = parse_source(require_field(root, "source", "source"), setup, 0.0);
  SpaceTimeSeries u = solve_ibvp(coeffs, src, setup.mesh, setup.tg, {setup.theta, 0.0});
  std::vector<RatioPoint> pts = initial_time_ratio(u, src, coeffs, kind);

  CsvWriter csv(out_dir / "asymptotic.csv", "t,ratio,trusted,running_mean_dev");
  for (const RatioPoint& p : pts)
    csv.row({format_number(p.t), format_number(p.ratio), p.trusted ? "1" : "0",
             format_number(p.running_mean_dev)});

  const double bound = number_or(b, "bound", kind == SourceKind::H0Source ? 0.05 : 0.55);
  const double t_below = number_or(b, "t_below", setup.tg.T);
  bool pass = true;
  if (kind == SourceKind::H0Source) {
    // The trusted point closest to t = 0 must have dropped below the bound.
    for (auto it = pts.rbegin(); it != pts.rend(); ++it)
      if (it->trusted) {
        pass = it->ratio < bound;
        break;
      }
  } else {
    for (const RatioPoint& p : pts)
      if (p.trusted && p.t <= t_below) pass = pass && p.ratio <= bound;
  }

  Report rep;
  rep.theorem = kind == SourceKind::H0Source ? "2" : "3";
  rep.pass = pass;
  rep.note("kind: " + kind_name + ", bound: " + format_number(bound));
  rep.write(out_dir);
  return pass ? 0 : 1;
}

int cmd_picard(const json& root, const Setup& setup, const fs::path& out_dir) {
  CoefficientSet coeffs = parse_coefficients(root);
  ValidationReport vr = validate(coeffs, setup.mesh, setup.tg);
  if (!vr.pass) throw Error(vr.issue->code, vr.issue->message);
  SourceTerm phi = parse_source(require_field(root, "source", "source"), setup, 0.0);
  NonlocalSpec spec = parse_nonlocal(root);
  EstimateParams est = parse_estimate(root);

  const json& b = root.contains("picard") ? root.at("picard") : json::object();
  PicardConfig cfg;
  cfg.K = est.auto_K ? 0.0 : est.K;
  cfg.M = est.M;
  cfg.max_iters = int_or(b, "max_iters", 50);
  cfg.tol = number_or(b, "tol", 1e-10);
  cfg.theta = setup.theta;
  cfg.K_max = est.K_max;
  const std::string mode = string_or(b, "norm_mode", "xminus1");
  cfg.norm_mode = mode == "x0" ? PicardNormMode::X0 : PicardNormMode::Xminus1;

  PicardResult result;
  try {
    result = solve_nonlinear(coeffs, spec, phi, setup.mesh, setup.tg, cfg);
  } catch (const Error& e) {
    Report rep;
    rep.theorem = cfg.norm_mode == PicardNormMode::X0 ? "5" : "4";
    rep.pass = false;
    rep.note(e.what());
    rep.write(out_dir);
    throw;
  }

  CsvWriter csv(out_dir / "picard_trace.csv", "iter,residual,quotient,K");
  for (size_t k = 0; k < result.trace.residuals.size(); ++k) {
    csv.row({std::to_string(k + 1), format_number(result.trace.residuals[k]),
             format_number(result.trace.quotients[k]), format_number(result.trace.K_used[k])});
  }

  EstimateReport er = verify_nonlocal_estimate(result.u, spec, phi, coeffs, est.M, est.epsilon,
                                               setup.theta, est.K_max);
  CsvWriter ecsv(out_dir / "estimate_report.csv", "t,K,M,epsilon,lhs,rhs_F,rhs_F0,ratio,pass");
  write_estimate_csv(ecsv, er);

  Report rep;
  rep.theorem = cfg.norm_mode == PicardNormMode::X0 ? "5" : "4";
  rep.pass = result.trace.converged && er.pass;
  rep.note("iterations: " + std::to_string(result.trace.iterations) +
           ", final K: " + format_number(result.trace.K_final));
  rep.note("frozen-source estimate: K = " + format_number(er.K) +
           ", max ratio = " + format_number(er.max_ratio));
  rep.write(out_dir);
  return rep.pass ? 0 : 1;
}

int cmd_probe(const json& root, const Setup& setup, const fs::path& out_dir,
              std::uint64_t seed) {
  NonlocalSpec spec = parse_nonlocal(root);
  const json& b = root.contains("probe") ? root.at("probe") : json::object();
  const int trials = int_or(b, "trials", 200);
  const double amplitude = number_or(b, "amplitude", 1.0);
  const double K = number_or(b, "K", 0.0);

  ProbeResult pr = lipschitz_probe(spec, K, setup.mesh, setup.tg, trials, amplitude, seed);

  CsvWriter csv(out_dir / "probe.csv", "variant,trials,pairs_used,ratio_xminus1,ratio_x0,bound");
  csv.row({variant_name(spec.variant), std::to_string(trials), std::to_string(pr.pairs_used),
           format_number(pr.ratio_xminus1), format_number(pr.ratio_x0),
           format_number(pr.bound)});

  static const char* roman[] = {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii"};
  Report rep;
  rep.theorem = std::string("6(") + roman[static_cast<int>(spec.variant)] + ")";
  rep.pass = std::isfinite(pr.bound) && pr.ratio_xminus1 <= pr.bound * 1.05;
  rep.note("empirical ratio = " + format_number(pr.ratio_xminus1) + ", bound = " +
           format_number(pr.bound));
  rep.write(out_dir);
  return rep.pass ? 0 : 1;
}

}  // namespace

int run(const std::string& config_path, const RunOverrides& overrides) {
  try {
    std::ifstream in(config_path);
    if (!in.is_open()) {
      std::cerr << "parest: cannot open config file: " << config_path << "\n";
      return 2;
    }
    json root;
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      std::cerr << "parest: invalid JSON in " << config_path << ": " << e.what() << "\n";
      return 2;
    }

    const std::string command = require_field(root, "command", "command").get<std::string>();
    std::uint64_t seed = root.contains("seed") ? root.at("seed").get<std::uint64_t>() : 0;
    if (overrides.seed) seed = *overrides.seed;
    fs::path out_dir = overrides.out_dir ? *overrides.out_dir : string_or(root, "output", ".");
    fs::create_directories(out_dir);

    Setup setup = parse_problem(root);

    if (command == "solve") return cmd_solve(root, setup, out_dir);
    if (command == "verify") return cmd_verify(root, setup, out_dir);
    if (command == "sharpness") return cmd_sharpness(root, setup, out_dir);
    if (command == "asymptotic") return cmd_asymptotic(root, setup, out_dir);
    if (command == "picard") return cmd_picard(root, setup, out_dir);
    if (command == "probe") return cmd_probe(root, setup, out_dir, seed);
    config_error("unknown command: " + command);
  } catch (const Error& e) {
    std::cerr << "parest: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::NotFound:
      case Errc::NoContraction:
      case Errc::MaxItersExceeded:
        return 3;
      case Errc::LinearSolveFailure:
        return 1;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "parest: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace parest::cli
