#include "parest/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

namespace parest {

CoefficientSet CoefficientSet::constants(double b0, double f0, double lambda0, double delta,
                                         double sup_bound) {
  CoefficientSet c;
  c.b = [b0](double, double) { return b0; };
  c.f = [f0](double, double) { return f0; };
  c.lambda = [lambda0](double, double) { return lambda0; };
  c.delta = delta;
  c.sup_bound = sup_bound;
  return c;
}

CoefficientSet CoefficientSet::heat() { return constants(1.0, 0.0, 0.0, 1.0, 1.0); }

SourceTerm SourceTerm::zero() {
  SourceTerm s;
  s.F = [](double, double) { return 0.0; };
  s.F0 = [](double, double) { return 0.0; };
  return s;
}

ParamPack param_pack(const CoefficientSet& coeffs, const Mesh1D& mesh, const TimeGrid& tg) {
  return {tg.T, 1, mesh.a, mesh.b_end, coeffs.delta, coeffs.sup_bound};
}

ValidationReport validate(const CoefficientSet& coeffs, const Mesh1D& mesh, const TimeGrid& tg) {
  ValidationReport report;
  report.min_b = std::numeric_limits<double>::infinity();
  report.max_sum = 0.0;

  std::vector<double> probes;
  probes.reserve(2 * mesh.n_cells + 1);
  for (int i = 0; i <= mesh.n_cells; ++i) probes.push_back(mesh.node(i));
  for (int c = 0; c < mesh.n_cells; ++c) probes.push_back(mesh.midpoint(c));

  for (int j = 0; j <= tg.n_steps; ++j) {
    const double t = tg.node(j);
    for (double x : probes) {
      const double bv = coeffs.b(x, t);
      const double fv = coeffs.f(x, t);
      const double lv = coeffs.lambda(x, t);
      if (!std::isfinite(bv) || !std::isfinite(fv) || !std::isfinite(lv)) {
        report.pass = false;
        report.issue = {Errc::NonFiniteSample, x, t, "coefficient sample is non-finite"};
        return report;
      }
      const double sum = std::abs(bv) + std::abs(fv) + std::abs(lv);
      report.min_b = std::min(report.min_b, bv);
      report.max_sum = std::max(report.max_sum, sum);
      if (bv < coeffs.delta && !report.issue) {
        report.pass = false;
        report.issue = {Errc::NonCoercive, x, t,
                        "b = " + std::to_string(bv) + " < delta = " + std::to_string(coeffs.delta)};
      }
      if (sum > coeffs.sup_bound && !report.issue) {
        report.pass = false;
        report.issue = {Errc::UnboundedCoefficient, x, t,
                        "|b|+|f|+|lambda| = " + std::to_string(sum) + " exceeds sup_bound"};
      }
    }
  }
  return report;
}

NodeField sample_nodes(const SpaceTimeFn& f, const Mesh1D& mesh, double t) {
  NodeField out(mesh);
  for (int i = 0; i < out.size(); ++i) {
    out[i] = f(out.x(i), t);
    if (!std::isfinite(out[i]))
      throw Error(Errc::NonFiniteSample,
                  "sampler non-finite at (x,t)=(" + std::to_string(out.x(i)) + "," +
                      std::to_string(t) + ")");
  }
  return out;
}

GridFunction sample_interior(const SpaceTimeFn& f, const Mesh1D& mesh, double t) {
  GridFunction out(mesh);
  for (int i = 0; i < out.size(); ++i) {
    out[i] = f(out.x(i), t);
    if (!std::isfinite(out[i]))
      throw Error(Errc::NonFiniteSample,
                  "sampler non-finite at (x,t)=(" + std::to_string(out.x(i)) + "," +
                      std::to_string(t) + ")");
  }
  return out;
}

std::pair<NodeField, NodeField> sample_source(const SourceTerm& src, const Mesh1D& mesh,
                                              double t) {
  return {sample_nodes(src.F, mesh, t), sample_nodes(src.F0, mesh, t)};
}

// --- Tabulated fields -------------------------------------------------------

namespace {

struct Table2D {
  std::vector<double> xs;  // sorted unique
  std::vector<double> ts;  // sorted unique
  // value[k][j*nx + i] for column k, time row j, space column i
  std::vector<std::vector<double>> columns;

  double eval(int col, double x, double t) const {
    auto locate = [](const std::vector<double>& grid, double v, int& lo, double& w) {
      if (grid.size() == 1) {
        lo = 0;
        w = 0.0;
        return;
      }
      auto it = std::upper_bound(grid.begin(), grid.end(), v);
      int hi = static_cast<int>(std::clamp<std::ptrdiff_t>(it - grid.begin(), 1,
                                                           static_cast<std::ptrdiff_t>(grid.size()) - 1));
      lo = hi - 1;
      w = std::clamp((v - grid[lo]) / (grid[hi] - grid[lo]), 0.0, 1.0);
    };
    int i, j;
    double wx, wt;
    locate(xs, x, i, wx);
    locate(ts, t, j, wt);
    const int nx = static_cast<int>(xs.size());
    const auto& v = columns[col];
    auto cell = [&](int jj, int ii) { return v[jj * nx + ii]; };
    const int i1 = std::min<int>(i + 1, nx - 1);
    const int j1 = std::min<int>(j + 1, static_cast<int>(ts.size()) - 1);
    const double lo = (1.0 - wx) * cell(j, i) + wx * cell(j, i1);
    const double hi = (1.0 - wx) * cell(j1, i) + wx * cell(j1, i1);
    return (1.0 - wt) * lo + wt * hi;
  }
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

Table2D load_table(const std::string& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in.is_open()) throw Error(Errc::InvalidConfig, "cannot open table file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::InvalidConfig, "empty table file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header != expected_header) {
    std::string want;
    for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
    throw Error(Errc::InvalidConfig, "table " + path + " must have header " + want);
  }

  const size_t ncols = expected_header.size() - 2;
  struct Row {
    double x, t;
    std::vector<double> vals;
  };
  std::vector<Row> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != expected_header.size())
      throw Error(Errc::InvalidConfig,
                  "table " + path + " line " + std::to_string(lineno) + ": wrong column count");
    Row r;
    try {
      r.x = std::stod(fields[0]);
      r.t = std::stod(fields[1]);
      for (size_t k = 0; k < ncols; ++k) r.vals.push_back(std::stod(fields[2 + k]));
    } catch (const std::exception&) {
      throw Error(Errc::InvalidConfig,
                  "table " + path + " line " + std::to_string(lineno) + ": bad number");
    }
    for (double v : r.vals)
      if (!std::isfinite(v))
        throw Error(Errc::NonFiniteSample, "table " + path + " holds a non-finite value");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error(Errc::InvalidConfig, "table " + path + " has no data rows");

  Table2D tb;
  for (const auto& r : rows) {
    tb.xs.push_back(r.x);
    tb.ts.push_back(r.t);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(tb.xs);
  uniq(tb.ts);
  const size_t nx = tb.xs.size(), nt = tb.ts.size();
  if (rows.size() != nx * nt)
    throw Error(Errc::InvalidConfig,
                "table " + path + " is not a complete x-t grid (" + std::to_string(rows.size()) +
                    " rows for " + std::to_string(nx) + "x" + std::to_string(nt) + " nodes)");
  tb.columns.assign(ncols, std::vector<double>(nx * nt, 0.0));
  auto index_of = [](const std::vector<double>& grid, double v) {
    auto it = std::lower_bound(grid.begin(), grid.end(), v);
    return static_cast<size_t>(it - grid.begin());
  };
  for (const auto& r : rows) {
    size_t i = index_of(tb.xs, r.x);
    size_t j = index_of(tb.ts, r.t);
    for (size_t k = 0; k < ncols; ++k) tb.columns[k][j * nx + i] = r.vals[k];
  }
  return tb;
}

SpaceTimeFn column_sampler(std::shared_ptr<Table2D> tb, int col) {
  return [tb, col](double x, double t) { return tb->eval(col, x, t); };
}

}  // namespace

CoefficientSet load_coefficient_table(const std::string& path, double delta, double sup_bound) {
  auto tb = std::make_shared<Table2D>(load_table(path, {"x", "t", "b", "f", "lambda"}));
  CoefficientSet c;
  c.b = column_sampler(tb, 0);
  c.f = column_sampler(tb, 1);
  c.lambda = column_sampler(tb, 2);
  c.delta = delta;
  c.sup_bound = sup_bound;
  return c;
}

SourceTerm load_source_table(const std::string& path) {
  auto tb = std::make_shared<Table2D>(load_table(path, {"x", "t", "F", "F0"}));
  SourceTerm s;
  s.F = column_sampler(tb, 0);
  s.F0 = column_sampler(tb, 1);
  return s;
}

}  // namespace parest
