#include "parest/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace parest {

const char* variant_name(NonlocalVariant v) {
  switch (v) {
    case NonlocalVariant::Local: return "local";
    case NonlocalVariant::Distributional: return "distributional";
    case NonlocalVariant::IntegralSpace: return "integral_space";
    case NonlocalVariant::IntegralSpaceDistributional: return "integral_space_distributional";
    case NonlocalVariant::IntegralSpaceTime: return "integral_space_time";
    case NonlocalVariant::IntegralSpaceTimeDistributional:
      return "integral_space_time_distributional";
    case NonlocalVariant::Delay: return "delay";
    case NonlocalVariant::JumpKernel: return "jump_kernel";
  }
  return "unknown";
}

NonlocalVariant variant_from_name(const std::string& name) {
  for (NonlocalVariant v :
       {NonlocalVariant::Local, NonlocalVariant::Distributional, NonlocalVariant::IntegralSpace,
        NonlocalVariant::IntegralSpaceDistributional, NonlocalVariant::IntegralSpaceTime,
        NonlocalVariant::IntegralSpaceTimeDistributional, NonlocalVariant::Delay,
        NonlocalVariant::JumpKernel}) {
    if (name == variant_name(v)) return v;
  }
  throw Error(Errc::InvalidConfig, "unknown nonlocal variant: " + name);
}

namespace {

double trapezoid_weight(int i, int n_nodes) { return (i == 0 || i == n_nodes - 1) ? 0.5 : 1.0; }

/// u value at node index (0 at the boundary).
double node_value(const GridFunction& u, int node) {
  const int n = u.mesh().n_cells;
  return (node >= 1 && node <= n - 1) ? u[node - 1] : 0.0;
}

void require_history(const SpaceTimeSeries& history, double t) {
  if (history.frames.empty() ||
      static_cast<int>(history.frames.size()) != history.time_grid.n_nodes())
    throw Error(Errc::HistoryTooShort, "history frames do not fill the time grid");
  if (t > history.time_grid.T * (1.0 + 1e-12))
    throw Error(Errc::HistoryTooShort,
                "history covers [0, " + std::to_string(history.time_grid.T) + "], asked for t = " +
                    std::to_string(t));
}

double delay_time(const NonlocalSpec& spec, double t) {
  double s = spec.tau(t);
  if (t < spec.theta_delay) s = 0.0;
  return std::clamp(s, 0.0, t);
}

}  // namespace

void validate_nonlocal(const NonlocalSpec& spec, const Mesh1D& mesh, const TimeGrid& tg) {
  auto missing = [&](const char* what) {
    throw Error(Errc::InvariantViolation,
                std::string(variant_name(spec.variant)) + " spec misses its " + what);
  };
  auto check_finite = [&](double v, const char* what) {
    if (!std::isfinite(v))
      throw Error(Errc::InvariantViolation, std::string(what) + " sample is non-finite");
  };

  switch (spec.variant) {
    case NonlocalVariant::Local:
    case NonlocalVariant::Distributional: {
      if (!spec.beta_local) missing("beta(z, x, t) sampler");
      for (int j = 0; j <= tg.n_steps; ++j)
        for (int i = 0; i <= mesh.n_cells; ++i)
          check_finite(spec.beta_local(0.0, mesh.node(i), tg.node(j)), "beta(0, ., .)");
      break;
    }
    case NonlocalVariant::IntegralSpace:
    case NonlocalVariant::IntegralSpaceDistributional: {
      if (!spec.beta_space) missing("beta(z, x, t, y) sampler");
      for (int j = 0; j <= tg.n_steps; ++j)
        for (int i = 0; i <= mesh.n_cells; ++i)
          for (int yk = 0; yk <= mesh.n_cells; yk += std::max(1, mesh.n_cells / 8))
            check_finite(spec.beta_space(0.0, mesh.node(i), tg.node(j), mesh.node(yk)),
                         "beta(0, ., ., .)");
      break;
    }
    case NonlocalVariant::IntegralSpaceTime:
    case NonlocalVariant::IntegralSpaceTimeDistributional: {
      if (!spec.beta_spacetime) missing("beta(z, x, t, y, s) sampler");
      const int stride_x = std::max(1, mesh.n_cells / 8);
      const int stride_t = std::max(1, tg.n_steps / 8);
      for (int j = 0; j <= tg.n_steps; j += stride_t)
        for (int i = 0; i <= mesh.n_cells; i += stride_x)
          for (int yk = 0; yk <= mesh.n_cells; yk += stride_x)
            for (int sk = 0; sk <= j; sk += stride_t)
              check_finite(
                  spec.beta_spacetime(0.0, mesh.node(i), tg.node(j), mesh.node(yk), tg.node(sk)),
                  "beta(0, ., ., ., .)");
      break;
    }
    case NonlocalVariant::Delay: {
      if (!spec.tau) missing("delay map tau(t)");
      if (!spec.delay_beta_flux && !spec.delay_beta_plain) missing("beta / beta_hat sampler");
      double prev = 0.0;
      for (int j = 0; j <= tg.n_steps; ++j) {
        const double t = tg.node(j);
        const double s = spec.tau(t);
        check_finite(s, "tau");
        if (s < -1e-12 || s > t + 1e-12)
          throw Error(Errc::InvariantViolation,
                      "tau(t) must lie in [0, t]; tau(" + std::to_string(t) + ") = " +
                          std::to_string(s));
        if (t < spec.theta_delay && std::abs(s) > 1e-12)
          throw Error(Errc::InvariantViolation, "tau must vanish below the delay threshold");
        if (s < prev - 1e-12)
          throw Error(Errc::InvariantViolation, "tau must be nondecreasing");
        prev = std::max(prev, s);
      }
      break;
    }
    case NonlocalVariant::JumpKernel: {
      if (!spec.kernel_r) missing("kernel table r(x, z, t)");
      const double mass = kernel_sq_integral_max(spec, mesh, tg);
      if (!std::isfinite(mass))
        throw Error(Errc::InvariantViolation, "kernel square integral is not finite");
      break;
    }
  }
}

SourceFrame apply(const NonlocalSpec& spec, const SpaceTimeSeries& history, double t) {
  require_history(history, t);
  const Mesh1D& mesh = history.mesh();
  const double h = mesh.h();
  const int n_nodes = mesh.n_cells + 1;
  SourceFrame out(mesh);

  switch (spec.variant) {
    case NonlocalVariant::Local: {
      GridFunction u_t = history.at_time(t);
      for (int i = 0; i < out.plain.size(); ++i)
        out.plain[i] = spec.beta_local(u_t[i], u_t.x(i), t);
      break;
    }
    case NonlocalVariant::Distributional: {
      GridFunction u_t = history.at_time(t);
      for (int node = 0; node < n_nodes; ++node)
        out.flux[node] = spec.beta_local(node_value(u_t, node), mesh.node(node), t);
      break;
    }
    case NonlocalVariant::IntegralSpace:
    case NonlocalVariant::IntegralSpaceDistributional: {
      GridFunction u_t = history.at_time(t);
      auto integral_at = [&](double x) {
        double s = 0.0;
        for (int yk = 0; yk < n_nodes; ++yk)
          s += trapezoid_weight(yk, n_nodes) *
               spec.beta_space(node_value(u_t, yk), x, t, mesh.node(yk));
        return h * s;
      };
      if (spec.variant == NonlocalVariant::IntegralSpace) {
        for (int i = 0; i < out.plain.size(); ++i) out.plain[i] = integral_at(out.plain.x(i));
      } else {
        for (int node = 0; node < n_nodes; ++node) out.flux[node] = integral_at(mesh.node(node));
      }
      break;
    }
    case NonlocalVariant::IntegralSpaceTime:
    case NonlocalVariant::IntegralSpaceTimeDistributional: {
      const TimeGrid& tg = history.time_grid;
      const double dt = tg.dt();
      const int j_full = std::min(static_cast<int>(t / dt + 1e-9), tg.n_steps);
      const double t_rem = t - tg.node(j_full);
      GridFunction u_partial = t_rem > 1e-14 ? history.at_time(t) : GridFunction(mesh);

      auto integral_at = [&](double x) {
        auto space_integral = [&](const GridFunction& u_s, double s) {
          double acc = 0.0;
          for (int yk = 0; yk < n_nodes; ++yk)
            acc += trapezoid_weight(yk, n_nodes) *
                   spec.beta_spacetime(node_value(u_s, yk), x, t, mesh.node(yk), s);
          return h * acc;
        };
        double acc = 0.0;
        double prev = space_integral(history.frames[0], 0.0);
        for (int j = 1; j <= j_full; ++j) {
          const double cur = space_integral(history.frames[j], tg.node(j));
          acc += 0.5 * dt * (prev + cur);
          prev = cur;
        }
        if (t_rem > 1e-14)
          acc += 0.5 * t_rem * (prev + space_integral(u_partial, t));
        return acc;
      };
      if (spec.variant == NonlocalVariant::IntegralSpaceTime) {
        for (int i = 0; i < out.plain.size(); ++i) out.plain[i] = integral_at(out.plain.x(i));
      } else {
        for (int node = 0; node < n_nodes; ++node) out.flux[node] = integral_at(mesh.node(node));
      }
      break;
    }
    case NonlocalVariant::Delay: {
      const double s = delay_time(spec, t);
      GridFunction u_s = history.at_time(s);
      if (spec.delay_beta_flux)
        for (int node = 0; node < n_nodes; ++node)
          out.flux[node] = spec.delay_beta_flux(node_value(u_s, node), mesh.node(node), s);
      if (spec.delay_beta_plain)
        for (int i = 0; i < out.plain.size(); ++i)
          out.plain[i] = spec.delay_beta_plain(u_s[i], u_s.x(i), s);
      break;
    }
    case NonlocalVariant::JumpKernel: {
      GridFunction u_t = history.at_time(t);
      NodeField du = node_gradient(u_t);
      for (int i = 0; i < out.plain.size(); ++i) {
        const double x = out.plain.x(i);
        double s = 0.0;
        for (int zk = 0; zk < n_nodes; ++zk)
          s += trapezoid_weight(zk, n_nodes) * node_value(u_t, zk) *
               spec.kernel_r(x, mesh.node(zk), t);
        double v = h * s;
        if (spec.moment0) v -= spec.moment0(x, t) * u_t[i];
        if (spec.moment1) v -= spec.moment1(x, t) * du[i + 1];
        out.plain[i] = v;
      }
      break;
    }
  }
  return out;
}

SourceFrame apply_shifted(const NonlocalSpec& spec, double K, const SpaceTimeSeries& history,
                          double t) {
  if (K == 0.0) return apply(spec, history, t);
  if (K < 0.0) throw Error(Errc::InvalidConfig, "shift requires K >= 0");
  if (K * history.time_grid.T > 700.0)
    throw Error(Errc::Overflow, "exp(K*T) not representable for K*T = " +
                                    std::to_string(K * history.time_grid.T));
  SpaceTimeSeries scaled = history;
  for (int j = 0; j < scaled.time_grid.n_nodes(); ++j)
    scaled.frames[j] *= std::exp(K * scaled.time_grid.node(j));
  SourceFrame out = apply(spec, scaled, t);
  const double damp = std::exp(-K * t);
  out.flux *= damp;
  out.plain *= damp;
  return out;
}

std::vector<SourceFrame> apply_series(const NonlocalSpec& spec, double K,
                                      const SpaceTimeSeries& history) {
  require_history(history, history.time_grid.T);
  if (K < 0.0) throw Error(Errc::InvalidConfig, "shift requires K >= 0");
  if (K * history.time_grid.T > 700.0)
    throw Error(Errc::Overflow, "exp(K*T) not representable for K*T = " +
                                    std::to_string(K * history.time_grid.T));
  SpaceTimeSeries scaled = history;
  if (K != 0.0)
    for (int j = 0; j < scaled.time_grid.n_nodes(); ++j)
      scaled.frames[j] *= std::exp(K * scaled.time_grid.node(j));

  std::vector<SourceFrame> frames;
  frames.reserve(history.time_grid.n_nodes());
  for (int j = 0; j < history.time_grid.n_nodes(); ++j) {
    const double t = history.time_grid.node(j);
    SourceFrame f = apply(spec, scaled, t);
    if (K != 0.0) {
      const double damp = std::exp(-K * t);
      f.flux *= damp;
      f.plain *= damp;
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

SpaceTimeSeries random_series(const Mesh1D& mesh, const TimeGrid& tg, double amplitude,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr int kModes = 4;
  const double L = mesh.b_end - mesh.a;

  struct Mode {
    double amp, offset, envelope, omega, phase;
  };
  std::vector<Mode> modes(kModes);
  for (int k = 0; k < kModes; ++k) {
    modes[k].amp = amplitude * gauss(rng) / (k + 1);
    modes[k].offset = 1.0;
    modes[k].envelope = unif(rng);
    modes[k].omega = 2.0 * unif(rng) / std::max(tg.T, 1e-9);
    modes[k].phase = 6.283185307179586 * unif(rng);
  }

  SpaceTimeSeries series;
  series.time_grid = tg;
  series.frames.reserve(tg.n_nodes());
  for (int j = 0; j < tg.n_nodes(); ++j) {
    const double t = tg.node(j);
    GridFunction frame(mesh);
    for (int i = 0; i < frame.size(); ++i) {
      const double xi = (frame.x(i) - mesh.a) / L;
      double v = 0.0;
      for (int k = 0; k < kModes; ++k) {
        const Mode& m = modes[k];
        v += m.amp * std::sin((k + 1) * 3.141592653589793 * xi) *
             (m.offset + m.envelope * std::cos(m.omega * t + m.phase));
      }
      frame[i] = v;
    }
    series.frames.push_back(std::move(frame));
  }
  return series;
}

namespace {

double series_x0_norm(const std::vector<GridFunction>& frames, const TimeGrid& tg) {
  std::vector<double> g(frames.size(), 0.0);
  for (size_t j = 0; j < frames.size(); ++j) {
    const double n = norm_h0(frames[j]);
    g[j] = n * n;
  }
  return std::sqrt(time_integral(g, tg, 0.0));
}

double series_xminus1_norm(const std::vector<GridFunction>& frames, const TimeGrid& tg) {
  std::vector<double> g(frames.size(), 0.0);
  for (size_t j = 0; j < frames.size(); ++j) {
    const double n = norm_hminus1(frames[j]);
    g[j] = n * n;
  }
  return std::sqrt(time_integral(g, tg, 0.0));
}

}  // namespace

ProbeResult lipschitz_probe(const NonlocalSpec& spec, double K, const Mesh1D& mesh,
                            const TimeGrid& tg, int trials, double amplitude,
                            std::uint64_t seed) {
  if (trials < 1) throw Error(Errc::InvalidConfig, "lipschitz_probe requires trials >= 1");
  validate_nonlocal(spec, mesh, tg);
  std::mt19937_64 rng(seed);

  ProbeResult res;
  res.bound = variant_bound(spec, mesh, tg);
  for (int trial = 0; trial < trials; ++trial) {
    SpaceTimeSeries u1 = random_series(mesh, tg, amplitude, rng);
    SpaceTimeSeries u2 = random_series(mesh, tg, amplitude, rng);

    std::vector<GridFunction> diff_frames;
    diff_frames.reserve(tg.n_nodes());
    for (int j = 0; j < tg.n_nodes(); ++j) diff_frames.push_back(u1.frames[j] - u2.frames[j]);
    const double denom = series_x0_norm(diff_frames, tg);
    if (denom < 1e-14) continue;  // coincident draws contribute nothing

    std::vector<SourceFrame> b1 = apply_series(spec, K, u1);
    std::vector<SourceFrame> b2 = apply_series(spec, K, u2);
    std::vector<GridFunction> db;
    db.reserve(tg.n_nodes());
    for (int j = 0; j < tg.n_nodes(); ++j) {
      SourceFrame f(b1[j].flux - b2[j].flux, b1[j].plain - b2[j].plain);
      db.push_back(f.assembled());
    }
    res.ratio_xminus1 = std::max(res.ratio_xminus1, series_xminus1_norm(db, tg) / denom);
    res.ratio_x0 = std::max(res.ratio_x0, series_x0_norm(db, tg) / denom);
    ++res.pairs_used;
  }
  return res;
}

double kernel_sq_integral_max(const NonlocalSpec& spec, const Mesh1D& mesh, const TimeGrid& tg) {
  if (!spec.kernel_r) throw Error(Errc::InvariantViolation, "jump spec misses its kernel table");
  const int n_nodes = mesh.n_cells + 1;
  const double h = mesh.h();
  double worst = 0.0;
  for (int j = 0; j <= tg.n_steps; ++j) {
    const double t = tg.node(j);
    double acc = 0.0;
    for (int xi = 0; xi < n_nodes; ++xi)
      for (int zi = 0; zi < n_nodes; ++zi) {
        const double r = spec.kernel_r(mesh.node(xi), mesh.node(zi), t);
        acc += trapezoid_weight(xi, n_nodes) * trapezoid_weight(zi, n_nodes) * r * r;
      }
    worst = std::max(worst, h * h * acc);
  }
  return worst;
}

double variant_bound(const NonlocalSpec& spec, const Mesh1D& mesh, const TimeGrid& tg) {
  const double length = mesh.b_end - mesh.a;
  switch (spec.variant) {
    case NonlocalVariant::Local:
    case NonlocalVariant::Distributional:
      return spec.C_L;
    case NonlocalVariant::IntegralSpace:
    case NonlocalVariant::IntegralSpaceDistributional:
      return spec.C_L * length;
    case NonlocalVariant::IntegralSpaceTime:
    case NonlocalVariant::IntegralSpaceTimeDistributional:
      return spec.C_L * length * tg.T;
    case NonlocalVariant::Delay: {
      // delta* = ess sup of the inverse delay slope, estimated on the grid.
      double delta_star = 0.0;
      bool advancing = false;
      for (int j = 0; j < tg.n_steps; ++j) {
        if (tg.node(j) < spec.theta_delay) continue;
        const double dtau = delay_time(spec, tg.node(j + 1)) - delay_time(spec, tg.node(j));
        if (dtau > 1e-14) {
          delta_star = std::max(delta_star, tg.dt() / dtau);
          advancing = true;
        }
      }
      if (!advancing) return 0.0;  // tau never advances: B depends on u(.,0) = 0 only
      return std::sqrt(2.0 * delta_star) * spec.C_L;
    }
    case NonlocalVariant::JumpKernel: {
      double bound = std::sqrt(kernel_sq_integral_max(spec, mesh, tg));
      if (spec.moment0) {
        double sup0 = 0.0;
        for (int j = 0; j <= tg.n_steps; ++j)
          for (int i = 0; i <= mesh.n_cells; ++i)
            sup0 = std::max(sup0, std::abs(spec.moment0(mesh.node(i), tg.node(j))));
        bound += sup0;
      }
      if (spec.moment1)
        return std::numeric_limits<double>::infinity();  // gradient term has no X^0 bound
      return bound;
    }
  }
  return spec.C_L;
}

// --- Tabulated data ---------------------------------------------------------

namespace {

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in.is_open()) throw Error(Errc::InvalidConfig, "cannot open table file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::InvalidConfig, "empty table file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> header;
    while (std::getline(ss, field, ',')) header.push_back(field);
    if (header != expected_header) {
      std::string want;
      for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
      throw Error(Errc::InvalidConfig, "table " + path + " must have header " + want);
    }
  }
  std::vector<std::vector<double>> rows;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw Error(Errc::InvalidConfig,
                    "table " + path + " line " + std::to_string(lineno) + ": bad number");
      }
    }
    if (row.size() != expected_header.size())
      throw Error(Errc::InvalidConfig,
                  "table " + path + " line " + std::to_string(lineno) + ": wrong column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::InvalidConfig, "table " + path + " has no data rows");
  return rows;
}

int locate(const std::vector<double>& grid, double v, double& w) {
  if (grid.size() == 1) {
    w = 0.0;
    return 0;
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), v);
  int hi = static_cast<int>(std::clamp<std::ptrdiff_t>(
      it - grid.begin(), 1, static_cast<std::ptrdiff_t>(grid.size()) - 1));
  w = std::clamp((v - grid[hi - 1]) / (grid[hi] - grid[hi - 1]), 0.0, 1.0);
  return hi - 1;
}

}  // namespace

std::function<double(double)> load_delay_table(const std::string& path) {
  auto rows = read_csv(path, {"t", "tau"});
  auto ts = std::make_shared<std::vector<double>>();
  auto taus = std::make_shared<std::vector<double>>();
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  for (const auto& r : rows) {
    ts->push_back(r[0]);
    taus->push_back(r[1]);
  }
  return [ts, taus](double t) {
    double w;
    int i = locate(*ts, t, w);
    return (1.0 - w) * (*taus)[i] + w * (*taus)[i + 1 < static_cast<int>(taus->size()) ? i + 1 : i];
  };
}

std::function<double(double, double, double)> load_kernel_table(const std::string& path) {
  auto rows = read_csv(path, {"x", "z", "t", "r"});
  struct Grid3 {
    std::vector<double> xs, zs, ts;
    std::vector<double> vals;  // [k_t][i_x][j_z] flattened
    double at(int it, int ix, int iz) const {
      return vals[(static_cast<size_t>(it) * xs.size() + ix) * zs.size() + iz];
    }
  };
  auto g = std::make_shared<Grid3>();
  for (const auto& r : rows) {
    g->xs.push_back(r[0]);
    g->zs.push_back(r[1]);
    g->ts.push_back(r[2]);
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(g->xs);
  uniq(g->zs);
  uniq(g->ts);
  if (rows.size() != g->xs.size() * g->zs.size() * g->ts.size())
    throw Error(Errc::InvalidConfig, "kernel table " + path + " is not a complete x-z-t grid");
  g->vals.assign(rows.size(), 0.0);
  auto index_of = [](const std::vector<double>& grid, double v) {
    return static_cast<size_t>(std::lower_bound(grid.begin(), grid.end(), v) - grid.begin());
  };
  for (const auto& r : rows) {
    size_t ix = index_of(g->xs, r[0]);
    size_t iz = index_of(g->zs, r[1]);
    size_t it = index_of(g->ts, r[2]);
    g->vals[(it * g->xs.size() + ix) * g->zs.size() + iz] = r[3];
  }
  return [g](double x, double z, double t) {
    double wx, wz, wt;
    const int ix = locate(g->xs, x, wx);
    const int iz = locate(g->zs, z, wz);
    const int it = locate(g->ts, t, wt);
    const int ix1 = std::min<int>(ix + 1, static_cast<int>(g->xs.size()) - 1);
    const int iz1 = std::min<int>(iz + 1, static_cast<int>(g->zs.size()) - 1);
    const int it1 = std::min<int>(it + 1, static_cast<int>(g->ts.size()) - 1);
    auto plane = [&](int k) {
      const double lo = (1.0 - wz) * g->at(k, ix, iz) + wz * g->at(k, ix, iz1);
      const double hi = (1.0 - wz) * g->at(k, ix1, iz) + wz * g->at(k, ix1, iz1);
      return (1.0 - wx) * lo + wx * hi;
    };
    return (1.0 - wt) * plane(it) + wt * plane(it1);
  };
}

}  // namespace parest
