#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "parest/picard.hpp"
#include "parest/sharpness.hpp"

namespace py = pybind11;
using namespace parest;

namespace {

GridFunction grid_from_array(const Mesh1D& mesh, py::array_t<double, py::array::c_style> arr) {
  if (arr.ndim() != 1 || arr.shape(0) != mesh.interior_count())
    throw Error(Errc::DimensionMismatch, "expected a 1-D array of interior node values");
  std::vector<double> v(arr.data(), arr.data() + arr.shape(0));
  return GridFunction(mesh, std::move(v));
}

SpaceTimeSeries series_from_array(const Mesh1D& mesh, const TimeGrid& tg,
                                  py::array_t<double, py::array::c_style> arr) {
  if (arr.ndim() != 2 || arr.shape(0) != tg.n_nodes() || arr.shape(1) != mesh.interior_count())
    throw Error(Errc::DimensionMismatch,
                "expected a (n_steps+1, n_cells-1) array of frame values");
  SpaceTimeSeries s;
  s.time_grid = tg;
  auto view = arr.unchecked<2>();
  for (int j = 0; j < tg.n_nodes(); ++j) {
    GridFunction f(mesh);
    for (int i = 0; i < f.size(); ++i) f[i] = view(j, i);
    s.frames.push_back(std::move(f));
  }
  return s;
}

py::array_t<double> series_to_array(const SpaceTimeSeries& s) {
  const int nt = s.time_grid.n_nodes();
  const int nx = s.frames.front().size();
  py::array_t<double> out({nt, nx});
  auto view = out.mutable_unchecked<2>();
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) view(j, i) = s.frames[j][i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parabolic energy-estimate toolkit (compiled core)";

  py::register_exception<Error>(m, "ParestError");

  py::class_<Mesh1D>(m, "Mesh1D")
      .def(py::init<double, double, int>(), py::arg("a"), py::arg("b_end"), py::arg("n_cells"))
      .def_readonly("a", &Mesh1D::a)
      .def_readonly("b_end", &Mesh1D::b_end)
      .def_readonly("n_cells", &Mesh1D::n_cells)
      .def_property_readonly("h", &Mesh1D::h)
      .def("node", &Mesh1D::node)
      .def("interior_count", &Mesh1D::interior_count);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, int>(), py::arg("T"), py::arg("n_steps"))
      .def_readonly("T", &TimeGrid::T)
      .def_readonly("n_steps", &TimeGrid::n_steps)
      .def_property_readonly("dt", &TimeGrid::dt)
      .def("node", &TimeGrid::node);

  py::class_<ThetaSchemeConfig>(m, "ThetaSchemeConfig")
      .def(py::init([](double theta, double K) {
             return ThetaSchemeConfig{theta, K};
           }),
           py::arg("theta") = 0.5, py::arg("K") = 0.0)
      .def_readwrite("theta", &ThetaSchemeConfig::theta)
      .def_readwrite("K", &ThetaSchemeConfig::K);

  py::class_<CoefficientSet>(m, "CoefficientSet")
      .def(py::init([](SpaceTimeFn b, SpaceTimeFn f, SpaceTimeFn lam, double delta,
                       double sup_bound) {
             CoefficientSet c;
             c.b = std::move(b);
             c.f = std::move(f);
             c.lambda = std::move(lam);
             c.delta = delta;
             c.sup_bound = sup_bound;
             return c;
           }),
           py::arg("b"), py::arg("f"), py::arg("lam"), py::arg("delta"), py::arg("sup_bound"))
      .def_static("constants", &CoefficientSet::constants, py::arg("b"), py::arg("f"),
                  py::arg("lam"), py::arg("delta"), py::arg("sup_bound"))
      .def_static("heat", &CoefficientSet::heat)
      .def_readwrite("delta", &CoefficientSet::delta)
      .def_readwrite("sup_bound", &CoefficientSet::sup_bound);

  py::class_<ParamPack>(m, "ParamPack")
      .def_readonly("T", &ParamPack::T)
      .def_readonly("n", &ParamPack::n)
      .def_readonly("domain_a", &ParamPack::domain_a)
      .def_readonly("domain_b", &ParamPack::domain_b)
      .def_readonly("delta", &ParamPack::delta)
      .def_readonly("sup_bound", &ParamPack::sup_bound);
  m.def("param_pack", &param_pack, py::arg("coeffs"), py::arg("mesh"), py::arg("tg"));

  py::class_<SourceTerm>(m, "SourceTerm")
      .def(py::init([](SpaceTimeFn F, SpaceTimeFn F0) {
             SourceTerm s;
             s.F = std::move(F);
             s.F0 = std::move(F0);
             return s;
           }),
           py::arg("F"), py::arg("F0"))
      .def_static("zero", &SourceTerm::zero);

  m.def("norm_h0",
        [](const Mesh1D& mesh, py::array_t<double, py::array::c_style> u) {
          return norm_h0(grid_from_array(mesh, u));
        },
        py::arg("mesh"), py::arg("u"));
  m.def("norm_h1",
        [](const Mesh1D& mesh, py::array_t<double, py::array::c_style> u) {
          return norm_h1(grid_from_array(mesh, u));
        },
        py::arg("mesh"), py::arg("u"));
  m.def("norm_hminus1",
        [](const Mesh1D& mesh, py::array_t<double, py::array::c_style> u) {
          return norm_hminus1(grid_from_array(mesh, u));
        },
        py::arg("mesh"), py::arg("u"));
  m.def("time_integral",
        [](py::array_t<double, py::array::c_style> g, const TimeGrid& tg, double K) {
          std::vector<double> v(g.data(), g.data() + g.shape(0));
          return time_integral(v, tg, K);
        },
        py::arg("g"), py::arg("tg"), py::arg("K") = 0.0);

  m.def("solve_ibvp",
        [](const CoefficientSet& coeffs, const SourceTerm& src, const Mesh1D& mesh,
           const TimeGrid& tg, const ThetaSchemeConfig& cfg) {
          return series_to_array(solve_ibvp(coeffs, src, mesh, tg, cfg));
        },
        py::arg("coeffs"), py::arg("src"), py::arg("mesh"), py::arg("tg"),
        py::arg("cfg") = ThetaSchemeConfig{});

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("K", &EstimateReport::K)
      .def_readonly("M", &EstimateReport::M)
      .def_readonly("epsilon", &EstimateReport::epsilon)
      .def_readonly("t", &EstimateReport::t)
      .def_readonly("lhs", &EstimateReport::lhs)
      .def_readonly("rhs_F", &EstimateReport::rhs_F)
      .def_readonly("rhs_F0", &EstimateReport::rhs_F0)
      .def_readonly("ratio", &EstimateReport::ratio)
      .def_readonly("max_ratio", &EstimateReport::max_ratio)
      .def_readonly("passed", &EstimateReport::pass);

  m.def("check_inequality",
        [](py::array_t<double, py::array::c_style> u, const Mesh1D& mesh, const TimeGrid& tg,
           const SourceTerm& src, const CoefficientSet& coeffs, double K, double M,
           double epsilon) {
          return check_inequality(series_from_array(mesh, tg, u), src, coeffs, K, M, epsilon);
        },
        py::arg("u"), py::arg("mesh"), py::arg("tg"), py::arg("src"), py::arg("coeffs"),
        py::arg("K"), py::arg("M"), py::arg("epsilon"));

  py::class_<KSearchResult>(m, "KSearchResult")
      .def_readonly("found", &KSearchResult::found)
      .def_readonly("K", &KSearchResult::K)
      .def_readonly("tested", &KSearchResult::tested);

  m.def("search_K", &search_K, py::arg("coeffs"), py::arg("family"), py::arg("mesh"),
        py::arg("tg"), py::arg("theta") = 0.5, py::arg("M") = 1.0, py::arg("epsilon") = 0.05,
        py::arg("K_max") = 2048.0);

  py::class_<RatioPoint>(m, "RatioPoint")
      .def_readonly("t", &RatioPoint::t)
      .def_readonly("ratio", &RatioPoint::ratio)
      .def_readonly("trusted", &RatioPoint::trusted)
      .def_readonly("running_mean_dev", &RatioPoint::running_mean_dev);

  m.def("initial_time_ratio",
        [](py::array_t<double, py::array::c_style> u, const Mesh1D& mesh, const TimeGrid& tg,
           const SourceTerm& src, const CoefficientSet& coeffs, const std::string& kind) {
          SourceKind k = kind == "h0" ? SourceKind::H0Source : SourceKind::HminusSource;
          return initial_time_ratio(series_from_array(mesh, tg, u), src, coeffs, k);
        },
        py::arg("u"), py::arg("mesh"), py::arg("tg"), py::arg("src"), py::arg("coeffs"),
        py::arg("kind") = "hminus1");

  py::class_<SharpCase>(m, "SharpCase")
      .def(py::init([](int m_, double K, double T) {
             return SharpCase{m_, K, T};
           }),
           py::arg("m"), py::arg("K") = 0.0, py::arg("T") = 1.0)
      .def_readwrite("m", &SharpCase::m)
      .def_readwrite("K", &SharpCase::K)
      .def_readwrite("T", &SharpCase::T)
      .def_property_readonly("gamma", &SharpCase::gamma);

  m.def("closed_form_ratio", &closed_form_ratio, py::arg("case"));
  m.def("make_case", [](const SharpCase& c) {
    SharpOracle o = make_case(c);
    return py::make_tuple(o.source, py::cpp_function(o.exact));
  });

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("m", &SweepRow::m)
      .def_readonly("K", &SweepRow::K)
      .def_readonly("T", &SweepRow::T)
      .def_readonly("gamma", &SweepRow::gamma)
      .def_readonly("ratio_numeric", &SweepRow::ratio_numeric)
      .def_readonly("ratio_closed", &SweepRow::ratio_closed)
      .def_readonly("discrepancy", &SweepRow::discrepancy);

  m.def("sharpness_sweep", &sweep, py::arg("m_list"), py::arg("K"), py::arg("T"),
        py::arg("n_cells"), py::arg("n_steps"));

  py::class_<NonlocalSpec>(m, "NonlocalSpec")
      .def(py::init([](const std::string& variant) {
             NonlocalSpec s;
             s.variant = variant_from_name(variant);
             return s;
           }),
           py::arg("variant"))
      .def_property(
          "variant", [](const NonlocalSpec& s) { return std::string(variant_name(s.variant)); },
          [](NonlocalSpec& s, const std::string& v) { s.variant = variant_from_name(v); })
      .def_readwrite("beta_local", &NonlocalSpec::beta_local)
      .def_readwrite("beta_space", &NonlocalSpec::beta_space)
      .def_readwrite("beta_spacetime", &NonlocalSpec::beta_spacetime)
      .def_readwrite("delay_beta_flux", &NonlocalSpec::delay_beta_flux)
      .def_readwrite("delay_beta_plain", &NonlocalSpec::delay_beta_plain)
      .def_readwrite("tau", &NonlocalSpec::tau)
      .def_readwrite("theta_delay", &NonlocalSpec::theta_delay)
      .def_readwrite("kernel_r", &NonlocalSpec::kernel_r)
      .def_readwrite("moment0", &NonlocalSpec::moment0)
      .def_readwrite("moment1", &NonlocalSpec::moment1)
      .def_readwrite("C_L", &NonlocalSpec::C_L);

  py::class_<ProbeResult>(m, "ProbeResult")
      .def_readonly("ratio_xminus1", &ProbeResult::ratio_xminus1)
      .def_readonly("ratio_x0", &ProbeResult::ratio_x0)
      .def_readonly("bound", &ProbeResult::bound)
      .def_readonly("pairs_used", &ProbeResult::pairs_used);

  m.def("lipschitz_probe", &lipschitz_probe, py::arg("spec"), py::arg("K"), py::arg("mesh"),
        py::arg("tg"), py::arg("trials") = 200, py::arg("amplitude") = 1.0, py::arg("seed") = 0);

  py::class_<PicardTrace>(m, "PicardTrace")
      .def_readonly("residuals", &PicardTrace::residuals)
      .def_readonly("quotients", &PicardTrace::quotients)
      .def_readonly("K_used", &PicardTrace::K_used)
      .def_readonly("converged", &PicardTrace::converged)
      .def_readonly("iterations", &PicardTrace::iterations)
      .def_readonly("K_final", &PicardTrace::K_final);

  py::class_<PicardResult>(m, "PicardResult")
      .def_property_readonly("u", [](const PicardResult& r) { return series_to_array(r.u); })
      .def_readonly("trace", &PicardResult::trace);

  m.def("solve_nonlinear",
        [](const CoefficientSet& coeffs, const NonlocalSpec& spec, const SourceTerm& phi,
           const Mesh1D& mesh, const TimeGrid& tg, double K, double M, int max_iters, double tol,
           const std::string& norm_mode, double theta, double K_max) {
          PicardConfig cfg;
          cfg.K = K;
          cfg.M = M;
          cfg.max_iters = max_iters;
          cfg.tol = tol;
          cfg.norm_mode = norm_mode == "x0" ? PicardNormMode::X0 : PicardNormMode::Xminus1;
          cfg.theta = theta;
          cfg.K_max = K_max;
          return solve_nonlinear(coeffs, spec, phi, mesh, tg, cfg);
        },
        py::arg("coeffs"), py::arg("spec"), py::arg("phi"), py::arg("mesh"), py::arg("tg"),
        py::arg("K") = 0.0, py::arg("M") = 1.0, py::arg("max_iters") = 50,
        py::arg("tol") = 1e-10, py::arg("norm_mode") = "xminus1", py::arg("theta") = 0.5,
        py::arg("K_max") = 2048.0);

  m.def("verify_nonlocal_estimate",
        [](py::array_t<double, py::array::c_style> u, const Mesh1D& mesh, const TimeGrid& tg,
           const NonlocalSpec& spec, const SourceTerm& phi, const CoefficientSet& coeffs,
           double M, double epsilon, double theta, double K_max) {
          return verify_nonlocal_estimate(series_from_array(mesh, tg, u), spec, phi, coeffs, M,
                                          epsilon, theta, K_max);
        },
        py::arg("u"), py::arg("mesh"), py::arg("tg"), py::arg("spec"), py::arg("phi"),
        py::arg("coeffs"), py::arg("M") = 1.0, py::arg("epsilon") = 0.05, py::arg("theta") = 0.5,
        py::arg("K_max") = 2048.0);
}
