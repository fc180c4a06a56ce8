#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfss/adaptive.hpp"
#include "mfss/errors.hpp"
#include "mfss/oracle.hpp"
#include "mfss/simsmooth.hpp"
#include "mfss/synth.hpp"

namespace py = pybind11;
using namespace mfss;

namespace {

AggregationScheme scheme_from(const std::optional<std::vector<double>>& weights) {
  return weights ? AggregationScheme::custom(*weights) : AggregationScheme::intra_quarterly_average();
}

InitOptions init_from(const std::string& mode, double kappa) {
  if (mode == "stationary") return {InitMode::Stationary, kappa};
  if (mode == "diffuse") return {InitMode::DiffuseProxy, kappa};
  throw ConfigError("init mode must be 'stationary' or 'diffuse', got '" + mode + "'");
}

// Draws stacked into a (count, T, n) array.
py::array_t<double> stack(const std::vector<LatentDraw>& draws, Index T, Index n) {
  py::array_t<double> out({static_cast<py::ssize_t>(draws.size()), static_cast<py::ssize_t>(T),
                           static_cast<py::ssize_t>(n)});
  auto v = out.mutable_unchecked<3>();
  for (std::size_t d = 0; d < draws.size(); ++d)
    for (Index r = 0; r < T; ++r)
      for (Index c = 0; c < n; ++c) v(static_cast<py::ssize_t>(d), r, c) = draws[d].X(r, c);
  return out;
}

class Model {
 public:
  Model(VarParams params, Mat data, std::optional<std::vector<double>> weights, const std::string& init,
        double kappa, int calendar_offset)
      : ctx_(std::make_shared<ModelContext>(
            params, scheme_from(weights),
            MixedFreqData(std::move(data), params.n_m(), params.n_q(), calendar_offset), init_from(init, kappa))) {}

  const ModelContext& ctx() const { return *ctx_; }

 private:
  std::shared_ptr<ModelContext> ctx_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulation smoothing for mixed-frequency VARs";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<PatternError>(m, "PatternError", base.ptr());
  py::register_exception<FormulationError>(m, "FormulationError", base.ptr());
  py::register_exception<SingularInnovationError>(m, "SingularInnovationError", base.ptr());
  py::register_exception<InitializationError>(m, "InitializationError", base.ptr());
  py::register_exception<OracleTooLargeError>(m, "OracleTooLargeError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<VarParams>(m, "VarParams")
      .def(py::init([](Index n_m, Index n_q, Index p, Vec intercept, Mat lags, std::vector<Mat> chol,
                       bool allow_degenerate_noise) {
             return VarParams(n_m, n_q, p, std::move(intercept), std::move(lags), std::move(chol),
                              allow_degenerate_noise);
           }),
           py::arg("n_m"), py::arg("n_q"), py::arg("p"), py::arg("intercept"), py::arg("lags"), py::arg("chol"),
           py::arg("allow_degenerate_noise") = false)
      .def_property_readonly("n_m", &VarParams::n_m)
      .def_property_readonly("n_q", &VarParams::n_q)
      .def_property_readonly("n", &VarParams::n)
      .def_property_readonly("p", &VarParams::p)
      .def_property_readonly("intercept", &VarParams::intercept)
      .def_property_readonly("lags", &VarParams::lags)
      .def_property_readonly("chol", &VarParams::chol_factors)
      .def("sigma", &VarParams::sigma, py::arg("row") = 0)
      .def("spectral_radius", &VarParams::spectral_radius)
      .def("hash", &VarParams::hash)
      .def("__repr__", [](const VarParams& p) {
        return "VarParams(n_m=" + std::to_string(p.n_m()) + ", n_q=" + std::to_string(p.n_q()) +
               ", p=" + std::to_string(p.p()) + ")";
      });

  m.def(
      "random_var",
      [](Index n_m, Index n_q, Index p, double radius, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return random_var(n_m, n_q, p, radius, rng);
      },
      py::arg("n_m"), py::arg("n_q"), py::arg("p"), py::arg("radius") = 0.9, py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const VarParams& params, Index T, std::vector<Index> trailing, std::uint64_t seed,
         std::optional<std::vector<double>> weights, int calendar_offset) {
        const auto inst = simulate_instance(params, scheme_from(weights), T, trailing, seed, calendar_offset);
        return py::make_tuple(inst.latent, inst.data.values());
      },
      py::arg("params"), py::arg("T"), py::arg("trailing"), py::arg("seed") = 1, py::arg("weights") = py::none(),
      py::arg("calendar_offset") = 0,
      "Simulated latent path and masked data (NaN where missing) as a tuple of T x n arrays.");

  py::class_<Model>(m, "Model")
      .def(py::init<VarParams, Mat, std::optional<std::vector<double>>, const std::string&, double, int>(),
           py::arg("params"), py::arg("data"), py::arg("weights") = py::none(), py::arg("init") = "stationary",
           py::arg("kappa") = 1e4, py::arg("calendar_offset") = 0)
      .def_property_readonly("T", [](const Model& m) { return m.ctx().T(); })
      .def_property_readonly("n", [](const Model& m) { return m.ctx().n(); })
      .def_property_readonly("p", [](const Model& m) { return m.ctx().p(); })
      .def_property_readonly("tb", [](const Model& m) { return m.ctx().tb(); })
      .def_property_readonly("data", [](const Model& m) { return m.ctx().data().values(); })
      .def(
          "smooth",
          [](const Model& m, const std::string& backend) {
            const Backend b = parse_backend(backend);
            py::gil_scoped_release release;
            return smooth_means(m.ctx(), m.ctx().data().values(), b);
          },
          py::arg("backend") = "adaptive", "Smoothed conditional means of the latent monthly path.")
      .def(
          "draw",
          [](const Model& m, const std::string& backend, std::uint64_t seed) {
            const Backend b = parse_backend(backend);
            py::gil_scoped_release release;
            return draw_latent(m.ctx(), b, seed).X;
          },
          py::arg("backend") = "adaptive", py::arg("seed") = 1)
      .def(
          "draws",
          [](const Model& m, std::size_t count, const std::string& backend, std::uint64_t seed, unsigned threads) {
            const Backend b = parse_backend(backend);
            std::vector<LatentDraw> out;
            {
              py::gil_scoped_release release;
              out = draw_many(m.ctx(), b, count, seed, threads);
            }
            return stack(out, m.ctx().T(), m.ctx().n());
          },
          py::arg("count"), py::arg("backend") = "adaptive", py::arg("seed") = 1, py::arg("threads") = 0,
          "Array of shape (count, T, n); draw i uses a seed derived from (seed, i).")
      .def(
          "oracle",
          [](const Model& m, Index cap) {
            const ModelContext& c = m.ctx();
            const OracleResult r = oracle_joint(c.params(), c.agg(), c.data(), c.init(), cap);
            return py::make_tuple(r.mean, r.cov);
          },
          py::arg("cap") = 200, "Direct-conditioning means and per-row covariances.")
      .def(
          "check_constraints",
          [](const Model& m, const Mat& X) {
            const ConstraintCheck c = check_constraints(m.ctx(), X);
            return py::make_tuple(c.monthly, c.quarterly);
          },
          py::arg("X"));

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));
  m.def("mult_count", &mult_count, py::arg("rows"), py::arg("inner"));
  m.def("flop_count", &flop_count, py::arg("rows"), py::arg("inner"));
  m.attr("backends") = py::make_tuple("baseline", "blocked", "adaptive", "oracle");
}
