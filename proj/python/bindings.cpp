// Python bindings for the core library. Matrices are numpy arrays with one
// point per row.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "psd/baseline_grid.hpp"
#include "psd/errors.hpp"
#include "psd/estimator.hpp"
#include "psd/integration.hpp"
#include "psd/metrics.hpp"
#include "psd/model.hpp"
#include "psd/model_io.hpp"
#include "psd/rng.hpp"
#include "psd/sampler.hpp"

namespace py = pybind11;
using namespace psd;

namespace {

HyperRectangle box(const Vector& lower, const Vector& upper) {
  return HyperRectangle(lower, upper);
}

DistanceMetric metric_of(const std::string& name) {
  if (name == "tv") return DistanceMetric::kTotalVariation;
  if (name == "hellinger") return DistanceMetric::kHellinger;
  throw ArgumentError("metric must be 'tv' or 'hellinger'");
}

FitConfig fit_config(std::uint64_t n, Index m, double tau, double lambda, std::uint64_t seed) {
  FitConfig c;
  c.n = n;
  c.m = m;
  c.tau = tau;
  c.lambda = lambda;
  c.seed = seed;
  c.validate();
  return c;
}

py::dict sample_run_dict(const SampleRun& run) {
  py::dict d;
  d["samples"] = run.samples;
  d["integral_evals"] = run.accounting.integral_evals;
  d["erf_calls"] = run.accounting.erf_calls;
  d["rho_used"] = run.rho_used;
  d["leaf_count"] = run.leaf_count;
  d["integral_bound"] = run.integral_bound;
  d["bound_satisfied"] = run.bound_satisfied;
  return d;
}

py::dict distances_dict(const DistanceReport& r) {
  py::dict d;
  d["tv"] = r.tv;
  d["hellinger"] = r.hellinger;
  d["w1"] = r.w1;
  d["tv_bound"] = r.tv_bound;
  d["hellinger_bound"] = r.hellinger_bound;
  d["w1_bound"] = r.w1_bound;
  return d;
}

template <typename Model>
SampleRun run_sampler(const Model& model, const Vector& lower, const Vector& upper,
                      std::uint64_t n, double rho, std::uint64_t seed, bool full_integrals) {
  SamplerParams p;
  p.n = n;
  p.rho = rho;
  p.seed = seed;
  p.full_integrals = full_integrals;
  py::gil_scoped_release release;
  return sample(model, box(lower, upper), p);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian PSD models: exact integrals, dyadic sampling and fitting";

  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  static py::exception<ResourceError> resource_error(m, "ResourceError", PyExc_MemoryError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    } catch (const ResourceError& e) {
      py::set_error(resource_error, e.what());
    } catch (const UnsupportedError& e) {
      PyErr_SetString(PyExc_NotImplementedError, e.what());
    } catch (const ContractViolation& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<GaussianPsdModel>(m, "GaussianPsdModel")
      .def(py::init([](const Matrix& a, const Matrix& centers, const Vector& eta, bool project) {
             return GaussianPsdModel(a, CenterMatrix(centers), PrecisionVector(eta),
                                     project ? PsdRepair::kProject : PsdRepair::kReject);
           }),
           py::arg("a"), py::arg("centers"), py::arg("eta"), py::arg("project") = false)
      .def_property_readonly("a", &GaussianPsdModel::coefficients)
      .def_property_readonly("centers",
                             [](const GaussianPsdModel& g) { return g.centers().values(); })
      .def_property_readonly("eta",
                             [](const GaussianPsdModel& g) { return g.precision().values(); })
      .def_property_readonly("dim", &GaussianPsdModel::dim)
      .def("__call__", [](const GaussianPsdModel& g, const Matrix& x) {
        Vector out(x.rows());
        for (Index i = 0; i < x.rows(); ++i) out[i] = evaluate(g, x.row(i).transpose());
        return out;
      });

  py::class_<RankOneModel>(m, "RankOneModel")
      .def(py::init([](const Vector& a, const Matrix& centers, const Vector& eta) {
             return RankOneModel(a, CenterMatrix(centers), PrecisionVector(eta));
           }),
           py::arg("a"), py::arg("centers"), py::arg("eta"))
      .def_property_readonly("a", &RankOneModel::weights)
      .def_property_readonly("centers", [](const RankOneModel& r) { return r.centers().values(); })
      .def_property_readonly("eta", [](const RankOneModel& r) { return r.precision().values(); })
      .def_property_readonly("dim", &RankOneModel::dim)
      .def("to_psd", &RankOneModel::to_psd)
      .def("linear", [](const RankOneModel& r, const Matrix& x) {
        Vector out(x.rows());
        for (Index i = 0; i < x.rows(); ++i) out[i] = linear_evaluate(r, x.row(i).transpose());
        return out;
      })
      .def("__call__", [](const RankOneModel& r, const Matrix& x) {
        Vector out(x.rows());
        for (Index i = 0; i < x.rows(); ++i) out[i] = evaluate(r, x.row(i).transpose());
        return out;
      });

  m.def(
      "integrate",
      [](const GaussianPsdModel& g, const Vector& lower, const Vector& upper) {
        IntegralAccounting acct;
        const double v = integrate(g, box(lower, upper), acct);
        return py::make_tuple(v, acct.erf_calls);
      },
      py::arg("model"), py::arg("lower"), py::arg("upper"),
      "Exact integral over [lower, upper] and the number of erf calls used.");

  m.def(
      "sample",
      [](const GaussianPsdModel& g, const Vector& lower, const Vector& upper, std::uint64_t n,
         double rho, std::uint64_t seed, bool full_integrals) {
        return sample_run_dict(run_sampler(g, lower, upper, n, rho, seed, full_integrals));
      },
      py::arg("model"), py::arg("lower"), py::arg("upper"), py::arg("n"),
      py::arg("rho") = 1e-3, py::arg("seed") = 0, py::arg("full_integrals") = false);

  m.def(
      "adaptive_rho",
      [](const py::object& model, const Vector& lower, const Vector& upper, double eps,
         const std::string& metric) {
        if (py::isinstance<RankOneModel>(model)) {
          return adaptive_rho(model.cast<const RankOneModel&>(), box(lower, upper), eps,
                              metric_of(metric));
        }
        return adaptive_rho(model.cast<const GaussianPsdModel&>(), box(lower, upper), eps,
                            metric_of(metric));
      },
      py::arg("model"), py::arg("lower"), py::arg("upper"), py::arg("eps"),
      py::arg("metric") = "tv");

  m.def(
      "exact_distances",
      [](const py::object& model, const Vector& lower, const Vector& upper, double rho) {
        if (py::isinstance<RankOneModel>(model)) {
          return distances_dict(
              exact_distances(model.cast<const RankOneModel&>(), box(lower, upper), rho));
        }
        return distances_dict(
            exact_distances(model.cast<const GaussianPsdModel&>(), box(lower, upper), rho));
      },
      py::arg("model"), py::arg("lower"), py::arg("upper"), py::arg("rho"));

  m.def(
      "empirical_mmd",
      [](const Matrix& p, const Matrix& q, double eta) {
        return empirical_mmd(p, q, PrecisionVector::isotropic(eta, p.cols()));
      },
      py::arg("p"), py::arg("q"), py::arg("eta") = 2.0);

  m.def(
      "fit_rank_one",
      [](const std::function<double(const Vector&)>& g, const Vector& lower,
         const Vector& upper, std::uint64_t n, Index m_centers, double tau, double lambda,
         std::uint64_t seed) {
        const EvaluationOracle oracle([&](const Eigen::Ref<const Vector>& x) { return g(x); },
                                      box(lower, upper), OracleMode::kSquareRoot);
        return fit_rank_one(oracle, fit_config(n, m_centers, tau, lambda, seed)).model;
      },
      py::arg("sqrt_density"), py::arg("lower"), py::arg("upper"), py::arg("n") = 1000,
      py::arg("m") = 50, py::arg("tau") = 1.0, py::arg("lam") = 1e-6, py::arg("seed") = 0,
      "Rank-one fit from a square-root oracle g with g^2 proportional to the density.");

  m.def(
      "fit_psd",
      [](const std::function<double(const Vector&)>& f, const Vector& lower,
         const Vector& upper, std::uint64_t n, Index m_centers, double tau, double lambda,
         std::uint64_t seed, int max_iters) {
        const EvaluationOracle oracle([&](const Eigen::Ref<const Vector>& x) { return f(x); },
                                      box(lower, upper), OracleMode::kDensity);
        PsdFitOptions opts;
        opts.max_iters = max_iters;
        const PsdFit fit = fit_psd(oracle, fit_config(n, m_centers, tau, lambda, seed), opts);
        py::dict d;
        d["model"] = fit.model;
        d["objective_trace"] = fit.objective_trace;
        d["iterations"] = fit.iterations;
        d["converged"] = fit.converged;
        d["warning"] = fit.warning;
        return d;
      },
      py::arg("density"), py::arg("lower"), py::arg("upper"), py::arg("n") = 1000,
      py::arg("m") = 20, py::arg("tau") = 1.0, py::arg("lam") = 1e-6, py::arg("seed") = 0,
      py::arg("max_iters") = 500);

  m.def(
      "grid_sample",
      [](const std::function<double(const Vector&)>& f, const Vector& lower,
         const Vector& upper, std::uint64_t n_evals, std::uint64_t n, std::uint64_t seed) {
        const HyperRectangle q = box(lower, upper);
        const EvaluationOracle oracle([&](const Eigen::Ref<const Vector>& x) { return f(x); },
                                      q, OracleMode::kDensity);
        return grid_sample(build_grid(oracle, q, n_evals), n, seed);
      },
      py::arg("density"), py::arg("lower"), py::arg("upper"), py::arg("n_evals"),
      py::arg("n"), py::arg("seed") = 0);

  m.def(
      "save_model",
      [](const py::object& model, const std::string& path) {
        if (py::isinstance<RankOneModel>(model)) {
          save_model(StoredModel(model.cast<RankOneModel>()), path);
        } else {
          save_model(StoredModel(model.cast<GaussianPsdModel>()), path);
        }
      },
      py::arg("model"), py::arg("path"));
  m.def(
      "load_model",
      [](const std::string& path) -> py::object {
        const StoredModel s = load_model(path);
        if (s.rank_one) return py::cast(*s.rank_one);
        return py::cast(s.psd);
      },
      py::arg("path"));

  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"));
}
