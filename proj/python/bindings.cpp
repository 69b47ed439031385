#include "halfparity/analytic.hpp"
#include "halfparity/ensemble.hpp"
#include "halfparity/error.hpp"
#include "halfparity/estimator.hpp"
#include "halfparity/sde_engine.hpp"
#include "halfparity/trajectory_analysis.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace halfparity;

namespace {

// Wraps a closed-form scalar f(point) as a numpy ufunc-like function of (J, t).
template <class F>
auto closed_form(F f) {
  return [f](py::array_t<double> J, py::array_t<double> t, double gamma, double epsilon) {
    return py::vectorize([f, gamma, epsilon](double j, double tt) { return f({j, tt, gamma, epsilon}); })(J, t);
  };
}

template <class F>
py::array_t<double> column(const std::vector<TrajectorySample>& s, F get) {
  py::array_t<double> out(static_cast<py::ssize_t>(s.size()));
  auto v = out.mutable_unchecked<1>();
  for (std::size_t k = 0; k < s.size(); ++k) v(static_cast<py::ssize_t>(k)) = get(s[k]);
  return out;
}

py::dict record_to_dict(const TrajectoryRecord& r) {
  const auto& s = r.samples;
  py::dict d;
  d["index"] = r.index;
  d["t"] = column(s, [](const auto& x) { return x.t; });
  d["I"] = column(s, [](const auto& x) { return x.record; });
  d["J"] = column(s, [](const auto& x) { return x.outcome; });
  d["C"] = column(s, [](const auto& x) { return x.concurrence; });
  d["U"] = column(s, [](const auto& x) { return x.energy; });
  d["Q"] = column(s, [](const auto& x) { return x.heat; });
  d["dQ"] = column(s, [](const auto& x) { return x.heat_increment; });
  d["dQ_e"] = column(s, [](const auto& x) { return x.heat_even; });
  d["dQ_eo"] = column(s, [](const auto& x) { return x.heat_even_odd; });
  d["dW"] = column(s, [](const auto& x) { return x.wiener; });
  d["p_uu"] = column(s, [](const auto& x) { return x.populations.uu; });
  d["p_ud"] = column(s, [](const auto& x) { return x.populations.ud; });
  d["p_du"] = column(s, [](const auto& x) { return x.populations.du; });
  d["p_dd"] = column(s, [](const auto& x) { return x.populations.dd; });
  return d;
}

py::dict grid_to_dict(const RateGrid& g) {
  const auto ni = static_cast<py::ssize_t>(g.axes.t_i.size());
  const auto nj = static_cast<py::ssize_t>(g.axes.delta_t.size());
  py::array_t<double> success({ni, nj}), error({ni, nj});
  py::array_t<std::int64_t> ent({ni, nj}), sep({ni, nj});
  auto s = success.mutable_unchecked<2>();
  auto e = error.mutable_unchecked<2>();
  auto ne = ent.mutable_unchecked<2>();
  auto ns = sep.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < ni; ++i)
    for (py::ssize_t j = 0; j < nj; ++j) {
      const RateCell& c = g.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      s(i, j) = c.success_rate;
      e(i, j) = c.error_rate;
      ne(i, j) = static_cast<std::int64_t>(c.n_entangled);
      ns(i, j) = static_cast<std::int64_t>(c.n_separable);
    }
  py::dict d;
  d["t_i"] = g.axes.t_i;
  d["delta_t"] = g.axes.delta_t;
  d["tau"] = g.tau.label();
  d["eta"] = g.eta;
  d["success_rate"] = success;
  d["error_rate"] = error;
  d["n_entangled"] = ent;
  d["n_separable"] = sep;
  const auto x = min_crossing_t_i(g);
  d["min_t_i_success_50"] = x ? py::cast(*x) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-qubit half-parity measurement: closed forms, trajectories and the single-shot estimator";
  m.attr("__version__") = HALFPARITY_VERSION;

  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init([](double gamma, double epsilon, double dt, double t_max, double eta, std::size_t n_traj,
                       std::uint64_t seed, std::size_t stride) {
             SimulationConfig c{gamma, epsilon, dt, t_max, eta, n_traj, seed, stride};
             c.validate();
             return c;
           }),
           py::arg("gamma") = 1.0, py::arg("epsilon") = 1.0, py::arg("dt") = 1e-3, py::arg("t_max") = 10.0,
           py::arg("eta") = 1.0, py::arg("n_traj") = 800, py::arg("master_seed") = 20190725,
           py::arg("record_stride") = 1)
      .def_readwrite("gamma", &SimulationConfig::gamma)
      .def_readwrite("epsilon", &SimulationConfig::epsilon)
      .def_readwrite("dt", &SimulationConfig::dt)
      .def_readwrite("t_max", &SimulationConfig::t_max)
      .def_readwrite("eta", &SimulationConfig::eta)
      .def_readwrite("n_traj", &SimulationConfig::n_traj)
      .def_readwrite("master_seed", &SimulationConfig::master_seed)
      .def_readwrite("record_stride", &SimulationConfig::record_stride)
      .def_property_readonly("n_steps", &SimulationConfig::n_steps)
      .def("validate", &SimulationConfig::validate);

  const auto G = py::arg("gamma") = 1.0;
  const auto E = py::arg("epsilon") = 1.0;
  m.def("concurrence", closed_form(concurrence_closed), py::arg("J"), py::arg("t"), G, E);
  m.def("heat", closed_form(heat_closed), py::arg("J"), py::arg("t"), G, E);
  m.def("sigma", closed_form(sigma_tilde), py::arg("J"), py::arg("t"), G, E);
  m.def("sigma_eo", closed_form(sigma_eo_tilde), py::arg("J"), py::arg("t"), G, E);
  m.def("dcdt", closed_form(dC_dt_ensemble), py::arg("J"), py::arg("t"), G, E);
  m.def("rate_bounds", [](double J, double t, double gamma, double epsilon) {
        const RateBounds b = bounds({J, t, gamma, epsilon});
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("J"), py::arg("t"), G, E);
  m.def("outcome_pdf", py::vectorize([](double J, double t, double gamma) { return outcome_pdf(J, t, gamma); }),
        py::arg("J"), py::arg("t"), py::arg("gamma") = 1.0);
  m.def("outcome_cdf", py::vectorize([](double J, double t, double gamma) { return outcome_cdf(J, t, gamma); }),
        py::arg("J"), py::arg("t"), py::arg("gamma") = 1.0);

  m.def("run_trajectory", [](const SimulationConfig& cfg, std::size_t index) {
        TrajectoryRecord r;
        {
          py::gil_scoped_release release;
          r = run_trajectory(cfg, index);
        }
        return record_to_dict(r);
      },
      py::arg("config"), py::arg("index") = 0, "Integrates one trajectory; returns a dict of numpy columns.");

  m.def("final_samples", [](const SimulationConfig& cfg, std::size_t n_workers) {
        SimulationConfig c = cfg;
        c.record_stride = c.n_steps();
        std::vector<TrajectorySample> finals;
        {
          py::gil_scoped_release release;
          for (std::size_t first = 0; first < c.n_traj; first += 256)
            for (const auto& r : run_ensemble(c, first, std::min<std::size_t>(256, c.n_traj - first), n_workers))
              finals.push_back(r.final_sample());
        }
        py::dict d;
        d["J"] = column(finals, [](const auto& x) { return x.outcome; });
        d["C"] = column(finals, [](const auto& x) { return x.concurrence; });
        d["Q"] = column(finals, [](const auto& x) { return x.heat; });
        d["U"] = column(finals, [](const auto& x) { return x.energy; });
        return d;
      },
      py::arg("config"), py::arg("n_workers") = 0, "Final (J, C, Q, U) of every trajectory in the ensemble.");

  m.def("classify_outcome", [](double J) { return std::string(to_string(classify_outcome(J))); }, py::arg("J"));

  m.def("rate_grid",
        [](const SimulationConfig& cfg, std::vector<double> t_i, std::vector<double> delta_t,
           const std::vector<std::string>& taus, double threshold, std::size_t n_workers) {
          GridAxes axes{std::move(t_i), std::move(delta_t)};
          if (axes.t_i.empty() && axes.delta_t.empty()) axes = GridAxes::default_axes(cfg.gamma);
          std::vector<TauSpec> specs;
          for (const auto& s : taus) specs.push_back(s == "delta_t" ? TauSpec::window() : TauSpec::fixed(std::stod(s)));
          std::vector<RateGrid> grids;
          {
            py::gil_scoped_release release;
            const auto traces = run_estimator_ensemble(cfg, n_workers);
            for (const auto& spec : specs) grids.push_back(rate_grid(traces, axes, spec, threshold, cfg.eta));
          }
          py::list out;
          for (const auto& g : grids) out.append(grid_to_dict(g));
          return out;
        },
        py::arg("config"), py::arg("t_i") = std::vector<double>{}, py::arg("delta_t") = std::vector<double>{},
        py::arg("taus") = std::vector<std::string>{"delta_t"}, py::arg("concurrence_threshold") = 0.8,
        py::arg("n_workers") = 0,
        "Success and error rates of the single-shot estimator; empty axes select the default grid.");
}
