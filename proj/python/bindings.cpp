#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "recontree/analytic.hpp"
#include "recontree/bp.hpp"
#include "recontree/broadcast.hpp"
#include "recontree/coupling.hpp"
#include "recontree/errors.hpp"
#include "recontree/estimators.hpp"
#include "recontree/model.hpp"
#include "recontree/serialize.hpp"

namespace py = pybind11;
using namespace recontree;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Broadcast colouring models on trees: sampling, exact root "
            "posteriors, Monte Carlo moment estimators and analytic "
            "threshold maps.  Colours are 0-based in this API; JSON I/O "
            "is 1-based.";
  m.attr("__version__") = kVersion;

  py::register_exception<ZeroProbabilityBoundary>(m, "ZeroProbabilityBoundary",
                                                  PyExc_ValueError);
  py::register_exception<InstanceTooLarge>(m, "InstanceTooLarge",
                                           PyExc_ValueError);

  py::class_<Channel>(m, "Channel")
      .def_readonly("k", &Channel::k)
      .def_readonly("matrix", &Channel::matrix)
      .def("__call__", &Channel::operator())
      .def("__repr__", [](const Channel& c) {
        return "Channel(" + channel_to_json(c).dump() + ")";
      });
  m.def("colouring_channel", &colouring_channel, py::arg("k"));
  m.def("bsc_channel", &bsc_channel, py::arg("epsilon"));
  m.def("channel_from_matrix", &channel_from_matrix, py::arg("k"),
        py::arg("matrix"));
  m.def("second_eigenvalue", &second_eigenvalue, py::arg("channel"));

  py::class_<TreeSpec>(m, "TreeSpec")
      .def_readonly("delta", &TreeSpec::delta)
      .def_readonly("depth", &TreeSpec::depth)
      .def("__repr__", [](const TreeSpec& t) {
        return "TreeSpec(" + tree_to_json(t).dump() + ")";
      });
  m.def("regular_tree", &regular_tree, py::arg("delta"), py::arg("depth"));
  m.def("gw_poisson_tree", &gw_poisson_tree, py::arg("mean"), py::arg("depth"));

  py::class_<SampledTree>(m, "SampledTree")
      .def_readonly("depth", &SampledTree::depth)
      .def_readonly("offspring_counts", &SampledTree::offspring_counts)
      .def("leaf_count", &SampledTree::leaf_count);

  py::class_<LeafConfig>(m, "LeafConfig")
      .def_readonly("tree", &LeafConfig::tree)
      .def_readonly("root_colour", &LeafConfig::root_colour)
      .def_readonly("leaf_colours", &LeafConfig::leaf_colours)
      .def("to_json", [](const LeafConfig& c) {
        return leaf_config_to_json(c).dump();
      })
      .def_static("from_json", [](const std::string& text) {
        return leaf_config_from_json(json::parse(text));
      });

  m.def(
      "sample_broadcast",
      [](const Channel& channel, const TreeSpec& tree,
         std::optional<int> root, std::uint64_t seed, std::uint64_t trial) {
        std::optional<Colour> r;
        if (root) r = static_cast<Colour>(*root);
        return sample_broadcast(channel, tree, r, seed, trial);
      },
      py::arg("channel"), py::arg("tree"), py::arg("root") = std::nullopt,
      py::arg("seed") = 0, py::arg("trial") = 0,
      "root=None draws the root uniformly");
  m.def("sample_gw_offspring", &sample_gw_offspring, py::arg("mean"),
        py::arg("seed"));

  m.def("root_posterior",
        [](const Channel& c, const LeafConfig& cfg) {
          return root_posterior(c, cfg).probs;
        },
        py::arg("channel"), py::arg("config"));
  m.def("child_posteriors",
        [](const Channel& c, const LeafConfig& cfg) {
          std::vector<std::vector<double>> out;
          for (auto& b : child_posteriors(c, cfg)) out.push_back(b.probs);
          return out;
        },
        py::arg("channel"), py::arg("config"));
  m.def("enumerate_posterior",
        [](const Channel& c, const LeafConfig& cfg, std::uint64_t cap) {
          return enumerate_posterior(c, cfg, cap).probs;
        },
        py::arg("channel"), py::arg("config"),
        py::arg("term_cap") = 10'000'000);
  m.def("frozen_root", &frozen_root, py::arg("channel"), py::arg("config"));

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("se", &Estimate::se)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(value=" + format_double(e.value) +
               ", se=" + format_double(e.se) + ")";
      });

  py::class_<MomentReport>(m, "MomentReport")
      .def_readonly("k", &MomentReport::k)
      .def_readonly("trials", &MomentReport::trials)
      .def_readonly("seed", &MomentReport::seed)
      .def_readonly("x_n", &MomentReport::x_n)
      .def_readonly("z_n", &MomentReport::z_n)
      .def_readonly("p_n", &MomentReport::p_n)
      .def_readonly("tv", &MomentReport::tv)
      .def_property_readonly("n", &MomentReport::depth)
      .def("to_json",
           [](const MomentReport& r) { return report_to_json(r).dump(); });

  m.def("estimate_xn_zn", &estimate_xn_zn, py::arg("channel"), py::arg("tree"),
        py::arg("trials"), py::arg("seed"), py::arg("threads") = 0);
  m.def("estimate_pn", &estimate_pn, py::arg("channel"), py::arg("tree"),
        py::arg("trials"), py::arg("seed"), py::arg("threads") = 0);
  m.def("estimate_tv", &estimate_tv, py::arg("channel"), py::arg("tree"),
        py::arg("trials"), py::arg("seed"), py::arg("threads") = 0);
  m.def("simulate_report", &simulate_report, py::arg("channel"),
        py::arg("tree"), py::arg("trials"), py::arg("seed"),
        py::arg("threads") = 0);

  py::class_<IdentityCheck>(m, "IdentityCheck")
      .def_readonly("name", &IdentityCheck::name)
      .def_readonly("measured", &IdentityCheck::measured)
      .def_readonly("predicted", &IdentityCheck::predicted)
      .def_readonly("sigma", &IdentityCheck::sigma)
      .def_readonly("pass_", &IdentityCheck::pass)
      .def_readonly("applicable", &IdentityCheck::applicable)
      .def("__repr__",
           [](const IdentityCheck& c) { return check_to_json(c).dump(); });

  m.def("verify_change_of_measure", &verify_change_of_measure,
        py::arg("channel"), py::arg("tree"), py::arg("trials"), py::arg("seed"),
        py::arg("threads") = 0);

  py::class_<YZMomentReport>(m, "YZMomentReport")
      .def_readonly("k", &YZMomentReport::k)
      .def_readonly("delta", &YZMomentReport::delta)
      .def_readonly("n", &YZMomentReport::n)
      .def_readonly("x_n", &YZMomentReport::x_n)
      .def_readonly("z_n", &YZMomentReport::z_n)
      .def("checks", &YZMomentReport::checks)
      .def("all_pass", &YZMomentReport::all_pass)
      .def("to_json",
           [](const YZMomentReport& r) { return yz_report_to_json(r).dump(); });

  m.def("verify_appendix_moments", &verify_appendix_moments,
        py::arg("channel"), py::arg("tree"), py::arg("trials"), py::arg("seed"),
        py::arg("threads") = 0);
  m.def("check_z_bounds", &check_z_bounds, py::arg("report"), py::arg("k"),
        py::arg("delta"));

  m.def("poisson_tail_below", &poisson_tail_below, py::arg("mean"),
        py::arg("threshold"));
  m.def("poisson_tail_above", &poisson_tail_above, py::arg("mean"),
        py::arg("threshold"));

  py::class_<IterationTrace>(m, "IterationTrace")
      .def_readonly("values", &IterationTrace::values)
      .def_readonly("converged", &IterationTrace::converged)
      .def_readonly("limit_estimate", &IterationTrace::limit_estimate)
      .def_readonly("conclusion", &IterationTrace::conclusion);

  m.def("decay_map_value", &decay_map_value, py::arg("k"), py::arg("D"),
        py::arg("p"), py::arg("y"));
  m.def("iterate_decay_map", &iterate_decay_map, py::arg("k"),
        py::arg("beta_star"), py::arg("delta"), py::arg("max_steps") = 10000,
        py::arg("tol") = 1e-12);
  m.def("reconstruction_map_value", &reconstruction_map_value, py::arg("k"),
        py::arg("D"), py::arg("s"), py::arg("x"));
  m.def("iterate_reconstruction_map", &iterate_reconstruction_map,
        py::arg("k"), py::arg("beta_star"), py::arg("delta"),
        py::arg("max_steps") = 10000, py::arg("tol") = 1e-12);

  py::class_<ContractionInfo>(m, "ContractionInfo")
      .def_readonly("coefficient", &ContractionInfo::coefficient)
      .def_readonly("hypothesis_holds", &ContractionInfo::hypothesis_holds)
      .def_readonly("at_most_half", &ContractionInfo::at_most_half);
  m.def("contraction_coefficient", &contraction_coefficient, py::arg("k"),
        py::arg("delta"));

  py::class_<ThresholdBounds>(m, "ThresholdBounds")
      .def_readonly("lower", &ThresholdBounds::lower)
      .def_readonly("upper", &ThresholdBounds::upper);
  m.def("threshold_bounds", &threshold_bounds, py::arg("k"));
  m.def("ks_reconstructs", &ks_reconstructs, py::arg("channel"),
        py::arg("delta"));
  m.def("uniqueness_holds", &uniqueness_holds, py::arg("k"), py::arg("delta"));

  py::class_<CoupledCounts>(m, "CoupledCounts")
      .def_readonly("multinomial", &CoupledCounts::multinomial)
      .def_readonly("poisson", &CoupledCounts::poisson)
      .def_readonly("dominated", &CoupledCounts::dominated);
  m.def("sample_coupled", &sample_coupled, py::arg("k"), py::arg("delta"),
        py::arg("D"), py::arg("seed"), py::arg("trial") = 0);

  py::class_<CouplingTestReport>(m, "CouplingTestReport")
      .def_readonly("trials", &CouplingTestReport::trials)
      .def_readonly("violations", &CouplingTestReport::violations)
      .def_readonly("p_multinomial", &CouplingTestReport::p_multinomial)
      .def_readonly("p_poisson", &CouplingTestReport::p_poisson);
  m.def("run_coupling_test", &run_coupling_test, py::arg("k"),
        py::arg("delta"), py::arg("D"), py::arg("trials"), py::arg("seed"),
        py::arg("threads") = 0);
}
