#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "epuc/cli/app.hpp"
#include "epuc/disentangle.hpp"
#include "epuc/io.hpp"
#include "epuc/metrics.hpp"
#include "epuc/moments.hpp"
#include "epuc/ood.hpp"
#include "epuc/selective.hpp"
#include "epuc/selftest.hpp"
#include "epuc/synth.hpp"

namespace py = pybind11;
using namespace epuc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SampleTensor tensor_from_array(const Array& a, std::vector<std::string> ids) {
  if (a.ndim() != 3) throw DimensionError("samples must be a rank-3 array (inputs, passes, classes)");
  std::vector<double> values(a.data(), a.data() + a.size());
  return SampleTensor::validate(std::move(values), a.shape(0), a.shape(1), a.shape(2), std::move(ids));
}

Array tensor_to_array(const SampleTensor& t) {
  Array out({t.n_inputs(), t.n_samples(), t.n_classes()});
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

Array vec(const std::vector<double>& v) { return Array(v.size(), v.data()); }

Array matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  Array out({rows, cols});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict report_dict(const UncertaintyReport& r) {
  const std::size_t K = r.c_vector.size();
  py::dict d;
  d["mean"] = vec(r.moments.mean);
  d["variance"] = vec(r.moments.variance);
  d["covariance"] = matrix(r.moments.covariance, K, K);
  d["correlation"] = matrix(r.moments.correlation, K, K);
  d["third_moment"] = vec(r.moments.third_moment);
  d["entropy"] = r.entropy_of_mean;
  d["aleatoric"] = r.expected_entropy;
  d["mi"] = r.mutual_information;
  d["c"] = vec(r.c_vector);
  d["c_sum"] = r.c_sum;
  d["c_third_order"] = vec(r.c_third_order);
  d["rho"] = vec(r.rho);
  d["cbec"] = r.cbec ? py::cast(*r.cbec) : py::none();
  py::dict scores;
  for (const auto& s : r.policy_scores) scores[py::str(std::string(policy_name(s.policy)))] = s.value;
  d["policies"] = scores;
  return d;
}

std::unique_ptr<ClassPartition> partition_of(std::size_t K, const std::optional<std::vector<std::size_t>>& safe,
                                             const std::optional<std::vector<std::size_t>>& critical) {
  if (!safe && !critical) return nullptr;
  return std::make_unique<ClassPartition>(
      ClassPartition::make(safe.value_or(std::vector<std::size_t>{}), critical.value_or(std::vector<std::size_t>{}), K));
}

}  // namespace

PYBIND11_MODULE(_epuc, m) {
  m.doc() = "Per-class epistemic uncertainty from sampled class-probability vectors";

  static py::exception<Error> base(m, "EpucError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<SimplexError>(m, "SimplexError", base.ptr());
  py::register_exception<LabelError>(m, "LabelError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<SampleTensor>(m, "SampleTensor")
      .def(py::init([](const Array& a, std::vector<std::string> ids) { return tensor_from_array(a, std::move(ids)); }),
           py::arg("samples"), py::arg("ids") = std::vector<std::string>{})
      .def_property_readonly("n_inputs", &SampleTensor::n_inputs)
      .def_property_readonly("n_samples", &SampleTensor::n_samples)
      .def_property_readonly("n_classes", &SampleTensor::n_classes)
      .def_property_readonly("ids", [](const SampleTensor& t) {
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < t.n_inputs(); ++i) ids.push_back(t.id(i));
        return ids;
      })
      .def("to_numpy", &tensor_to_array)
      .def("predicted_labels", [](const SampleTensor& t) { return predicted_labels(t); });

  m.def("entropy", [](const std::vector<double>& p) { return entropy(p); }, py::arg("p"));

  m.def(
      "report",
      [](const SampleTensor& t, std::optional<std::vector<std::size_t>> safe,
         std::optional<std::vector<std::size_t>> critical, unsigned threads) {
        const auto part = partition_of(t.n_classes(), safe, critical);
        std::vector<UncertaintyReport> reports;
        {
          py::gil_scoped_release release;
          reports = report_all(t, part.get(), threads);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      },
      py::arg("tensor"), py::arg("safe") = py::none(), py::arg("critical") = py::none(), py::arg("threads") = 1,
      "Per-input moments, entropies, C vector, rho and policy scores.");

  m.def("auroc", [](const std::vector<double>& id, const std::vector<double>& ood) { return auroc(id, ood); },
        py::arg("id_scores"), py::arg("ood_scores"));
  m.def("mean_ratio", [](const std::vector<double>& id, const std::vector<double>& ood) { return mean_ratio(id, ood); },
        py::arg("id_scores"), py::arg("ood_scores"));

  m.def(
      "risk_curve",
      [](const std::vector<double>& scores, const std::vector<std::size_t>& y, const std::vector<std::size_t>& yhat,
         const std::vector<std::size_t>& safe, const std::vector<std::size_t>& critical, std::size_t n_classes,
         std::size_t grid_size) {
        const auto part = ClassPartition::make(safe, critical, n_classes);
        const auto c = risk_curve(deferral_order(scores), y, yhat, part, grid_size);
        py::dict d;
        d["coverage"] = vec(c.coverage);
        for (std::size_t f = 0; f < 5; ++f) {
          const auto field = static_cast<RiskField>(f);
          d[py::str(std::string(risk_field_name(field)))] = vec(c.series(field));
          d[py::str("ausc_" + std::string(risk_field_name(field)))] = ausc(c, field);
        }
        d["kept"] = c.kept_total;
        return d;
      },
      py::arg("scores"), py::arg("true_labels"), py::arg("predicted_labels"), py::arg("safe"), py::arg("critical"),
      py::arg("n_classes"), py::arg("grid_size") = kDefaultGridSize,
      "Risk-coverage curve for one deferral score (higher score is deferred first).");

  m.def(
      "bootstrap",
      [](const SampleTensor& t, const std::vector<std::size_t>& labels, const std::vector<std::size_t>& safe,
         const std::vector<std::size_t>& critical, std::size_t n_resamples, std::uint64_t seed, std::string risk,
         unsigned threads) {
        const auto part = ClassPartition::make(safe, critical, t.n_classes());
        const auto field = parse_risk_field(risk);
        if (!field) throw DomainError("unknown risk field " + risk);
        const auto ls = LabelSet::from(t, labels);
        BootstrapOptions o;
        o.n_resamples = n_resamples;
        o.seed = seed;
        o.field = *field;
        o.threads = threads;
        BootstrapSummary s;
        {
          py::gil_scoped_release release;
          s = bootstrap(policy_inputs(report_all(t, &part, threads)), ls.true_labels(), ls.predicted_labels(), part, o);
        }
        py::dict d;
        py::list pols;
        for (const auto& p : s.policies) {
          py::dict e;
          e["name"] = p.name;
          e["ausc"] = p.ausc_full;
          e["ausc_mean"] = p.ausc_mean;
          e["ausc_std"] = p.ausc_std;
          e["ausc_ci95"] = py::make_tuple(p.ausc_ci_low, p.ausc_ci_high);
          e["best_fraction"] = p.best_fraction;
          e["ausc_samples"] = vec(p.ausc_samples);
          pols.append(e);
        }
        d["policies"] = pols;
        d["win_matrix"] = matrix(s.win_matrix, s.policies.size(), s.policies.size());
        return d;
      },
      py::arg("tensor"), py::arg("labels"), py::arg("safe"), py::arg("critical"), py::arg("n_resamples") = 200,
      py::arg("seed") = 0, py::arg("risk") = "critical_fnr", py::arg("threads") = 1);

  m.def(
      "sweep",
      [](const std::vector<std::pair<double, const SampleTensor*>>& points) {
        std::vector<NoiseSweepPoint> pts;
        for (const auto& [alpha, t] : points) pts.push_back(sweep_point(*t, alpha));
        py::list out;
        for (const auto& r : sweep_table(pts)) {
          py::dict d;
          d["alpha"] = r.point.alpha;
          d["mean_aleatoric"] = r.point.mean_aleatoric;
          d["mean_mi"] = r.point.mean_epistemic_mi;
          d["mean_csum"] = r.point.mean_epistemic_csum;
          d["r_rel_mi"] = r.r_rel_mi ? py::cast(*r.r_rel_mi) : py::none();
          d["r_rel_csum"] = r.r_rel_csum ? py::cast(*r.r_rel_csum) : py::none();
          d["inflation"] = r.inflation ? py::cast(*r.inflation) : py::none();
          out.append(d);
        }
        return out;
      },
      py::arg("points"), "Noise sweep table from (alpha, tensor) pairs; exactly one alpha must be 0.");

  m.def("analytic_eu_mixture",
        [](std::vector<std::vector<double>> points, std::vector<double> weights) {
          return analytic_eu(AnalyticDistribution::mixture(std::move(points), std::move(weights)));
        },
        py::arg("points"), py::arg("weights"));
  m.def("analytic_eu_dirichlet",
        [](std::vector<double> alpha) { return analytic_eu(AnalyticDistribution::dirichlet(std::move(alpha))); },
        py::arg("alpha"));
  m.def("analytic_eu_vertex", [](std::size_t K) { return analytic_eu(AnalyticDistribution::vertex(K)); },
        py::arg("n_classes"));

  m.def(
      "synth_classifier",
      [](std::size_t n_inputs, std::size_t n_samples, std::size_t n_classes, std::uint64_t seed, double flatten) {
        ClassifierSpec spec;
        spec.n_inputs = n_inputs;
        spec.n_samples = n_samples;
        spec.n_classes = n_classes;
        spec.seed = seed;
        spec.flatten = flatten;
        auto d = synth_classifier(spec);
        return py::make_tuple(std::move(d.tensor), d.labels);
      },
      py::arg("n_inputs") = 100, py::arg("n_samples") = 50, py::arg("n_classes") = 4, py::arg("seed") = 0,
      py::arg("flatten") = 0.0, "Returns (tensor, labels).");

  m.def(
      "ingest",
      [](const std::filesystem::path& path) {
        auto d = io::ingest(path);
        return py::make_tuple(std::move(d.tensor), d.labels ? py::cast(*d.labels) : py::none());
      },
      py::arg("path"), "Returns (tensor, labels or None).");
  m.def(
      "save",
      [](const std::filesystem::path& path, const SampleTensor& t, std::optional<std::vector<std::size_t>> labels,
         const std::string& format) {
        if (format != "jsonl" && format != "binary") throw DomainError("format must be jsonl or binary");
        io::save(path, io::Dataset{t, std::move(labels)}, format == "jsonl" ? io::Format::kJsonl : io::Format::kBinary);
      },
      py::arg("path"), py::arg("tensor"), py::arg("labels") = py::none(), py::arg("format") = "jsonl");

  m.def(
      "self_test",
      [](std::uint64_t seed) {
        SelfTestOptions o;
        if (seed != 0) o.seed = seed;
        py::list out;
        for (const auto& r : run_self_test(o)) out.append(py::make_tuple(r.name, r.passed, r.detail));
        return out;
      },
      py::arg("seed") = 0, "List of (check, passed, detail).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
