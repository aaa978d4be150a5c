#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tlds/audit.hpp"
#include "tlds/experiment.hpp"
#include "tlds/mining.hpp"
#include "tlds/optimizer.hpp"
#include "tlds/synth.hpp"

namespace py = pybind11;
using namespace tlds;

namespace {

LabelSet make_labels(const std::vector<std::string>& target,
                     const TwoLevelDecisionSet* model) {
  std::set<std::string> all(target.begin(), target.end());
  if (model != nullptr) {
    for (const auto& r : model->rules()) all.insert(r.c);
    if (model->fitted()) all.insert(model->default_label());
  }
  return LabelSet(std::vector<std::string>(all.begin(), all.end()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "two-level decision-set explanations and misleadingness audits";

  py::register_exception<Error>(m, "TldsError");

  py::class_<TabularDataset>(m, "Dataset")
      .def(py::init<>())
      .def("n_rows", &TabularDataset::n_rows)
      .def("feature_names",
           [](const TabularDataset& d) {
             std::vector<std::string> names;
             for (const auto& f : d.features()) names.push_back(f.name);
             return names;
           })
      .def("has_label", &TabularDataset::has_label)
      .def("has_blackbox", &TabularDataset::has_blackbox)
      .def("label", [](const TabularDataset& d) { return d.label(); })
      .def("blackbox", [](const TabularDataset& d) { return d.blackbox(); })
      .def("set_blackbox", &TabularDataset::set_blackbox)
      .def("schema_json",
           [](const TabularDataset& d) { return d.schema().to_json(); })
      .def("to_csv", &TabularDataset::to_csv)
      .def("save_csv", &TabularDataset::save_csv);

  m.def("load_csv", [](const std::string& path, const std::string& schema_json) {
    return load_csv(path, SchemaConfig::from_json(schema_json));
  });

  m.def("split_dataset",
        [](const TabularDataset& d, double train, double test,
           double validation, std::uint64_t seed) {
          DatasetSplit s = split_dataset(d, {train, test, validation}, seed);
          return py::make_tuple(s.train, s.test, s.validation);
        },
        py::arg("data"), py::arg("train") = 0.70, py::arg("test") = 0.25,
        py::arg("validation") = 0.05, py::arg("seed") = 13);

  py::class_<FeaturePolicy>(m, "FeaturePolicy")
      .def(py::init([](const std::vector<std::string>& desired,
                       const std::vector<std::string>& prohibited,
                       const std::vector<std::string>& ambivalent) {
             FeaturePolicy p;
             p.desired.insert(desired.begin(), desired.end());
             p.prohibited.insert(prohibited.begin(), prohibited.end());
             p.ambivalent.insert(ambivalent.begin(), ambivalent.end());
             p.validate();
             return p;
           }),
           py::arg("desired") = std::vector<std::string>{},
           py::arg("prohibited") = std::vector<std::string>{},
           py::arg("ambivalent") = std::vector<std::string>{})
      .def_static("from_json", &FeaturePolicy::from_json)
      .def("to_json", &FeaturePolicy::to_json);

  py::class_<ObjectiveConfig>(m, "ObjectiveConfig")
      .def(py::init<>())
      .def_static("from_json", &ObjectiveConfig::from_json)
      .def("to_json", &ObjectiveConfig::to_json)
      .def_readwrite("lambdas", &ObjectiveConfig::lambdas)
      .def_readwrite("eps1", &ObjectiveConfig::eps1)
      .def_readwrite("eps2", &ObjectiveConfig::eps2)
      .def_readwrite("eps3", &ObjectiveConfig::eps3)
      .def_readwrite("delta", &ObjectiveConfig::delta);

  py::class_<TwoLevelDecisionSet>(m, "DecisionSet")
      .def_static("from_json", &TwoLevelDecisionSet::from_json)
      .def("to_json", &TwoLevelDecisionSet::to_json)
      .def("to_text",
           [](const TwoLevelDecisionSet& model) { return model.to_text(); })
      .def("size", &TwoLevelDecisionSet::size)
      .def("features",
           [](const TwoLevelDecisionSet& model) {
             const auto f = model.features();
             return std::vector<std::string>(f.begin(), f.end());
           })
      .def("default_label", &TwoLevelDecisionSet::default_label)
      .def("predict_all", &TwoLevelDecisionSet::predict_all)
      .def("__eq__", [](const TwoLevelDecisionSet& a,
                        const TwoLevelDecisionSet& b) { return a == b; });

  py::class_<CandidatePools>(m, "CandidatePools")
      .def_static("from_json", &CandidatePools::from_json)
      .def("to_json", &CandidatePools::to_json)
      .def("nd_size", [](const CandidatePools& p) { return p.nd.size(); })
      .def("dl_size", [](const CandidatePools& p) { return p.dl.size(); });

  m.def("generate_theorem1", &generate_theorem1, py::arg("n_rows"),
        py::arg("seed"));
  m.def("generate_correlated_bail",
        [](std::size_t n_rows, std::uint64_t seed, double rho, double noise) {
          SynthSpec spec;
          spec.generator = Generator::correlated_bail;
          spec.n_rows = n_rows;
          spec.seed = seed;
          spec.rho = rho;
          spec.noise = noise;
          return generate_correlated_bail(spec);
        },
        py::arg("n_rows"), py::arg("seed"), py::arg("rho") = 0.9,
        py::arg("noise") = 0.1);

  py::class_<SynthResult>(m, "SynthResult")
      .def_readonly("data", &SynthResult::data)
      .def("dspec_json", [](const SynthResult& r) { return r.dspec.to_json(); })
      .def_property_readonly("planted", [](const SynthResult& r) {
        return r.planted ? py::cast(*r.planted) : py::none().cast<py::object>();
      });

  m.def("discretize",
        [](const TabularDataset& raw, std::size_t n_bins) {
          DiscretizeResult r = discretize(raw, {n_bins});
          return py::make_tuple(r.data, r.spec.to_json());
        },
        py::arg("data"), py::arg("n_bins") = 4);

  m.def("mine_candidates", &mine_candidates, py::arg("data"),
        py::arg("min_support") = 0.05, py::arg("max_width") = 3);
  m.def("cap_outer_width", &cap_outer_width, py::arg("pools"),
        py::arg("max_outer_width"));
  m.def("filter_pools", &filter_pools, py::arg("pools"), py::arg("policy"));

  m.def("train_blackbox",
        [](const TabularDataset& data, const CandidatePools& pools,
           const FeaturePolicy& policy, const ObjectiveConfig& cfg,
           std::uint64_t seed, std::int64_t budget, bool enforce_acceptable) {
          LabelSet labels = LabelSet::from_column(data.label());
          if (enforce_acceptable)
            return optimize_acceptable(data, data.label(), pools, labels,
                                       policy, cfg, seed, budget);
          return train_interpretable_blackbox(data, pools, labels, policy, cfg,
                                              seed, budget);
        },
        py::arg("data"), py::arg("pools"), py::arg("policy"), py::arg("config"),
        py::arg("seed") = 0, py::arg("budget") = kDefaultBudget,
        py::arg("enforce_acceptable") = false);

  m.def("explain",
        [](const TabularDataset& data, const TwoLevelDecisionSet& blackbox,
           const CandidatePools& pools, const FeaturePolicy& policy,
           const ObjectiveConfig& cfg, std::uint64_t seed, std::int64_t budget,
           bool enforce_acceptable) {
          std::vector<std::string> target = blackbox.predict_all(data);
          LabelSet labels = make_labels(target, &blackbox);
          if (enforce_acceptable)
            return optimize_acceptable(data, target, pools, labels, policy,
                                       cfg, seed, budget);
          MeasureContext ctx(data, target, filter_pools(pools, policy), policy,
                             labels);
          return optimize(ctx, cfg, seed, budget);
        },
        py::arg("data"), py::arg("blackbox"), py::arg("pools"),
        py::arg("policy"), py::arg("config"), py::arg("seed") = 0,
        py::arg("budget") = kDefaultBudget,
        py::arg("enforce_acceptable") = false);

  m.def("relative_error",
        [](const TwoLevelDecisionSet& e, const TwoLevelDecisionSet& b,
           const TabularDataset& data) {
          RelError r = relative_error(e, b, data);
          return py::make_tuple(r.mismatches, r.n, r.value());
        });

  m.def("is_acceptable", &is_acceptable, py::arg("model"), py::arg("policy"));

  m.def("run_audit",
        [](const TwoLevelDecisionSet& e, const TwoLevelDecisionSet& b,
           const TabularDataset& data, const FeaturePolicy& policy,
           double eps_plus) { return run_audit(e, b, data, policy, eps_plus).to_json(); },
        py::arg("explanation"), py::arg("blackbox"), py::arg("data"),
        py::arg("policy"), py::arg("eps_plus") = 0.05);

  m.def("run_audit_full",
        [](const TwoLevelDecisionSet& e, const TwoLevelDecisionSet& b,
           const TabularDataset& data, const CandidatePools& pools,
           const FeaturePolicy& policy, const ObjectiveConfig& cfg,
           double eps_plus, std::uint64_t seed, std::int64_t budget) {
          LabelSet labels = make_labels(b.predict_all(data), &b);
          return run_audit_full(e, b, data, pools, labels, policy, cfg,
                                eps_plus, seed, budget)
              .to_json();
        },
        py::arg("explanation"), py::arg("blackbox"), py::arg("data"),
        py::arg("pools"), py::arg("policy"), py::arg("config"),
        py::arg("eps_plus") = 0.05, py::arg("seed") = 0,
        py::arg("budget") = kDefaultBudget);

  m.def("measures_json",
        [](const TwoLevelDecisionSet& model, const TabularDataset& data,
           const std::vector<std::string>& target, const CandidatePools& pools,
           const FeaturePolicy& policy) {
          LabelSet labels = make_labels(target, &model);
          MeasureContext ctx(data, target, pools, policy, labels);
          RawMeasures raw = raw_measures(model, ctx);
          return measures_to_json(raw, objective_terms(raw, ctx));
        },
        py::arg("model"), py::arg("data"), py::arg("target"), py::arg("pools"),
        py::arg("policy") = FeaturePolicy{});

  m.def("run_experiment",
        [](const std::string& config_json, const std::string& out_dir) {
          ExperimentConfig cfg = ExperimentConfig::from_json(config_json);
          return run_experiment(cfg, out_dir).summary_json();
        },
        py::arg("config_json"), py::arg("out_dir") = "");
  m.def("theorem1_experiment_config",
        [] { return ExperimentConfig::theorem1_default().to_json(); });
  m.def("correlated_bail_experiment_config",
        [] { return ExperimentConfig::correlated_bail_default().to_json(); });
}
