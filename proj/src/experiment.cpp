#include "tlds/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace tlds {

using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
}

ordered_json policy_json(const FeaturePolicy& p) {
  return ordered_json{{"desired", p.desired},
                      {"ambivalent", p.ambivalent},
                      {"prohibited", p.prohibited}};
}

FeaturePolicy policy_from(const ordered_json& j) {
  return FeaturePolicy::from_json(j.dump());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (variants.empty())
    throw Error("experiment config needs at least one explanation variant");
  if (!data.synth && data.csv_path.empty())
    throw Error("experiment config needs a generator or a csv data source");
  if (!data.csv_path.empty() && data.schema_path.empty())
    throw Error("csv data source needs a schema config path");
  objective.validate();
  blackbox_policy.validate();
  audit_policy.validate();
  for (const auto& v : variants) v.policy.validate();
  if (eps_plus < 0 || eps_plus > 1) throw Error("eps_plus must be in [0, 1]");
}

std::string ExperimentConfig::to_json() const {
  ordered_json jdata;
  if (data.synth) {
    jdata["generator"] = to_string(data.synth->generator);
    jdata["rows"] = data.synth->n_rows;
    jdata["seed"] = data.synth->seed;
    jdata["rho"] = data.synth->rho;
    jdata["noise"] = data.synth->noise;
  } else {
    jdata["csv"] = data.csv_path;
    jdata["schema"] = data.schema_path;
    if (data.discretize_bins) jdata["discretize_bins"] = *data.discretize_bins;
  }
  ordered_json jvariants = ordered_json::array();
  for (const auto& v : variants)
    jvariants.push_back({{"name", v.name}, {"policy", policy_json(v.policy)}});
  ordered_json j{
      {"name", name},
      {"data", jdata},
      {"split",
       {{"train", split.train},
        {"test", split.test},
        {"validation", split.validation}}},
      {"seed", seed},
      {"mining",
       {{"min_support", min_support},
        {"max_width", max_width},
        {"outer_max_width", outer_max_width}}},
      {"objective", ordered_json::parse(objective.to_json())},
      {"budget", budget},
      {"blackbox_policy", policy_json(blackbox_policy)},
      {"variants", jvariants},
      {"audit_policy", policy_json(audit_policy)},
      {"eps_plus", eps_plus},
      {"estimate_eps", estimate_eps}};
  return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  const auto& jd = j.at("data");
  if (jd.contains("generator")) {
    SynthSpec spec;
    spec.generator = generator_from_string(jd.at("generator").get<std::string>());
    if (jd.contains("rows")) spec.n_rows = jd.at("rows").get<std::size_t>();
    if (jd.contains("seed")) spec.seed = jd.at("seed").get<std::uint64_t>();
    if (jd.contains("rho")) spec.rho = jd.at("rho").get<double>();
    if (jd.contains("noise")) spec.noise = jd.at("noise").get<double>();
    cfg.data.synth = spec;
  } else {
    cfg.data.csv_path = jd.at("csv").get<std::string>();
    cfg.data.schema_path = jd.at("schema").get<std::string>();
    if (jd.contains("discretize_bins"))
      cfg.data.discretize_bins = jd.at("discretize_bins").get<std::size_t>();
  }
  if (j.contains("split")) {
    cfg.split.train = j.at("split").at("train").get<double>();
    cfg.split.test = j.at("split").at("test").get<double>();
    cfg.split.validation = j.at("split").at("validation").get<double>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("mining")) {
    const auto& jm = j.at("mining");
    if (jm.contains("min_support"))
      cfg.min_support = jm.at("min_support").get<double>();
    if (jm.contains("max_width"))
      cfg.max_width = jm.at("max_width").get<std::size_t>();
    if (jm.contains("outer_max_width"))
      cfg.outer_max_width = jm.at("outer_max_width").get<std::size_t>();
  }
  if (j.contains("objective"))
    cfg.objective = ObjectiveConfig::from_json(j.at("objective").dump());
  if (j.contains("budget")) cfg.budget = j.at("budget").get<std::int64_t>();
  if (j.contains("blackbox_policy"))
    cfg.blackbox_policy = policy_from(j.at("blackbox_policy"));
  for (const auto& jv : j.at("variants"))
    cfg.variants.push_back(
        {jv.at("name").get<std::string>(), policy_from(jv.at("policy"))});
  if (j.contains("audit_policy"))
    cfg.audit_policy = policy_from(j.at("audit_policy"));
  if (j.contains("eps_plus")) cfg.eps_plus = j.at("eps_plus").get<double>();
  if (j.contains("estimate_eps"))
    cfg.estimate_eps = j.at("estimate_eps").get<bool>();
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::theorem1_default() {
  ExperimentConfig cfg;
  cfg.name = "theorem1";
  SynthSpec spec;
  spec.generator = Generator::theorem1;
  spec.n_rows = 10000;
  spec.seed = 7;
  cfg.data.synth = spec;
  cfg.seed = 13;
  cfg.min_support = 0.05;
  cfg.max_width = 2;
  cfg.objective.lambdas = {0.01, 0.01, 0.01, 1, 1, 1};
  cfg.objective.eps1 = 4;
  cfg.objective.eps2 = 2;
  cfg.objective.eps3 = 4;
  cfg.blackbox_policy.desired = {"x2"};
  cfg.blackbox_policy.prohibited = {"x1"};
  VariantConfig e;
  e.name = "E";
  e.policy.desired = {"x1"};
  e.policy.prohibited = {"x2"};
  cfg.variants.push_back(e);
  cfg.audit_policy = e.policy;
  cfg.eps_plus = 0.05;
  return cfg;
}

ExperimentConfig ExperimentConfig::correlated_bail_default() {
  ExperimentConfig cfg;
  cfg.name = "correlated-bail";
  SynthSpec spec;
  spec.generator = Generator::correlated_bail;
  spec.n_rows = 10000;
  spec.seed = 7;
  spec.rho = 0.9;
  spec.noise = 0.1;
  cfg.data.synth = spec;
  cfg.seed = 13;
  cfg.min_support = 0.08;
  cfg.max_width = 2;
  cfg.outer_max_width = 1;
  cfg.objective.lambdas = {0.01, 0.01, 0.01, 0.2, 1, 20};
  cfg.objective.eps1 = 8;
  cfg.objective.eps2 = 2;
  cfg.objective.eps3 = 6;
  cfg.budget = kDefaultBudget;
  cfg.blackbox_policy.desired = {"race", "gender"};
  cfg.blackbox_policy.prohibited = {"PJI", "PFTA"};
  VariantConfig e1, e2, e3;
  e1.name = "E1";
  e1.policy.prohibited = {"race", "gender", "PJI", "PFTA"};
  e2.name = "E2";
  e2.policy.desired = {"race", "gender", "PJI", "PFTA"};
  e3.name = "E3";
  e3.policy.desired = {"PJI", "PFTA"};
  e3.policy.prohibited = {"race", "gender"};
  cfg.variants = {e1, e2, e3};
  cfg.audit_policy.prohibited = {"race", "gender"};
  cfg.eps_plus = 0.05;
  return cfg;
}

namespace {

ordered_json audit_json(const AuditReport& r) {
  return ordered_json::parse(r.to_json());
}

}  // namespace

std::string ExperimentResult::summary_json() const {
  ordered_json jvariants = ordered_json::array();
  for (const auto& v : variants) {
    ordered_json jv{{"name", v.name},
                    {"size", v.model.size()},
                    {"features", v.model.features()},
                    {"audit", audit_json(v.audit)}};
    jvariants.push_back(std::move(jv));
  }
  ordered_json j{
      {"name", config.name},
      {"rows",
       {{"train", splits.train.n_rows()},
        {"test", splits.test.n_rows()},
        {"validation", splits.validation.n_rows()}}},
      {"pool_sizes", {{"nd", pools.nd.size()}, {"dl", pools.dl.size()}}},
      {"blackbox",
       {{"size", blackbox.size()},
        {"features", blackbox.features()},
        {"train_accuracy", blackbox_train_accuracy},
        {"test_accuracy", blackbox_test_accuracy},
        {"self_audit", audit_json(blackbox_self_audit)}}},
      {"variants", jvariants},
      {"failures", failures}};
  return j.dump(2) + "\n";
}

std::string ExperimentResult::summary_text() const {
  std::ostringstream out;
  out << "experiment: " << config.name << "\n";
  out << "rows: train=" << splits.train.n_rows()
      << " test=" << splits.test.n_rows()
      << " validation=" << splits.validation.n_rows() << "\n";
  out << "pools: |ND|=" << pools.nd.size() << " |DL|=" << pools.dl.size()
      << "\n";
  out << "blackbox: size=" << blackbox.size() << std::fixed
      << std::setprecision(4)
      << " train_acc=" << blackbox_train_accuracy
      << " test_acc=" << blackbox_test_accuracy << "\n\n";

  out << std::left << std::setw(12) << "model" << std::right << std::setw(10)
      << "fidelity" << std::setw(6) << "size" << std::setw(12) << "acceptable"
      << std::setw(7) << "o_hat" << std::setw(8) << "o_star" << std::setw(12)
      << "misleading";
  bool any_eps = false;
  for (const auto& v : variants)
    if (v.audit.eps_r) any_eps = true;
  if (any_eps) out << std::setw(9) << "eps_r" << std::setw(9) << "eps_a";
  out << "\n";

  auto row = [&](const std::string& name, const AuditReport& a,
                 std::size_t size) {
    out << std::left << std::setw(12) << name << std::right << std::setw(10)
        << std::fixed << std::setprecision(4) << a.fidelity << std::setw(6)
        << size << std::setw(12)
        << (a.acceptable_explanation ? "yes" : "no") << std::setw(7)
        << (a.o_hat ? 1 : 0) << std::setw(8) << (a.o_star_hat ? 1 : 0)
        << std::setw(12) << (a.potentially_misleading ? "yes" : "no");
    if (any_eps) {
      if (a.eps_r)
        out << std::setw(9) << std::setprecision(4) << *a.eps_r;
      else
        out << std::setw(9) << "-";
      if (a.eps_a)
        out << std::setw(9) << std::setprecision(4) << *a.eps_a;
      else
        out << std::setw(9) << "-";
    }
    out << "\n";
  };
  row("blackbox", blackbox_self_audit, blackbox.size());
  for (const auto& v : variants) row(v.name, v.audit, v.model.size());

  for (const auto& f : failures) out << "FAILED: " << f << "\n";
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir) {
  cfg.validate();
  const bool writing = !out_dir.empty();
  if (writing) std::filesystem::create_directories(out_dir);
  auto emit = [&](const std::string& rel, const std::string& content) {
    if (writing) write_file(out_dir + "/" + rel, content);
  };

  TabularDataset full;
  std::optional<DiscretizationSpec> dspec;
  if (cfg.data.synth) {
    SynthResult synth = generate(*cfg.data.synth);
    full = std::move(synth.data);
    dspec = std::move(synth.dspec);
    if (synth.planted) emit("planted.model.json", synth.planted->to_json());
  } else {
    SchemaConfig schema = SchemaConfig::from_json(read_file(cfg.data.schema_path));
    full = load_csv(cfg.data.csv_path, schema);
    if (cfg.data.discretize_bins) {
      DiscretizeResult d = discretize(full, {*cfg.data.discretize_bins});
      full = std::move(d.data);
      dspec = std::move(d.spec);
      emit("discretization.json", dspec->to_json());
    }
  }
  if (!full.has_label())
    throw Error("experiment data source has no ground-truth label column");

  ExperimentResult res;
  res.config = cfg;
  res.splits = split_dataset(full, cfg.split, cfg.seed);
  res.labels = LabelSet::from_column(res.splits.train.label());
  res.pools = cap_outer_width(
      mine_candidates(res.splits.train, cfg.min_support, cfg.max_width),
      cfg.outer_max_width);

  const DiscretizationSpec* spec_ptr = dspec ? &*dspec : nullptr;

  res.blackbox = optimize_acceptable(
      res.splits.train, res.splits.train.label(), res.pools, res.labels,
      cfg.blackbox_policy, cfg.objective, cfg.seed, cfg.budget);
  res.blackbox_train_accuracy =
      1.0 - relative_error(res.blackbox.predict_all(res.splits.train),
                           res.splits.train.label())
                .value();
  res.blackbox_test_accuracy =
      1.0 - relative_error(res.blackbox.predict_all(res.splits.test),
                           res.splits.test.label())
                .value();
  res.blackbox_self_audit = run_audit(res.blackbox, res.blackbox,
                                      res.splits.test, cfg.audit_policy,
                                      cfg.eps_plus);
  emit("blackbox.model.json", res.blackbox.to_json());
  emit("blackbox.model.txt", res.blackbox.to_text(spec_ptr));

  const std::vector<std::string> bb_train =
      res.blackbox.predict_all(res.splits.train);

  for (const auto& v : cfg.variants) {
    try {
      TwoLevelDecisionSet model = optimize_acceptable(
          res.splits.train, bb_train, res.pools, res.labels, v.policy,
          cfg.objective, cfg.seed, cfg.budget);
      AuditReport audit =
          cfg.estimate_eps
              ? run_audit_full(model, res.blackbox, res.splits.test, res.pools,
                               res.labels, cfg.audit_policy, cfg.objective,
                               cfg.eps_plus, cfg.seed, cfg.budget)
              : run_audit(model, res.blackbox, res.splits.test,
                          cfg.audit_policy, cfg.eps_plus);
      emit(v.name + ".model.json", model.to_json());
      emit(v.name + ".model.txt", model.to_text(spec_ptr));
      emit(v.name + ".audit.json", audit.to_json());
      res.variants.push_back({v.name, std::move(model), std::move(audit)});
    } catch (const Error& e) {
      res.failures.push_back(v.name + ": " + e.what());
    }
  }

  emit("summary.json", res.summary_json());
  emit("summary.txt", res.summary_text());
  if (!res.failures.empty()) {
    ordered_json manifest{{"failures", res.failures}};
    emit("failures.json", manifest.dump(2) + "\n");
    std::string joined;
    for (const auto& f : res.failures) joined += (joined.empty() ? "" : "; ") + f;
    throw Error("experiment finished with failures: " + joined);
  }
  return res;
}

}  // namespace tlds
