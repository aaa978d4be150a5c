#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "tlds/audit.hpp"
#include "tlds/experiment.hpp"
#include "tlds/mining.hpp"
#include "tlds/optimizer.hpp"
#include "tlds/synth.hpp"

namespace {

using namespace tlds;

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

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

FeaturePolicy load_policy(const std::string& path) {
  if (path.empty()) return FeaturePolicy{};
  return FeaturePolicy::from_json(read_file(path));
}

ObjectiveConfig load_objective(const std::string& path) {
  if (path.empty()) return ObjectiveConfig{};
  return ObjectiveConfig::from_json(read_file(path));
}

TabularDataset load_data(const std::string& csv, const std::string& schema) {
  return load_csv(csv, SchemaConfig::from_json(read_file(schema)));
}

// Label set covering the target column plus any labels the model emits.
LabelSet label_union(const std::vector<std::string>& target,
                     const TwoLevelDecisionSet* model) {
  std::set<std::string> all(target.begin(), target.end());
  if (model != nullptr) {
    for (const auto& r : model->rules()) all.insert(r.c);
    if (model->fitted()) all.insert(model->default_label());
  }
  return LabelSet(std::vector<std::string>(all.begin(), all.end()));
}

struct SynthArgs {
  std::string generator = "theorem1";
  std::size_t rows = 10000;
  std::uint64_t seed = 7;
  double rho = 0.9;
  double noise = 0.1;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  SynthSpec spec;
  spec.generator = generator_from_string(a.generator);
  spec.n_rows = a.rows;
  spec.seed = a.seed;
  spec.rho = a.rho;
  spec.noise = a.noise;
  SynthResult r = generate(spec);
  r.data.save_csv(a.out);
  write_file(sibling_path(a.out, ".schema.json"), r.data.schema().to_json());
  write_file(sibling_path(a.out, ".discretization.json"), r.dspec.to_json());
  if (r.planted)
    write_file(sibling_path(a.out, ".planted.json"), r.planted->to_json());
  std::cout << "wrote " << a.out << " (" << r.data.n_rows() << " rows)\n";
  return 0;
}

struct DiscretizeArgs {
  std::string data, schema, out, spec_out;
  std::size_t n_bins = 4;
};

int cmd_discretize(const DiscretizeArgs& a) {
  TabularDataset raw = load_data(a.data, a.schema);
  DiscretizeResult r = discretize(raw, {a.n_bins});
  r.data.save_csv(a.out);
  std::string spec_path =
      a.spec_out.empty() ? sibling_path(a.out, ".discretization.json")
                         : a.spec_out;
  write_file(spec_path, r.spec.to_json());
  for (const auto& w : r.spec.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << a.out << " and " << spec_path << "\n";
  return 0;
}

struct MineArgs {
  std::string data, schema, policy, out;
  double min_support = 0.05;
  std::size_t max_width = 3;
  std::size_t outer_max_width = 0;
};

int cmd_mine(const MineArgs& a) {
  TabularDataset data = load_data(a.data, a.schema);
  CandidatePools pools =
      cap_outer_width(mine_candidates(data, a.min_support, a.max_width),
                      a.outer_max_width);
  if (!a.policy.empty()) {
    FeaturePolicy policy = load_policy(a.policy);
    policy.validate_against(data);
    pools = filter_pools(pools, policy);
  }
  write_file(a.out, pools.to_json());
  std::cout << "wrote " << a.out << " (|ND|=" << pools.nd.size()
            << ", |DL|=" << pools.dl.size() << ")\n";
  return 0;
}

struct FitArgs {
  std::string data, schema, pools, policy, config, out, report, text;
  std::string blackbox;  // explain only
  std::uint64_t seed = 0;
  std::int64_t budget = kDefaultBudget;
  bool enforce_acceptable = false;
};

int cmd_train(const FitArgs& a) {
  TabularDataset data = load_data(a.data, a.schema);
  CandidatePools pools = CandidatePools::from_json(read_file(a.pools));
  FeaturePolicy policy = load_policy(a.policy);
  policy.validate_against(data);
  ObjectiveConfig cfg = load_objective(a.config);
  LabelSet labels = LabelSet::from_column(data.label());

  RunReport report;
  TwoLevelDecisionSet model;
  if (a.enforce_acceptable)
    model = optimize_acceptable(data, data.label(), pools, labels, policy, cfg,
                                a.seed, a.budget, &report);
  else
    model = train_interpretable_blackbox(data, pools, labels, policy, cfg,
                                         a.seed, a.budget, &report);
  write_file(a.out, model.to_json());
  if (!a.report.empty()) write_file(a.report, report.to_json());
  if (!a.text.empty()) write_file(a.text, model.to_text());
  double acc = 1.0 - relative_error(model.predict_all(data), data.label()).value();
  std::cout << "trained model: size=" << model.size()
            << " train_accuracy=" << format_double(acc) << "\n";
  return 0;
}

int cmd_explain(const FitArgs& a) {
  TabularDataset data = load_data(a.data, a.schema);
  CandidatePools pools = CandidatePools::from_json(read_file(a.pools));
  FeaturePolicy policy = load_policy(a.policy);
  policy.validate_against(data);
  ObjectiveConfig cfg = load_objective(a.config);

  std::vector<std::string> target;
  std::unique_ptr<TwoLevelDecisionSet> blackbox;
  if (!a.blackbox.empty()) {
    blackbox = std::make_unique<TwoLevelDecisionSet>(
        TwoLevelDecisionSet::from_json(read_file(a.blackbox)));
    target = blackbox->predict_all(data);
  } else if (data.has_blackbox()) {
    target = data.blackbox();
  } else {
    throw Error("explain needs --blackbox model.json or a blackbox column in "
                "the data");
  }
  LabelSet labels = label_union(target, blackbox.get());

  RunReport report;
  TwoLevelDecisionSet model;
  if (a.enforce_acceptable) {
    model = optimize_acceptable(data, target, pools, labels, policy, cfg,
                                a.seed, a.budget, &report);
  } else {
    MeasureContext ctx(data, target, filter_pools(pools, policy), policy,
                       labels);
    model = optimize(ctx, cfg, a.seed, a.budget, &report);
  }
  write_file(a.out, model.to_json());
  if (!a.report.empty()) write_file(a.report, report.to_json());
  if (!a.text.empty()) write_file(a.text, model.to_text());
  double fid = 1.0 - relative_error(model.predict_all(data), target).value();
  std::cout << "explanation: size=" << model.size()
            << " train_fidelity=" << format_double(fid) << "\n";
  return 0;
}

struct AuditArgs {
  std::string blackbox, explanation, data, schema, policy, pools, config, out;
  double eps_plus = 0.05;
  bool estimate_eps = false;
  std::uint64_t seed = 0;
  std::int64_t budget = kDefaultBudget;
};

int cmd_audit(const AuditArgs& a) {
  TabularDataset data = load_data(a.data, a.schema);
  TwoLevelDecisionSet blackbox =
      TwoLevelDecisionSet::from_json(read_file(a.blackbox));
  TwoLevelDecisionSet explanation =
      TwoLevelDecisionSet::from_json(read_file(a.explanation));
  FeaturePolicy policy = load_policy(a.policy);
  policy.validate_against(data);

  AuditReport report;
  if (a.estimate_eps) {
    if (a.pools.empty())
      throw Error("--estimate-eps needs --pools for the optimizer legs");
    CandidatePools pools = CandidatePools::from_json(read_file(a.pools));
    ObjectiveConfig cfg = load_objective(a.config);
    LabelSet labels = label_union(blackbox.predict_all(data), &blackbox);
    report = run_audit_full(explanation, blackbox, data, pools, labels, policy,
                            cfg, a.eps_plus, a.seed, a.budget);
  } else {
    report = run_audit(explanation, blackbox, data, policy, a.eps_plus);
  }
  if (!a.out.empty()) write_file(a.out, report.to_json());
  std::cout << report.verdict_line() << "\n";
  return 0;
}

struct MeasuresArgs {
  std::string model, data, schema, pools, policy, out;
  std::string against = "auto";  // blackbox | label | auto
};

int cmd_measures(const MeasuresArgs& a) {
  TabularDataset data = load_data(a.data, a.schema);
  TwoLevelDecisionSet model = TwoLevelDecisionSet::from_json(read_file(a.model));
  CandidatePools pools = CandidatePools::from_json(read_file(a.pools));
  FeaturePolicy policy = load_policy(a.policy);

  if (a.against != "auto" && a.against != "label" && a.against != "blackbox")
    throw Error("--against must be auto, label, or blackbox");
  std::vector<std::string> target;
  if (a.against == "label" || (a.against == "auto" && !data.has_blackbox()))
    target = data.label();
  else
    target = data.blackbox();
  LabelSet labels = label_union(target, &model);

  MeasureContext ctx(data, target, pools, policy, labels);
  RawMeasures raw = raw_measures(model, ctx);
  auto terms = objective_terms(raw, ctx);
  std::string json = measures_to_json(raw, terms);
  if (!a.out.empty()) write_file(a.out, json);
  std::cout << json;
  return 0;
}

struct ExperimentArgs {
  std::string config, preset, out;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentConfig cfg;
  if (!a.config.empty())
    cfg = ExperimentConfig::from_json(read_file(a.config));
  else if (a.preset == "theorem1")
    cfg = ExperimentConfig::theorem1_default();
  else if (a.preset == "correlated-bail")
    cfg = ExperimentConfig::correlated_bail_default();
  else
    throw Error("experiment needs --config or --preset "
                "{theorem1|correlated-bail}");
  ExperimentResult res = run_experiment(cfg, a.out);
  std::cout << res.summary_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-level decision-set explanations and misleadingness audits"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--generator", synth_args.generator,
                    "theorem1 or correlated-bail");
  synth->add_option("--rows", synth_args.rows, "number of rows");
  synth->add_option("--seed", synth_args.seed, "rng seed");
  synth->add_option("--rho", synth_args.rho, "proxy correlation");
  synth->add_option("--noise", synth_args.noise, "label flip probability");
  synth->add_option("--out", synth_args.out, "output csv path")->required();

  DiscretizeArgs disc_args;
  auto* disc = app.add_subcommand("discretize", "quantile-bin numeric columns");
  disc->add_option("--data", disc_args.data, "input csv")->required();
  disc->add_option("--schema", disc_args.schema, "schema config json")->required();
  disc->add_option("--n-bins", disc_args.n_bins, "bins per numeric feature");
  disc->add_option("--out", disc_args.out, "output csv")->required();
  disc->add_option("--spec-out", disc_args.spec_out, "discretization spec path");

  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "mine frequent conjunction pools");
  mine->add_option("--data", mine_args.data, "input csv")->required();
  mine->add_option("--schema", mine_args.schema, "schema config json")->required();
  mine->add_option("--min-support", mine_args.min_support, "support threshold");
  mine->add_option("--max-width", mine_args.max_width, "max conjunction width");
  mine->add_option("--outer-max-width", mine_args.outer_max_width,
                   "cap on outer descriptor width (0 = uncapped)");
  mine->add_option("--policy", mine_args.policy, "policy json to filter pools");
  mine->add_option("--out", mine_args.out, "output pools json")->required();

  FitArgs train_args;
  auto* train = app.add_subcommand("train",
                                   "train an interpretable classifier against "
                                   "ground-truth labels");
  train->add_option("--data", train_args.data, "input csv")->required();
  train->add_option("--schema", train_args.schema, "schema config json")->required();
  train->add_option("--pools", train_args.pools, "pools json")->required();
  train->add_option("--policy", train_args.policy, "policy json");
  train->add_option("--config", train_args.config, "objective config json");
  train->add_option("--seed", train_args.seed, "rng seed");
  train->add_option("--budget", train_args.budget, "max accepted moves");
  train->add_flag("--enforce-acceptable", train_args.enforce_acceptable,
                  "retry with boosted lambda6 until desired features appear");
  train->add_option("--out", train_args.out, "output model json")->required();
  train->add_option("--report", train_args.report, "run report json path");
  train->add_option("--text", train_args.text, "human-readable model path");

  FitArgs explain_args;
  auto* explain = app.add_subcommand("explain",
                                     "build an explanation of a black box");
  explain->add_option("--data", explain_args.data, "input csv")->required();
  explain->add_option("--schema", explain_args.schema, "schema config json")->required();
  explain->add_option("--pools", explain_args.pools, "pools json")->required();
  explain->add_option("--blackbox", explain_args.blackbox,
                      "black-box model json (else the data's blackbox column)");
  explain->add_option("--policy", explain_args.policy, "policy json");
  explain->add_option("--config", explain_args.config, "objective config json");
  explain->add_option("--seed", explain_args.seed, "rng seed");
  explain->add_option("--budget", explain_args.budget, "max accepted moves");
  explain->add_flag("--enforce-acceptable", explain_args.enforce_acceptable,
                    "retry with boosted lambda6 until desired features appear");
  explain->add_option("--out", explain_args.out, "output model json")->required();
  explain->add_option("--report", explain_args.report, "run report json path");
  explain->add_option("--text", explain_args.text, "human-readable model path");

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit",
                                   "audit an (explanation, black box) pair");
  audit->add_option("--blackbox", audit_args.blackbox, "black-box model json")->required();
  audit->add_option("--explanation", audit_args.explanation, "explanation json")->required();
  audit->add_option("--data", audit_args.data, "evaluation csv")->required();
  audit->add_option("--schema", audit_args.schema, "schema config json")->required();
  audit->add_option("--policy", audit_args.policy, "policy json")->required();
  audit->add_option("--eps-plus", audit_args.eps_plus, "fidelity gate");
  audit->add_flag("--estimate-eps", audit_args.estimate_eps,
                  "also estimate eps_r/eps_a with the optimizer");
  audit->add_option("--pools", audit_args.pools, "pools json (for --estimate-eps)");
  audit->add_option("--config", audit_args.config, "objective config json");
  audit->add_option("--seed", audit_args.seed, "rng seed");
  audit->add_option("--budget", audit_args.budget, "max accepted moves");
  audit->add_option("--out", audit_args.out, "report json path");

  MeasuresArgs measures_args;
  auto* measures = app.add_subcommand(
      "measures", "dump the nine raw measures and six objective terms");
  measures->add_option("--model", measures_args.model, "model json")->required();
  measures->add_option("--data", measures_args.data, "csv")->required();
  measures->add_option("--schema", measures_args.schema, "schema config json")->required();
  measures->add_option("--pools", measures_args.pools, "pools json")->required();
  measures->add_option("--policy", measures_args.policy, "policy json");
  measures->add_option("--against", measures_args.against,
                       "disagreement target: blackbox, label, or auto");
  measures->add_option("--out", measures_args.out, "output json path");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment",
                                        "run the full pipeline and audits");
  experiment->add_option("--config", exp_args.config, "experiment config json");
  experiment->add_option("--preset", exp_args.preset,
                         "theorem1 or correlated-bail");
  experiment->add_option("--out", exp_args.out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(synth_args);
    if (disc->parsed()) return cmd_discretize(disc_args);
    if (mine->parsed()) return cmd_mine(mine_args);
    if (train->parsed()) return cmd_train(train_args);
    if (explain->parsed()) return cmd_explain(explain_args);
    if (audit->parsed()) return cmd_audit(audit_args);
    if (measures->parsed()) return cmd_measures(measures_args);
    if (experiment->parsed()) return cmd_experiment(exp_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
