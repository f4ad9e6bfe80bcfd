// ragkit command-line front end.

#include "ragkit/graph_io.hpp"
#include "ragkit/model_io.hpp"
#include "ragkit/parallel.hpp"
#include "ragkit/pipeline.hpp"
#include "ragkit/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ragkit;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::usage, "--" + key + ": '" + text + "' is not a number");
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != static_cast<int>(v)) throw Error(ErrorKind::usage, "--" + key + ": '" + text + "' is not an integer");
  return static_cast<int>(v);
}

// "poly:<degree>:<C>" or "rbf:<gamma>:<C>", comma separated.
std::vector<KernelSpec> parse_grid(const std::string& text) {
  std::vector<KernelSpec> grid;
  for (const auto& item : split(text, ',')) {
    const auto f = split(item, ':');
    if (f.size() != 3) throw Error(ErrorKind::usage, "--grid entry '" + item + "' is not kind:param:C");
    KernelSpec k;
    if (f[0] == "poly") {
      k.kind = KernelSpec::Kind::polynomial;
      k.degree = to_int("grid", f[1]);
    } else if (f[0] == "rbf") {
      k.kind = KernelSpec::Kind::gaussian;
      k.gamma = to_double("grid", f[1]);
    } else {
      throw Error(ErrorKind::usage, "--grid kind '" + f[0] + "' is neither poly nor rbf");
    }
    k.c = to_double("grid", f[2]);
    if (auto v = k.check(); !v) throw Error(ErrorKind::usage, "--grid: " + v.reason);
    grid.push_back(k);
  }
  return grid;
}

// Flag overrides of ExperimentConfig, applied after the config file.
struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;

  void add(CLI::App& app, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>("--" + key, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  void apply_schedule(AnnealSchedule& s, const std::string& spec) const {
    for (const auto& kv : split(spec, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::usage, "--schedule item '" + kv + "' is not key=value");
      const std::string k = kv.substr(0, eq);
      const std::string v = kv.substr(eq + 1);
      if (k == "beta_initial") s.beta_initial = to_double(k, v);
      else if (k == "beta_rate") s.beta_rate = to_double(k, v);
      else if (k == "beta_final") s.beta_final = to_double(k, v);
      else if (k == "sinkhorn_iters") s.sinkhorn_iters = to_int(k, v);
      else if (k == "assignment_iters_per_beta") s.assignment_iters_per_beta = to_int(k, v);
      else if (k == "refine") s.refine = to_int(k, v) != 0;
      else throw Error(ErrorKind::usage, "--schedule: unknown key '" + k + "'");
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) {
      json j;
      try {
        j = json::parse(read_file(config_path));
      } catch (const json::exception& e) {
        throw Error(ErrorKind::usage, "config " + config_path + ": " + e.what());
      }
      c = config_from_json(j, c);
    }
    for (const auto& [k, v] : values) {
      if (k == "train") c.train_path = v;
      else if (k == "test") c.test_path = v;
      else if (k == "level") c.synth.level = to_double(k, v);
      else if (k == "base-nodes") c.synth.base_nodes = to_int(k, v);
      else if (k == "edge-density") c.synth.edge_density = to_double(k, v);
      else if (k == "node-dim") c.synth.node_dim = to_int(k, v);
      else if (k == "edge-dim") c.synth.edge_dim = to_int(k, v);
      else if (k == "attr-noise-sigma") c.synth.attr_noise_sigma = to_double(k, v);
      else if (k == "seed") {
        try {
          c.synth.seed = std::stoull(v);
        } catch (const std::exception&) {
          throw Error(ErrorKind::usage, "--seed: '" + v + "' is not an unsigned integer");
        }
      } else if (k == "per-class") c.per_class = to_int(k, v);
      else if (k == "levels") {
        c.levels.clear();
        for (const auto& l : split(v, ',')) c.levels.push_back(to_double(k, l));
      } else if (k == "schedule") apply_schedule(c.schedule, v);
      else if (k == "beta-initial") c.schedule.beta_initial = to_double(k, v);
      else if (k == "beta-rate") c.schedule.beta_rate = to_double(k, v);
      else if (k == "beta-final") c.schedule.beta_final = to_double(k, v);
      else if (k == "sinkhorn-iters") c.schedule.sinkhorn_iters = to_int(k, v);
      else if (k == "assignment-iters") c.schedule.assignment_iters_per_beta = to_int(k, v);
      else if (k == "refine") c.schedule.refine = to_int(k, v) != 0;
      else if (k == "sigma0-sq") c.model.sigma0_sq = to_double(k, v);
      else if (k == "lambda-min") c.model.lambda_min = to_double(k, v);
      else if (k == "epsilon-outlier") c.model.epsilon_outlier = to_double(k, v);
      else if (k == "p-min") c.model.p_min = to_double(k, v);
      else if (k == "eta") c.model.eta = LearningRate::parse(v);
      else if (k == "grid") c.grid = parse_grid(v);
      else if (k == "folds") c.folds = to_int(k, v);
      else if (k == "knn-candidates") {
        c.knn_candidates.clear();
        for (const auto& x : split(v, ',')) c.knn_candidates.push_back(to_int(k, x));
      } else if (k == "knn-k") c.knn_k = to_int(k, v);
      else if (k == "baselines") {
        c.baseline_knn = c.baseline_ml = false;
        for (const auto& b : split(v, ',')) {
          if (b == "knn") c.baseline_knn = true;
          else if (b == "ml") c.baseline_ml = true;
          else if (b != "none") throw Error(ErrorKind::usage, "--baselines: unknown baseline '" + b + "'");
        }
      } else if (k == "alpha") c.alpha = to_double(k, v);
      else if (k == "svm-tolerance") c.svm_tolerance = to_double(k, v);
      else if (k == "out-dir") c.out_dir = v;
    }
    if (auto v = c.check(); !v) throw Error(ErrorKind::usage, "config: " + v.reason);
    return c;
  }
};

void register_overrides(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  o.add(app, "train", "training dataset (JSONL)");
  o.add(app, "test", "test dataset (JSONL)");
  o.add(app, "level", "distortion level in [0, 1]");
  o.add(app, "base-nodes", "nodes per base graph");
  o.add(app, "edge-density", "base graph edge density");
  o.add(app, "node-dim", "node attribute dimension");
  o.add(app, "edge-dim", "edge attribute dimension");
  o.add(app, "attr-noise-sigma", "attribute noise scale");
  o.add(app, "seed", "global seed");
  o.add(app, "per-class", "graphs per class and split");
  o.add(app, "levels", "comma-separated distortion levels for eval-table1");
  o.add(app, "schedule", "anneal schedule overrides, k=v,...");
  o.add(app, "beta-initial", "initial inverse temperature");
  o.add(app, "beta-rate", "inverse temperature growth factor");
  o.add(app, "beta-final", "final inverse temperature");
  o.add(app, "sinkhorn-iters", "Sinkhorn iterations per step");
  o.add(app, "assignment-iters", "assignment iterations per temperature");
  o.add(app, "refine", "1 to refine discretized morphisms by local search, 0 to skip");
  o.add(app, "sigma0-sq", "initial covariance scale");
  o.add(app, "lambda-min", "covariance eigenvalue floor");
  o.add(app, "epsilon-outlier", "outlier density");
  o.add(app, "p-min", "occurrence probability clamp");
  o.add(app, "eta", "learning rate: 1/t or a constant in (0, 1]");
  o.add(app, "grid", "SVM grid: poly:<degree>:<C>,rbf:<gamma>:<C>,...");
  o.add(app, "folds", "cross-validation folds");
  o.add(app, "knn-candidates", "comma-separated k candidates");
  o.add(app, "knn-k", "fixed k for the kNN baseline (0 selects by leave-one-out)");
  o.add(app, "baselines", "comma-separated baselines: knn, ml, none");
  o.add(app, "alpha", "significance level");
  o.add(app, "svm-tolerance", "SMO stopping tolerance");
  o.add(app, "out-dir", "output directory");
}

json base_manifest(const std::string& command, const ExperimentConfig& config) {
  return {{"version", kVersion},
          {"command", command},
          {"threads", thread_budget()},
          {"config", config_to_json(config)},
          {"inputs", json::object()},
          {"counters", json::object()}};
}

void record_input(json& manifest, const fs::path& path) {
  manifest["inputs"][path.string()] = content_hash(read_file(path));
}

void write_manifest(const fs::path& path, const json& manifest) { write_file_atomic(path, manifest.dump(1) + "\n"); }

const std::string& require(const std::string& value, const std::string& what) {
  if (value.empty()) throw Error(ErrorKind::usage, what + " is required");
  return value;
}

std::vector<RandomGraphModel> load_models(const std::vector<std::string>& paths, json& manifest) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("model_", 0) == 0 && entry.path().extension() == ".json") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(p);
    }
  }
  if (files.empty()) throw Error(ErrorKind::usage, "no model files given");
  std::vector<RandomGraphModel> models;
  for (const auto& f : files) {
    record_input(manifest, f);
    models.push_back(read_model(f));
  }
  return models;
}

GraphDataset load_dataset(const std::string& path, json& manifest) {
  record_input(manifest, path);
  return read_dataset(path);
}

fs::path sibling(const fs::path& csv, const std::string& suffix) {
  fs::path p = csv;
  p.replace_extension();
  return p.string() + suffix;
}

// Categories of an embedding file: explicit list, else sorted labels.
std::vector<std::string> embedding_categories(const std::string& listed, const std::vector<LikelihoodEmbedding>& items) {
  if (!listed.empty()) return split(listed, ',');
  std::vector<std::string> cats;
  for (const auto& e : items)
    if (e.label) cats.push_back(*e.label);
  std::sort(cats.begin(), cats.end());
  cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
  return cats;
}

int cmd_synth(const Overrides& o, const std::string& out, const std::string& out_test) {
  const auto c = o.resolve();
  const auto [train, test] = make_dataset(c.synth, c.per_class);
  write_dataset(require(out, "--out"), train);
  if (!out_test.empty()) write_dataset(out_test, test);
  auto manifest = base_manifest("synth", c);
  manifest["outputs"] = {{"train", out}, {"test", out_test}};
  manifest["counters"] = {{"train_graphs", train.graphs.size()}, {"test_graphs", out_test.empty() ? 0 : test.graphs.size()}};
  write_manifest(out + ".manifest.json", manifest);
  return 0;
}

int cmd_fit(const Overrides& o, const std::string& dataset_arg, const std::string& out_arg) {
  const auto c = o.resolve();
  const fs::path out = out_arg.empty() ? fs::path(c.out_dir) : fs::path(out_arg);
  auto manifest = base_manifest("fit", c);
  const auto train = load_dataset(require(dataset_arg.empty() ? c.train_path : dataset_arg, "training dataset"), manifest);
  for (const auto& cat : train.categories)
    if (train.slice(cat).empty()) throw Error(ErrorKind::data, "empty class '" + cat + "'");
  const auto fitted = fit_models(train, c.model, c.schedule, true);
  json calls = json::object();
  json expected = json::object();
  json cost = json::object();
  for (std::size_t i = 0; i < fitted.models.size(); ++i) {
    const auto& m = fitted.models[i];
    write_model(out / ("model_" + m.category + ".json"), m);
    calls[m.category] = fitted.match_calls[i];
    expected[m.category] = train.slice(m.category).size() - 1;
    cost[m.category] = fitted.dataset_log_likelihood[i];
  }
  manifest["counters"] = {{"fit_match_calls", calls}, {"fit_match_calls_expected", expected}};
  manifest["dataset_log_likelihood"] = cost;
  write_manifest(out / "fit.manifest.json", manifest);
  return 0;
}

int cmd_embed(const Overrides& o, const std::string& dataset_arg, const std::vector<std::string>& model_paths,
              const std::string& out, const std::string& stats_in) {
  const auto c = o.resolve();
  auto manifest = base_manifest("embed", c);
  const auto data = load_dataset(require(dataset_arg, "dataset"), manifest);
  const auto models = order_models(load_models(model_paths, manifest), data.categories);
  const auto before = match_call_counter().load();
  const auto items = embed_dataset(models, data, c.schedule);
  const auto calls = match_call_counter().load() - before;
  const Index k = static_cast<Index>(models.size());

  FeatureStats stats;
  if (!stats_in.empty()) {
    record_input(manifest, stats_in);
    stats = stats_from_json(read_file(stats_in));
    if (stats.mean.size() != k) throw Error(ErrorKind::data, "statistics sidecar length differs from the model count");
  } else if (!items.empty()) {
    stats = feature_stats(items);
  } else {
    stats.mean = Vector::Zero(k);
    stats.scale = Vector::Ones(k);
  }
  const fs::path path = require(out, "--out");
  write_file_atomic(path, embeddings_to_csv(items, k));
  write_file_atomic(sibling(path, ".std.csv"), embeddings_to_csv(standardize(items, stats), k));
  write_file_atomic(sibling(path, ".stats.json"), stats_to_json(stats));
  manifest["categories"] = data.categories;
  manifest["counters"] = {{"embed_match_calls", calls}, {"embed_match_calls_expected", data.graphs.size() * models.size()}};
  write_manifest(path.string() + ".manifest.json", manifest);
  return 0;
}

int cmd_classify(const Overrides& o, const std::string& train_emb, const std::string& test_emb,
                 const std::string& categories_arg, const std::string& out_arg) {
  const auto c = o.resolve();
  const fs::path out = out_arg.empty() ? fs::path(c.out_dir) : fs::path(out_arg);
  auto manifest = base_manifest("classify", c);
  record_input(manifest, require(train_emb, "--train-emb"));
  record_input(manifest, require(test_emb, "--test-emb"));
  const auto train = embeddings_from_csv(read_file(train_emb));
  const auto test = embeddings_from_csv(read_file(test_emb));

  std::optional<GraphDataset> train_graphs;
  std::optional<GraphDataset> test_graphs;
  if (c.baseline_knn) {
    train_graphs = load_dataset(require(c.train_path, "--train (graphs for the kNN baseline)"), manifest);
    test_graphs = load_dataset(require(c.test_path, "--test (graphs for the kNN baseline)"), manifest);
  }
  const auto categories = !categories_arg.empty() || !train_graphs ? embedding_categories(categories_arg, train)
                                                                    : train_graphs->categories;
  const auto before = match_call_counter().load();
  const auto r = classify_embeddings(c, categories, train, test, train_graphs ? &*train_graphs : nullptr,
                                     test_graphs ? &*test_graphs : nullptr);
  write_file_atomic(out / "predictions_lf.csv", predictions_to_csv(r.lf));
  if (r.ml) write_file_atomic(out / "predictions_ml.csv", predictions_to_csv(*r.ml));
  if (r.knn) write_file_atomic(out / "predictions_knn.csv", predictions_to_csv(*r.knn));
  write_file_atomic(out / "metrics.json", r.metrics.dump(1) + "\n");
  manifest["categories"] = categories;
  manifest["counters"] = {{"train_items", train.size()},
                          {"test_items", test.size()},
                          {"grid_size", c.grid.size()},
                          {"knn_match_calls", match_call_counter().load() - before}};
  write_manifest(out / "classify.manifest.json", manifest);
  return 0;
}

int cmd_roc(const Overrides& o, const std::string& predictions, const std::string& categories, const std::string& out) {
  const auto c = o.resolve();
  auto manifest = base_manifest("roc", c);
  record_input(manifest, require(predictions, "predictions file"));
  const auto set = predictions_from_csv(read_file(predictions), categories.empty() ? std::vector<std::string>{}
                                                                                  : split(categories, ','));
  const auto scores = positive_scores(set);
  const auto flags = positive_flags(set);
  const auto points = roc_curve(scores, flags);
  const double auc = roc_auc(scores, flags);
  write_file_atomic(require(out, "--out"), roc_csv(points));
  manifest["auc"] = auc;
  manifest["positive_category"] = set.categories.at(1);
  manifest["counters"] = {{"items", set.items.size()}, {"points", points.size()}};
  write_manifest(out + ".manifest.json", manifest);
  std::cout << "auc," << format_double(auc) << "\n";
  return 0;
}

int cmd_match(const Overrides& o, const std::string& dataset, const std::string& source_id,
              const std::string& target_id, const std::string& model_path, const std::string& out) {
  const auto c = o.resolve();
  auto manifest = base_manifest("match", c);
  const auto data = load_dataset(require(dataset, "graphs file"), manifest);
  const auto find = [&](const std::string& id) -> const AttributedGraph& {
    for (const auto& g : data.graphs)
      if (g.id == id) return g;
    throw Error(ErrorKind::data, "no graph with id '" + id + "'");
  };
  const auto& source = find(require(source_id, "--source"));

  json j = {{"source", source_id}};
  MatchResult r;
  std::vector<std::string> target_nodes;
  if (!model_path.empty()) {
    record_input(manifest, model_path);
    const auto model = read_model(model_path);
    r = match(source, model.structure(), likelihood_compatibility(model), c.schedule);
    for (Index i = 0; i < model.node_count(); ++i) target_nodes.push_back(std::to_string(i));
    j["model"] = model_path;
    j["log_likelihood"] = log_likelihood(model, source, r.morphism);
  } else {
    const auto& target = find(require(target_id, "--target or --model"));
    r = match(source, target, c.schedule);
    target_nodes = target.node_ids;
    j["target"] = target_id;
  }
  json nodes = json::object();
  for (Index a = 0; a < source.node_count(); ++a) {
    const Index i = r.morphism.node_map[a];
    nodes[source.node_ids[a]] = i == kUnmatched ? json(nullptr) : json(target_nodes[i]);
  }
  json edges = json::array();
  for (Index e : r.morphism.edge_map) edges.push_back(e == kUnmatched ? json(nullptr) : json(e));
  j["node_map"] = nodes;
  j["edge_map"] = edges;
  j["score"] = r.score;
  j["matched_nodes"] = r.morphism.matched_nodes();

  const std::string text = j.dump(1) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
    manifest["counters"] = {{"match_calls", 1}};
    write_manifest(out + ".manifest.json", manifest);
  }
  return 0;
}

int cmd_eval_table1(const Overrides& o) {
  const auto c = o.resolve();
  const auto t = run_table1(c, true);
  auto manifest = base_manifest("eval-table1", c);
  json levels = json::array();
  for (const auto& l : t.levels)
    levels.push_back({{"level", l.level},
                      {"fit_match_calls", l.fit_match_calls},
                      {"embed_match_calls", l.embed_match_calls},
                      {"train_graphs", l.train_size},
                      {"test_graphs", l.test_size}});
  manifest["counters"] = {{"levels", levels}};
  write_manifest(fs::path(c.out_dir) / "manifest.json", manifest);
  std::cout << table1_csv(t);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random attributed graph prototypes, likelihood embeddings and classifiers"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  register_overrides(app, o);

  std::string out;
  std::string out_test;
  std::string dataset;
  std::string stats_in;
  std::string train_emb;
  std::string test_emb;
  std::string categories;
  std::string source;
  std::string target;
  std::string model;
  std::vector<std::string> models;

  auto* synth = app.add_subcommand("synth", "generate distorted two-class datasets");
  synth->add_option("--out", out, "training JSONL")->required();
  synth->add_option("--out-test", out_test, "test JSONL");

  auto* fit = app.add_subcommand("fit", "fit one prototype per category");
  fit->add_option("dataset", dataset, "training JSONL (default: config train)");
  fit->add_option("--out", out, "model directory (default: out-dir)");

  auto* embed = app.add_subcommand("embed", "embed graphs into log-likelihood space");
  embed->add_option("dataset", dataset, "JSONL to embed")->required();
  embed->add_option("--models", models, "model files or directories")->required();
  embed->add_option("--out", out, "embedding CSV")->required();
  embed->add_option("--stats", stats_in, "standardization statistics from the training split");

  auto* classify = app.add_subcommand("classify", "model selection, training and prediction");
  classify->add_option("--train-emb", train_emb, "training embedding CSV")->required();
  classify->add_option("--test-emb", test_emb, "test embedding CSV")->required();
  classify->add_option("--categories", categories, "comma-separated category order of the features");
  classify->add_option("--out", out, "output directory (default: out-dir)");

  auto* roc = app.add_subcommand("roc", "ROC points and AUC of a two-class prediction file");
  roc->add_option("predictions", dataset, "predictions CSV")->required();
  roc->add_option("--categories", categories, "category order; the second is positive");
  roc->add_option("--out", out, "ROC CSV")->required();

  auto* match_cmd = app.add_subcommand("match", "match two graphs, or a graph against a model");
  match_cmd->add_option("graphs", dataset, "JSONL holding the graphs")->required();
  match_cmd->add_option("--source", source, "source graph id")->required();
  match_cmd->add_option("--target", target, "target graph id");
  match_cmd->add_option("--model", model, "model file to match against instead of a graph");
  match_cmd->add_option("--out", out, "morphism JSON (default: stdout)");

  auto* table = app.add_subcommand("eval-table1", "full sweep over distortion levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth) return cmd_synth(o, out, out_test);
    if (*fit) return cmd_fit(o, dataset, out);
    if (*embed) return cmd_embed(o, dataset, models, out, stats_in);
    if (*classify) return cmd_classify(o, train_emb, test_emb, categories, out);
    if (*roc) return cmd_roc(o, dataset, categories, out);
    if (*match_cmd) return cmd_match(o, dataset, source, target, model, out);
    if (*table) return cmd_eval_table1(o);
  } catch (const Error& e) {
    std::cerr << "ragkit: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ragkit: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::data);
  } catch (const std::exception& e) {
    std::cerr << "ragkit: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::data);
  }
  return 1;
}
