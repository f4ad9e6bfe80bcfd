#include "ragkit/pipeline.hpp"

#include "ragkit/graph_io.hpp"
#include "ragkit/model_io.hpp"
#include "ragkit/util.hpp"

namespace ragkit {

using nlohmann::json;

Validation ExperimentConfig::check() const {
  if (auto v = synth.check(); !v) return v;
  if (auto v = schedule.check(); !v) return v;
  if (auto v = model.check(); !v) return v;
  if (per_class < 1) return Validation::fail("per_class must be at least 1");
  if (folds < 2) return Validation::fail("folds must be at least 2");
  if (grid.empty()) return Validation::fail("classifier grid is empty");
  for (const auto& k : grid)
    if (auto v = k.check(); !v) return v;
  for (double l : levels)
    if (!(l >= 0 && l <= 1)) return Validation::fail("distortion levels must lie in [0, 1]");
  if (knn_k < 0) return Validation::fail("knn_k must be non-negative");
  if (knn_k == 0 && knn_candidates.empty()) return Validation::fail("no kNN candidates");
  if (!(alpha > 0 && alpha < 1)) return Validation::fail("alpha must lie in (0, 1)");
  if (!(svm_tolerance > 0)) return Validation::fail("svm_tolerance must be positive");
  return {};
}

json kernel_to_json(const KernelSpec& k) {
  if (k.kind == KernelSpec::Kind::polynomial) return {{"kind", "polynomial"}, {"degree", k.degree}, {"C", k.c}};
  return {{"kind", "gaussian"}, {"gamma", k.gamma}, {"C", k.c}};
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "polynomial") {
    k.kind = KernelSpec::Kind::polynomial;
    k.degree = j.value("degree", 1);
  } else if (kind == "gaussian") {
    k.kind = KernelSpec::Kind::gaussian;
    k.gamma = j.value("gamma", 1.0);
  } else {
    throw Error(ErrorKind::usage, "unknown kernel kind '" + kind + "'");
  }
  k.c = j.value("C", 1.0);
  if (auto v = k.check(); !v) throw Error(ErrorKind::usage, "kernel: " + v.reason);
  return k;
}

json config_to_json(const ExperimentConfig& c) {
  json grid = json::array();
  for (const auto& k : c.grid) grid.push_back(kernel_to_json(k));
  return {
      {"train", c.train_path},
      {"test", c.test_path},
      {"synth",
       {{"level", c.synth.level},
        {"base_nodes", c.synth.base_nodes},
        {"edge_density", c.synth.edge_density},
        {"node_dim", c.synth.node_dim},
        {"edge_dim", c.synth.edge_dim},
        {"attr_noise_sigma", c.synth.attr_noise_sigma},
        {"seed", c.synth.seed}}},
      {"per_class", c.per_class},
      {"levels", c.levels},
      {"schedule",
       {{"beta_initial", c.schedule.beta_initial},
        {"beta_rate", c.schedule.beta_rate},
        {"beta_final", c.schedule.beta_final},
        {"sinkhorn_iters", c.schedule.sinkhorn_iters},
        {"assignment_iters_per_beta", c.schedule.assignment_iters_per_beta},
        {"refine", c.schedule.refine}}},
      {"model",
       {{"sigma0_sq", c.model.sigma0_sq},
        {"lambda_min", c.model.lambda_min},
        {"epsilon_outlier", c.model.epsilon_outlier},
        {"p_min", c.model.p_min},
        {"eta", c.model.eta.describe()}}},
      {"grid", grid},
      {"folds", c.folds},
      {"knn_candidates", c.knn_candidates},
      {"knn_k", c.knn_k},
      {"baseline_knn", c.baseline_knn},
      {"baseline_ml", c.baseline_ml},
      {"alpha", c.alpha},
      {"svm_tolerance", c.svm_tolerance},
      {"out_dir", c.out_dir},
  };
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  try {
    c.train_path = j.value("train", c.train_path);
    c.test_path = j.value("test", c.test_path);
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      c.synth.level = s.value("level", c.synth.level);
      c.synth.base_nodes = s.value("base_nodes", c.synth.base_nodes);
      c.synth.edge_density = s.value("edge_density", c.synth.edge_density);
      c.synth.node_dim = s.value("node_dim", c.synth.node_dim);
      c.synth.edge_dim = s.value("edge_dim", c.synth.edge_dim);
      c.synth.attr_noise_sigma = s.value("attr_noise_sigma", c.synth.attr_noise_sigma);
      c.synth.seed = s.value("seed", c.synth.seed);
    }
    c.per_class = j.value("per_class", c.per_class);
    c.levels = j.value("levels", c.levels);
    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      c.schedule.beta_initial = s.value("beta_initial", c.schedule.beta_initial);
      c.schedule.beta_rate = s.value("beta_rate", c.schedule.beta_rate);
      c.schedule.beta_final = s.value("beta_final", c.schedule.beta_final);
      c.schedule.sinkhorn_iters = s.value("sinkhorn_iters", c.schedule.sinkhorn_iters);
      c.schedule.assignment_iters_per_beta = s.value("assignment_iters_per_beta", c.schedule.assignment_iters_per_beta);
      c.schedule.refine = s.value("refine", c.schedule.refine);
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      c.model.sigma0_sq = m.value("sigma0_sq", c.model.sigma0_sq);
      c.model.lambda_min = m.value("lambda_min", c.model.lambda_min);
      c.model.epsilon_outlier = m.value("epsilon_outlier", c.model.epsilon_outlier);
      c.model.p_min = m.value("p_min", c.model.p_min);
      if (m.contains("eta")) c.model.eta = LearningRate::parse(m["eta"].get<std::string>());
    }
    if (j.contains("grid")) {
      c.grid.clear();
      for (const auto& k : j["grid"]) c.grid.push_back(kernel_from_json(k));
    }
    c.folds = j.value("folds", c.folds);
    c.knn_candidates = j.value("knn_candidates", c.knn_candidates);
    c.knn_k = j.value("knn_k", c.knn_k);
    c.baseline_knn = j.value("baseline_knn", c.baseline_knn);
    c.baseline_ml = j.value("baseline_ml", c.baseline_ml);
    c.alpha = j.value("alpha", c.alpha);
    c.svm_tolerance = j.value("svm_tolerance", c.svm_tolerance);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::usage, std::string("config: ") + e.what());
  }
  return c;
}

FitOutcome fit_models(const GraphDataset& train, const ModelParams& params, const AnnealSchedule& schedule,
                      bool diagnostics) {
  FitOutcome out;
  for (const auto& category : train.categories) {
    const auto slice = train.slice(category);
    FitReport report;
    RandomGraphModel model = fit(slice, category, params, schedule, &report);
    out.match_calls.push_back(report.match_calls);
    out.dataset_log_likelihood.push_back(diagnostics ? dataset_log_likelihood(model, slice, schedule) : 0.0);
    out.models.push_back(std::move(model));
  }
  return out;
}

json metrics_json(const PredictionSet& set) {
  const auto s = summarize(set);
  json j = {{"accuracy", s.accuracy},
            {"per_class_accuracy", s.per_class_accuracy},
            {"confusion", s.confusion},
            {"categories", set.categories},
            {"count", set.items.size()}};
  if (set.categories.size() == 2) {
    const auto flags = positive_flags(set);
    const bool both = std::find(flags.begin(), flags.end(), true) != flags.end() &&
                      std::find(flags.begin(), flags.end(), false) != flags.end();
    j["auc"] = both ? json(roc_auc(set)) : json(nullptr);
  }
  return j;
}

ClassifyOutcome classify_embeddings(const ExperimentConfig& config, const std::vector<std::string>& categories,
                                    const std::vector<LikelihoodEmbedding>& train_raw,
                                    const std::vector<LikelihoodEmbedding>& test_raw,
                                    const GraphDataset* train_graphs, const GraphDataset* test_graphs) {
  ClassifyOutcome out;
  const SvmOptions opts{config.svm_tolerance};
  const auto stats = feature_stats(train_raw);
  const auto train_std = standardize(train_raw, stats);
  const auto test_std = standardize(test_raw, stats);

  out.chosen = model_select(train_std, categories, config.grid, config.folds, opts);
  out.lf = svm_predict(svm_train(train_std, categories, out.chosen, opts), test_std);

  json metrics;
  metrics["rag_lf"] = metrics_json(out.lf);
  metrics["rag_lf"]["kernel"] = kernel_to_json(out.chosen);
  if (config.baseline_ml) {
    out.ml = rag_ml_classify(test_raw, categories);
    metrics["rag_ml"] = metrics_json(*out.ml);
    const auto sig = significance_test(out.lf, *out.ml, config.alpha);
    metrics["significance_lf_over_ml"] = {{"only_lf_correct", sig.only_a_correct},
                                          {"only_ml_correct", sig.only_b_correct},
                                          {"p_value", sig.p_value},
                                          {"alpha", config.alpha},
                                          {"significant", sig.significant},
                                          {"lf_better", sig.only_a_correct > sig.only_b_correct}};
  }
  if (config.baseline_knn) {
    if (!train_graphs || !test_graphs) throw Error(ErrorKind::usage, "the kNN baseline needs the graph datasets");
    int k = config.knn_k;
    if (k == 0) k = select_k(pairwise_graph_distances(train_graphs->graphs, config.schedule), *train_graphs,
                             config.knn_candidates);
    out.knn_k = k;
    out.knn = knn_graph_classify(*train_graphs, *test_graphs, k, config.schedule);
    metrics["knn"] = metrics_json(*out.knn);
    metrics["knn"]["k"] = k;
  }
  out.metrics = std::move(metrics);
  return out;
}

std::string roc_csv(const std::vector<RocPoint>& points) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : points) out += format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
  return out;
}

LevelResult run_level(const ExperimentConfig& config, double level, const std::filesystem::path* dir) {
  if (auto v = config.check(); !v) throw Error(ErrorKind::usage, v.reason);
  LevelResult r;
  r.level = level;
  DistortionSpec spec = config.synth;
  spec.level = level;
  const auto [train, test] = make_dataset(spec, config.per_class);
  r.train_size = train.graphs.size();
  r.test_size = test.graphs.size();

  const auto fitted = fit_models(train, config.model, config.schedule, dir != nullptr);
  for (auto c : fitted.match_calls) r.fit_match_calls += c;

  const auto before = match_call_counter().load();
  const auto train_emb = embed_dataset(fitted.models, train, config.schedule);
  const auto test_emb = embed_dataset(fitted.models, test, config.schedule);
  r.embed_match_calls = match_call_counter().load() - before;

  r.outcome = classify_embeddings(config, train.categories, train_emb, test_emb, &train, &test);

  if (dir) {
    const auto& d = *dir;
    const Index k = static_cast<Index>(fitted.models.size());
    const auto stats = feature_stats(train_emb);
    write_dataset(d / "train.jsonl", train);
    write_dataset(d / "test.jsonl", test);
    for (const auto& m : fitted.models) write_model(d / ("model_" + m.category + ".json"), m);
    write_file_atomic(d / "train_emb.csv", embeddings_to_csv(train_emb, k));
    write_file_atomic(d / "train_emb.std.csv", embeddings_to_csv(standardize(train_emb, stats), k));
    write_file_atomic(d / "train_emb.stats.json", stats_to_json(stats));
    write_file_atomic(d / "test_emb.csv", embeddings_to_csv(test_emb, k));
    write_file_atomic(d / "test_emb.std.csv", embeddings_to_csv(standardize(test_emb, stats), k));
    write_file_atomic(d / "predictions_lf.csv", predictions_to_csv(r.outcome.lf));
    if (r.outcome.ml) write_file_atomic(d / "predictions_ml.csv", predictions_to_csv(*r.outcome.ml));
    if (r.outcome.knn) write_file_atomic(d / "predictions_knn.csv", predictions_to_csv(*r.outcome.knn));
    const auto roc_of = [](const PredictionSet& s) { return roc_curve(positive_scores(s), positive_flags(s)); };
    write_file_atomic(d / "roc_lf.csv", roc_csv(roc_of(r.outcome.lf)));
    if (r.outcome.ml) write_file_atomic(d / "roc_ml.csv", roc_csv(roc_of(*r.outcome.ml)));
    if (r.outcome.knn) write_file_atomic(d / "roc_knn.csv", roc_csv(roc_of(*r.outcome.knn)));
    write_file_atomic(d / "metrics.json", r.outcome.metrics.dump(1) + "\n");

    json manifest;
    manifest["version"] = kVersion;
    manifest["level"] = level;
    manifest["config"] = config_to_json(config);
    manifest["inputs"] = {{"train.jsonl", content_hash(serialize_dataset(train))},
                          {"test.jsonl", content_hash(serialize_dataset(test))}};
    manifest["counters"] = {{"fit_match_calls", r.fit_match_calls},
                            {"fit_match_calls_expected", r.train_size - fitted.models.size()},
                            {"embed_match_calls", r.embed_match_calls},
                            {"embed_match_calls_expected", (r.train_size + r.test_size) * fitted.models.size()}};
    json cost = json::object();
    for (std::size_t i = 0; i < fitted.models.size(); ++i)
      cost[fitted.models[i].category] = fitted.dataset_log_likelihood[i];
    manifest["dataset_log_likelihood"] = cost;
    write_file_atomic(d / "manifest.json", manifest.dump(1) + "\n");
  }
  return r;
}

Table1 run_table1(const ExperimentConfig& config, bool write_outputs) {
  Table1 t;
  for (double level : config.levels) {
    const std::filesystem::path dir = std::filesystem::path(config.out_dir) / ("level_" + format_double(level));
    t.levels.push_back(run_level(config, level, write_outputs ? &dir : nullptr));
  }
  if (write_outputs) {
    write_file_atomic(std::filesystem::path(config.out_dir) / "table1.csv", table1_csv(t));
    json rows = json::array();
    for (const auto& l : t.levels) rows.push_back({{"level", l.level}, {"metrics", l.outcome.metrics}});
    write_file_atomic(std::filesystem::path(config.out_dir) / "table1.json",
                      json{{"version", kVersion}, {"config", config_to_json(config)}, {"levels", rows}}.dump(1) + "\n");
  }
  return t;
}

std::string table1_csv(const Table1& t) {
  std::string out = "level,rag_lf_accuracy,rag_ml_accuracy,knn_accuracy,rag_lf_auc,rag_ml_auc,knn_auc,knn_k,lf_over_ml_p\n";
  const auto acc = [](const std::optional<PredictionSet>& s) { return s ? format_double(s->accuracy()) : std::string(); };
  const auto auc = [](const std::optional<PredictionSet>& s) { return s ? format_double(roc_auc(*s)) : std::string(); };
  for (const auto& l : t.levels) {
    const auto& o = l.outcome;
    std::string p;
    if (o.ml) p = format_double(significance_test(o.lf, *o.ml).p_value);
    out += format_double(l.level) + ',' + format_double(o.lf.accuracy()) + ',' + acc(o.ml) + ',' + acc(o.knn) + ',' +
           format_double(roc_auc(o.lf)) + ',' + auc(o.ml) + ',' + auc(o.knn) + ',' + std::to_string(o.knn_k) + ',' + p +
           '\n';
  }
  return out;
}

}  // namespace ragkit
