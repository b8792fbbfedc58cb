#include "topiceval/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "topiceval/parallel.hpp"
#include "topiceval/text.hpp"

namespace topiceval {

namespace fs = std::filesystem;

namespace {

template <typename T>
T config_value(const nlohmann::json& j, const char* key, T fallback, const std::string& where = "$") {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError(where + "." + key + ": unknown key");
  }
}

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

std::uint64_t hash_text(std::uint64_t h, std::string_view text) {
  h = fnv1a64(text, h);
  return fnv1a64("\x1e", h);
}

std::uint64_t hash_file(std::uint64_t h, const std::string& path) {
  if (!fs::exists(path)) return hash_text(h, "<missing>");
  return hash_text(h, read_file(path));
}

void write_text(const std::string& path, std::string_view text) {
  fs::create_directories(fs::path(path).parent_path());
  write_file(path, text);
}

nlohmann::json baseline_params_json(const BaselineParams& p) {
  std::vector<std::string> metrics;
  for (auto m : p.metrics) metrics.emplace_back(to_string(m));
  return {{"metrics", metrics}, {"window_uci", p.window_uci}, {"window_cv", p.window_cv},
          {"rbo_p", p.rbo_p},   {"top_k", p.top_k}};
}

std::vector<std::string> metric_names(const std::vector<MetricId>& ids) {
  std::vector<std::string> out;
  for (auto m : ids) out.emplace_back(to_string(m));
  return out;
}

}  // namespace

std::vector<MetricId> parse_metric_list(std::string_view csv) {
  if (trim(csv) == "all") return {kJudgeMetrics.begin(), kJudgeMetrics.end()};
  std::vector<MetricId> out;
  for (const auto& name : split(csv, ',')) {
    const auto t = trim_copy(name);
    if (t.empty()) continue;
    const auto m = parse_metric_id(t);
    if (!m || std::find(kJudgeMetrics.begin(), kJudgeMetrics.end(), *m) == kJudgeMetrics.end()) {
      throw ConfigError("unknown judge metric '" + t + "'");
    }
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

std::vector<BaselineMetric> parse_baseline_metric_list(std::string_view csv) {
  if (trim(csv) == "all") return {kAllBaselineMetrics.begin(), kAllBaselineMetrics.end()};
  std::vector<BaselineMetric> out;
  for (const auto& name : split(csv, ',')) {
    const auto t = trim_copy(name);
    if (t.empty()) continue;
    const auto m = parse_baseline_metric(t);
    if (!m) throw ConfigError("unknown baseline metric '" + t + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  return out;
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  reject_unknown(j,
                 {"run_id", "out_dir", "cache_dir", "corpus", "prep", "topic_sets", "llms", "metrics", "baseline",
                  "pairs_strategy", "per_topic_docs", "seed", "threads", "missing_theme_union", "adversarial",
                  "analysis", "prompts_dir"},
                 "$");
  RunConfig cfg;
  cfg.snapshot = j;
  cfg.run_id = config_value<std::string>(j, "run_id", cfg.run_id);
  cfg.out_dir = resolve(base_dir, config_value<std::string>(j, "out_dir", cfg.out_dir));
  cfg.cache_dir = resolve(base_dir, config_value<std::string>(j, "cache_dir", cfg.cache_dir));
  cfg.corpus = resolve(base_dir, config_value<std::string>(j, "corpus", ""));
  if (cfg.corpus.empty()) throw ConfigError("$.corpus: required");

  try {
    if (j.contains("prep")) cfg.prep = prep_config_from_json(j.at("prep"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("$.prep: ") + e.what());
  }
  for (auto& f : cfg.prep.stopword_files) f = resolve(base_dir, f);

  if (!j.contains("topic_sets") || !j.at("topic_sets").is_array() || j.at("topic_sets").empty()) {
    throw ConfigError("$.topic_sets: a non-empty array is required");
  }
  for (const auto& ts : j.at("topic_sets")) {
    TopicSetPaths p;
    if (ts.is_string()) {
      p.topics = resolve(base_dir, ts.get<std::string>());
    } else {
      reject_unknown(ts, {"topics", "assignments"}, "$.topic_sets[]");
      p.topics = resolve(base_dir, config_value<std::string>(ts, "topics", "", "$.topic_sets[]"));
      if (ts.contains("assignments")) {
        p.assignments = resolve(base_dir, config_value<std::string>(ts, "assignments", "", "$.topic_sets[]"));
      }
    }
    if (p.topics.empty()) throw ConfigError("$.topic_sets[].topics: required");
    cfg.topic_sets.push_back(std::move(p));
  }

  if (j.contains("llms")) {
    if (!j.at("llms").is_array()) throw ConfigError("$.llms: expected an array");
    for (const auto& entry : j.at("llms")) {
      try {
        cfg.llms.push_back(entry.is_string() ? load_llm_config(resolve(base_dir, entry.get<std::string>()))
                                             : llm_config_from_json(entry));
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("$.llms[]: ") + e.what());
      }
    }
    std::set<std::string> ids;
    for (const auto& l : cfg.llms) {
      if (!ids.insert(l.llm_id).second) throw ConfigError("$.llms: duplicate llm_id '" + l.llm_id + "'");
    }
  }

  if (j.contains("metrics")) {
    const auto& m = j.at("metrics");
    if (m.is_string()) {
      cfg.metrics = parse_metric_list(m.get<std::string>());
    } else if (m.is_array()) {
      std::string joined;
      for (const auto& x : m) joined += (x.is_string() ? x.get<std::string>() : std::string("?")) + ",";
      cfg.metrics = parse_metric_list(joined);
    } else {
      throw ConfigError("$.metrics: expected a list");
    }
  }

  if (j.contains("baseline")) {
    const auto& b = j.at("baseline");
    reject_unknown(b, {"metrics", "window_uci", "window_cv", "rbo_p", "top_k"}, "$.baseline");
    if (b.contains("metrics")) {
      std::string joined;
      for (const auto& x : b.at("metrics")) joined += (x.is_string() ? x.get<std::string>() : std::string("?")) + ",";
      cfg.baseline.metrics = parse_baseline_metric_list(joined);
    }
    cfg.baseline.window_uci = config_value(b, "window_uci", cfg.baseline.window_uci, "$.baseline");
    cfg.baseline.window_cv = config_value(b, "window_cv", cfg.baseline.window_cv, "$.baseline");
    cfg.baseline.rbo_p = config_value(b, "rbo_p", cfg.baseline.rbo_p, "$.baseline");
    cfg.baseline.top_k = config_value(b, "top_k", cfg.baseline.top_k, "$.baseline");
  }

  try {
    cfg.pairs = PairStrategy::parse(config_value<std::string>(j, "pairs_strategy", "all"));
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("$.pairs_strategy: ") + e.what());
  }
  cfg.per_topic_docs = config_value(j, "per_topic_docs", cfg.per_topic_docs);
  cfg.seed = config_value(j, "seed", cfg.seed);
  cfg.threads = config_value(j, "threads", cfg.threads);
  if (cfg.threads < 1) throw ConfigError("$.threads: must be >= 1");
  cfg.missing_theme_union = config_value(j, "missing_theme_union", cfg.missing_theme_union);

  if (j.contains("adversarial")) {
    const auto& a = j.at("adversarial");
    reject_unknown(a, {"tests", "n", "lexicon"}, "$.adversarial");
    if (a.contains("tests")) {
      cfg.adversarial.tests.clear();
      for (const auto& t : a.at("tests")) {
        const auto test = t.is_string() ? parse_adv_test(t.get<std::string>()) : std::nullopt;
        if (!test) throw ConfigError("$.adversarial.tests: unknown test " + t.dump());
        cfg.adversarial.tests.push_back(*test);
      }
    }
    cfg.adversarial.n = config_value(a, "n", cfg.adversarial.n, "$.adversarial");
    if (a.contains("lexicon")) cfg.adversarial.lexicon = resolve(base_dir, config_value<std::string>(a, "lexicon", ""));
  }

  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    reject_unknown(a, {"method", "unit"}, "$.analysis");
    try {
      cfg.method = parse_corr_method(config_value<std::string>(a, "method", "pearson", "$.analysis"));
      cfg.unit = parse_observation_unit(config_value<std::string>(a, "unit", "config", "$.analysis"));
    } catch (const AnalysisError& e) {
      throw ConfigError(std::string("$.analysis: ") + e.what());
    }
  }
  if (j.contains("prompts_dir")) cfg.prompts_dir = resolve(base_dir, config_value<std::string>(j, "prompts_dir", ""));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return run_config_from_json(j, fs::absolute(path).parent_path().string());
}

PrepResult prepare_corpus(const Corpus& corpus, const PrepConfig& cfg, Diagnostics* diag) {
  PrepResult out;
  out.docs.resize(corpus.size());
  parallel_for(corpus.size(), cfg.threads,
               [&](std::size_t i) { out.docs[i] = tokenize_normalize(corpus[i].text, cfg); });
  std::vector<StopwordSource> stopwords;
  for (const auto& f : cfg.stopword_files) stopwords.push_back(load_stopwords(f));
  VocabOptions opts;
  opts.cap = cfg.vocab_cap;
  opts.max_doc_pct = cfg.domain_stopword_doc_pct;
  opts.min_count = cfg.domain_stopword_min_count;
  opts.threads = cfg.threads;
  out.vocab = build_vocab(out.docs, stopwords, opts, diag);
  out.stats = corpus_stats(corpus, out.docs, &out.vocab);
  return out;
}

void write_prep_outputs(const PrepResult& prep, const Corpus& corpus, const std::string& dir) {
  std::string lines;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    lines += nlohmann::json{{"doc_id", corpus[i].doc_id}, {"tokens", prep.docs[i]}}.dump() + "\n";
  }
  write_text((fs::path(dir) / "corpus.prepped.jsonl").string(), lines);
  write_text((fs::path(dir) / "vocab.txt").string(), serialize_vocab(prep.vocab));
  write_text((fs::path(dir) / "stats.json").string(), to_json(prep.stats).dump(2) + "\n");
}

std::vector<TokenList> load_prepped_tokens(const std::string& path) {
  std::vector<TokenList> out;
  std::size_t n = 0;
  for (const auto& line : split_lines(read_file(path))) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).at("tokens").get<TokenList>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(n), e.what());
    }
  }
  return out;
}

std::string path_component(std::string_view text) {
  std::string out;
  for (char c : text) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
  }
  return out.empty() ? "_" : out;
}

void write_judge_outputs(const JudgeRun& run, const std::string& dir) {
  JudgmentStore store;
  for (const auto& j : run.judgments) {
    for (const auto& r : j.records) store.append_if_new(r);
  }
  write_text((fs::path(dir) / "judgments.jsonl").string(), store.serialize());
  write_text((fs::path(dir) / "scores.csv").string(), scores_csv_header() + scores_csv_rows(run));
  write_text((fs::path(dir) / "flagged.jsonl").string(), flagged_jsonl(run));
  std::string pairs;
  for (const auto& p : run.doc_pairs) {
    pairs += nlohmann::json{{"doc_id", p.doc_id}, {"topic_id", p.topic_id}, {"sampling_seed", p.sampling_seed}}.dump() +
             "\n";
  }
  write_text((fs::path(dir) / "pairs.jsonl").string(), pairs);
}

std::vector<std::string> find_files(const std::string& dir, const std::string& name) {
  std::vector<std::string> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == name) out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kPrep: return "prep";
    case Stage::kBaseline: return "baseline";
    case Stage::kJudge: return "judge";
    case Stage::kAdversarial: return "adversarial";
    case Stage::kAnalyze: return "analyze";
    case Stage::kReport: return "report";
  }
  return "unknown";
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json st = nlohmann::json::object();
  for (const auto& [name, rec] : stages) st[name] = {{"complete", rec.complete}, {"input_hash", rec.input_hash}};
  return {{"run_id", run_id}, {"config", config}, {"seed", seed}, {"stages", st}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.run_id = j.value("run_id", "");
  m.config = j.value("config", nlohmann::json::object());
  m.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("stages")) {
    for (const auto& [name, rec] : j.at("stages").items()) {
      m.stages[name] = {rec.value("complete", false), rec.value("input_hash", "")};
    }
  }
  return m;
}

Pipeline::Pipeline(RunConfig cfg, bool force, Diagnostics* diag)
    : cfg_(std::move(cfg)), force_(force), diag_(diag), factory_(make_backend) {
  const auto manifest_path = out_path("manifest.json");
  if (fs::exists(manifest_path)) {
    try {
      manifest_ = RunManifest::from_json(nlohmann::json::parse(read_file(manifest_path)));
    } catch (const std::exception& e) {
      warn(diag_, "ignoring unreadable manifest " + manifest_path + ": " + e.what());
      manifest_ = {};
    }
  }
  manifest_.run_id = cfg_.run_id;
  manifest_.config = cfg_.snapshot;
  manifest_.seed = cfg_.seed;
  cache_ = std::make_shared<ResponseCache>(cfg_.cache_dir);
  if (cfg_.prompts_dir) prompts_.load_overrides(*cfg_.prompts_dir);
}

std::string Pipeline::out_path(const std::string& relative) const {
  return (fs::path(cfg_.out_dir) / relative).string();
}

void Pipeline::save_manifest() const {
  write_text(out_path("manifest.json"), manifest_.to_json().dump(2) + "\n");
}

std::string Pipeline::stage_hash(Stage stage) const {
  std::uint64_t h = hash_text(fnv1a64("topiceval-stage"), to_string(stage));
  auto topics = [&] {
    for (const auto& ts : cfg_.topic_sets) {
      h = hash_file(h, ts.topics);
      h = hash_text(h, ts.assignments.value_or(""));
      if (ts.assignments) h = hash_file(h, *ts.assignments);
    }
  };
  auto llms = [&] {
    for (const auto& l : cfg_.llms) h = hash_text(h, to_json(l).dump());
  };
  auto prompts = [&] {
    for (auto id : kJudgeMetrics) h = hash_text(h, prompts_.text(id));
    for (auto t : {MetricId::kAdvNonword, MetricId::kAdvOutlier, MetricId::kAdvDuplicate}) h = hash_text(h, prompts_.text(t));
  };
  switch (stage) {
    case Stage::kPrep:
      h = hash_file(h, cfg_.corpus);
      for (const auto& f : cfg_.prep.stopword_files) h = hash_file(h, f);
      {
        auto p = to_json(cfg_.prep);
        p.erase("threads");
        h = hash_text(h, p.dump());
      }
      break;
    case Stage::kBaseline:
      h = hash_file(h, out_path("prep/corpus.prepped.jsonl"));
      h = hash_file(h, out_path("prep/vocab.txt"));
      topics();
      h = hash_text(h, baseline_params_json(cfg_.baseline).dump());
      break;
    case Stage::kJudge:
      h = hash_file(h, cfg_.corpus);
      topics();
      llms();
      prompts();
      h = hash_text(h, nlohmann::json{{"metrics", metric_names(cfg_.metrics)},
                                      {"pairs", cfg_.pairs.describe()},
                                      {"per_topic_docs", cfg_.per_topic_docs},
                                      {"seed", cfg_.seed},
                                      {"union", cfg_.missing_theme_union}}
                               .dump());
      break;
    case Stage::kAdversarial: {
      topics();
      llms();
      prompts();
      h = hash_file(h, out_path("prep/vocab.txt"));
      std::vector<std::string> tests;
      for (auto t : cfg_.adversarial.tests) tests.emplace_back(to_string(t));
      h = hash_text(h, nlohmann::json{{"tests", tests}, {"n", cfg_.adversarial.n}, {"seed", cfg_.seed}}.dump());
      if (cfg_.adversarial.lexicon) h = hash_file(h, *cfg_.adversarial.lexicon);
      break;
    }
    case Stage::kAnalyze:
      for (const auto& f : find_files(out_path("judge"), "scores.csv")) h = hash_file(h, f);
      h = hash_file(h, out_path("baseline.csv"));
      h = hash_text(h, std::string(to_string(cfg_.method)) + (cfg_.unit == ObservationUnit::kConfig ? "config" : "topic"));
      break;
    case Stage::kReport:
      for (const auto& f : find_files(out_path("judge"), "scores.csv")) h = hash_file(h, f);
      h = hash_file(h, out_path("adversarial.csv"));
      break;
  }
  return to_hex64(h);
}

bool Pipeline::run_stage(Stage stage) {
  const std::string name(to_string(stage));
  const auto hash = stage_hash(stage);
  auto& rec = manifest_.stages[name];
  if (!force_ && rec.complete && rec.input_hash == hash) return false;
  rec = {false, hash};
  save_manifest();
  switch (stage) {
    case Stage::kPrep: do_prep(); break;
    case Stage::kBaseline: do_baseline(); break;
    case Stage::kJudge: do_judge(); break;
    case Stage::kAdversarial: do_adversarial(); break;
    case Stage::kAnalyze: do_analyze(); break;
    case Stage::kReport: do_report(); break;
  }
  // Hash again: stages that read their own outputs' directories must not
  // look stale on the next run.
  manifest_.stages[name] = {true, stage_hash(stage)};
  save_manifest();
  return true;
}

void Pipeline::run_all() {
  for (auto s : kAllStages) run_stage(s);
}

void Pipeline::add_stats(const std::string& llm_id, const GatewayStats& s) {
  auto& t = stats_[llm_id];
  t.network_calls += s.network_calls;
  t.cache_hits += s.cache_hits;
  t.retries += s.retries;
  t.failed_samples += s.failed_samples;
  t.redraws += s.redraws;
}

Gateway Pipeline::make_gateway(const LlmConfig& llm) { return Gateway(llm, factory_(llm), cache_, diag_); }

void Pipeline::do_prep() {
  auto prep_cfg = cfg_.prep;
  prep_cfg.threads = cfg_.threads;
  const auto corpus = load_corpus(cfg_.corpus);
  const auto prep = prepare_corpus(corpus, prep_cfg, diag_);
  fs::remove_all(out_path("prep"));
  write_prep_outputs(prep, corpus, out_path("prep"));
}

void Pipeline::do_baseline() {
  const auto tokens = load_prepped_tokens(out_path("prep/corpus.prepped.jsonl"));
  const auto vocab = load_vocab(out_path("prep/vocab.txt")).words();
  const auto docs = filter_to_vocab(tokens, vocab);
  auto params = cfg_.baseline;
  params.threads = cfg_.threads;
  std::string csv = baseline_csv_header();
  std::vector<ConfigCandidate> candidates;
  for (const auto& ts : cfg_.topic_sets) {
    const auto model = load_topics(ts.topics);
    const auto report = evaluate_baselines(model, docs, vocab, params, diag_);
    csv += baseline_csv_rows(report);
    ConfigCandidate c;
    c.label = model.config_label();
    for (auto m : kSelectionMetrics) {
      if (auto v = report.model_level(m)) c.scores[m] = *v;
    }
    candidates.push_back(std::move(c));
  }
  write_text(out_path("baseline.csv"), csv);
  std::string ranking = "mode,rank,config,score\n";
  for (bool normalized : {false, true}) {
    const auto ranked = rank_configurations(candidates, normalized, diag_);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      ranking += std::string(normalized ? "normalized" : "raw") + "," + std::to_string(i + 1) + "," +
                 csv_field(ranked[i].label) + "," + format_double(ranked[i].score) + "\n";
    }
  }
  write_text(out_path("config_ranking.csv"), ranking);
}

void Pipeline::do_judge() {
  fs::remove_all(out_path("judge"));
  const bool wants_docs = std::any_of(cfg_.metrics.begin(), cfg_.metrics.end(), [](MetricId m) {
    return m == MetricId::kAIrtw || m == MetricId::kAMissingTheme;
  });
  std::optional<Corpus> corpus;
  if (wants_docs) corpus = load_corpus(cfg_.corpus);

  std::vector<TopicModelOutput> models;
  std::vector<std::optional<std::vector<DocTopicAssignment>>> assignments;
  for (const auto& ts : cfg_.topic_sets) {
    models.push_back(load_topics(ts.topics));
    if (wants_docs && ts.assignments) {
      assignments.push_back(load_assignments(*ts.assignments, models.back(), *corpus));
    } else {
      assignments.emplace_back();
    }
  }

  for (const auto& llm : cfg_.llms) {
    auto gateway = make_gateway(llm);
    for (std::size_t i = 0; i < models.size(); ++i) {
      JudgeOptions opts;
      opts.metrics = cfg_.metrics;
      opts.pairs = cfg_.pairs;
      opts.per_topic_docs = cfg_.per_topic_docs;
      opts.seed = cfg_.seed;
      opts.threads = cfg_.threads;
      opts.missing_theme_union = cfg_.missing_theme_union;
      if (wants_docs && !assignments[i]) {
        warn(diag_, models[i].config_label() + ": no assignments file; alignment metrics skipped");
        std::erase_if(opts.metrics, [](MetricId m) { return m == MetricId::kAIrtw || m == MetricId::kAMissingTheme; });
      }
      const auto run = evaluate_model(models[i], corpus ? &*corpus : nullptr, assignments[i] ? &*assignments[i] : nullptr,
                                      gateway, prompts_, opts, diag_);
      write_judge_outputs(run, out_path("judge/" + path_component(llm.llm_id) + "/" +
                                        path_component(models[i].config_label())));
    }
    add_stats(llm.llm_id, gateway.stats());
  }
  write_combined_judgments();
}

void Pipeline::do_adversarial() {
  fs::remove_all(out_path("adversarial"));
  std::vector<std::string> datasets;
  std::map<std::string, std::vector<Topic>> pools;
  for (const auto& ts : cfg_.topic_sets) {
    const auto model = load_topics(ts.topics);
    if (!pools.contains(model.dataset_name)) datasets.push_back(model.dataset_name);
    auto& pool = pools[model.dataset_name];
    pool.insert(pool.end(), model.topics.begin(), model.topics.end());
  }

  CaseGenerationInputs inputs;
  if (cfg_.adversarial.lexicon) inputs.lexicon.merge_file(*cfg_.adversarial.lexicon);
  const auto vocab_path = out_path("prep/vocab.txt");
  if (!fs::exists(vocab_path)) throw ConfigError("adversarial stage needs the prep vocabulary; run prep first");
  for (const auto& w : load_vocab(vocab_path).words()) inputs.vocab.insert(fold_case(w));

  // (dataset, test) -> cases
  std::map<std::pair<std::string, AdvTest>, std::vector<AdversarialCase>> suites;
  for (const auto& ds : datasets) {
    const auto ds_seed = derive_seed(cfg_.seed, "adversarial:" + ds);
    const auto topics = sample_adversarial_topics(pools[ds], cfg_.adversarial.n, ds_seed, diag_);
    inputs.donor_pool = pools[ds];
    for (auto test : cfg_.adversarial.tests) {
      auto cases = generate_cases(test, topics, inputs, ds_seed, diag_);
      write_text(out_path("adversarial/cases/" + path_component(ds) + "/" + std::string(to_string(test)) + ".jsonl"),
                 serialize_cases(cases));
      suites[{ds, test}] = std::move(cases);
    }
  }

  std::string csv = adversarial_csv_header();
  for (const auto& llm : cfg_.llms) {
    auto gateway = make_gateway(llm);
    MetricEvaluator eval(gateway, prompts_);
    for (const auto& ds : datasets) {
      for (auto test : cfg_.adversarial.tests) {
        auto result = run_adversarial(suites[{ds, test}], test, eval, cfg_.threads, diag_);
        result.dataset = ds;
        csv += adversarial_csv_row(result);
        const auto dir = "adversarial/" + path_component(llm.llm_id) + "/" + path_component(ds) + "/" +
                         std::string(to_string(test)) + "/";
        JudgmentStore store;
        for (const auto& j : result.judgments) {
          for (const auto& r : j.records) store.append_if_new(r);
        }
        write_text(out_path(dir + "judgments.jsonl"), store.serialize());
        std::string outcomes = "case_id,hit,failed,n_valid,sample_hits\n";
        for (const auto& o : result.outcomes) {
          outcomes += csv_field(o.case_id) + "," + (o.hit ? "1" : "0") + "," + (o.failed ? "1" : "0") + "," +
                      std::to_string(o.n_valid) + "," + std::to_string(o.sample_hits) + "\n";
        }
        write_text(out_path(dir + "outcomes.csv"), outcomes);
      }
    }
    add_stats(llm.llm_id, gateway.stats());
  }
  write_text(out_path("adversarial.csv"), csv);
  write_combined_judgments();
}

void Pipeline::write_combined_judgments() const {
  JudgmentStore store;
  auto files = find_files(out_path("judge"), "judgments.jsonl");
  const auto adv = find_files(out_path("adversarial"), "judgments.jsonl");
  files.insert(files.end(), adv.begin(), adv.end());
  for (const auto& f : files) {
    for (auto& r : JudgmentStore::load(f)) store.append_if_new(std::move(r));
  }
  write_text(out_path("judgments.jsonl"), store.serialize());
}

void Pipeline::do_analyze() {
  fs::remove_all(out_path("analysis"));
  std::vector<ScoreRow> scores;
  for (const auto& f : find_files(out_path("judge"), "scores.csv")) {
    auto rows = parse_scores_csv(read_file(f));
    scores.insert(scores.end(), rows.begin(), rows.end());
  }
  std::vector<BaselineReport> baselines;
  if (fs::exists(out_path("baseline.csv"))) baselines = parse_baseline_csv(read_file(out_path("baseline.csv")));

  const auto matrix = build_metric_matrix(scores, baselines, cfg_.unit);
  const auto aligned = align_directions(matrix);
  const auto corr = correlation_matrix(aligned, cfg_.method);
  std::vector<std::string> llm_ids;
  for (const auto& s : scores) llm_ids.push_back(s.llm);
  const auto agreement = llm_agreement(scores, base_large_pairs(llm_ids));

  write_text(out_path("analysis/matrix.csv"), to_csv(matrix));
  write_text(out_path("analysis/matrix_aligned.csv"), to_csv(aligned));
  write_text(out_path("analysis/correlation_" + std::string(to_string(cfg_.method)) + ".csv"), to_csv(corr));
  write_text(out_path("analysis/agreement.csv"), agreement_csv(agreement));
  const nlohmann::json bundle = {{"unit", cfg_.unit == ObservationUnit::kConfig ? "config" : "topic"},
                                 {"method", to_string(cfg_.method)},
                                 {"matrix", to_json(matrix)},
                                 {"matrix_aligned", to_json(aligned)},
                                 {"correlation", to_json(corr)},
                                 {"agreement", agreement_json(agreement)}};
  write_text(out_path("analysis/analysis.json"), bundle.dump(2) + "\n");
}

void Pipeline::do_report() {
  fs::remove_all(out_path("report"));
  std::vector<ScoreRow> scores;
  for (const auto& f : find_files(out_path("judge"), "scores.csv")) {
    auto rows = parse_scores_csv(read_file(f));
    scores.insert(scores.end(), rows.begin(), rows.end());
  }
  nlohmann::json bundle = {{"comparison", nlohmann::json::array()}};
  for (const auto& table : comparison_report(scores)) {
    write_text(out_path("report/comparison_" + path_component(table.title) + ".csv"), to_csv(table));
    bundle["comparison"].push_back(to_json(table));
  }
  if (fs::exists(out_path("adversarial.csv"))) {
    const auto table = adversarial_table(parse_adversarial_csv(read_file(out_path("adversarial.csv"))));
    write_text(out_path("report/adversarial_table.csv"), to_csv(table));
    bundle["adversarial"] = to_json(table);
  }
  write_text(out_path("report/report.json"), bundle.dump(2) + "\n");
}

}  // namespace topiceval
