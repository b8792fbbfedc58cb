// topiceval: command-line front end for the evaluation pipeline.
//
// Exit codes: 0 ok, 1 usage or configuration, 2 invalid input data,
// 3 judge endpoint failure, 4 any other stage failure.

#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "topiceval/pipeline.hpp"
#include "topiceval/text.hpp"

namespace fs = std::filesystem;
using namespace topiceval;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kEndpoint = 3, kStage = 4 };

void write_out(const std::string& path, std::string_view text) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_file(path, text);
}

void print_warnings(const Diagnostics& diag, const std::string& save_to = {}) {
  auto w = diag.warnings();
  std::sort(w.begin(), w.end());
  if (!save_to.empty()) write_out(save_to, join(w, "\n") + (w.empty() ? "" : "\n"));
  if (!w.empty()) std::cerr << w.size() << " warning(s)" << (save_to.empty() ? "" : "; see " + save_to) << "\n";
  if (save_to.empty()) {
    for (const auto& line : w) std::cerr << "warning: " << line << "\n";
  }
}

PrepConfig load_prep_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    auto cfg = prep_config_from_json(nlohmann::json::parse(read_file(path)));
    const auto base = fs::absolute(path).parent_path();
    for (auto& f : cfg.stopword_files) {
      if (fs::path(f).is_relative()) f = (base / f).string();
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Either a prepped corpus ({"doc_id","tokens"} lines) or a raw corpus that
// is tokenized with `prep` here.
std::vector<TokenList> load_tokens(const std::string& path, const PrepConfig& prep) {
  const auto lines = split_lines(read_file(path));
  const auto first = std::find_if(lines.begin(), lines.end(), [](const std::string& l) { return !trim(l).empty(); });
  if (first != lines.end()) {
    const auto j = nlohmann::json::parse(*first, nullptr, false);
    if (j.is_object() && j.contains("tokens")) return load_prepped_tokens(path);
  }
  const auto corpus = load_corpus(path);
  std::vector<TokenList> docs;
  for (const auto& d : corpus) docs.push_back(tokenize_normalize(d.text, prep));
  return docs;
}

std::vector<ScoreRow> load_scores(const std::string& dir) {
  std::vector<ScoreRow> scores;
  auto files = find_files(dir, "scores.csv");
  if (fs::is_regular_file(dir)) files = {dir};
  for (const auto& f : files) {
    auto rows = parse_scores_csv(read_file(f));
    scores.insert(scores.end(), rows.begin(), rows.end());
  }
  return scores;
}

struct Common {
  int threads = 1;
  std::string cache_dir = "cache";
  std::string warnings_file;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic model evaluation with classic metrics and LLM judges"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Common common;
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache", common.cache_dir, "Response cache directory");
  app.add_option("--warnings", common.warnings_file, "Write sorted warnings to this file");

  // prep
  auto* prep = app.add_subcommand("prep", "Tokenize a corpus and build its vocabulary");
  std::string prep_corpus, prep_config, prep_out = "prep";
  prep->add_option("--corpus", prep_corpus, "corpus.jsonl")->required();
  prep->add_option("--config", prep_config, "Preprocessing config JSON");
  prep->add_option("--out", prep_out, "Output directory");

  // baseline
  auto* base = app.add_subcommand("baseline", "Classic coherence and diversity metrics");
  std::vector<std::string> base_topics;
  std::string base_corpus, base_vocab, base_metrics = "all", base_out = "baseline.csv", base_prep, base_ranking;
  BaselineParams params;
  base->add_option("--topics", base_topics, "topics.json (repeatable)")->required();
  base->add_option("--corpus", base_corpus, "Raw or prepped corpus")->required();
  base->add_option("--vocab", base_vocab, "vocab.txt from prep");
  base->add_option("--prep-config", base_prep, "Preprocessing config for a raw corpus");
  base->add_option("--metrics", base_metrics, "Comma-separated metric names or 'all'");
  base->add_option("--window-uci", params.window_uci, "Window for UCI/NPMI")->check(CLI::Range(2, 100000));
  base->add_option("--window-cv", params.window_cv, "Window for C_V")->check(CLI::Range(2, 100000));
  base->add_option("--rbo-p", params.rbo_p, "RBO persistence")->check(CLI::Range(0.0, 1.0));
  base->add_option("--top-k", params.top_k, "Words per topic");
  base->add_option("--out", base_out, "Output CSV");
  base->add_option("--ranking", base_ranking, "Also write configuration ranking CSV");

  // judge
  auto* judge = app.add_subcommand("judge", "Score topics with an LLM judge");
  std::string j_topics, j_corpus, j_assign, j_llm, j_metrics = "all", j_pairs = "all", j_out = "judge", j_prompts;
  JudgeOptions jopts;
  judge->add_option("--topics", j_topics, "topics.json")->required();
  judge->add_option("--corpus", j_corpus, "corpus.jsonl (alignment metrics)");
  judge->add_option("--assignments", j_assign, "assignments.jsonl (alignment metrics)");
  judge->add_option("--llm", j_llm, "LLM config JSON")->required();
  judge->add_option("--metrics", j_metrics, "Comma-separated judge metrics or 'all'");
  judge->add_option("--pairs-strategy", j_pairs, "all | sample:N");
  judge->add_option("--per-topic-docs", jopts.per_topic_docs, "Documents sampled per topic");
  judge->add_option("--seed", jopts.seed, "Sampling seed");
  judge->add_flag("--missing-theme-union", jopts.missing_theme_union, "Show A_missing-theme the union of salient topics");
  judge->add_option("--prompts", j_prompts, "Directory of template overrides");
  judge->add_option("--out", j_out, "Output directory");

  // pairs
  auto* pairs = app.add_subcommand("pairs", "Sample document-topic pairs for the alignment metrics");
  std::string p_topics, p_corpus, p_assign, p_out = "pairs.jsonl";
  std::size_t p_per_topic = 5;
  std::uint64_t p_seed = 0;
  pairs->add_option("--topics", p_topics, "topics.json")->required();
  pairs->add_option("--corpus", p_corpus, "corpus.jsonl")->required();
  pairs->add_option("--assignments", p_assign, "assignments.jsonl")->required();
  pairs->add_option("--per-topic-docs", p_per_topic, "Documents per topic");
  pairs->add_option("--seed", p_seed, "Sampling seed");
  pairs->add_option("--out", p_out, "Output JSONL");

  // adversarial
  auto* adv = app.add_subcommand("adversarial", "Generate and run adversarial tests");
  std::vector<std::string> a_topics;
  std::string a_test, a_lexicon, a_llm, a_vocab, a_out = "adversarial.csv", a_cases_dir, a_prompts;
  std::size_t a_n = 100;
  std::uint64_t a_seed = 0;
  adv->add_option("--topics", a_topics, "topics.json (repeatable; pooled)")->required();
  adv->add_option("--test", a_test, "nonword | outlier | duplicate")->required();
  adv->add_option("--n", a_n, "Number of cases");
  adv->add_option("--seed", a_seed, "Generation seed");
  adv->add_option("--lexicon", a_lexicon, "Extra synonym lexicon");
  adv->add_option("--vocab", a_vocab, "vocab.txt; generated nonwords must avoid it");
  adv->add_option("--llm", a_llm, "LLM config JSON (omit to only generate cases)");
  adv->add_option("--cases-dir", a_cases_dir, "Where to write the case JSONL (default: next to --out)");
  adv->add_option("--prompts", a_prompts, "Directory of template overrides");
  adv->add_option("--out", a_out, "Output CSV");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Correlation and agreement analysis");
  std::string an_judgments, an_baseline, an_method = "pearson", an_unit = "config", an_out = "analysis";
  analyze->add_option("--judgments", an_judgments, "Directory searched for scores.csv")->required();
  analyze->add_option("--baseline", an_baseline, "baseline.csv");
  analyze->add_option("--method", an_method, "pearson | spearman");
  analyze->add_option("--unit", an_unit, "config | topic");
  analyze->add_option("--out", an_out, "Output directory");

  // report
  auto* report = app.add_subcommand("report", "Comparison and adversarial tables");
  std::string r_judgments, r_adversarial, r_out = "report";
  report->add_option("--judgments", r_judgments, "Directory searched for scores.csv")->required();
  report->add_option("--adversarial", r_adversarial, "adversarial.csv");
  report->add_option("--out", r_out, "Output directory");

  // validate-export
  auto* vexp = app.add_subcommand("validate-export", "Check a toolkit export bundle directory");
  std::string v_dir;
  vexp->add_option("dir", v_dir, "Bundle directory")->required();

  // run
  auto* run = app.add_subcommand("run", "Run every stage from one config file");
  std::string run_config;
  std::vector<std::string> run_stages;
  bool run_force = false;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_out;
  run->add_option("config", run_config, "Run config JSON")->required();
  run->add_option("--stage", run_stages, "Only these stages (repeatable)");
  run->add_flag("--force", run_force, "Re-run stages even when inputs are unchanged");
  run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--out", run_out, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  Diagnostics diag;
  const auto threads_explicit = app.count("--threads") > 0;
  try {
    if (*prep) {
      auto cfg = load_prep_config(prep_config);
      cfg.threads = common.threads;
      const auto corpus = load_corpus(prep_corpus);
      const auto result = prepare_corpus(corpus, cfg, &diag);
      write_prep_outputs(result, corpus, prep_out);
      std::cout << "prepped " << corpus.size() << " documents, vocabulary " << result.vocab.entries.size()
                << " -> " << prep_out << "\n";
    } else if (*base) {
      params.metrics = parse_baseline_metric_list(base_metrics);
      params.threads = common.threads;
      const auto tokens = load_tokens(base_corpus, load_prep_config(base_prep));
      std::vector<std::string> vocab;
      if (!base_vocab.empty()) {
        vocab = load_vocab(base_vocab).words();
      } else {
        VocabOptions opts;
        opts.threads = common.threads;
        vocab = build_vocab(tokens, {}, opts, &diag).words();
      }
      const auto docs = filter_to_vocab(tokens, vocab);
      std::string csv = baseline_csv_header();
      std::vector<ConfigCandidate> candidates;
      for (const auto& path : base_topics) {
        const auto model = load_topics(path);
        const auto r = evaluate_baselines(model, docs, vocab, params, &diag);
        csv += baseline_csv_rows(r);
        ConfigCandidate c{model.config_label(), {}};
        for (auto m : kSelectionMetrics) {
          if (auto v = r.model_level(m)) c.scores[m] = *v;
        }
        candidates.push_back(std::move(c));
      }
      write_out(base_out, csv);
      if (!base_ranking.empty()) {
        std::string ranking = "mode,rank,config,score\n";
        for (bool normalized : {false, true}) {
          const auto ranked = rank_configurations(candidates, normalized, &diag);
          for (std::size_t i = 0; i < ranked.size(); ++i) {
            ranking += std::string(normalized ? "normalized" : "raw") + "," + std::to_string(i + 1) + "," +
                       csv_field(ranked[i].label) + "," + format_double(ranked[i].score) + "\n";
          }
        }
        write_out(base_ranking, ranking);
      }
      std::cout << "baseline scores -> " << base_out << "\n";
    } else if (*judge) {
      const auto llm = load_llm_config(j_llm);
      jopts.metrics = parse_metric_list(j_metrics);
      try {
        jopts.pairs = PairStrategy::parse(j_pairs);
      } catch (const ValidationError& e) {
        throw ConfigError(std::string("--pairs-strategy: ") + e.what());
      }
      jopts.threads = common.threads;
      const auto model = load_topics(j_topics);
      std::optional<Corpus> corpus;
      std::optional<std::vector<DocTopicAssignment>> assignments;
      if (!j_corpus.empty()) corpus = load_corpus(j_corpus);
      if (!j_assign.empty()) {
        if (!corpus) throw ConfigError("--assignments needs --corpus");
        assignments = load_assignments(j_assign, model, *corpus);
      }
      PromptLibrary prompts;
      if (!j_prompts.empty()) prompts.load_overrides(j_prompts);
      Gateway gateway(llm, make_backend(llm), std::make_shared<ResponseCache>(common.cache_dir), &diag);
      const auto result = evaluate_model(model, corpus ? &*corpus : nullptr, assignments ? &*assignments : nullptr,
                                         gateway, prompts, jopts, &diag);
      write_judge_outputs(result, j_out);
      const auto s = gateway.stats();
      std::cout << "judged " << model.config_label() << " with " << llm.llm_id << ": " << s.network_calls
                << " calls, " << s.cache_hits << " cache hits, " << s.failed_samples << " failed samples -> " << j_out
                << "\n";
    } else if (*pairs) {
      const auto model = load_topics(p_topics);
      const auto corpus = load_corpus(p_corpus);
      const auto assignments = load_assignments(p_assign, model, corpus);
      std::string out;
      for (const auto& p : sample_doc_topic_pairs(model, corpus, assignments, p_per_topic, p_seed, &diag)) {
        out += nlohmann::json{{"doc_id", p.doc_id}, {"topic_id", p.topic_id}, {"sampling_seed", p.sampling_seed}}
                   .dump() +
               "\n";
      }
      write_out(p_out, out);
      std::cout << "pairs -> " << p_out << "\n";
    } else if (*adv) {
      const auto test = parse_adv_test(a_test);
      if (!test) throw ConfigError("unknown test '" + a_test + "'");
      std::vector<Topic> pool;
      std::string dataset;
      for (const auto& path : a_topics) {
        const auto model = load_topics(path);
        if (!dataset.empty() && dataset != model.dataset_name) {
          throw ConfigError("--topics files come from different datasets; run each dataset separately");
        }
        dataset = model.dataset_name;
        pool.insert(pool.end(), model.topics.begin(), model.topics.end());
      }
      CaseGenerationInputs inputs;
      inputs.donor_pool = pool;
      if (!a_lexicon.empty()) inputs.lexicon.merge_file(a_lexicon);
      if (!a_vocab.empty()) {
        for (const auto& w : load_vocab(a_vocab).words()) inputs.vocab.insert(fold_case(w));
      }
      const auto topics = sample_adversarial_topics(pool, a_n, a_seed, &diag);
      const auto cases = generate_cases(*test, topics, inputs, a_seed, &diag);
      const auto cases_dir = a_cases_dir.empty() ? fs::path(a_out).parent_path() : fs::path(a_cases_dir);
      const auto cases_path = (cases_dir / ("cases_" + std::string(to_string(*test)) + ".jsonl")).string();
      write_out(cases_path, serialize_cases(cases));
      std::cout << "generated " << cases.size() << " cases -> " << cases_path << "\n";
      if (!a_llm.empty()) {
        const auto llm = load_llm_config(a_llm);
        PromptLibrary prompts;
        if (!a_prompts.empty()) prompts.load_overrides(a_prompts);
        Gateway gateway(llm, make_backend(llm), std::make_shared<ResponseCache>(common.cache_dir), &diag);
        MetricEvaluator eval(gateway, prompts);
        auto result = run_adversarial(cases, *test, eval, common.threads, &diag);
        result.dataset = dataset;
        write_out(a_out, adversarial_csv_header() + adversarial_csv_row(result));
        std::cout << to_string(*test) << " accuracy " << format_double(result.accuracy) << " (" << result.n_hits << "/"
                  << result.n_cases << ") -> " << a_out << "\n";
      }
    } else if (*analyze) {
      const auto method = parse_corr_method(an_method);
      const auto unit = parse_observation_unit(an_unit);
      const auto scores = load_scores(an_judgments);
      std::vector<BaselineReport> baselines;
      if (!an_baseline.empty()) baselines = parse_baseline_csv(read_file(an_baseline));
      const auto matrix = build_metric_matrix(scores, baselines, unit);
      const auto aligned = align_directions(matrix);
      const auto corr = correlation_matrix(aligned, method);
      std::vector<std::string> ids;
      for (const auto& s : scores) ids.push_back(s.llm);
      const auto agreement = llm_agreement(scores, base_large_pairs(ids));
      const fs::path out(an_out);
      write_out((out / "matrix.csv").string(), to_csv(matrix));
      write_out((out / "matrix_aligned.csv").string(), to_csv(aligned));
      write_out((out / ("correlation_" + std::string(to_string(method)) + ".csv")).string(), to_csv(corr));
      write_out((out / "agreement.csv").string(), agreement_csv(agreement));
      const nlohmann::json bundle = {{"unit", an_unit},
                                     {"method", to_string(method)},
                                     {"matrix", to_json(matrix)},
                                     {"matrix_aligned", to_json(aligned)},
                                     {"correlation", to_json(corr)},
                                     {"agreement", agreement_json(agreement)}};
      write_out((out / "analysis.json").string(), bundle.dump(2) + "\n");
      std::cout << "analysis (" << matrix.rows.size() << " x " << matrix.columns.size() << ") -> " << an_out << "\n";
    } else if (*report) {
      const auto scores = load_scores(r_judgments);
      const fs::path out(r_out);
      nlohmann::json bundle = {{"comparison", nlohmann::json::array()}};
      for (const auto& t : comparison_report(scores)) {
        write_out((out / ("comparison_" + path_component(t.title) + ".csv")).string(), to_csv(t));
        bundle["comparison"].push_back(to_json(t));
      }
      if (!r_adversarial.empty()) {
        const auto t = adversarial_table(parse_adversarial_csv(read_file(r_adversarial)));
        write_out((out / "adversarial_table.csv").string(), to_csv(t));
        bundle["adversarial"] = to_json(t);
      }
      write_out((out / "report.json").string(), bundle.dump(2) + "\n");
      std::cout << "report -> " << r_out << "\n";
    } else if (*vexp) {
      const auto b = validate_export_bundle(v_dir);
      std::cout << "ok: " << b.meta.toolkit << " " << b.meta.toolkit_version << ", K=" << b.meta.k << ", M=" << b.meta.m
                << ", " << b.corpus.size() << " documents\n";
    } else if (*run) {
      auto cfg = load_run_config(run_config);
      if (run_seed) cfg.seed = *run_seed;
      if (run_out) cfg.out_dir = *run_out;
      if (threads_explicit) cfg.threads = common.threads;
      if (app.count("--cache") > 0) cfg.cache_dir = common.cache_dir;
      Pipeline pipeline(cfg, run_force, &diag);
      std::vector<Stage> stages;
      for (const auto& name : run_stages) {
        const auto it = std::find_if(kAllStages.begin(), kAllStages.end(),
                                     [&](Stage s) { return to_string(s) == name; });
        if (it == kAllStages.end()) throw ConfigError("unknown stage '" + name + "'");
        stages.push_back(*it);
      }
      if (stages.empty()) stages.assign(kAllStages.begin(), kAllStages.end());
      bool any_ran = false;
      for (auto s : stages) {
        const bool ran = pipeline.run_stage(s);
        any_ran = any_ran || ran;
        std::cout << to_string(s) << ": " << (ran ? "done" : "up to date") << "\n";
      }
      for (const auto& [id, s] : pipeline.gateway_stats()) {
        std::cout << id << ": " << s.network_calls << " calls, " << s.cache_hits << " cache hits, " << s.retries
                  << " retries, " << s.failed_samples << " failed samples\n";
      }
      // An all-cached rerun keeps the warnings of the run that produced the artifacts.
      if (common.warnings_file.empty() && any_ran) common.warnings_file = pipeline.out_path("warnings.txt");
    }
  } catch (const ConfigError& e) {
    print_warnings(diag, common.warnings_file);
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    print_warnings(diag, common.warnings_file);
    std::cerr << "invalid input: " << e.what() << "\n";
    return kData;
  } catch (const EndpointError& e) {
    print_warnings(diag, common.warnings_file);
    std::cerr << "endpoint failure: " << e.what() << "\n";
    return kEndpoint;
  } catch (const AnalysisError& e) {
    print_warnings(diag, common.warnings_file);
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    print_warnings(diag, common.warnings_file);
    std::cerr << "stage failed: " << e.what() << "\n";
    return kStage;
  }
  print_warnings(diag, common.warnings_file);
  return kOk;
}
