#include "cli_app.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "gecforge/corpus.hpp"
#include "gecforge/errors.hpp"
#include "gecforge/exam.hpp"
#include "gecforge/llm/client.hpp"
#include "gecforge/llm/http_backend.hpp"
#include "gecforge/llm/prompt.hpp"
#include "gecforge/manifest.hpp"
#include "gecforge/metrics.hpp"
#include "gecforge/see.hpp"
#include "gecforge/text.hpp"

namespace gecforge::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Resolves each setting as flag > config file > environment > default and
// records the winning value for the manifest.
class Settings {
 public:
  void load_config(const std::string& path) {
    if (path.empty()) return;
    file_ = json::parse(corpus::read_file(path), nullptr, false);
    if (file_.is_discarded() || !file_.is_object()) throw ConfigError("config file " + path + " is not a JSON object");
  }

  template <class T>
  T get(const std::string& key, const CLI::Option* flag, const T& flag_value, const T& fallback,
        const char* env = nullptr) {
    T value = fallback;
    if (flag && flag->count() > 0) {
      value = flag_value;
    } else if (const auto it = file_.find(key); it != file_.end()) {
      try {
        value = it->get<T>();
      } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
      }
    } else if (const char* e = env ? std::getenv(env) : nullptr; e && *e) {
      if constexpr (std::is_same_v<T, std::string>) value = e;
    }
    resolved[key] = value;
    return value;
  }

  ordered_json resolved = ordered_json::object();

 private:
  json file_ = json::object();
};

struct CommonArgs {
  std::string config;
  std::vector<CLI::Option*> config_opts;

  bool given() const {
    return std::any_of(config_opts.begin(), config_opts.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }
};

struct LlmArgs {
  std::string backend, mock_script, cache_dir, prompts, model, api_base;
  int workers = 1, max_attempts = 4;
  double rpm = 0.0, temperature = 0.0;
  std::int64_t seed = 0;
  CLI::Option *backend_opt, *mock_opt, *cache_opt, *prompts_opt, *model_opt, *api_base_opt, *workers_opt,
      *attempts_opt, *rpm_opt, *temperature_opt, *seed_opt;
};

void add_llm_options(CLI::App* app, LlmArgs& a, const char* model_flag) {
  a.backend_opt = app->add_option("--backend", a.backend, "live-api | replay-cache | scripted-mock");
  a.mock_opt = app->add_option("--mock-script", a.mock_script, "Reply script for the scripted-mock backend");
  a.cache_opt = app->add_option("--cache-dir", a.cache_dir, "Response cache directory (default: cache)");
  a.prompts_opt = app->add_option("--prompts", a.prompts, "Directory overriding built-in prompt files");
  a.model_opt = app->add_option(model_flag, a.model, "Model name sent to the backend");
  a.api_base_opt = app->add_option("--api-base", a.api_base, "Chat-completions API base URL");
  a.workers_opt = app->add_option("--workers", a.workers, "Concurrent requests")->check(CLI::PositiveNumber);
  a.attempts_opt = app->add_option("--max-attempts", a.max_attempts, "Attempts per request on transient errors")
                       ->check(CLI::PositiveNumber);
  a.rpm_opt = app->add_option("--rpm", a.rpm, "Requests per minute, 0 for unlimited")->check(CLI::NonNegativeNumber);
  a.temperature_opt = app->add_option("--temperature", a.temperature, "Sampling temperature");
  a.seed_opt = app->add_option("--seed", a.seed, "Sampling seed passed to the provider");
}

struct LlmSetup {
  std::unique_ptr<llm::LlmClient> client;
  llm::PromptLibrary prompts;
  std::string model;
  std::size_t workers = 1;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

LlmSetup make_llm(Settings& s, LlmArgs& a, RunManifest& manifest, const std::string& model_key,
                  const std::string& default_model) {
  LlmSetup out;
  const std::string backend = s.get<std::string>("backend", a.backend_opt, a.backend, "scripted-mock");
  const auto kind = llm::parse_backend_kind(backend);
  manifest.backend = std::string(llm::to_string(kind));

  llm::ClientConfig cc;
  cc.kind = kind;
  cc.cache_dir = s.get<std::string>("cache_dir", a.cache_opt, a.cache_dir, "cache");
  cc.retry.max_attempts = s.get<int>("max_attempts", a.attempts_opt, a.max_attempts, 4);
  cc.requests_per_minute = s.get<double>("rpm", a.rpm_opt, a.rpm, 0.0);

  std::shared_ptr<llm::Backend> backend_impl;
  if (kind == llm::BackendKind::ScriptedMock) {
    const std::string script = s.get<std::string>("mock_script", a.mock_opt, a.mock_script, "");
    if (script.empty()) throw ConfigError("scripted-mock backend needs --mock-script");
    manifest.add_input(script);
    backend_impl = llm::ScriptedMockBackend::from_file(script);
  } else if (kind == llm::BackendKind::LiveApi) {
    auto cfg = llm::OpenAiChatBackend::config_from_env();
    cfg.api_base = s.get<std::string>("api_base", a.api_base_opt, a.api_base, cfg.api_base, "GECFORGE_API_BASE");
    backend_impl = std::make_shared<llm::OpenAiChatBackend>(cfg);
  }
  out.client = std::make_unique<llm::LlmClient>(cc, backend_impl);

  const std::string prompts = s.get<std::string>("prompts", a.prompts_opt, a.prompts, "");
  out.prompts = prompts.empty() ? llm::PromptLibrary::builtin() : llm::PromptLibrary::load(prompts);
  out.model = s.get<std::string>(model_key, a.model_opt, a.model, default_model, "GECFORGE_MODEL");
  out.workers = static_cast<std::size_t>(s.get<int>("workers", a.workers_opt, a.workers, 1));
  if (out.workers == 0) throw ConfigError("workers must be positive");
  out.temperature = s.get<double>("temperature", a.temperature_opt, a.temperature, 0.0);
  if (a.seed_opt->count() > 0) {
    out.seed = a.seed;
    s.resolved["seed"] = a.seed;
  }
  return out;
}

corpus::CorpusFormat corpus_format(Settings& s, const std::string& key, const CLI::Option* opt,
                                   const std::string& flag_value, const fs::path& path) {
  const std::string name = s.get<std::string>(key, opt, flag_value, "");
  return name.empty() ? corpus::format_from_path(path) : corpus::parse_format(name);
}

std::vector<std::string> argv_vector(int argc, const char* const* argv) {
  return std::vector<std::string>(argv, argv + argc);
}

void finish_manifest(RunManifest& m, const llm::LlmClient* client, const fs::path& out_dir, const Settings& s) {
  m.config = s.resolved;
  if (client) {
    m.live_calls = client->live_calls();
    m.cache_hits = client->cache_hits();
  }
  write_manifest(m, out_dir);
}

std::vector<std::string> read_lines(const fs::path& path) {
  const std::string content = corpus::read_file(path);
  std::vector<std::string> out;
  for (auto l : corpus::split_lines(content)) {
    if (l.ends_with('\r')) l.remove_suffix(1);
    out.emplace_back(l);
  }
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explanation-augmented training data and semantic evaluation for grammatical error correction",
               "gecforge"};
  app.set_version_flag("--version", "gecforge " + std::string(version()));
  app.require_subcommand(1);

  CommonArgs common;
  Settings settings;
  RunManifest manifest;
  manifest.command_line = argv_vector(argc, argv);
  manifest.timestamp = utc_timestamp();

  auto add_config = [&](CLI::App* sub) {
    common.config_opts.push_back(sub->add_option("--config", common.config, "JSON file of default option values"));
  };

  // extract-edits
  std::string ee_src, ee_tgt, ee_gran, ee_out;
  auto* ee = app.add_subcommand("extract-edits", "Align parallel sentence files into an M2 edit file");
  ee->add_option("--src", ee_src, "Source sentences, one per line")->required();
  ee->add_option("--tgt", ee_tgt, "Corrected sentences, one per line")->required();
  auto* ee_gran_opt = ee->add_option("--granularity", ee_gran, "char | word | word:icu | word:<segmenter>");
  ee->add_option("--out", ee_out, "Output M2 file")->required();
  add_config(ee);

  // score
  std::string sc_gold, sc_hyp, sc_gran, sc_gold_fmt, sc_out_dir;
  double sc_beta = 0.5;
  auto* sc = app.add_subcommand("score", "Exact-match P/R/F against gold edits");
  sc->add_option("--gold", sc_gold, "Gold corpus (.tsv, .m2 or .jsonl)")->required();
  sc->add_option("--hyp", sc_hyp, "Hypotheses: plain lines, id<TAB>text .tsv, or .jsonl")->required();
  auto* sc_gran_opt = sc->add_option("--granularity", sc_gran, "char | word | word:icu | word:<segmenter>");
  auto* sc_fmt_opt = sc->add_option("--gold-format", sc_gold_fmt, "tsv | m2 | jsonl (default: by extension)");
  auto* sc_beta_opt = sc->add_option("--beta", sc_beta, "F-beta weight")->check(CLI::PositiveNumber);
  auto* sc_out_opt = sc->add_option("--out-dir", sc_out_dir, "Directory for score_report.json");
  add_config(sc);

  // exam
  std::string ex_corpus, ex_fmt, ex_schema, ex_gold_mode, ex_split, ex_out;
  int ex_candidates = 1;
  LlmArgs ex_llm;
  auto* ex = app.add_subcommand("exam", "Annotate sentences with explanations and write augmented inputs");
  ex->add_option("--corpus", ex_corpus, "Corpus (.tsv, .m2 or .jsonl)")->required();
  auto* ex_fmt_opt = ex->add_option("--corpus-format", ex_fmt, "tsv | m2 | jsonl (default: by extension)");
  auto* ex_schema_opt = ex->add_option("--schema", ex_schema, "schema.json listing error-type names");
  auto* ex_gold_opt = ex->add_option("--gold-mode", ex_gold_mode, "none | train | test | both");
  auto* ex_split_opt = ex->add_option("--split", ex_split, "train | test");
  auto* ex_cand_opt = ex->add_option("--n-candidates", ex_candidates, "Explanations per sentence (only 1)");
  auto* ex_out_opt = ex->add_option("--out-dir", ex_out, "Output directory");
  add_llm_options(ex, ex_llm, "--model");
  add_config(ex);

  // see
  std::string se_corpus, se_fmt, se_pred, se_expl, se_gran, se_eval_model, se_out;
  bool se_allow_same = false;
  double se_beta = 0.5;
  LlmArgs se_llm;
  auto* se = app.add_subcommand("see", "Judge predicted edits with an LLM and score them");
  se->add_option("--corpus", se_corpus, "Corpus (.tsv, .m2 or .jsonl)")->required();
  auto* se_fmt_opt = se->add_option("--corpus-format", se_fmt, "tsv | m2 | jsonl (default: by extension)");
  se->add_option("--pred", se_pred, "Predictions: plain lines, id<TAB>text .tsv, or .jsonl")->required();
  auto* se_expl_opt = se->add_option("--explanations", se_expl, "records.jsonl from exam to show the judge");
  auto* se_gran_opt = se->add_option("--granularity", se_gran, "char | word | word:icu | word:<segmenter>");
  auto* se_eval_opt = se->add_option("--evaluated-model", se_eval_model, "Model that produced the predictions");
  auto* se_allow_opt = se->add_flag("--allow-same-model", se_allow_same, "Permit judge == evaluated model");
  auto* se_beta_opt = se->add_option("--beta", se_beta, "F-beta weight")->check(CLI::PositiveNumber);
  auto* se_out_opt = se->add_option("--out-dir", se_out, "Output directory");
  add_llm_options(se, se_llm, "--judge-model");
  add_config(se);

  // cache
  std::string ca_dir;
  double ca_age_days = -1;
  auto* ca = app.add_subcommand("cache", "Inspect or clean the response cache");
  ca->require_subcommand(1);
  auto* ca_stats = ca->add_subcommand("stats", "Count entries");
  auto* ca_gc = ca->add_subcommand("gc", "Remove temporary and corrupt entries");
  for (auto* sub : {ca_stats, ca_gc}) sub->add_option("--cache-dir", ca_dir, "Cache directory")->default_val("cache");
  ca_gc->add_option("--max-age-days", ca_age_days, "Also remove entries older than this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (common.given()) {
      settings.load_config(common.config);
      manifest.add_input(common.config);
    }

    if (*ee) {
      manifest.command = "extract-edits";
      const auto g = align::Granularity::parse(settings.get<std::string>("granularity", ee_gran_opt, ee_gran, "char"));
      const auto src = read_lines(ee_src);
      const auto tgt = read_lines(ee_tgt);
      if (src.size() != tgt.size()) {
        throw InvariantError("--src has " + std::to_string(src.size()) + " lines but --tgt has " +
                             std::to_string(tgt.size()));
      }
      std::vector<corpus::CorrectionSample> samples;
      for (std::size_t i = 0; i < src.size(); ++i) {
        samples.push_back({std::to_string(i + 1), normalize_text(src[i]), {normalize_text(tgt[i])}, std::nullopt});
      }
      corpus::write_corpus(samples, ee_out, corpus::CorpusFormat::M2, {g});
      manifest.add_input(ee_src);
      manifest.add_input(ee_tgt);
      manifest.backend = "none";
      const fs::path out_path(ee_out);
      finish_manifest(manifest, nullptr, out_path.has_parent_path() ? out_path.parent_path() : fs::path("."), settings);
      out << "wrote " << samples.size() << " edit blocks to " << ee_out << "\n";
      return kExitOk;
    }

    if (*sc) {
      manifest.command = "score";
      manifest.backend = "none";
      const auto g = align::Granularity::parse(settings.get<std::string>("granularity", sc_gran_opt, sc_gran, "char"));
      const double beta = settings.get<double>("beta", sc_beta_opt, sc_beta, 0.5);
      const auto samples = corpus::load_corpus(sc_gold, corpus_format(settings, "gold_format", sc_fmt_opt, sc_gold_fmt, sc_gold));
      const auto preds = corpus::load_predictions(sc_hyp, samples);
      const auto report = metrics::score_corpus(preds, samples, g, beta);
      const fs::path out_dir = settings.get<std::string>("out_dir", sc_out_opt, sc_out_dir, ".");
      corpus::write_file_atomic(out_dir / "score_report.json", metrics::to_json(report).dump(2) + "\n");
      manifest.add_input(sc_gold);
      manifest.add_input(sc_hyp);
      finish_manifest(manifest, nullptr, out_dir, settings);
      out << metrics::format_table(report.precision, report.recall, report.f_beta, beta, g.to_string());
      return kExitOk;
    }

    if (*ex) {
      manifest.command = "exam";
      const auto samples =
          corpus::load_corpus(ex_corpus, corpus_format(settings, "corpus_format", ex_fmt_opt, ex_fmt, ex_corpus));
      manifest.add_input(ex_corpus);
      exam::ExamConfig cfg;
      const std::string schema = settings.get<std::string>("schema", ex_schema_opt, ex_schema, "");
      if (!schema.empty()) {
        cfg.annotate.schema = exam::ErrorTypeSchema::load(schema);
        manifest.add_input(schema);
      }
      settings.resolved["error_types"] = cfg.annotate.schema.types;
      cfg.gold_mode = exam::parse_gold_mode(settings.get<std::string>("gold_mode", ex_gold_opt, ex_gold_mode, "none"));
      cfg.split = exam::parse_split(settings.get<std::string>("split", ex_split_opt, ex_split, "test"));
      cfg.n_candidates = static_cast<std::size_t>(settings.get<int>("n_candidates", ex_cand_opt, ex_candidates, 1));
      const fs::path out_dir = settings.get<std::string>("out_dir", ex_out_opt, ex_out, "exam_out");

      LlmSetup llm = make_llm(settings, ex_llm, manifest, "model", "gpt-3.5-turbo");
      cfg.annotate.model = llm.model;
      cfg.annotate.temperature = llm.temperature;
      cfg.annotate.seed = llm.seed;
      cfg.workers = llm.workers;
      settings.resolved["prompt_hash"] = llm.prompts.fingerprint("explain");

      const auto result = exam::run_exam(samples, *llm.client, llm.prompts, cfg);
      fs::create_directories(out_dir);
      exam::write_exam_outputs(samples, result, out_dir, cfg.split);
      finish_manifest(manifest, llm.client.get(), out_dir, settings);

      std::size_t backend_failures = 0;
      for (const auto& f : result.failures) backend_failures += f.backend_failure ? 1 : 0;
      out << "annotated " << samples.size() - result.failures.size() << " of " << samples.size() << " samples, "
          << result.failures.size() << " failed (" << backend_failures << " backend)\n";
      for (const auto& f : result.failures) err << "failed " << f.sample_id << ": " << f.reason << "\n";
      return backend_failures > 0 ? kExitBackend : kExitOk;
    }

    if (*se) {
      manifest.command = "see";
      const auto samples =
          corpus::load_corpus(se_corpus, corpus_format(settings, "corpus_format", se_fmt_opt, se_fmt, se_corpus));
      const auto preds = corpus::load_predictions(se_pred, samples);
      manifest.add_input(se_corpus);
      manifest.add_input(se_pred);

      see::SeeConfig cfg;
      cfg.granularity = align::Granularity::parse(settings.get<std::string>("granularity", se_gran_opt, se_gran, "char"));
      cfg.beta = settings.get<double>("beta", se_beta_opt, se_beta, 0.5);
      cfg.allow_same_model = settings.get<bool>("allow_same_model", se_allow_opt, se_allow_same, false);
      const std::string evaluated = settings.get<std::string>("evaluated_model", se_eval_opt, se_eval_model, "");
      if (!evaluated.empty()) cfg.evaluated_model = evaluated;
      std::vector<exam::ExplanationRecord> explanations;
      const std::string expl = settings.get<std::string>("explanations", se_expl_opt, se_expl, "");
      if (!expl.empty()) {
        explanations = exam::load_records(expl);
        cfg.use_explanations = true;
        manifest.add_input(expl);
      }
      const fs::path out_dir = settings.get<std::string>("out_dir", se_out_opt, se_out, "see_out");

      LlmSetup llm = make_llm(settings, se_llm, manifest, "judge_model", "gpt-4-turbo");
      cfg.judge.model = llm.model;
      cfg.judge.temperature = llm.temperature;
      cfg.judge.seed = llm.seed;
      cfg.workers = llm.workers;

      const auto result = see::run_see(samples, preds, explanations, *llm.client, llm.prompts, cfg);
      fs::create_directories(out_dir);
      see::write_see_outputs(result, out_dir);
      finish_manifest(manifest, llm.client.get(), out_dir, settings);

      out << metrics::format_table(result.report.precision, result.report.recall, result.report.f_beta, cfg.beta,
                                   "SEE");
      std::size_t backend_failures = 0;
      for (const auto& e : result.excluded) {
        backend_failures += e.backend_failure ? 1 : 0;
        err << "excluded " << e.sample_id << ": " << e.reason << "\n";
      }
      out << "judged " << preds.size() - result.excluded.size() << " of " << preds.size() << " sentences, "
          << result.excluded.size() << " excluded\n";
      return backend_failures > 0 ? kExitBackend : kExitOk;
    }

    if (*ca) {
      const llm::ResponseCache cache(ca_dir);
      if (*ca_stats) {
        const auto s = cache.stats();
        out << "entries " << s.entries << "\nbytes " << s.bytes << "\ncorrupt " << s.corrupt << "\ntemporary "
            << s.temporary << "\n";
      } else {
        std::optional<std::chrono::seconds> age;
        if (ca_age_days >= 0) age = std::chrono::seconds(static_cast<std::int64_t>(ca_age_days * 86400.0));
        out << "removed " << cache.gc(age) << " files\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.category()) {
      case Error::Category::Input:
      case Error::Category::Config:
        return kExitInput;
      case Error::Category::Backend:
        return kExitBackend;
      case Error::Category::Internal:
        return kExitInternal;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace gecforge::cli
