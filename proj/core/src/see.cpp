#include "gecforge/see.hpp"

#include <unordered_map>

#include "gecforge/errors.hpp"
#include "gecforge/llm/structured.hpp"
#include "gecforge/parallel.hpp"
#include "gecforge/text.hpp"

namespace gecforge::see {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const EditJudgment& j) {
  ordered_json o;
  o["id"] = j.sample_id;
  o["edit_index"] = j.edit_index;
  o["verdict"] = std::string(to_string(j.verdict));
  o["rationale"] = j.rationale;
  return o;
}

ordered_json to_json(const SentenceCounts& c) {
  ordered_json o;
  o["n_ce"] = c.n_ce;
  o["n_we"] = c.n_we;
  o["n_re"] = c.n_re;
  o["n_golden"] = c.n_golden;
  return o;
}

ordered_json to_json(const SeeReport& r) {
  ordered_json o;
  o["precision"] = r.precision;
  o["recall"] = r.recall;
  o["f_beta"] = r.f_beta;
  o["beta"] = r.beta;
  o["counts"] = to_json(r.counts);
  o["per_sentence"] = ordered_json::array();
  for (const auto& s : r.per_sentence) {
    ordered_json row;
    row["id"] = s.sample_id;
    row["reference"] = s.reference_index ? ordered_json(*s.reference_index) : ordered_json(nullptr);
    row["counts"] = to_json(s.counts);
    o["per_sentence"].push_back(std::move(row));
  }
  return o;
}

// Prompting ---------------------------------------------------------------------------

std::string render_edit_list(const align::EditSet& predicted, const align::Tokens& source) {
  std::string out;
  for (std::size_t i = 0; i < predicted.edits.size(); ++i) {
    const auto& e = predicted.edits[i];
    const align::Tokens original(source.begin() + static_cast<std::ptrdiff_t>(e.start),
                                 source.begin() + static_cast<std::ptrdiff_t>(e.end));
    const std::string before = align::detokenize(original, predicted.granularity);
    const std::string after = align::detokenize(e.replacement, predicted.granularity);
    out += std::to_string(i) + ": [" + std::to_string(e.start) + ", " + std::to_string(e.end) + ") " +
           (before.empty() ? "(none)" : before) + " -> " + (after.empty() ? "(none)" : after) + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string render_explanation(const exam::ExplanationRecord& record) {
  std::string out = "Error types: ";
  for (std::size_t i = 0; i < record.error_types.size(); ++i) {
    if (i > 0) out += "; ";
    out += record.error_types[i];
  }
  out += "\nReference correction: " + record.reference;
  for (const auto& e : record.explanations) out += "\n" + std::to_string(e.rank) + ". " + e.text;
  return out;
}

llm::LlmRequest build_judge_request(const corpus::CorrectionSample& sample, const std::string& hypothesis,
                                    const align::EditSet& predicted, const std::string& gold_reference,
                                    const exam::ExplanationRecord* explanation, const llm::PromptLibrary& prompts,
                                    const JudgeOptions& options) {
  llm::Slots slots{{"source", sample.source},
                   {"golden", gold_reference},
                   {"predicted", hypothesis},
                   {"edits", render_edit_list(predicted, align::tokenize(sample.source, predicted.granularity))}};
  if (explanation) slots["explanation"] = render_explanation(*explanation);
  llm::LlmRequest req;
  req.model = options.model;
  req.system_prompt = prompts.system_prompt("evaluate");
  req.user_prompt = prompts.render("evaluate", slots);
  req.demonstrations = prompts.demonstrations("evaluate");
  req.temperature = options.temperature;
  req.seed = options.seed;
  return req;
}

namespace {

llm::LlmResponse call(llm::LlmClient& client, const llm::LlmRequest& req, const std::string& id,
                      const std::vector<std::string>& raws) {
  try {
    return client.complete(req);
  } catch (const Error& e) {
    if (e.category() != Error::Category::Backend) throw;
    throw JudgmentFailed(id, e.what(), raws, true);
  }
}

std::vector<EditJudgment> to_judgments(const std::string& id, const llm::JudgmentPayload& items) {
  std::vector<EditJudgment> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back({id, it.edit_index, it.verdict, it.rationale});
  return out;
}

}  // namespace

std::vector<EditJudgment> judge_edits(const corpus::CorrectionSample& sample, const std::string& hypothesis,
                                      const align::EditSet& predicted, const std::string& gold_reference,
                                      const exam::ExplanationRecord* explanation, llm::LlmClient& client,
                                      const llm::PromptLibrary& prompts, const JudgeOptions& options) {
  if (predicted.edits.empty()) return {};
  const llm::SchemaContext ctx{{}, predicted.edits.size()};
  const llm::LlmRequest req =
      build_judge_request(sample, hypothesis, predicted, gold_reference, explanation, prompts, options);
  std::vector<std::string> raws;

  const llm::LlmResponse first = call(client, req, sample.id, raws);
  raws.push_back(first.text);
  std::string problem;
  try {
    return to_judgments(sample.id, llm::parse_judgments(first.text, ctx));
  } catch (const ParseError& e) {
    problem = e.what();
  } catch (const SchemaError& e) {
    problem = e.what();
  }

  llm::LlmRequest repair = req;
  repair.user_prompt = prompts.render("repair", {{"problem", problem}, {"original", req.user_prompt}, {"previous", first.text}});
  const llm::LlmResponse second = call(client, repair, sample.id, raws);
  raws.push_back(second.text);
  try {
    return to_judgments(sample.id, llm::parse_judgments(second.text, ctx));
  } catch (const ParseError& e) {
    throw JudgmentFailed(sample.id, std::string("after repair: ") + e.what(), raws);
  } catch (const SchemaError& e) {
    throw JudgmentFailed(sample.id, std::string("after repair: ") + e.what(), raws);
  }
}

// Counting ----------------------------------------------------------------------------

std::optional<std::size_t> select_reference(const align::EditSet& predicted,
                                            const std::vector<align::EditSet>& gold_sets) {
  std::optional<std::size_t> best;
  std::size_t best_tp = 0;
  for (std::size_t r = 0; r < gold_sets.size(); ++r) {
    const std::size_t tp = metrics::match_edits(predicted, gold_sets[r]).tp;
    if (!best || tp > best_tp) {
      best = r;
      best_tp = tp;
    }
  }
  return best;
}

SentenceCounts tally(const std::vector<EditJudgment>& judgments, const align::EditSet& predicted,
                     std::size_t n_golden) {
  const std::size_t n = predicted.edits.size();
  std::vector<bool> seen(n, false);
  SentenceCounts c;
  c.n_golden = n_golden;
  for (const auto& j : judgments) {
    if (j.edit_index >= n || seen[j.edit_index]) {
      throw CoverageError("judgment for edit " + std::to_string(j.edit_index) + " of sample " + j.sample_id +
                          " is out of range or repeated");
    }
    seen[j.edit_index] = true;
    switch (j.verdict) {
      case EditVerdict::CorrectEdit:
        ++c.n_ce;
        break;
      case EditVerdict::WrongEdit:
        ++c.n_we;
        break;
      case EditVerdict::ReasonableEdit:
        ++c.n_re;
        break;
    }
  }
  if (judgments.size() != n) {
    throw CoverageError(std::to_string(n - judgments.size()) + " predicted edits have no judgment");
  }
  return c;
}

SentenceCounts tally(const std::vector<EditJudgment>& judgments, const align::EditSet& predicted,
                     const corpus::CorrectionSample& sample, const align::Granularity& granularity) {
  const auto gold = corpus::gold_edit_sets(sample, granularity);
  const auto ref = select_reference(predicted, gold);
  return tally(judgments, predicted, ref ? gold[*ref].edits.size() : 0);
}

SeeReport score_see(std::vector<metrics::SentenceScore<SentenceCounts>> sentences, double beta) {
  metrics::compute_f_beta(0.0, 0.0, beta);  // validates beta
  SeeReport r;
  r.beta = beta;
  for (const auto& s : sentences) r.counts += s.counts;
  // Reasonable edits appear in neither fraction.
  const auto fr = metrics::fractions(r.counts.n_ce, r.counts.n_ce + r.counts.n_we, r.counts.n_golden);
  r.precision = fr.precision;
  r.recall = fr.recall;
  r.f_beta = metrics::compute_f_beta(fr.precision, fr.recall, beta);
  r.per_sentence = std::move(sentences);
  return r;
}

// Pipeline ----------------------------------------------------------------------------

SeeResult evaluate(const std::vector<corpus::CorrectionSample>& samples,
                   const std::vector<corpus::Prediction>& predictions,
                   const std::vector<exam::ExplanationRecord>& explanations, const JudgeFn& judge,
                   const SeeConfig& config) {
  std::unordered_map<std::string_view, const corpus::CorrectionSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.id, &s);
  std::vector<std::string> missing;
  for (const auto& p : predictions) {
    if (!by_id.contains(p.sample_id)) missing.push_back(p.sample_id);
  }
  if (!missing.empty()) throw MissingSampleError(std::move(missing));

  std::unordered_map<std::string_view, const exam::ExplanationRecord*> expl_by_id;
  if (config.use_explanations) {
    for (const auto& e : explanations) expl_by_id.emplace(e.sample_id, &e);
  }

  struct Outcome {
    std::optional<metrics::SentenceScore<SentenceCounts>> score;
    std::vector<EditJudgment> judgments;
    std::optional<SeeExclusion> excluded;
  };
  std::vector<Outcome> outcomes(predictions.size());

  parallel_for(predictions.size(), config.workers, [&](std::size_t i) {
    const auto& pred = predictions[i];
    const corpus::CorrectionSample& sample = *by_id.at(pred.sample_id);
    const std::string hypothesis = normalize_text(pred.hypothesis);
    const align::Tokens src = align::tokenize(sample.source, config.granularity);
    const align::EditSet predicted =
        align::extract_edits(src, align::tokenize(hypothesis, config.granularity), config.granularity);
    const auto gold = corpus::gold_edit_sets(sample, config.granularity);
    const auto ref = select_reference(predicted, gold);
    const align::EditSet empty_gold{{}, src.size(), config.granularity};
    const auto expl = expl_by_id.find(sample.id);

    const JudgeInput input{sample,
                           hypothesis,
                           predicted,
                           ref,
                           ref ? sample.references[*ref] : sample.source,
                           ref ? gold[*ref] : empty_gold,
                           expl == expl_by_id.end() ? nullptr : expl->second};
    try {
      auto judgments = judge(input);
      const SentenceCounts counts = tally(judgments, predicted, input.gold.edits.size());
      outcomes[i].score = metrics::SentenceScore<SentenceCounts>{sample.id, ref, counts};
      outcomes[i].judgments = std::move(judgments);
    } catch (const JudgmentFailed& e) {
      outcomes[i].excluded = SeeExclusion{e.sample_id(), e.reason(), e.raw_responses(), e.backend_failure()};
    }
  });

  SeeResult result;
  std::vector<metrics::SentenceScore<SentenceCounts>> scores;
  for (auto& o : outcomes) {
    if (o.excluded) {
      result.excluded.push_back(std::move(*o.excluded));
      continue;
    }
    scores.push_back(std::move(*o.score));
    std::sort(o.judgments.begin(), o.judgments.end(),
              [](const EditJudgment& a, const EditJudgment& b) { return a.edit_index < b.edit_index; });
    for (auto& j : o.judgments) result.judgments.push_back(std::move(j));
  }
  result.report = score_see(std::move(scores), config.beta);
  result.fingerprint["judge_model"] = config.judge.model;
  result.fingerprint["granularity"] = config.granularity.to_string();
  result.fingerprint["use_explanations"] = config.use_explanations;
  return result;
}

SeeResult run_see(const std::vector<corpus::CorrectionSample>& samples,
                  const std::vector<corpus::Prediction>& predictions,
                  const std::vector<exam::ExplanationRecord>& explanations, llm::LlmClient& client,
                  const llm::PromptLibrary& prompts, const SeeConfig& config) {
  if (config.evaluated_model && *config.evaluated_model == config.judge.model && !config.allow_same_model) {
    throw ConfigError("judge model '" + config.judge.model +
                      "' is also the evaluated model; pick another judge or allow it explicitly");
  }
  const JudgeFn judge = [&](const JudgeInput& in) {
    return judge_edits(in.sample, in.hypothesis, in.predicted, in.gold_reference, in.explanation, client, prompts,
                       config.judge);
  };
  SeeResult result = evaluate(samples, predictions, explanations, judge, config);
  result.fingerprint["prompt_hash"] = sha256_hex(prompts.fingerprint("evaluate") + prompts.fingerprint("repair"));
  return result;
}

ordered_json report_json(const SeeResult& result) {
  ordered_json j = to_json(result.report);
  ordered_json excluded;
  excluded["count"] = result.excluded.size();
  excluded["sentences"] = ordered_json::array();
  for (const auto& e : result.excluded) {
    ordered_json row;
    row["id"] = e.sample_id;
    row["reason"] = e.reason;
    row["backend_failure"] = e.backend_failure;
    row["raw_responses"] = e.raw_responses;
    excluded["sentences"].push_back(std::move(row));
  }
  j["excluded"] = std::move(excluded);
  j["fingerprint"] = result.fingerprint;
  return j;
}

void write_see_outputs(const SeeResult& result, const std::filesystem::path& out_dir) {
  std::string lines;
  for (const auto& j : result.judgments) lines += to_json(j).dump() + "\n";
  corpus::write_file_atomic(out_dir / "judgments.jsonl", lines);
  corpus::write_file_atomic(out_dir / "see_report.json", report_json(result).dump(2) + "\n");
}

}  // namespace gecforge::see
