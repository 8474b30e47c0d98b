// src/experiment.cc

// Copyright 2026  The tauwin authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tauwin/experiment.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tauwin/errors.h"
#include "tauwin/fft.h"
#include "tauwin/util.h"
#include "tauwin/wav.h"

namespace tauwin {

namespace {

struct SystemRow {
  std::string name;       // human readable
  std::string file_tag;   // filesystem safe
  MfccConfig mfcc;
};

struct UtteranceRef {
  std::string speaker_id;
  std::string utt_id;  // speaker_id + utterance stem
  std::string split;
  std::filesystem::path wav_path;
};

std::string order_name(const WindowSpec& spec) {
  std::string name = window_base_name(spec.base);
  name += " tau=" + std::to_string(spec.order);
  return name;
}

std::string order_tag(const WindowSpec& spec) {
  return std::string(window_base_name(spec.base)) + "_tau" + std::to_string(spec.order);
}

std::vector<SystemRow> build_rows(const ExperimentConfig& cfg) {
  std::vector<SystemRow> rows;
  for (const WindowSpec& spec : cfg.windows) {
    SystemRow row;
    row.mfcc = cfg.mfcc;
    row.mfcc.multitaper_tapers = 0;
    row.mfcc.window = spec;
    row.mfcc.window.length = row.mfcc.frame_samples();
    row.name = order_name(row.mfcc.window);
    row.file_tag = order_tag(row.mfcc.window);
    rows.push_back(std::move(row));
  }
  if (cfg.multitaper_tapers > 0) {
    SystemRow row;
    row.mfcc = cfg.mfcc;
    row.mfcc.multitaper_tapers = cfg.multitaper_tapers;
    row.name = "sine-multitaper k=" + std::to_string(cfg.multitaper_tapers);
    row.file_tag = "sinemt_k" + std::to_string(cfg.multitaper_tapers);
    rows.push_back(std::move(row));
  }
  return rows;
}

FeatureMatrix cached_features(const UtteranceRef& utt, const MfccConfig& mfcc,
                              const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / (utt.utt_id + ".mfc");
  if (std::filesystem::exists(path)) {
    FeatureMatrix fm = read_features(path);
    if (fm.dim == mfcc.dim()) return fm;
  }
  const WavData wav = read_wav(utt.wav_path);
  if (wav.sample_rate != mfcc.sample_rate)
    throw ConfigError("corpus sample rate " + std::to_string(wav.sample_rate) +
                      " does not match mfcc sample rate " + std::to_string(mfcc.sample_rate));
  FeatureMatrix fm = extract(wav.samples, mfcc);
  write_features(fm, path);
  return fm;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (windows.empty() && multitaper_tapers <= 0)
    throw ConfigError("experiment needs at least one window or a multitaper row");
  if (mixtures < 1 || !is_power_of_two(static_cast<std::size_t>(mixtures)))
    throw ConfigError("mixtures must be a power of two");
  if (em_iterations < 0) throw ConfigError("em_iterations must be >= 0");
  if (relevance_factor <= 0.0) throw ConfigError("relevance factor must be positive");
  if (top_c < 1 || top_c > mixtures) throw ConfigError("top_c must be in [1, mixtures]");
  dcf.validate();
  if (corpus_manifest.empty()) throw ConfigError("corpus manifest path required");
  if (work_dir.empty()) throw ConfigError("work directory required");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const CorpusManifest manifest = read_manifest(cfg.corpus_manifest);

  std::vector<UtteranceRef> utterances;
  std::vector<std::string> target_speakers;
  for (const auto& spk : manifest.speakers) {
    if (spk.params.role == "target") target_speakers.push_back(spk.params.id);
    for (const auto& u : spk.utterances) {
      UtteranceRef ref;
      ref.speaker_id = spk.params.id;
      ref.utt_id = spk.params.id + "_" + std::filesystem::path(u.path).stem().string();
      ref.split = u.split;
      ref.wav_path = manifest.root / u.path;
      utterances.push_back(std::move(ref));
    }
  }
  if (target_speakers.size() < 2)
    throw ConfigError("experiment needs at least 2 target speakers");
  bool has_ubm = false, has_test = false;
  for (const auto& u : utterances) {
    has_ubm |= u.split == "ubm";
    has_test |= u.split == "test";
  }
  if (!has_ubm) throw ConfigError("corpus has no UBM split");
  if (!has_test) throw ConfigError("corpus has no test split");

  const std::vector<SystemRow> rows = build_rows(cfg);

  std::ostringstream gmm_text;
  gmm_text << "gmm|m=" << cfg.mixtures << "|iters=" << cfg.em_iterations
           << "|rel=" << cfg.relevance_factor << "|seed=" << cfg.seed;
  const std::string model_digest = hex_digest(fnv1a64(gmm_text.str()));
  std::ostringstream eval_text;
  eval_text << "eval|topc=" << cfg.top_c << "|cmiss=" << cfg.dcf.c_miss
            << "|cfa=" << cfg.dcf.c_fa << "|pt=" << cfg.dcf.p_target
            << "|ztnorm=" << (cfg.apply_zt_norm ? 1 : 0);
  const std::string eval_digest = hex_digest(fnv1a64(eval_text.str()));

  std::filesystem::create_directories(cfg.work_dir / "models");
  std::filesystem::create_directories(cfg.work_dir / "scores");
  std::filesystem::create_directories(cfg.work_dir / "reports");

  // Shared trial list: every target model against every test utterance.
  std::vector<std::size_t> test_utts;
  for (std::size_t i = 0; i < utterances.size(); ++i)
    if (utterances[i].split == "test") test_utts.push_back(i);
  TrialSet trials;
  for (const std::string& model : target_speakers)
    for (const std::size_t i : test_utts) {
      Trial t;
      t.model_id = model;
      t.test_id = utterances[i].utt_id;
      t.label = utterances[i].speaker_id == model ? TrialLabel::kTarget : TrialLabel::kImpostor;
      trials.entries.push_back(std::move(t));
    }
  write_trials(trials, cfg.work_dir / "scores" / "trials.tsv");

  ExperimentReport report;
  report.frontend_digest = cfg.mfcc.frontend_digest();
  report.model_digest = model_digest;
  report.eval_digest = eval_digest;
  report.num_trials = trials.entries.size();
  for (const Trial& t : trials.entries)
    if (t.label == TrialLabel::kTarget) ++report.num_target_trials;

  for (const SystemRow& row : rows) {
    const std::string window_digest = row.mfcc.window_digest();
    const std::filesystem::path feat_dir = cfg.work_dir / "features" / window_digest;
    std::filesystem::create_directories(feat_dir);

    // Features, utterance-parallel with one writer per file.
    std::vector<FeatureMatrix> features(utterances.size());
    parallel_for(utterances.size(), [&](std::size_t i) {
      features[i] = cached_features(utterances[i], row.mfcc, feat_dir);
    });

    const std::filesystem::path model_dir =
        cfg.work_dir / "models" / (window_digest + "-" + model_digest);
    std::filesystem::create_directories(model_dir);

    // UBM on the background split only.
    GmmModel ubm;
    const std::filesystem::path ubm_path = model_dir / "ubm.gum";
    if (std::filesystem::exists(ubm_path)) {
      ubm = read_model(ubm_path);
    } else {
      FeatureSet pool;
      for (std::size_t i = 0; i < utterances.size(); ++i)
        if (utterances[i].split == "ubm") pool.append(features[i]);
      ubm = em_train(vq_init(pool, cfg.mixtures, cfg.seed), pool, cfg.em_iterations);
      write_model(ubm, ubm_path);
    }

    // Mean-only MAP target models from the enrollment split.
    const AdaptationConfig adapt_cfg{cfg.relevance_factor, true};
    std::map<std::string, GmmModel> targets;
    for (const std::string& spk : target_speakers) {
      const std::filesystem::path model_path = model_dir / (spk + ".gum");
      if (std::filesystem::exists(model_path)) {
        targets[spk] = read_model(model_path);
        continue;
      }
      FeatureSet enroll;
      for (std::size_t i = 0; i < utterances.size(); ++i)
        if (utterances[i].speaker_id == spk && utterances[i].split == "enroll")
          enroll.append(features[i]);
      targets[spk] = map_adapt(ubm, enroll, adapt_cfg);
      write_model(targets[spk], model_path);
    }

    const ScoringConfig scoring{cfg.top_c};
    std::vector<FeatureSet> test_sets(test_utts.size());
    for (std::size_t j = 0; j < test_utts.size(); ++j)
      test_sets[j] = FeatureSet::from(features[test_utts[j]]);

    ScoreSet scores;
    scores.scores.resize(trials.entries.size());
    parallel_for(trials.entries.size(), [&](std::size_t k) {
      const std::size_t model_index = k / test_utts.size();
      const std::size_t test_index = k % test_utts.size();
      scores.scores[k] = score_utterance(targets.at(target_speakers[model_index]), ubm,
                                         test_sets[test_index], scoring);
    });

    if (cfg.apply_zt_norm) {
      // Cohorts come from the UBM pool: background utterances for the
      // z-side, background-speaker models for the t-side.
      std::vector<std::size_t> cohort_utts;
      std::vector<std::string> cohort_speakers;
      for (std::size_t i = 0; i < utterances.size(); ++i)
        if (utterances[i].split == "ubm") cohort_utts.push_back(i);
      for (const auto& spk : manifest.speakers)
        if (spk.params.role == "background") cohort_speakers.push_back(spk.params.id);
      if (cohort_utts.size() < 2 || cohort_speakers.size() < 2)
        throw ConfigError("zt-norm needs at least 2 background speakers");

      std::map<std::string, GmmModel> cohort_models;
      for (const std::string& spk : cohort_speakers) {
        FeatureSet own;
        for (const std::size_t i : cohort_utts)
          if (utterances[i].speaker_id == spk) own.append(features[i]);
        cohort_models[spk] = map_adapt(ubm, own, adapt_cfg);
      }

      std::map<std::string, std::vector<double>> z_scores;  // per target model
      for (const std::string& model : target_speakers) {
        std::vector<double>& z = z_scores[model];
        z.resize(cohort_utts.size());
        parallel_for(cohort_utts.size(), [&](std::size_t j) {
          z[j] = score_utterance(targets.at(model), ubm,
                                 FeatureSet::from(features[cohort_utts[j]]), scoring);
        });
      }
      std::vector<std::vector<double>> t_scores(test_utts.size());
      for (std::size_t j = 0; j < test_utts.size(); ++j) {
        t_scores[j].resize(cohort_speakers.size());
        parallel_for(cohort_speakers.size(), [&](std::size_t c) {
          t_scores[j][c] =
              score_utterance(cohort_models.at(cohort_speakers[c]), ubm, test_sets[j], scoring);
        });
      }
      for (std::size_t k = 0; k < scores.scores.size(); ++k) {
        const std::size_t model_index = k / test_utts.size();
        const std::size_t test_index = k % test_utts.size();
        scores.scores[k] = zt_norm(scores.scores[k], z_scores[target_speakers[model_index]],
                                   t_scores[test_index]);
      }
    }

    write_scores(scores, cfg.work_dir / "scores" / (row.file_tag + ".txt"));

    const DetCurve curve = det_curve(trials, scores);
    ExperimentRow out;
    out.name = row.name;
    out.window_digest = window_digest;
    out.eer_percent = eer_percent(curve);
    out.min_dcf = min_dcf(trials, scores, cfg.dcf);
    out.det_csv = "reports/det_" + row.file_tag + ".csv";
    export_det(curve, cfg.work_dir / out.det_csv);
    report.rows.push_back(std::move(out));
  }

  // Table shaped like the published comparisons: one row per window,
  // EER and minDCF x100 columns.
  std::ostringstream table;
  char line[256];
  table << "system                        EER (%)   minDCF x 100\n";
  table << "--------------------------------------------------\n";
  for (const ExperimentRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "%-28s  %7.4f   %9.4f\n", r.name.c_str(), r.eer_percent,
                  100.0 * r.min_dcf);
    table << line;
  }
  table << "\n";
  table << "trials: " << report.num_trials << " (" << report.num_target_trials << " target)\n";
  table << "stage digests (only the window digest may differ between rows):\n";
  std::snprintf(line, sizeof(line), "  frontend=%s model=%s eval=%s\n",
                report.frontend_digest.c_str(), report.model_digest.c_str(),
                report.eval_digest.c_str());
  table << line;
  for (const ExperimentRow& r : report.rows) {
    std::snprintf(line, sizeof(line), "  window[%s]=%s det=%s\n", r.name.c_str(),
                  r.window_digest.c_str(), r.det_csv.c_str());
    table << line;
  }
  report.table_text = table.str();

  std::ofstream out(cfg.work_dir / "reports" / "report.txt", std::ios::trunc);
  if (!out) throw IoError("cannot write report");
  out << report.table_text;
  if (!out) throw IoError("report write failed");
  return report;
}

}  // namespace tauwin
