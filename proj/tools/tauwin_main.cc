// tools/tauwin_main.cc

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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tauwin/config.h"
#include "tauwin/corpus.h"
#include "tauwin/errors.h"
#include "tauwin/evalmetrics.h"
#include "tauwin/experiment.h"
#include "tauwin/features.h"
#include "tauwin/gmm.h"
#include "tauwin/spectral.h"
#include "tauwin/util.h"
#include "tauwin/wav.h"
#include "tauwin/windows.h"

namespace {

using namespace tauwin;

std::vector<double> read_value_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Accept either bare values or trailing-column CSV like "n,value".
    const auto comma = line.find_last_of(',');
    const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw FormatError("bad numeric line in " + path.string() + ": '" + line + "'");
    }
  }
  if (values.empty()) throw FormatError("no samples in " + path.string());
  return values;
}

void write_csv_pairs(const std::filesystem::path& path, const char* header,
                     const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << header << "\n";
  char buf[128];
  for (const auto& [a, b] : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", a, b);
    out << buf;
  }
}

int cmd_window_metrics(const std::string& base, int order, int length, std::size_t fft_size,
                       const std::string& samples_csv, const std::string& spectrum_csv) {
  WindowSpec spec;
  spec.base = window_base_from_name(base);
  spec.order = order;
  spec.length = length;
  const Window w = make_window(spec);
  if (fft_size == 0) fft_size = metrics_fft_size(w.samples.size());
  const WindowMetrics m = window_metrics(w, fft_size);

  std::printf("window                 leakage    rel sidelobe    -3 dB width\n");
  std::printf("                       factor     attenuation     (x pi rad/sample)\n");
  std::printf("%-20s  %6.2f %%   %8.1f dB     %.6f\n",
              (std::string(window_base_name(spec.base)) + " tau=" + std::to_string(order)).c_str(),
              100.0 * m.leakage_factor, m.relative_sidelobe_attenuation_db,
              m.mainlobe_width_3db);

  if (!samples_csv.empty()) {
    std::vector<std::pair<double, double>> rows;
    for (std::size_t n = 0; n < w.samples.size(); ++n)
      rows.emplace_back(static_cast<double>(n), w.samples[n]);
    write_csv_pairs(samples_csv, "n,value", rows);
  }
  if (!spectrum_csv.empty()) {
    const auto bins = rfft(w.samples, fft_size);
    double peak = 0.0;
    for (const auto& z : bins) peak = std::max(peak, std::abs(z));
    std::vector<std::pair<double, double>> rows;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double db = 20.0 * std::log10(std::max(std::abs(bins[k]) / peak, 1e-12));
      rows.emplace_back(2.0 * static_cast<double>(k) / static_cast<double>(fft_size), db);
    }
    write_csv_pairs(spectrum_csv, "normfreq,db", rows);
  }
  return 0;
}

int cmd_verify_identity(const std::string& input, std::size_t grid) {
  const std::vector<double> frame = read_value_lines(input);
  if (grid == 0)
    grid = std::max<std::size_t>(65536, next_power_of_two(256 * frame.size()));
  const DerivativeDecomposition d = derivative_decomposition(frame, grid);
  const ResidualStats s = residual_stats(d);
  std::printf("frame length: %zu\n", frame.size());
  std::printf("grid: %zu (%zu one-sided points)\n", grid, d.omega_grid.size());
  std::printf("excluded points: %zu\n", s.excluded_count);
  std::printf("median relative residual: %.6e\n", s.median_relative);
  std::printf("p95 relative residual: %.6e\n", s.p95_relative);
  if (s.median_relative > 1e-4) {
    std::fprintf(stderr, "identity check FAILED: median relative residual exceeds 1e-4\n");
    return 1;
  }
  std::printf("identity check passed (median <= 1e-4)\n");
  return 0;
}

// Settings flow defaults -> config file -> --set overrides -> explicit
// CLI flags; callers append flag values to `kv` only when the flag was
// actually given.
KeyValueMap assemble_kv(const std::string& config_file,
                        const std::vector<std::string>& overrides) {
  KeyValueMap kv;
  if (!config_file.empty()) kv = parse_config_file(config_file);
  for (const std::string& o : overrides) apply_override(kv, o);
  return kv;
}

std::string kv_get(const KeyValueMap& kv, const std::string& key, const std::string& fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

int cmd_extract(const std::string& in, const std::string& out, const KeyValueMap& kv,
                const std::string& csv) {
  MfccConfig cfg;
  apply_mfcc_keys(kv, &cfg);

  const WavData wav = read_wav(in);
  if (wav.sample_rate != cfg.sample_rate)
    throw ConfigError("wav sample rate " + std::to_string(wav.sample_rate) +
                      " does not match config sample rate " + std::to_string(cfg.sample_rate) +
                      " (use --set mfcc.sample_rate=...)");
  const FeatureMatrix fm = extract(wav.samples, cfg);
  write_features(fm, out);
  std::printf("%s: %zu frames x %d dims -> %s\n", in.c_str(), fm.num_frames(), fm.dim,
              out.c_str());

  if (!csv.empty()) {
    std::ofstream cout_file(csv, std::ios::trunc);
    if (!cout_file) throw IoError("cannot write " + csv);
    char buf[32];
    for (std::size_t t = 0; t < fm.num_frames(); ++t) {
      const auto row = fm.frame(t);
      for (int d = 0; d < fm.dim; ++d) {
        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(row[d]));
        cout_file << (d ? "," : "") << buf;
      }
      cout_file << "\n";
    }
  }
  return 0;
}

int cmd_train_ubm(const std::string& dir, int mixtures, int iters, std::uint64_t seed,
                  const std::string& out, double var_floor_fraction) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mfc")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InsufficientData("no .mfc files in " + dir);

  FeatureSet pool;
  for (const auto& f : files) pool.append(read_features(f));
  std::printf("pooled %zu frames x %d dims from %zu files\n", pool.num_frames(), pool.dim,
              files.size());

  const GmmModel init = vq_init(pool, mixtures, seed, var_floor_fraction);
  std::vector<double> loglik;
  const GmmModel ubm = em_train(init, pool, iters, var_floor_fraction, &loglik);
  for (std::size_t i = 0; i < loglik.size(); ++i)
    std::printf("em iteration %zu: avg log-likelihood %.6f\n", i + 1, loglik[i]);
  write_model(ubm, out);
  std::printf("wrote %s (%d mixtures, dim %d)\n", out.c_str(), ubm.num_mixtures, ubm.dim);
  return 0;
}

int cmd_adapt(const std::string& ubm_path, const std::string& features_path, double relevance,
              const std::string& out) {
  const GmmModel ubm = read_model(ubm_path);
  const FeatureSet feats = FeatureSet::from(read_features(features_path));
  const AdaptationConfig cfg{relevance, true};
  const GmmModel target = map_adapt(ubm, feats, cfg);
  write_model(target, out);
  std::printf("adapted %zu frames -> %s\n", feats.num_frames(), out.c_str());
  return 0;
}

int cmd_score(const std::string& target_path, const std::string& ubm_path,
              const std::vector<std::string>& feature_files, int top_c) {
  const GmmModel target = read_model(target_path);
  const GmmModel ubm = read_model(ubm_path);
  const ScoringConfig cfg{top_c};
  for (const std::string& f : feature_files) {
    const double s = score_utterance(target, ubm, FeatureSet::from(read_features(f)), cfg);
    std::printf("%.12f\n", s);
  }
  return 0;
}

int cmd_eval(const std::string& trials_path, const std::string& scores_path, double c_miss,
             double c_fa, double p_target, const std::string& det_path) {
  const TrialSet trials = read_trials(trials_path);
  const ScoreSet scores = read_scores(scores_path);
  const DcfParams params{c_miss, c_fa, p_target};
  const DetCurve curve = det_curve(trials, scores);
  const double eer = eer_percent(curve);
  const double dcf = min_dcf(trials, scores, params);
  std::printf("EER(%%)      minDCF      minDCFx100\n");
  std::printf("%-10.4f  %-10.6f  %-10.4f\n", eer, dcf, 100.0 * dcf);
  if (!det_path.empty()) export_det(curve, det_path);
  return 0;
}

int cmd_synth(const std::string& out_dir, int speakers, int utts, double seconds, int rate,
              std::uint64_t seed) {
  SynthCorpusSpec spec;
  spec.num_speakers = speakers;
  spec.utterances_per_speaker = utts;
  spec.utterance_seconds = seconds;
  spec.sample_rate = rate;
  spec.seed = seed;
  const CorpusManifest manifest = synth_corpus(spec, out_dir);
  std::size_t n_utts = 0;
  for (const auto& s : manifest.speakers) n_utts += s.utterances.size();
  std::printf("wrote %zu utterances for %zu speakers under %s\n", n_utts,
              manifest.speakers.size(), out_dir.c_str());
  std::printf("manifest: %s\n", (std::filesystem::path(out_dir) / "manifest.json").c_str());
  return 0;
}

std::vector<int> parse_order_list(const std::string& orders) {
  std::vector<int> out;
  std::istringstream ss(orders);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad order list: '" + orders + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty order list");
  return out;
}

int to_int_kv(const std::string& key, const std::string& value) {
  try {
    return std::stoi(value);
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": '" + value + "'");
  }
}

double to_double_kv(const std::string& key, const std::string& value) {
  try {
    return std::stod(value);
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + value + "'");
  }
}

int cmd_experiment(const std::string& corpus, const std::string& work, const KeyValueMap& kv) {
  for (const auto& [key, value] : kv) {
    static const std::set<std::string> known{
        "experiment.orders",    "experiment.base",     "experiment.multitaper",
        "experiment.mixtures",  "experiment.iters",    "experiment.relevance",
        "experiment.topc",      "experiment.seed",     "experiment.ztnorm",
        "eval.cmiss",           "eval.cfa",            "eval.ptarget"};
    if (key.rfind("mfcc.", 0) == 0) continue;  // checked by apply_mfcc_keys
    if (!known.count(key)) throw ConfigError("unknown experiment key: " + key);
  }

  ExperimentConfig cfg;
  apply_mfcc_keys(kv, &cfg.mfcc);
  const CorpusManifest manifest = read_manifest(corpus);
  if (cfg.mfcc.sample_rate != manifest.sample_rate) {
    cfg.mfcc.sample_rate = manifest.sample_rate;
    cfg.mfcc.window.length = cfg.mfcc.frame_samples();
  }
  const std::string base = kv_get(kv, "experiment.base", "hamming");
  for (int order : parse_order_list(kv_get(kv, "experiment.orders", "0,1,2"))) {
    WindowSpec spec;
    spec.base = window_base_from_name(base);
    spec.order = order;
    spec.length = cfg.mfcc.frame_samples();
    cfg.windows.push_back(spec);
  }
  cfg.multitaper_tapers = to_int_kv("multitaper", kv_get(kv, "experiment.multitaper", "6"));
  cfg.mixtures = to_int_kv("mixtures", kv_get(kv, "experiment.mixtures", "64"));
  cfg.em_iterations = to_int_kv("iters", kv_get(kv, "experiment.iters", "10"));
  cfg.relevance_factor = to_double_kv("relevance", kv_get(kv, "experiment.relevance", "14"));
  cfg.top_c = to_int_kv("topc", kv_get(kv, "experiment.topc", "5"));
  try {
    cfg.seed = static_cast<std::uint64_t>(std::stoull(kv_get(kv, "experiment.seed", "1")));
  } catch (const std::exception&) {
    throw ConfigError("bad seed: '" + kv_get(kv, "experiment.seed", "1") + "'");
  }
  cfg.apply_zt_norm = parse_bool(kv_get(kv, "experiment.ztnorm", "false"));
  cfg.dcf = DcfParams{to_double_kv("cmiss", kv_get(kv, "eval.cmiss", "10")),
                      to_double_kv("cfa", kv_get(kv, "eval.cfa", "1")),
                      to_double_kv("ptarget", kv_get(kv, "eval.ptarget", "0.01"))};
  cfg.corpus_manifest = corpus;
  cfg.work_dir = work;

  const ExperimentReport report = run_experiment(cfg);
  std::fputs(report.table_text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derivative-window spectral analysis and speaker verification toolkit"};
  app.require_subcommand(1);

  // window-metrics
  std::string wm_base = "hamming";
  int wm_order = 0, wm_length = 160;
  std::size_t wm_fft = 0;
  std::string wm_samples_csv, wm_spectrum_csv;
  auto* wm = app.add_subcommand("window-metrics", "leakage, sidelobe and mainlobe metrics");
  wm->add_option("--base", wm_base, "hamming|hanning|rectangular");
  wm->add_option("--order", wm_order, "window order tau");
  wm->add_option("--length", wm_length, "window length N in samples");
  wm->add_option("--fft-size", wm_fft, "spectrum grid (default max(4096, 2^ceil(log2(8N))))");
  wm->add_option("--samples-csv", wm_samples_csv, "dump window samples as n,value");
  wm->add_option("--spectrum-csv", wm_spectrum_csv, "dump magnitude spectrum as normfreq,db");

  // verify-identity
  std::string vi_input;
  std::size_t vi_grid = 0;
  auto* vi = app.add_subcommand("verify-identity",
                                "check the derivative-spectrum identity on a frame");
  vi->add_option("--input", vi_input, "frame file, one sample per line")->required();
  vi->add_option("--grid", vi_grid, "dense DTFT grid size (default: auto)");

  // extract
  std::string ex_in, ex_out, ex_base = "hamming", ex_config, ex_csv;
  int ex_order = 0, ex_multitaper = 0;
  double ex_vad = -1.0;
  std::vector<std::string> ex_set;
  auto* ex = app.add_subcommand("extract", "MFCC features from a wav file");
  ex->add_option("--in", ex_in, "input wav (PCM 16-bit mono)")->required();
  ex->add_option("--out", ex_out, "output feature file")->required();
  ex->add_option("--order", ex_order, "window order tau");
  ex->add_option("--base", ex_base, "window base");
  ex->add_option("--multitaper", ex_multitaper, "use k sine tapers instead of a window");
  ex->add_option("--config", ex_config, "key=value config file");
  ex->add_option("--set", ex_set, "override, e.g. --set mfcc.sample_rate=16000");
  ex->add_option("--vad-percentile", ex_vad, "drop frames 30 dB under this energy percentile");
  ex->add_option("--csv", ex_csv, "also dump features as CSV");

  // train-ubm
  std::string tu_dir, tu_out;
  int tu_mix = 64, tu_iters = 10;
  std::uint64_t tu_seed = 1;
  double tu_floor = 1e-3;
  auto* tu = app.add_subcommand("train-ubm", "VQ-initialized EM training of a UBM");
  tu->add_option("--features", tu_dir, "directory of .mfc files")->required();
  tu->add_option("--mixtures", tu_mix, "number of mixtures (power of 2)");
  tu->add_option("--iters", tu_iters, "EM iterations");
  tu->add_option("--seed", tu_seed, "split/initialization seed");
  tu->add_option("--out", tu_out, "output model file")->required();
  tu->add_option("--var-floor-fraction", tu_floor, "variance floor as a fraction of global");

  // adapt
  std::string ad_ubm, ad_feats, ad_out;
  double ad_rel = 14.0;
  auto* ad = app.add_subcommand("adapt", "MAP mean-only adaptation of a target model");
  ad->add_option("--ubm", ad_ubm, "UBM model file")->required();
  ad->add_option("--features", ad_feats, "enrollment feature file")->required();
  ad->add_option("--relevance", ad_rel, "relevance factor");
  ad->add_option("--out", ad_out, "output model file")->required();

  // score
  std::string sc_target, sc_ubm;
  std::vector<std::string> sc_feats;
  int sc_topc = 5;
  auto* sc = app.add_subcommand("score", "average frame LLR of test utterances");
  sc->add_option("--target", sc_target, "target model file")->required();
  sc->add_option("--ubm", sc_ubm, "UBM model file")->required();
  sc->add_option("--features", sc_feats, "feature file(s), one score line each")->required();
  sc->add_option("--topc", sc_topc, "top Gaussians per frame");

  // eval
  std::string ev_trials, ev_scores, ev_det;
  double ev_cmiss = 10.0, ev_cfa = 1.0, ev_pt = 0.01;
  auto* ev = app.add_subcommand("eval", "EER / minDCF / DET from trials and scores");
  ev->add_option("--trials", ev_trials, "trial list tsv")->required();
  ev->add_option("--scores", ev_scores, "aligned score lines")->required();
  ev->add_option("--cmiss", ev_cmiss, "miss cost");
  ev->add_option("--cfa", ev_cfa, "false-alarm cost");
  ev->add_option("--ptarget", ev_pt, "target prior");
  ev->add_option("--det", ev_det, "write DET curve CSV here");

  // synth
  std::string sy_out;
  int sy_speakers = 10, sy_utts = 5, sy_rate = 8000;
  double sy_seconds = 4.0;
  std::uint64_t sy_seed = 1;
  auto* sy = app.add_subcommand("synth", "seeded synthetic verification corpus");
  sy->add_option("--out", sy_out, "output corpus directory")->required();
  sy->add_option("--speakers", sy_speakers, "number of speakers");
  sy->add_option("--utts", sy_utts, "utterances per speaker");
  sy->add_option("--seconds", sy_seconds, "utterance length in seconds");
  sy->add_option("--rate", sy_rate, "sample rate");
  sy->add_option("--seed", sy_seed, "corpus seed");

  // experiment
  std::string xp_corpus, xp_work, xp_orders = "0,1,2", xp_base = "hamming", xp_config;
  int xp_multitaper = 6, xp_mix = 64, xp_iters = 10, xp_topc = 5;
  double xp_rel = 14.0, xp_cmiss = 10.0, xp_cfa = 1.0, xp_pt = 0.01;
  std::uint64_t xp_seed = 1;
  bool xp_ztnorm = false;
  std::vector<std::string> xp_set;
  auto* xp = app.add_subcommand("experiment", "window comparison on a corpus");
  xp->add_option("--corpus", xp_corpus, "corpus manifest.json")->required();
  xp->add_option("--work", xp_work, "work directory (features/models/scores/reports)")
      ->required();
  xp->add_option("--orders", xp_orders, "comma list of window orders");
  xp->add_option("--base", xp_base, "window base for all orders");
  xp->add_option("--multitaper", xp_multitaper, "extra sine-multitaper row (0 disables)");
  xp->add_option("--mixtures", xp_mix, "UBM mixtures (power of 2)");
  xp->add_option("--iters", xp_iters, "EM iterations");
  xp->add_option("--relevance", xp_rel, "MAP relevance factor");
  xp->add_option("--topc", xp_topc, "top Gaussians per frame");
  xp->add_option("--seed", xp_seed, "training seed");
  xp->add_flag("--ztnorm", xp_ztnorm, "zt-normalize scores with background cohorts");
  xp->add_option("--cmiss", xp_cmiss, "miss cost");
  xp->add_option("--cfa", xp_cfa, "false-alarm cost");
  xp->add_option("--ptarget", xp_pt, "target prior");
  xp->add_option("--config", xp_config, "key=value config file");
  xp->add_option("--set", xp_set, "config override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (wm->parsed())
      return cmd_window_metrics(wm_base, wm_order, wm_length, wm_fft, wm_samples_csv,
                                wm_spectrum_csv);
    if (vi->parsed()) return cmd_verify_identity(vi_input, vi_grid);
    if (ex->parsed()) {
      KeyValueMap kv = assemble_kv(ex_config, ex_set);
      if (ex->count("--base")) apply_override(kv, "mfcc.window_base=" + ex_base);
      if (ex->count("--order")) apply_override(kv, "mfcc.window_order=" + std::to_string(ex_order));
      if (ex->count("--multitaper"))
        apply_override(kv, "mfcc.multitaper=" + std::to_string(ex_multitaper));
      if (ex->count("--vad-percentile"))
        apply_override(kv, "mfcc.vad_percentile=" + std::to_string(ex_vad));
      return cmd_extract(ex_in, ex_out, kv, ex_csv);
    }
    if (tu->parsed()) return cmd_train_ubm(tu_dir, tu_mix, tu_iters, tu_seed, tu_out, tu_floor);
    if (ad->parsed()) return cmd_adapt(ad_ubm, ad_feats, ad_rel, ad_out);
    if (sc->parsed()) return cmd_score(sc_target, sc_ubm, sc_feats, sc_topc);
    if (ev->parsed()) return cmd_eval(ev_trials, ev_scores, ev_cmiss, ev_cfa, ev_pt, ev_det);
    if (sy->parsed()) return cmd_synth(sy_out, sy_speakers, sy_utts, sy_seconds, sy_rate, sy_seed);
    if (xp->parsed()) {
      KeyValueMap kv = assemble_kv(xp_config, xp_set);
      if (xp->count("--orders")) apply_override(kv, "experiment.orders=" + xp_orders);
      if (xp->count("--base")) apply_override(kv, "experiment.base=" + xp_base);
      if (xp->count("--multitaper"))
        apply_override(kv, "experiment.multitaper=" + std::to_string(xp_multitaper));
      if (xp->count("--mixtures"))
        apply_override(kv, "experiment.mixtures=" + std::to_string(xp_mix));
      if (xp->count("--iters")) apply_override(kv, "experiment.iters=" + std::to_string(xp_iters));
      if (xp->count("--relevance"))
        apply_override(kv, "experiment.relevance=" + std::to_string(xp_rel));
      if (xp->count("--topc")) apply_override(kv, "experiment.topc=" + std::to_string(xp_topc));
      if (xp->count("--seed")) apply_override(kv, "experiment.seed=" + std::to_string(xp_seed));
      if (xp->count("--ztnorm")) apply_override(kv, "experiment.ztnorm=true");
      if (xp->count("--cmiss")) apply_override(kv, "eval.cmiss=" + std::to_string(xp_cmiss));
      if (xp->count("--cfa")) apply_override(kv, "eval.cfa=" + std::to_string(xp_cfa));
      if (xp->count("--ptarget")) apply_override(kv, "eval.ptarget=" + std::to_string(xp_pt));
      return cmd_experiment(xp_corpus, xp_work, kv);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
