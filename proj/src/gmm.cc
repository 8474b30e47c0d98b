// src/gmm.cc

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

#include "tauwin/gmm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "tauwin/errors.h"
#include "tauwin/fft.h"
#include "tauwin/util.h"

namespace tauwin {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kWeightFloor = 1e-10;
// Frames per reduction chunk.  Partial sums are combined in chunk order,
// so results do not depend on the worker count.
constexpr std::size_t kChunkFrames = 4096;

// Per-mixture constants for log densities: log w + gconst and 1/var.
struct Evaluator {
  int num_mixtures;
  int dim;
  std::vector<double> log_weight_gconst;  // M
  std::vector<double> inv_var;            // M x D
  const GmmModel* model;

  explicit Evaluator(const GmmModel& m)
      : num_mixtures(m.num_mixtures), dim(m.dim), model(&m) {
    log_weight_gconst.resize(num_mixtures);
    inv_var.resize(static_cast<std::size_t>(num_mixtures) * dim);
    for (int j = 0; j < num_mixtures; ++j) {
      double logdet = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double v = m.variances[static_cast<std::size_t>(j) * dim + d];
        logdet += std::log(v);
        inv_var[static_cast<std::size_t>(j) * dim + d] = 1.0 / v;
      }
      log_weight_gconst[j] =
          std::log(std::max(m.weights[j], kWeightFloor)) - 0.5 * (dim * kLog2Pi + logdet);
    }
  }

  // log(w_j N_j(x)) for every mixture.
  void log_joint(std::span<const double> x, std::span<double> out) const {
    for (int j = 0; j < num_mixtures; ++j) {
      const double* mu = model->means.data() + static_cast<std::size_t>(j) * dim;
      const double* iv = inv_var.data() + static_cast<std::size_t>(j) * dim;
      double q = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double diff = x[d] - mu[d];
        q += diff * diff * iv[d];
      }
      out[j] = log_weight_gconst[j] - 0.5 * q;
    }
  }
};

struct SuffStats {
  std::vector<double> counts;  // M
  std::vector<double> sum;     // M x D
  std::vector<double> sumsq;   // M x D
  double total_loglik = 0.0;

  explicit SuffStats(int m, int d)
      : counts(m, 0.0),
        sum(static_cast<std::size_t>(m) * d, 0.0),
        sumsq(static_cast<std::size_t>(m) * d, 0.0) {}

  void add(const SuffStats& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += o.sum[i];
    for (std::size_t i = 0; i < sumsq.size(); ++i) sumsq[i] += o.sumsq[i];
    total_loglik += o.total_loglik;
  }
};

// Posterior-weighted sufficient statistics, chunk-deterministic.
SuffStats accumulate_stats(const GmmModel& model, const FeatureSet& feats, bool want_sumsq) {
  const Evaluator eval(model);
  const std::size_t n = feats.num_frames();
  const std::size_t chunks = (n + kChunkFrames - 1) / kChunkFrames;
  std::vector<SuffStats> partial(chunks, SuffStats(model.num_mixtures, model.dim));

  parallel_for(chunks, [&](std::size_t c) {
    SuffStats& s = partial[c];
    std::vector<double> lj(model.num_mixtures);
    std::vector<double> post(model.num_mixtures);
    const std::size_t begin = c * kChunkFrames;
    const std::size_t end = std::min(n, begin + kChunkFrames);
    for (std::size_t t = begin; t < end; ++t) {
      const auto x = feats.frame(t);
      eval.log_joint(x, lj);
      const double denom = logsumexp(lj);
      s.total_loglik += denom;
      for (int j = 0; j < model.num_mixtures; ++j) post[j] = std::exp(lj[j] - denom);
      for (int j = 0; j < model.num_mixtures; ++j) {
        const double g = post[j];
        if (g <= 0.0) continue;
        s.counts[j] += g;
        double* sj = s.sum.data() + static_cast<std::size_t>(j) * model.dim;
        for (int d = 0; d < model.dim; ++d) sj[d] += g * x[d];
        if (want_sumsq) {
          double* qj = s.sumsq.data() + static_cast<std::size_t>(j) * model.dim;
          for (int d = 0; d < model.dim; ++d) qj[d] += g * x[d] * x[d];
        }
      }
    }
  });

  SuffStats total(model.num_mixtures, model.dim);
  for (const SuffStats& s : partial) total.add(s);
  return total;
}

std::vector<double> global_variance_floor(const FeatureSet& feats, double fraction) {
  const std::size_t n = feats.num_frames();
  const int dim = feats.dim;
  std::vector<double> mean_d(dim, 0.0), var_d(dim, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (int d = 0; d < dim; ++d) mean_d[d] += feats.frame(t)[d];
  for (int d = 0; d < dim; ++d) mean_d[d] /= static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t)
    for (int d = 0; d < dim; ++d) {
      const double diff = feats.frame(t)[d] - mean_d[d];
      var_d[d] += diff * diff;
    }
  double max_var = 0.0;
  for (int d = 0; d < dim; ++d) {
    var_d[d] /= static_cast<double>(n);
    max_var = std::max(max_var, var_d[d]);
  }
  const double fallback = max_var > 0.0 ? 1e-10 * max_var : 1e-10;
  std::vector<double> floor(dim);
  for (int d = 0; d < dim; ++d)
    floor[d] = var_d[d] > 0.0 ? fraction * var_d[d] : fallback;
  return floor;
}

void check_features(const FeatureSet& feats) {
  if (feats.dim <= 0 || feats.data.empty()) throw EmptyData("no feature frames");
  if (feats.data.size() % feats.dim != 0)
    throw DimensionMismatch("feature data size is not a multiple of dim");
}

void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64le(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

double get_f64le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void FeatureSet::append(const FeatureMatrix& fm) {
  if (dim == 0) dim = fm.dim;
  if (dim != fm.dim) throw DimensionMismatch("feature dimension mismatch while pooling");
  data.reserve(data.size() + fm.data.size());
  for (float v : fm.data) data.push_back(static_cast<double>(v));
}

FeatureSet FeatureSet::from(const FeatureMatrix& fm) {
  FeatureSet fs;
  fs.append(fm);
  return fs;
}

void GmmModel::validate() const {
  if (num_mixtures <= 0 || dim <= 0) throw ConfigError("empty model");
  if (weights.size() != static_cast<std::size_t>(num_mixtures) ||
      means.size() != static_cast<std::size_t>(num_mixtures) * dim ||
      variances.size() != means.size())
    throw DimensionMismatch("model array sizes do not match M, D");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("negative mixture weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-10) throw ConfigError("mixture weights must sum to 1");
  for (double v : variances)
    if (!(v > 0.0)) throw ConfigError("variances must be positive");
}

GmmModel vq_init(const FeatureSet& features, int num_mixtures, std::uint64_t seed,
                 double var_floor_fraction) {
  check_features(features);
  if (num_mixtures < 1 || !is_power_of_two(static_cast<std::size_t>(num_mixtures)))
    throw NotPowerOfTwo("vq_init: number of mixtures must be a power of 2");
  const std::size_t n = features.num_frames();
  if (n < static_cast<std::size_t>(num_mixtures))
    throw InsufficientData("vq_init: fewer frames than mixtures");
  const int dim = features.dim;
  const std::vector<double> floor = global_variance_floor(features, var_floor_fraction);

  // Start from the global centroid and its variance.
  std::vector<std::vector<double>> centroids(1, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> cluster_var(1, std::vector<double>(dim, 0.0));
  for (std::size_t t = 0; t < n; ++t)
    for (int d = 0; d < dim; ++d) centroids[0][d] += features.frame(t)[d];
  for (int d = 0; d < dim; ++d) centroids[0][d] /= static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t)
    for (int d = 0; d < dim; ++d) {
      const double diff = features.frame(t)[d] - centroids[0][d];
      cluster_var[0][d] += diff * diff;
    }
  for (int d = 0; d < dim; ++d)
    cluster_var[0][d] = std::max(cluster_var[0][d] / static_cast<double>(n), floor[d]);

  Rng rng = Rng::substream(seed, 0x5651, 0);
  std::vector<int> assign(n, 0);
  std::vector<double> frame_dist(n, 0.0);

  while (centroids.size() < static_cast<std::size_t>(num_mixtures)) {
    // Split every centroid by +-0.2 sigma with a small seeded jitter.
    const std::size_t old = centroids.size();
    centroids.resize(2 * old, std::vector<double>(dim));
    for (std::size_t c = 0; c < old; ++c) {
      std::vector<double> delta(dim);
      for (int d = 0; d < dim; ++d)
        delta[d] = 0.2 * std::sqrt(cluster_var[c][d]) * (1.0 + 0.01 * rng.uniform(-1.0, 1.0));
      centroids[old + c] = centroids[c];
      for (int d = 0; d < dim; ++d) {
        centroids[c][d] += delta[d];
        centroids[old + c][d] -= delta[d];
      }
    }
    const std::size_t k = centroids.size();

    double prev_distortion = -1.0;
    for (int iter = 0; iter < 20; ++iter) {
      const std::size_t chunks = (n + kChunkFrames - 1) / kChunkFrames;
      std::vector<double> chunk_dist(chunks, 0.0);
      parallel_for(chunks, [&](std::size_t c) {
        const std::size_t begin = c * kChunkFrames;
        const std::size_t end = std::min(n, begin + kChunkFrames);
        double local = 0.0;
        for (std::size_t t = begin; t < end; ++t) {
          const auto x = features.frame(t);
          double best = -1.0;
          int best_c = 0;
          for (std::size_t j = 0; j < k; ++j) {
            double dist = 0.0;
            for (int d = 0; d < dim; ++d) {
              const double diff = x[d] - centroids[j][d];
              dist += diff * diff;
            }
            if (best < 0.0 || dist < best) {
              best = dist;
              best_c = static_cast<int>(j);
            }
          }
          assign[t] = best_c;
          frame_dist[t] = best;
          local += best;
        }
        chunk_dist[c] = local;
      });
      double distortion = 0.0;
      for (double dsum : chunk_dist) distortion += dsum;
      distortion /= static_cast<double>(n);

      std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
      std::vector<std::size_t> occupancy(k, 0);
      for (std::size_t t = 0; t < n; ++t) {
        ++occupancy[assign[t]];
        for (int d = 0; d < dim; ++d) sums[assign[t]][d] += features.frame(t)[d];
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (occupancy[j] == 0) {
          // Re-seed an empty cell at the frame with the worst distortion.
          std::size_t worst = 0;
          for (std::size_t t = 1; t < n; ++t)
            if (frame_dist[t] > frame_dist[worst]) worst = t;
          const auto x = features.frame(worst);
          centroids[j].assign(x.begin(), x.end());
          frame_dist[worst] = 0.0;
          continue;
        }
        for (int d = 0; d < dim; ++d)
          centroids[j][d] = sums[j][d] / static_cast<double>(occupancy[j]);
      }
      if (prev_distortion >= 0.0 && distortion > 0.0 &&
          std::abs(prev_distortion - distortion) / distortion < 1e-4)
        break;
      if (distortion == 0.0) break;
      prev_distortion = distortion;
    }

    // Cluster variances feed the next split round.
    cluster_var.assign(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> occupancy(k, 0);
    for (std::size_t t = 0; t < n; ++t) {
      const auto x = features.frame(t);
      ++occupancy[assign[t]];
      for (int d = 0; d < dim; ++d) {
        const double diff = x[d] - centroids[assign[t]][d];
        cluster_var[assign[t]][d] += diff * diff;
      }
    }
    for (std::size_t j = 0; j < k; ++j)
      for (int d = 0; d < dim; ++d)
        cluster_var[j][d] = std::max(
            occupancy[j] > 0 ? cluster_var[j][d] / static_cast<double>(occupancy[j]) : 0.0,
            floor[d]);
  }

  const std::size_t k = centroids.size();
  std::vector<std::size_t> occupancy(k, 0);
  for (std::size_t t = 0; t < n; ++t) ++occupancy[assign[t]];

  GmmModel model;
  model.num_mixtures = num_mixtures;
  model.dim = dim;
  model.weights.resize(k);
  model.means.resize(k * dim);
  model.variances.resize(k * dim);
  double wsum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    model.weights[j] = std::max(static_cast<double>(occupancy[j]) / static_cast<double>(n),
                                kWeightFloor);
    wsum += model.weights[j];
    for (int d = 0; d < dim; ++d) {
      model.means[j * dim + d] = centroids[j][d];
      model.variances[j * dim + d] = cluster_var[j][d];
    }
  }
  for (double& w : model.weights) w /= wsum;
  return model;
}

GmmModel em_train(const GmmModel& init, const FeatureSet& features, int iterations,
                  double var_floor_fraction, std::vector<double>* avg_loglik) {
  check_features(features);
  init.validate();
  if (init.dim != features.dim)
    throw DimensionMismatch("em_train: model and feature dims differ");
  if (avg_loglik) avg_loglik->clear();

  const std::vector<double> floor = global_variance_floor(features, var_floor_fraction);
  const double n = static_cast<double>(features.num_frames());
  GmmModel model = init;

  for (int iter = 0; iter < iterations; ++iter) {
    const SuffStats stats = accumulate_stats(model, features, /*want_sumsq=*/true);
    if (avg_loglik) avg_loglik->push_back(stats.total_loglik / n);

    double wsum = 0.0;
    for (int j = 0; j < model.num_mixtures; ++j) {
      const double nj = stats.counts[j];
      if (nj > 1e-10) {
        for (int d = 0; d < model.dim; ++d) {
          const std::size_t i = static_cast<std::size_t>(j) * model.dim + d;
          const double mu = stats.sum[i] / nj;
          model.means[i] = mu;
          model.variances[i] = std::max(stats.sumsq[i] / nj - mu * mu, floor[d]);
        }
      }
      model.weights[j] = std::max(nj / n, kWeightFloor);
      wsum += model.weights[j];
    }
    for (double& w : model.weights) w /= wsum;
  }
  return model;
}

GmmModel map_adapt(const GmmModel& ubm, const FeatureSet& features,
                   const AdaptationConfig& cfg) {
  ubm.validate();
  if (cfg.relevance_factor <= 0.0) throw ConfigError("relevance factor must be positive");
  GmmModel adapted = ubm;
  if (features.data.empty()) return adapted;  // no data: alpha = 0 everywhere
  check_features(features);
  if (features.dim != ubm.dim)
    throw DimensionMismatch("map_adapt: model and feature dims differ");

  const SuffStats stats = accumulate_stats(ubm, features, /*want_sumsq=*/!cfg.adapt_means_only);
  const double total = static_cast<double>(features.num_frames());
  double wsum = 0.0;
  for (int j = 0; j < ubm.num_mixtures; ++j) {
    const double nj = stats.counts[j];
    const double alpha = nj / (nj + cfg.relevance_factor);
    if (nj > 0.0) {
      for (int d = 0; d < ubm.dim; ++d) {
        const std::size_t i = static_cast<std::size_t>(j) * ubm.dim + d;
        const double posterior_mean = stats.sum[i] / nj;
        adapted.means[i] = alpha * posterior_mean + (1.0 - alpha) * ubm.means[i];
      }
    }
    if (!cfg.adapt_means_only) {
      if (nj > 0.0) {
        for (int d = 0; d < ubm.dim; ++d) {
          const std::size_t i = static_cast<std::size_t>(j) * ubm.dim + d;
          const double second = stats.sumsq[i] / nj;
          const double blended = alpha * second +
                                 (1.0 - alpha) * (ubm.variances[i] + ubm.means[i] * ubm.means[i]);
          adapted.variances[i] =
              std::max(blended - adapted.means[i] * adapted.means[i], 1e-3 * ubm.variances[i]);
        }
      }
      adapted.weights[j] =
          std::max(alpha * nj / total + (1.0 - alpha) * ubm.weights[j], kWeightFloor);
      wsum += adapted.weights[j];
    }
  }
  if (!cfg.adapt_means_only)
    for (double& w : adapted.weights) w /= wsum;
  return adapted;
}

double avg_log_likelihood(const GmmModel& model, const FeatureSet& features) {
  check_features(features);
  model.validate();
  if (model.dim != features.dim)
    throw DimensionMismatch("avg_log_likelihood: dims differ");
  const SuffStats stats = accumulate_stats(model, features, /*want_sumsq=*/false);
  return stats.total_loglik / static_cast<double>(features.num_frames());
}

double score_utterance(const GmmModel& target, const GmmModel& ubm,
                       const FeatureSet& features, const ScoringConfig& cfg) {
  ubm.validate();
  target.validate();
  if (target.num_mixtures != ubm.num_mixtures || target.dim != ubm.dim)
    throw DimensionMismatch("score_utterance: target and UBM shapes differ");
  if (features.data.empty() || features.dim == 0)
    throw EmptyFeatures("score_utterance: no frames");
  check_features(features);
  if (features.dim != ubm.dim)
    throw DimensionMismatch("score_utterance: feature dim differs from models");
  if (cfg.top_c < 1 || cfg.top_c > ubm.num_mixtures)
    throw ConfigError("top_c must be in [1, M]");

  const Evaluator ubm_eval(ubm);
  const Evaluator tgt_eval(target);
  const int m = ubm.num_mixtures;
  const int c = cfg.top_c;

  std::vector<double> ubm_lj(m), tgt_lj(m);
  std::vector<int> idx(m);
  std::vector<double> ubm_sel(c), tgt_sel(c);
  double total = 0.0;
  const std::size_t n = features.num_frames();
  for (std::size_t t = 0; t < n; ++t) {
    const auto x = features.frame(t);
    ubm_eval.log_joint(x, ubm_lj);
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + c, idx.end(),
                      [&](int a, int b) { return ubm_lj[a] > ubm_lj[b]; });
    tgt_eval.log_joint(x, tgt_lj);
    for (int i = 0; i < c; ++i) {
      ubm_sel[i] = ubm_lj[idx[i]];
      tgt_sel[i] = tgt_lj[idx[i]];
    }
    total += logsumexp(tgt_sel) - logsumexp(ubm_sel);
  }
  return total / static_cast<double>(n);
}

double zt_norm(double raw, std::span<const double> z_cohort_scores,
               std::span<const double> t_cohort_scores) {
  if (z_cohort_scores.size() < 2 || t_cohort_scores.size() < 2)
    throw DegenerateCohort("zt_norm: cohorts need at least 2 scores");
  const double z_mean = mean(z_cohort_scores);
  const double z_std = stddev(z_cohort_scores);
  if (z_std <= 0.0) throw DegenerateCohort("zt_norm: z cohort has zero variance");
  const double z_score = (raw - z_mean) / z_std;

  std::vector<double> t_normed(t_cohort_scores.size());
  for (std::size_t i = 0; i < t_cohort_scores.size(); ++i)
    t_normed[i] = (t_cohort_scores[i] - z_mean) / z_std;
  const double t_mean = mean(t_normed);
  const double t_std = stddev(t_normed);
  if (t_std <= 0.0) throw DegenerateCohort("zt_norm: t cohort has zero variance");
  return (z_score - t_mean) / t_std;
}

void write_model(const GmmModel& m, const std::filesystem::path& path) {
  m.validate();
  std::string out;
  out.reserve(12 + 8 * (m.weights.size() + m.means.size() + m.variances.size()));
  out.append("GUM1");
  put_u32le(out, static_cast<std::uint32_t>(m.num_mixtures));
  put_u32le(out, static_cast<std::uint32_t>(m.dim));
  for (double w : m.weights) put_f64le(out, w);
  for (double v : m.means) put_f64le(out, v);
  for (double v : m.variances) put_f64le(out, v);
  std::ofstream fout(path, std::ios::binary | std::ios::trunc);
  if (!fout) throw IoError("cannot write " + path.string());
  fout.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!fout) throw IoError("write failed: " + path.string());
}

GmmModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "GUM1", 4) != 0)
    throw FormatError("bad model file magic: " + path.string());
  GmmModel m;
  m.num_mixtures = static_cast<int>(get_u32le(bytes.data() + 4));
  m.dim = static_cast<int>(get_u32le(bytes.data() + 8));
  if (m.num_mixtures <= 0 || m.dim <= 0)
    throw FormatError("bad model shape: " + path.string());
  const std::size_t md = static_cast<std::size_t>(m.num_mixtures) * m.dim;
  const std::size_t expect = 12 + 8 * (static_cast<std::size_t>(m.num_mixtures) + 2 * md);
  if (bytes.size() != expect) throw FormatError("model file size mismatch: " + path.string());
  m.weights.resize(m.num_mixtures);
  m.means.resize(md);
  m.variances.resize(md);
  std::size_t pos = 12;
  for (double& v : m.weights) { v = get_f64le(bytes.data() + pos); pos += 8; }
  for (double& v : m.means) { v = get_f64le(bytes.data() + pos); pos += 8; }
  for (double& v : m.variances) { v = get_f64le(bytes.data() + pos); pos += 8; }
  m.validate();
  return m;
}

}  // namespace tauwin
