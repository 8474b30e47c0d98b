// include/tauwin/gmm.h

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

#ifndef TAUWIN_GMM_H_
#define TAUWIN_GMM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tauwin/features.h"

namespace tauwin {

// Pooled frames for training/adaptation/scoring, row-major doubles.
struct FeatureSet {
  int dim = 0;
  std::vector<double> data;

  std::size_t num_frames() const { return dim > 0 ? data.size() / dim : 0; }
  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(data).subspan(t * dim, dim);
  }
  void append(const FeatureMatrix& fm);
  static FeatureSet from(const FeatureMatrix& fm);
};

// Diagonal-covariance Gaussian mixture.
struct GmmModel {
  int num_mixtures = 0;  // M
  int dim = 0;           // D
  std::vector<double> weights;    // M, sums to 1
  std::vector<double> variances;  // M x D, row-major, floored positive
  std::vector<double> means;      // M x D, row-major

  std::span<const double> mean(int m) const {
    return std::span<const double>(means).subspan(static_cast<std::size_t>(m) * dim, dim);
  }
  std::span<const double> variance(int m) const {
    return std::span<const double>(variances).subspan(static_cast<std::size_t>(m) * dim, dim);
  }
  void validate() const;  // throws DimensionMismatch / ConfigError
};

struct AdaptationConfig {
  double relevance_factor = 14.0;
  bool adapt_means_only = true;
};

struct ScoringConfig {
  int top_c = 5;
};

// Binary-split vector quantization: log2(M) splitting rounds (perturb by
// +-0.2 sigma per dimension) each followed by Lloyd iterations until the
// relative distortion change drops below 1e-4 or 20 iterations pass.
// Weights are cluster occupancies; variances are per-cluster diagonals,
// floored at var_floor_fraction of the global per-dimension variance.
GmmModel vq_init(const FeatureSet& features, int num_mixtures, std::uint64_t seed,
                 double var_floor_fraction = 1e-3);

// Standard EM for diagonal GMMs.  Variances are floored after each M-step
// at var_floor_fraction of the global per-dimension variance of the data.
// When avg_loglik is given it receives the per-iteration average frame
// log-likelihood under the model entering that iteration.
GmmModel em_train(const GmmModel& init, const FeatureSet& features, int iterations,
                  double var_floor_fraction = 1e-3,
                  std::vector<double>* avg_loglik = nullptr);

// Mean-only MAP adaptation: m_new = alpha E + (1 - alpha) m_ubm with
// alpha = n / (n + relevance_factor) from the posterior soft counts.
GmmModel map_adapt(const GmmModel& ubm, const FeatureSet& features,
                   const AdaptationConfig& cfg);

// Average per-frame log-likelihood ratio, restricting each frame to the
// top_c best-scoring UBM mixtures.
double score_utterance(const GmmModel& target, const GmmModel& ubm,
                       const FeatureSet& features, const ScoringConfig& cfg);

double avg_log_likelihood(const GmmModel& model, const FeatureSet& features);

// z-normalize the raw score with the z-cohort statistics, then t-normalize
// against the z-normalized t-cohort.
double zt_norm(double raw, std::span<const double> z_cohort_scores,
               std::span<const double> t_cohort_scores);

// Magic "GUM1", u32le M and D, then weights, means, variances as f64le.
void write_model(const GmmModel& m, const std::filesystem::path& path);
GmmModel read_model(const std::filesystem::path& path);

}  // namespace tauwin

#endif  // TAUWIN_GMM_H_
