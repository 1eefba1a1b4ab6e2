#pragma once

// Monte Carlo link and queue simulation of the limited-feedback ZFBF
// downlink. Used to check the analytic SINR cdf and the large-deviation
// violation estimate, and to measure the buffer-nonempty probability.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lfmimo/amc.hpp"
#include "lfmimo/traffic.hpp"

namespace lfmimo {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

/// Independent generator for substream `stream` of master seed `seed`.
Rng substream(std::uint64_t seed, std::uint64_t stream);

/// Codewords are the unit-norm columns of an N_t x 2^B matrix.
class Codebook {
public:
  explicit Codebook(CMatrix words);

  /// Random vector quantization: 2^b i.i.d. isotropic unit vectors.
  static Codebook random(int n_t, int b, Rng& rng);

  /// Whitespace-separated text: "n_t size" then size rows of n_t "re im" pairs.
  static Codebook load(const std::string& path);
  void save(const std::string& path) const;

  const CMatrix& words() const { return words_; }
  int dimension() const { return static_cast<int>(words_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(words_.cols()); }

private:
  CMatrix words_;
};

enum class CodebookMode {
  automatic,  // explicit when b <= explicit_max_bits, sampled above
  explicit_rvq,
  sampled_rvq,  // draws the winning RVQ codeword from its exact distribution
};

struct LinkConfig {
  int n_t = 4;
  int b = 8;
  double gamma = 10.0;  // linear transmit SNR; +inf for a noiseless link
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  CodebookMode codebook = CodebookMode::automatic;
  int explicit_max_bits = 12;
  std::optional<Codebook> fixed_codebook;  // shared by every user when set

  void validate() const;
  bool explicit_codebook() const;
};

/// N_t channel vectors (columns) with i.i.d. CN(0, 1) entries.
CMatrix draw_channels(int n_t, Rng& rng);

/// argmax_j |c_j^H h / ||h|| |^2, ties toward the smaller index.
/// Throws DegenerateError for a zero channel.
std::size_t quantize(const CVector& h, const Codebook& codebook);

/// Quantized direction of `h` under a fresh 2^b-word RVQ codebook, sampled
/// directly: the winner's squared sine to the channel direction is the
/// minimum of 2^b Beta(N_t-1, 1) variables and its residual direction is
/// isotropic in the orthogonal complement.
CVector sample_rvq_codeword(const CVector& h, int b, Rng& rng);

/// Zero-forcing beams for quantized channels given as columns. Column k is
/// unit-norm and orthogonal to every other quantized channel. When the null
/// space has more than one dimension the beam maximizing |q_k^H w_k| is used.
/// Throws DegenerateError when no beam can reach its own user.
CMatrix zfbf_beams(const CMatrix& quantized);

/// |h_k^H w_k|^2 / (1/gamma + sum_{u != k} |h_k^H w_u|^2).
double user_sinr(const CMatrix& channels, const CMatrix& beams, int k, double gamma);

/// One SINR draw for user 0: channels, per-user quantization, ZFBF.
/// Degenerate realizations are redrawn from `rng` and counted in `redraws`.
double draw_sinr(const LinkConfig& cfg, Rng& rng, std::uint64_t& redraws);

struct SinrSample {
  std::vector<double> values;
  std::uint64_t redraws = 0;
};

/// cfg.trials independent SINR draws; trial i uses substream i of cfg.seed.
SinrSample empirical_sinr(const LinkConfig& cfg);

/// Kolmogorov-Smirnov distance between the sample and `cdf`.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

enum class RhoHatEstimator {
  slot_nonempty,         // fraction of slots whose buffer is nonempty at slot start
  arrival_sees_backlog,  // fraction of arrivals that find packets already queued
};

struct QueueSimConfig {
  double slot = 1e-3;  // T_b, seconds
  std::uint64_t horizon = 1'000'000;
  TrafficSpec traffic;
  LinkConfig link;
  ModulationTable table = default_table();
  RhoHatEstimator estimator = RhoHatEstimator::slot_nonempty;
  std::optional<std::size_t> forced_mode;  // bypasses the link draw

  void validate() const;
};

struct QueueStats {
  double dropped_fraction = 0.0;
  double rho_hat_est = 0.0;
  std::vector<double> mode_histogram;
  std::uint64_t arrivals = 0;
  std::uint64_t served = 0;
  std::uint64_t dropped = 0;
  std::uint64_t queued_at_end = 0;
  std::uint64_t redraws = 0;
};

/// Slot-based FIFO queue with Poisson arrivals, per-slot AMC service and
/// deadline dropping. Deterministic given cfg.link.seed.
QueueStats simulate_queue(const QueueSimConfig& cfg);

}  // namespace lfmimo
