#include "lfmimo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>

#include "lfmimo/error.hpp"

namespace lfmimo {
namespace {

constexpr double kUnitNormTol = 1e-9;
constexpr double kRankTol = 1e-10;
constexpr double kMinBeamGain = 1e-12;

std::complex<double> complex_normal(std::normal_distribution<double>& nd, Rng& rng) {
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

// Entries CN(0, 1): real and imaginary parts each N(0, 1/2).
std::normal_distribution<double> unit_complex_gaussian() {
  return std::normal_distribution<double>(0.0, std::sqrt(0.5));
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Codebook::Codebook(CMatrix words) : words_(std::move(words)) {
  if (words_.rows() < 1 || words_.cols() < 1) throw ValidationError("codebook", "empty codebook");
  for (Eigen::Index j = 0; j < words_.cols(); ++j) {
    if (std::abs(words_.col(j).norm() - 1.0) > kUnitNormTol) {
      throw ValidationError("codebook", "codeword " + std::to_string(j) + " is not unit-norm");
    }
  }
}

Codebook Codebook::random(int n_t, int b, Rng& rng) {
  auto nd = unit_complex_gaussian();
  const Eigen::Index size = Eigen::Index{1} << b;
  CMatrix words(n_t, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    for (int i = 0; i < n_t; ++i) words(i, j) = complex_normal(nd, rng);
    words.col(j).normalize();
  }
  return Codebook(std::move(words));
}

Codebook Codebook::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("codebook", "cannot open '" + path + "'");
  long n_t = 0;
  long size = 0;
  if (!(in >> n_t >> size) || n_t < 1 || size < 1) {
    throw ValidationError("codebook", "bad header in '" + path + "'");
  }
  CMatrix words(n_t, size);
  for (long j = 0; j < size; ++j) {
    for (long i = 0; i < n_t; ++i) {
      double re = 0.0;
      double im = 0.0;
      if (!(in >> re >> im)) throw ValidationError("codebook", "truncated file '" + path + "'");
      words(i, j) = {re, im};
    }
  }
  return Codebook(std::move(words));
}

void Codebook::save(const std::string& path) const {
  std::ofstream out(path);
  out.precision(17);
  out << words_.rows() << ' ' << words_.cols() << '\n';
  for (Eigen::Index j = 0; j < words_.cols(); ++j) {
    for (Eigen::Index i = 0; i < words_.rows(); ++i) {
      out << words_(i, j).real() << ' ' << words_(i, j).imag() << (i + 1 < words_.rows() ? ' ' : '\n');
    }
  }
}

void LinkConfig::validate() const {
  if (n_t < 2) throw ValidationError("link.n_t", "must be >= 2");
  if (b < 0 || b > 62) throw ValidationError("link.b", "must lie in [0, 62]");
  if (!(gamma > 0.0)) throw ValidationError("link.gamma", "must be > 0");
  if (trials < 1) throw ValidationError("link.trials", "must be >= 1");
  if (explicit_max_bits < 0 || explicit_max_bits > 24) {
    throw ValidationError("link.explicit_max_bits", "must lie in [0, 24]");
  }
  if (codebook == CodebookMode::explicit_rvq && b > 24) {
    throw ValidationError("link.b", "explicit codebooks are limited to 24 bits");
  }
  if (fixed_codebook && fixed_codebook->dimension() != n_t) {
    throw ValidationError("link.codebook_file", "codeword length differs from n_t");
  }
}

bool LinkConfig::explicit_codebook() const {
  switch (codebook) {
    case CodebookMode::explicit_rvq: return true;
    case CodebookMode::sampled_rvq: return false;
    case CodebookMode::automatic: return b <= explicit_max_bits;
  }
  return true;
}

CMatrix draw_channels(int n_t, Rng& rng) {
  auto nd = unit_complex_gaussian();
  CMatrix h(n_t, n_t);
  for (int k = 0; k < n_t; ++k) {
    for (int i = 0; i < n_t; ++i) h(i, k) = complex_normal(nd, rng);
  }
  return h;
}

std::size_t quantize(const CVector& h, const Codebook& codebook) {
  const double norm = h.norm();
  if (!(norm > 0.0)) throw DegenerateError("quantize: zero channel vector");
  const Eigen::VectorXd gain = (codebook.words().adjoint() * (h / norm)).cwiseAbs2();
  std::size_t best = 0;
  for (Eigen::Index j = 1; j < gain.size(); ++j) {
    if (gain(j) > gain(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(j);
  }
  return best;
}

CVector sample_rvq_codeword(const CVector& h, int b, Rng& rng) {
  const double norm = h.norm();
  if (!(norm > 0.0)) throw DegenerateError("sample_rvq_codeword: zero channel vector");
  const CVector dir = h / norm;
  const auto m = static_cast<double>(h.size());

  // P(sin^2 <= z) for one isotropic codeword is z^{M-1}; invert the cdf of
  // the minimum over 2^b codewords.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const double codebook_size = std::ldexp(1.0, b);
  const double tail = -std::expm1(std::log1p(-u) / codebook_size);
  const double sin2 = std::pow(tail, 1.0 / (m - 1.0));

  auto nd = unit_complex_gaussian();
  CVector e(h.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = complex_normal(nd, rng);
  e -= dir * dir.dot(e);
  const double e_norm = e.norm();
  if (!(e_norm > 0.0)) throw DegenerateError("sample_rvq_codeword: degenerate residual direction");
  e /= e_norm;
  return std::sqrt(1.0 - sin2) * dir + std::sqrt(sin2) * e;
}

CMatrix zfbf_beams(const CMatrix& quantized) {
  const Eigen::Index n = quantized.rows();
  const Eigen::Index users = quantized.cols();
  if (users < 2 || users > n) throw DegenerateError("zfbf_beams: need 2..N_t quantized channels");
  CMatrix beams(n, users);
  CMatrix others(users - 1, n);
  for (Eigen::Index k = 0; k < users; ++k) {
    for (Eigen::Index u = 0, r = 0; u < users; ++u) {
      if (u != k) others.row(r++) = quantized.col(u).adjoint();
    }
    Eigen::JacobiSVD<CMatrix> svd(others, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankTol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    const CMatrix null_basis = svd.matrixV().rightCols(n - rank);

    CVector w;
    if (null_basis.cols() == 1) {
      w = null_basis.col(0);
    } else {
      // Degenerate codewords: steer the free null-space dimensions at user k.
      w = null_basis * (null_basis.adjoint() * quantized.col(k));
    }
    const double gain = std::abs(quantized.col(k).dot(w)) / std::max(w.norm(), kMinBeamGain);
    if (gain < kMinBeamGain) {
      throw DegenerateError("zfbf_beams: quantized channels admit no zero-forcing beam");
    }
    beams.col(k) = w.normalized();
  }
  return beams;
}

double user_sinr(const CMatrix& channels, const CMatrix& beams, int k, double gamma) {
  const CVector h = channels.col(k);
  double desired = 0.0;
  double interference = 0.0;
  for (Eigen::Index u = 0; u < beams.cols(); ++u) {
    const double g = std::norm(h.dot(beams.col(u)));
    if (u == k) {
      desired = g;
    } else {
      interference += g;
    }
  }
  const double noise = std::isinf(gamma) ? 0.0 : 1.0 / gamma;
  return desired / (noise + interference);
}

double draw_sinr(const LinkConfig& cfg, Rng& rng, std::uint64_t& redraws) {
  const bool explicit_cb = cfg.explicit_codebook();
  CMatrix quantized(cfg.n_t, cfg.n_t);
  for (;;) {
    const CMatrix h = draw_channels(cfg.n_t, rng);
    try {
      for (int k = 0; k < cfg.n_t; ++k) {
        const CVector hk = h.col(k);
        if (cfg.fixed_codebook) {
          quantized.col(k) = cfg.fixed_codebook->words().col(
              static_cast<Eigen::Index>(quantize(hk, *cfg.fixed_codebook)));
        } else if (explicit_cb) {
          const auto cb = Codebook::random(cfg.n_t, cfg.b, rng);
          quantized.col(k) = cb.words().col(static_cast<Eigen::Index>(quantize(hk, cb)));
        } else {
          quantized.col(k) = sample_rvq_codeword(hk, cfg.b, rng);
        }
      }
      const CMatrix beams = zfbf_beams(quantized);
      return user_sinr(h, beams, 0, cfg.gamma);
    } catch (const DegenerateError&) {
      ++redraws;
    }
  }
}

SinrSample empirical_sinr(const LinkConfig& cfg) {
  cfg.validate();
  SinrSample out;
  out.values.resize(cfg.trials);
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    Rng rng = substream(cfg.seed, i);
    out.values[i] = draw_sinr(cfg, rng, out.redraws);
  }
  return out;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

void QueueSimConfig::validate() const {
  if (!(slot > 0.0)) throw ValidationError("queue.slot", "must be > 0");
  if (horizon < 1) throw ValidationError("queue.horizon", "must be >= 1");
  if (!(traffic.lambda >= 0.0) || !std::isfinite(traffic.lambda)) {
    throw ValidationError("traffic.lambda", "must be finite and >= 0");
  }
  if (traffic.packet_bits <= 0) throw ValidationError("traffic.packet_bits", "must be positive");
  if (!(traffic.d_max > 0.0)) throw ValidationError("traffic.d_max", "must be > 0");
  if (table.level_count() < 2) throw ValidationError("modulation", "table not built");
  if (forced_mode && *forced_mode >= table.level_count()) {
    throw ValidationError("queue.forced_mode", "mode index out of range");
  }
  if (!forced_mode) link.validate();
}

QueueStats simulate_queue(const QueueSimConfig& cfg) {
  cfg.validate();
  const std::size_t levels = cfg.table.level_count();
  std::vector<std::uint64_t> capacity(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    const double packets =
        serve_rate(cfg.table, n) * cfg.slot / static_cast<double>(cfg.traffic.packet_bits);
    capacity[n] = static_cast<std::uint64_t>(std::floor(packets * (1.0 + 1e-12)));
  }

  Rng rng = substream(cfg.link.seed, std::numeric_limits<std::uint64_t>::max());
  const double mean_arrivals = cfg.traffic.lambda * cfg.slot;
  std::poisson_distribution<std::uint64_t> poisson(mean_arrivals > 0.0 ? mean_arrivals : 1.0);

  struct Batch {
    std::uint64_t slot;
    std::uint64_t count;
  };
  std::deque<Batch> queue;
  std::uint64_t queued = 0;
  std::uint64_t nonempty_slots = 0;
  std::uint64_t arrivals_seeing_backlog = 0;
  std::vector<std::uint64_t> mode_count(levels, 0);
  QueueStats stats;

  for (std::uint64_t t = 0; t < cfg.horizon; ++t) {
    const std::uint64_t k = mean_arrivals > 0.0 ? poisson(rng) : 0;
    if (k > 0) {
      arrivals_seeing_backlog += queued > 0 ? k : k - 1;
      queue.push_back({t, k});
      queued += k;
      stats.arrivals += k;
    }

    while (!queue.empty() &&
           static_cast<double>(t - queue.front().slot) * cfg.slot > cfg.traffic.d_max) {
      stats.dropped += queue.front().count;
      queued -= queue.front().count;
      queue.pop_front();
    }
    if (queued > 0) ++nonempty_slots;

    std::size_t mode = 0;
    if (cfg.forced_mode) {
      mode = *cfg.forced_mode;
    } else {
      mode = select_mode(cfg.table, draw_sinr(cfg.link, rng, stats.redraws));
    }
    ++mode_count[mode];

    std::uint64_t budget = capacity[mode];
    while (budget > 0 && !queue.empty()) {
      const std::uint64_t take = std::min(budget, queue.front().count);
      queue.front().count -= take;
      budget -= take;
      queued -= take;
      stats.served += take;
      if (queue.front().count == 0) queue.pop_front();
    }
  }

  stats.queued_at_end = queued;
  stats.dropped_fraction =
      stats.arrivals > 0 ? static_cast<double>(stats.dropped) / static_cast<double>(stats.arrivals) : 0.0;
  if (cfg.estimator == RhoHatEstimator::slot_nonempty) {
    stats.rho_hat_est = static_cast<double>(nonempty_slots) / static_cast<double>(cfg.horizon);
  } else {
    stats.rho_hat_est = stats.arrivals > 0 ? static_cast<double>(arrivals_seeing_backlog) /
                                                 static_cast<double>(stats.arrivals)
                                           : 0.0;
  }
  stats.mode_histogram.resize(levels);
  for (std::size_t n = 0; n < levels; ++n) {
    stats.mode_histogram[n] = static_cast<double>(mode_count[n]) / static_cast<double>(cfg.horizon);
  }
  return stats;
}

}  // namespace lfmimo
