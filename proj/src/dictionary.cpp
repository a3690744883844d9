#include "alone/dictionary.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "alone/alone.hpp"
#include "alone/error.hpp"
#include "alone/normal_system.hpp"
#include "binary_io.hpp"

namespace alone {

namespace {

using Clock = std::chrono::steady_clock;
using ColMatrix = Eigen::MatrixXd;
using ConstMap = Eigen::Map<const ColMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

constexpr std::size_t kChunk = 512;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ConstMap as_matrix(const Dictionary& d) {
  return {d.data().data(), static_cast<Eigen::Index>(d.dim()), static_cast<Eigen::Index>(d.atoms())};
}

void check_sparsity(const Dictionary& d, std::size_t sparsity) {
  if (sparsity < 1 || sparsity > d.atoms()) throw ConfigError("sparsity must lie in [1, atoms]");
}

void check_signals(const Dictionary& d, const SignalSet& s) {
  if (s.dim != d.dim()) throw DimensionError("signal length does not match the dictionary");
}

// Indices of the S largest |corr| entries, ties broken by the lower index.
std::vector<std::size_t> top_indices(const Eigen::VectorXd& corr, std::size_t s) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(corr.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(s), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double fa = std::abs(corr(static_cast<Eigen::Index>(a)));
                      const double fb = std::abs(corr(static_cast<Eigen::Index>(b)));
                      return fa != fb ? fa > fb : a < b;
                    });
  idx.resize(s);
  return idx;
}

// Ridge-regularized projection of y onto span(D_I); returns the coefficients.
Eigen::VectorXd project(const ConstMap& dm, const std::vector<std::size_t>& support, const Eigen::VectorXd& y,
                        double ridge, Eigen::VectorXd& projection) {
  const auto s = static_cast<Eigen::Index>(support.size());
  ColMatrix sub(dm.rows(), s);
  for (Eigen::Index i = 0; i < s; ++i) sub.col(i) = dm.col(static_cast<Eigen::Index>(support[static_cast<std::size_t>(i)]));
  ColMatrix gram = sub.transpose() * sub;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd coef = gram.llt().solve(sub.transpose() * y);
  projection = sub * coef;
  return coef;
}

}  // namespace

Dictionary::Dictionary(std::size_t dim, std::size_t atoms, std::vector<double> columns)
    : dim_(dim), atoms_(atoms), columns_(columns.begin(), columns.end()) {
  if (dim == 0 || atoms == 0) throw DimensionError("dictionary needs dim >= 1 and atoms >= 1");
  if (columns_.size() != dim * atoms) throw DimensionError("dictionary payload has the wrong length");
}

Dictionary Dictionary::random(std::size_t dim, std::size_t atoms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> cols(dim * atoms);
  for (double& v : cols) v = dist(rng);
  Dictionary d(dim, atoms, std::move(cols));
  d.normalize_atoms();
  return d;
}

void Dictionary::normalize_atoms() {
  for (std::size_t k = 0; k < atoms_; ++k) {
    auto a = atom(k);
    double n = 0.0;
    for (double v : a) n += v * v;
    n = std::sqrt(n);
    if (n == 0.0 || !std::isfinite(n)) throw PreconditionError("atom " + std::to_string(k) + " cannot be normalized");
    for (double& v : a) v /= n;
  }
}

double Dictionary::max_norm_defect() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < atoms_; ++k) {
    double n = 0.0;
    for (double v : atom(k)) n += v * v;
    worst = std::max(worst, std::abs(std::sqrt(n) - 1.0));
  }
  return worst;
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& dictionary) {
  detail::ByteWriter w;
  w.reserve(16 + 8 * dictionary.data().size());
  w.magic("ALNEDIC1");
  w.u32(static_cast<std::uint32_t>(dictionary.dim()));
  w.u32(static_cast<std::uint32_t>(dictionary.atoms()));
  for (double v : dictionary.data()) w.f64(v);
  w.write_to(path);
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  auto r = detail::ByteReader::from_file(path);
  r.expect_magic("ALNEDIC1");
  const std::uint64_t dim = r.u32();
  const std::uint64_t atoms = r.u32();
  if (dim == 0 || atoms == 0) throw FormatError(r.name() + ": empty dictionary");
  if (r.remaining() != 8 * dim * atoms) throw FormatError(r.name() + ": atom payload has the wrong length");
  std::vector<double> cols(dim * atoms);
  for (double& v : cols) v = r.f64();
  r.expect_end();
  return Dictionary(dim, atoms, std::move(cols));
}

SparseCode omp_sparse_code(const Dictionary& dictionary, std::span<const double> signal, std::size_t sparsity,
                           double tolerance) {
  check_sparsity(dictionary, sparsity);
  if (signal.size() != dictionary.dim()) throw DimensionError("signal length does not match the dictionary");
  const ConstMap dm = as_matrix(dictionary);
  const Eigen::VectorXd y = ConstVecMap(signal.data(), static_cast<Eigen::Index>(signal.size()));
  SparseCode code;
  Eigen::VectorXd r = y;
  code.residual_history.push_back(r.norm());
  std::vector<bool> blocked(dictionary.atoms(), false);
  while (code.support.size() < sparsity && r.norm() >= tolerance) {
    const Eigen::VectorXd corr = dm.transpose() * r;
    std::size_t best = dictionary.atoms();
    double best_val = 0.0;
    for (std::size_t k = 0; k < dictionary.atoms(); ++k) {
      const double v = std::abs(corr(static_cast<Eigen::Index>(k)));
      if (!blocked[k] && v > best_val) {
        best = k;
        best_val = v;
      }
    }
    if (best == dictionary.atoms()) break;
    std::vector<std::size_t> candidate = code.support;
    candidate.push_back(best);
    ColMatrix sub(dm.rows(), static_cast<Eigen::Index>(candidate.size()));
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      sub.col(static_cast<Eigen::Index>(i)) = dm.col(static_cast<Eigen::Index>(candidate[i]));
    }
    Eigen::ColPivHouseholderQR<ColMatrix> qr(sub);
    qr.setThreshold(1e-10);
    blocked[best] = true;
    if (static_cast<std::size_t>(qr.rank()) < candidate.size()) {
      code.rank_deficient = true;
      continue;
    }
    const Eigen::VectorXd coef = qr.solve(Eigen::VectorXd(y));
    code.support = std::move(candidate);
    code.coefficients.assign(coef.data(), coef.data() + coef.size());
    r = y - sub * coef;
    code.residual_history.push_back(r.norm());
  }
  return code;
}

SparseCodingStats omp_approximate(const Dictionary& dictionary, const SignalSet& signals, std::size_t sparsity,
                                  SignalSet& approximations, double tolerance) {
  check_sparsity(dictionary, sparsity);
  check_signals(dictionary, signals);
  approximations = SignalSet(signals.dim, signals.count);
  const ConstMap dm = as_matrix(dictionary);
  const ColMatrix gram = dm.transpose() * dm;
  const auto d = static_cast<Eigen::Index>(dictionary.dim());
  const std::size_t n_atoms = dictionary.atoms();
  const std::size_t n_chunks = (signals.count + kChunk - 1) / kChunk;
  std::vector<SparseCodingStats> partial(n_chunks);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(n_chunks); ++ci) {
    const auto chunk = static_cast<std::size_t>(ci);
    SparseCodingStats stats;
    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sparsity), static_cast<Eigen::Index>(sparsity));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(sparsity));
    Eigen::VectorXd w(static_cast<Eigen::Index>(sparsity));
    Eigen::VectorXd r(d);
    Eigen::VectorXd corr(static_cast<Eigen::Index>(n_atoms));
    std::vector<std::size_t> support;
    std::vector<bool> blocked(n_atoms);
    const std::size_t stop = std::min(signals.count, (chunk + 1) * kChunk);
    for (std::size_t n = chunk * kChunk; n < stop; ++n) {
      const Eigen::VectorXd y = ConstVecMap(signals.row(n).data(), d);
      const Eigen::VectorXd corr0 = dm.transpose() * y;
      r = y;
      support.clear();
      std::fill(blocked.begin(), blocked.end(), false);
      bool deficient = false;
      Eigen::VectorXd coef;
      while (support.size() < sparsity && r.norm() >= tolerance) {
        corr.noalias() = dm.transpose() * r;
        std::size_t best = n_atoms;
        double best_val = 0.0;
        for (std::size_t k = 0; k < n_atoms; ++k) {
          const double v = std::abs(corr(static_cast<Eigen::Index>(k)));
          if (!blocked[k] && v > best_val) {
            best = k;
            best_val = v;
          }
        }
        if (best == n_atoms) break;
        blocked[best] = true;
        // Extend the Cholesky factor of the active Gram matrix by one row.
        const auto s = static_cast<Eigen::Index>(support.size());
        for (Eigen::Index i = 0; i < s; ++i) {
          double v = gram(static_cast<Eigen::Index>(support[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(best));
          for (Eigen::Index j = 0; j < i; ++j) v -= chol(i, j) * w(j);
          w(i) = v / chol(i, i);
        }
        const double diag = gram(static_cast<Eigen::Index>(best), static_cast<Eigen::Index>(best)) -
                            (s > 0 ? w.head(s).squaredNorm() : 0.0);
        if (diag <= 1e-10) {
          deficient = true;
          continue;
        }
        for (Eigen::Index j = 0; j < s; ++j) chol(s, j) = w(j);
        chol(s, s) = std::sqrt(diag);
        rhs(s) = corr0(static_cast<Eigen::Index>(best));
        support.push_back(best);
        const auto m = s + 1;
        const auto lower = chol.topLeftCorner(m, m).triangularView<Eigen::Lower>();
        coef = lower.transpose().solve(lower.solve(rhs.head(m)));
        r = y;
        for (Eigen::Index i = 0; i < m; ++i) r -= coef(i) * dm.col(static_cast<Eigen::Index>(support[static_cast<std::size_t>(i)]));
      }
      auto out = approximations.row(n);
      for (Eigen::Index i = 0; i < d; ++i) out[static_cast<std::size_t>(i)] = y(i) - r(i);
      stats.max_support = std::max(stats.max_support, support.size());
      stats.rank_deficient += deficient ? 1 : 0;
      stats.squared_error += r.squaredNorm();
    }
    partial[chunk] = stats;
  }
  SparseCodingStats total;
  for (const SparseCodingStats& s : partial) {
    total.max_support = std::max(total.max_support, s.max_support);
    total.rank_deficient += s.rank_deficient;
    total.squared_error += s.squared_error;
  }
  return total;
}

double thresholding_error(const Dictionary& dictionary, const SignalSet& signals, std::size_t sparsity, double ridge) {
  check_sparsity(dictionary, sparsity);
  check_signals(dictionary, signals);
  if (signals.count == 0) return 0.0;
  const ConstMap dm = as_matrix(dictionary);
  const std::size_t n_chunks = (signals.count + kChunk - 1) / kChunk;
  std::vector<double> partial(n_chunks, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(n_chunks); ++ci) {
    const auto chunk = static_cast<std::size_t>(ci);
    double sum = 0.0;
    Eigen::VectorXd proj;
    const std::size_t stop = std::min(signals.count, (chunk + 1) * kChunk);
    for (std::size_t n = chunk * kChunk; n < stop; ++n) {
      const Eigen::VectorXd y = ConstVecMap(signals.row(n).data(), static_cast<Eigen::Index>(signals.dim));
      const Eigen::VectorXd corr = dm.transpose() * y;
      project(dm, top_indices(corr, sparsity), y, ridge, proj);
      sum += (y - proj).squaredNorm();
    }
    partial[chunk] = sum;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0) / static_cast<double>(signals.count);
}

ItkrmResult itkrm_train(Dictionary init, const SignalSet& signals, const ItkrmOptions& options) {
  check_sparsity(init, options.sparsity);
  check_signals(init, signals);
  if (signals.count < init.atoms()) throw PreconditionError("ITKrM needs at least as many signals as atoms");
  if (!(options.ridge >= 0.0)) throw ConfigError("ridge must be >= 0");
  const std::size_t dim = init.dim();
  const std::size_t n_atoms = init.atoms();
  const std::size_t n_chunks = (signals.count + kChunk - 1) / kChunk;

  struct Partial {
    ColMatrix sums;
    std::vector<std::size_t> counts;
    double error = 0.0;
  };

  ItkrmResult result{init, {}, 0, 0};
  Dictionary current = std::move(init);
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<double> residual_norms(signals.count);

  for (std::size_t it = 0; it <= options.iterations; ++it) {
    const ConstMap dm = as_matrix(current);
    std::vector<Partial> partial(n_chunks);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(n_chunks); ++ci) {
      const auto chunk = static_cast<std::size_t>(ci);
      Partial p{ColMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n_atoms)),
                std::vector<std::size_t>(n_atoms, 0), 0.0};
      Eigen::VectorXd proj;
      const std::size_t stop = std::min(signals.count, (chunk + 1) * kChunk);
      for (std::size_t n = chunk * kChunk; n < stop; ++n) {
        const Eigen::VectorXd y = ConstVecMap(signals.row(n).data(), static_cast<Eigen::Index>(dim));
        const Eigen::VectorXd corr = dm.transpose() * y;
        const auto support = top_indices(corr, options.sparsity);
        project(dm, support, y, options.ridge, proj);
        const Eigen::VectorXd residual = y - proj;
        const double e = residual.squaredNorm();
        p.error += e;
        residual_norms[n] = e;
        for (std::size_t k : support) {
          const auto kk = static_cast<Eigen::Index>(k);
          const double c = corr(kk);
          const double sign = c >= 0.0 ? 1.0 : -1.0;
          p.sums.col(kk) += sign * (residual + c * dm.col(kk));
          ++p.counts[k];
        }
      }
      partial[chunk] = std::move(p);
    }

    double error = 0.0;
    ColMatrix sums = ColMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n_atoms));
    std::vector<std::size_t> counts(n_atoms, 0);
    for (const Partial& p : partial) {
      error += p.error;
      sums += p.sums;
      for (std::size_t k = 0; k < n_atoms; ++k) counts[k] += p.counts[k];
    }
    error /= static_cast<double>(signals.count);
    result.error_history.push_back(error);
    if (error < best_error) {
      best_error = error;
      result.dictionary = current;
      result.best_iteration = it;
    }
    if (it == options.iterations) break;

    // Worst approximated signals first, for re-seeding unused atoms.
    std::vector<std::size_t> worst(signals.count);
    std::iota(worst.begin(), worst.end(), std::size_t{0});
    std::stable_sort(worst.begin(), worst.end(),
                     [&](std::size_t a, std::size_t b) { return residual_norms[a] > residual_norms[b]; });
    std::size_t next_worst = 0;

    std::vector<double> cols(current.data().begin(), current.data().end());
    for (std::size_t k = 0; k < n_atoms; ++k) {
      double* col = cols.data() + k * dim;
      if (counts[k] == 0) {
        while (next_worst < worst.size()) {
          const auto row = signals.row(worst[next_worst++]);
          double nrm = 0.0;
          for (double v : row) nrm += v * v;
          nrm = std::sqrt(nrm);
          if (nrm > 0.0) {
            for (std::size_t i = 0; i < dim; ++i) col[i] = row[i] / nrm;
            ++result.reseeded_atoms;
            break;
          }
        }
        continue;
      }
      const auto s = sums.col(static_cast<Eigen::Index>(k));
      const double nrm = s.norm();
      if (!(nrm > 1e-12) || !std::isfinite(nrm)) continue;
      for (std::size_t i = 0; i < dim; ++i) col[i] = s(static_cast<Eigen::Index>(i)) / nrm;
    }
    current = Dictionary(dim, n_atoms, std::move(cols));
  }
  return result;
}

SignalSet patch_signals(const PatchSet& patches, std::vector<double>& means) {
  const std::size_t d = patches.patch_size();
  SignalSet s(d, 2 * patches.count());
  means.assign(2 * patches.count(), 0.0);
  for (std::size_t j = 0; j < patches.count(); ++j) {
    const auto p = patches.patch(j);
    auto re = s.row(2 * j);
    auto im = s.row(2 * j + 1);
    double mr = 0.0, mi = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      re[i] = p[i].real();
      im[i] = p[i].imag();
      mr += re[i];
      mi += im[i];
    }
    mr /= static_cast<double>(d);
    mi /= static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) {
      re[i] -= mr;
      im[i] -= mi;
    }
    means[2 * j] = mr;
    means[2 * j + 1] = mi;
  }
  return s;
}

void validate(const DicConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda)) throw ConfigError("dic lambda must be positive");
  if (config.outer_iterations < 1) throw ConfigError("dic needs at least one outer iteration");
  if (config.atoms < 1) throw ConfigError("dictionary needs at least one atom");
  if (config.sparsity < 1 || config.sparsity > config.atoms) throw ConfigError("sparsity must lie in [1, atoms]");
  if (config.pcg_iterations < 1) throw ConfigError("pcg_iterations must be >= 1");
}

DicResult dic_reconstruct(const KSpaceData& y, const EncodingOperator& op, const DicConfig& config) {
  validate(config);
  require_descriptor(op.descriptor(), y);
  const PatchGeometry geometry(op.image_dims(), config.patch, config.stride);
  const NormalSystem system(op, geometry, config.lambda);
  const ComplexVolume adjoint_y = op.adjoint(y);

  DicResult result{adjoint_y, Dictionary::random(geometry.patch_size(), config.atoms, config.seed), {}};
  ItkrmOptions itkrm;
  itkrm.sparsity = config.sparsity;
  itkrm.iterations = config.itkrm_iterations;

  for (std::size_t k = 0; k < config.outer_iterations; ++k) {
    IterationRecord record;
    record.iteration = k + 1;

    auto start = Clock::now();
    std::vector<double> means;
    SignalSet signals = patch_signals(extract_patches(result.x, geometry), means);
    ItkrmResult trained = itkrm_train(result.dictionary, signals, itkrm);
    result.dictionary = std::move(trained.dictionary);
    record.train_loss = trained.error_history[trained.best_iteration];
    record.t_train_s = seconds_since(start);

    start = Clock::now();
    signals = patch_signals(extract_patches(result.x, geometry), means);
    SignalSet approx;
    const SparseCodingStats stats = omp_approximate(result.dictionary, signals, config.sparsity, approx);
    PatchSet z(geometry);
    for (std::size_t j = 0; j < z.count(); ++j) {
      auto p = z.patch(j);
      const auto re = approx.row(2 * j);
      const auto im = approx.row(2 * j + 1);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = {re[i] + means[2 * j], im[i] + means[2 * j + 1]};
    }
    record.reg_value = stats.squared_error;
    record.t_reg_s = seconds_since(start);

    start = Clock::now();
    const ComplexVolume rhs = right_hand_side(adjoint_y, z, config.lambda);
    PcgResult solved;
    try {
      solved = solve_x_update(system, rhs, result.x, config.pcg_iterations, 0.0);
    } catch (const DivergenceError& e) {
      result.trace.status = TraceStatus::diverged;
      result.trace.message = e.what();
      break;
    }
    record.t_pcg_s = seconds_since(start);

    const double previous = squared_norm(result.x.data());
    const ComplexVolume diff = solved.x - result.x;
    record.relative_change = previous > 0.0 ? squared_norm(diff.data()) / previous : kNotRecorded;
    result.x = std::move(solved.x);
    const KSpaceData ax = op.forward(result.x);
    double fid = 0.0;
    for (std::size_t i = 0; i < ax.samples.size(); ++i) fid += std::norm(ax.samples[i] - y.samples[i]);
    record.fidelity = std::sqrt(fid);
    config.reference.fill(result.x, record);
    result.trace.records.push_back(record);
  }
  return result;
}

}  // namespace alone
