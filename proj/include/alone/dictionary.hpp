#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "alone/aligned.hpp"
#include "alone/kspace.hpp"
#include "alone/operators.hpp"
#include "alone/patches.hpp"
#include "alone/trace.hpp"

namespace alone {

/// Real dictionary D (dim x atoms), stored column by column, atoms of unit norm.
class Dictionary {
 public:
  Dictionary(std::size_t dim, std::size_t atoms, std::vector<double> columns);

  /// Seeded Gaussian atoms, normalized.
  static Dictionary random(std::size_t dim, std::size_t atoms, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  std::size_t atoms() const { return atoms_; }
  std::span<const double> atom(std::size_t k) const { return {columns_.data() + k * dim_, dim_}; }
  std::span<double> atom(std::size_t k) { return {columns_.data() + k * dim_, dim_}; }
  std::span<const double> data() const { return columns_; }

  /// Rescales every atom to unit norm; throws PreconditionError on a zero atom.
  void normalize_atoms();
  /// max_k | ||d_k|| - 1 |
  double max_norm_defect() const;

  friend bool operator==(const Dictionary&, const Dictionary&) = default;

 private:
  std::size_t dim_;
  std::size_t atoms_;
  AlignedVector<double> columns_;
};

/// "ALNEDIC1", u32 dim, u32 atoms, then dim*atoms little-endian float64, column-major.
void save_dictionary(const std::filesystem::path& path, const Dictionary& dictionary);
Dictionary load_dictionary(const std::filesystem::path& path);

/// Real training or coding vectors, `count` rows of length `dim`.
struct SignalSet {
  std::size_t dim = 0;
  std::size_t count = 0;
  AlignedVector<double> values;

  SignalSet() = default;
  SignalSet(std::size_t d, std::size_t n) : dim(d), count(n), values(d * n, 0.0) {}
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

struct SparseCode {
  std::vector<std::size_t> support;
  std::vector<double> coefficients;  // aligned with support
  /// ||r|| before the first selection and after every accepted atom.
  std::vector<double> residual_history;
  /// An atom was rejected because it was (numerically) in the span of the active set.
  bool rank_deficient = false;
};

/// Orthogonal matching pursuit, straightforward form: pick the atom with the
/// largest |<d_k, r>|, re-fit the whole active set by least squares, repeat
/// until S atoms are active or ||r|| < tolerance.
SparseCode omp_sparse_code(const Dictionary& dictionary, std::span<const double> signal, std::size_t sparsity,
                           double tolerance = 1e-10);

struct SparseCodingStats {
  std::size_t max_support = 0;
  std::size_t rank_deficient = 0;
  double squared_error = 0.0;  // sum over signals of ||y - D gamma||^2
};

/// OMP on every signal with a progressively updated Cholesky factor of the
/// active Gram matrix; parallel over signals. Writes D gamma into `approximations`.
SparseCodingStats omp_approximate(const Dictionary& dictionary, const SignalSet& signals, std::size_t sparsity,
                                  SignalSet& approximations, double tolerance = 1e-10);

/// Mean over signals of ||y - P_I y||^2 with I the S atoms of largest |<d_k, y>|.
double thresholding_error(const Dictionary& dictionary, const SignalSet& signals, std::size_t sparsity,
                          double ridge = 1e-10);

struct ItkrmOptions {
  std::size_t sparsity = 16;
  std::size_t iterations = 10;
  double ridge = 1e-10;
};

struct ItkrmResult {
  Dictionary dictionary;
  /// thresholding_error of the initial dictionary followed by one entry per iteration.
  std::vector<double> error_history;
  /// Iteration whose dictionary is returned (0 = the initial one).
  std::size_t best_iteration = 0;
  std::size_t reseeded_atoms = 0;
};

/// Iterative thresholding and K residual means. Each iteration replaces atom k by
/// the normalized sum over the signals that selected it of
/// sign(<d_k, y>) (y - P_I y + <d_k, y> d_k). Atoms nobody selected are
/// re-seeded from the worst approximated signals. Returns the dictionary with
/// the lowest thresholding error among the initial one and all iterates.
ItkrmResult itkrm_train(Dictionary init, const SignalSet& signals, const ItkrmOptions& options);

struct DicConfig {
  double lambda = 0.1;
  std::size_t outer_iterations = 16;
  Extent3 patch{4, 4, 4};
  Extent3 stride{2, 2, 2};
  std::size_t sparsity = 16;
  std::size_t atoms = 64;
  std::size_t itkrm_iterations = 10;
  std::size_t pcg_iterations = 4;
  std::uint64_t seed = 0;
  TraceReference reference;
};

void validate(const DicConfig& config);

struct DicResult {
  ComplexVolume x;
  Dictionary dictionary;
  IterationTrace trace;
};

/// Mean-removed real and imaginary parts of every patch as separate signals
/// (rows 2j and 2j+1), with the removed means.
SignalSet patch_signals(const PatchSet& patches, std::vector<double>& means);

/// Per outer iteration: ITKrM on the current patches (warm-started), OMP
/// coding of every patch, then the same PCG x-update as ALONE with
/// z_j = D gamma_j plus the removed means.
DicResult dic_reconstruct(const KSpaceData& y, const EncodingOperator& op, const DicConfig& config);

}  // namespace alone
