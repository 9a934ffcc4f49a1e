#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pll/nn.hpp"

namespace pll {

/// A partially labeled dataset: features, per-example candidate-label
/// bitmasks, and (optionally) the true labels. Invariant: every mask row is
/// non-empty, and when true labels are present each label's bit is set in
/// its row.
struct PLLDataset {
  Matrix features;   // n x d
  MaskMatrix masks;  // n x K
  std::optional<LabelVector> true_labels;

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }
  int num_classes() const { return static_cast<int>(masks.cols()); }

  void validate() const;

  /// Gathers the given rows into a Batch.
  Batch batch(std::span<const int> indices) const;
};

enum class FlipKind { UniformFlip, CoupledDistractor };

/// Parameters of the candidate-set generating process. UniformFlip includes
/// each wrong label independently with probability q. CoupledDistractor also
/// includes the designated distractor d(y) = (y+1) mod K with probability c
/// (and every other wrong label with probability q).
struct FlipSpec {
  FlipKind kind = FlipKind::UniformFlip;
  double q = 0.0;
  double c = 0.0;

  void validate() const;
};

/// Isotropic Gaussian blobs with class means at the K-th roots of unity
/// scaled by `radius` in the first two coordinates (zeros elsewhere).
struct BlobSpec {
  int num_classes = 4;
  int dim = 10;
  double radius = 10.0;
  double sigma = 0.5;
  int per_class = 500;

  void validate() const;
};

/// Balanced blobs, class-major row order, singleton candidate masks ({y}).
PLLDataset gen_gaussian_blobs(const BlobSpec& spec, std::uint64_t seed);

/// Applies the flip process to a dataset with true labels. Every generated
/// mask contains the true label. Draw order is example-major, then label
/// index ascending (one uniform draw per wrong label), so results are
/// deterministic per seed.
PLLDataset gen_partial_labels(const PLLDataset& dataset, const FlipSpec& flip,
                              std::uint64_t seed);

/// Ambiguity degree implied by the flip process alone: q for UniformFlip,
/// max(q, c) for CoupledDistractor (the distractor dominates when c > q;
/// with K = 2 the distractor is the only wrong label and the value c applies).
double ambiguity_degree_analytic(const FlipSpec& flip);

struct AmbiguityEstimate {
  double gamma = 0.0;
  std::vector<int> skipped_classes;  // classes with no examples
};

/// Empirical ambiguity degree: max over ordered class pairs (y, y') of the
/// frequency that y' appears in the candidate set among examples with true
/// label y. Assumes the candidate process depends on y only (the per-instance
/// supremum is not estimable from finite samples without this assumption).
AmbiguityEstimate ambiguity_degree_estimate(const PLLDataset& dataset);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

/// `repeats` independent k-fold partitions (fresh permutation per repeat),
/// returned repeat-major. Within a repeat the test folds are disjoint, cover
/// all indices, and differ in size by at most one.
std::vector<FoldSplit> kfold_split(int n, int k, int repeats, std::uint64_t seed);

/// Portable text format, bit-exact:
///   line 1:  PLLD v1 n=<n> d=<d> K=<K> labeled=<0|1>
///   then n lines: d floats (17 significant digits, single spaces), " | ",
///   ascending comma-separated 0-based candidate indices, and iff labeled=1
///   " | " followed by the true label. LF line endings.
void save_dataset(const PLLDataset& dataset, const std::filesystem::path& path);
PLLDataset load_dataset(const std::filesystem::path& path);

}  // namespace pll
