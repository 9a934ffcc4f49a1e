#include "pll/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pll/csv.hpp"
#include "pll/rng.hpp"

namespace pll {

namespace {

using detail::require;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, int line, const std::string& what)
      : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what) {}
};

constexpr double kPi = 3.141592653589793238462643383279502884;

}  // namespace

void PLLDataset::validate() const {
  require(features.rows() == masks.rows(), "PLLDataset: features/masks row mismatch");
  for (Eigen::Index i = 0; i < masks.rows(); ++i) {
    bool any = false;
    for (Eigen::Index k = 0; k < masks.cols(); ++k) any = any || masks(i, k) != 0;
    require(any, "PLLDataset: empty candidate mask at row " + std::to_string(i));
  }
  if (true_labels) {
    require(true_labels->size() == masks.rows(), "PLLDataset: label size mismatch");
    for (Eigen::Index i = 0; i < true_labels->size(); ++i) {
      const int y = (*true_labels)(i);
      require(y >= 0 && y < masks.cols(),
              "PLLDataset: label out of range at row " + std::to_string(i));
      require(masks(i, y) != 0,
              "PLLDataset: true label outside candidate set at row " +
                  std::to_string(i));
    }
  }
}

Batch PLLDataset::batch(std::span<const int> indices) const {
  Batch b;
  b.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  b.masks.resize(static_cast<Eigen::Index>(indices.size()), masks.cols());
  if (true_labels) b.labels = LabelVector(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const int i = indices[r];
    require(i >= 0 && i < n(), "batch: index out of range");
    b.features.row(static_cast<Eigen::Index>(r)) = features.row(i);
    b.masks.row(static_cast<Eigen::Index>(r)) = masks.row(i);
    if (true_labels) (*b.labels)(static_cast<Eigen::Index>(r)) = (*true_labels)(i);
  }
  return b;
}

void FlipSpec::validate() const {
  require(q >= 0.0 && q <= 1.0, "FlipSpec: q must lie in [0,1]");
  require(c >= 0.0 && c <= 1.0, "FlipSpec: c must lie in [0,1]");
}

void BlobSpec::validate() const {
  require(num_classes >= 2, "BlobSpec: need at least two classes");
  require(dim >= 2, "BlobSpec: need dim >= 2 for the circular mean layout");
  require(radius > 0.0, "BlobSpec: radius must be positive");
  require(sigma > 0.0, "BlobSpec: sigma must be positive");
  require(per_class >= 1, "BlobSpec: per_class must be >= 1");
}

PLLDataset gen_gaussian_blobs(const BlobSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.num_classes * spec.per_class;
  PLLDataset ds;
  ds.features.resize(n, spec.dim);
  ds.masks = MaskMatrix::Zero(n, spec.num_classes);
  ds.true_labels = LabelVector(n);

  Rng rng = Rng::stream(seed, "blobs");
  int row = 0;
  for (int cls = 0; cls < spec.num_classes; ++cls) {
    const double angle = 2.0 * kPi * cls / spec.num_classes;
    Vector mean = Vector::Zero(spec.dim);
    mean(0) = spec.radius * std::cos(angle);
    mean(1) = spec.radius * std::sin(angle);
    for (int j = 0; j < spec.per_class; ++j, ++row) {
      for (int c = 0; c < spec.dim; ++c) {
        ds.features(row, c) = mean(c) + spec.sigma * rng.normal();
      }
      ds.masks(row, cls) = 1;
      (*ds.true_labels)(row) = cls;
    }
  }
  return ds;
}

PLLDataset gen_partial_labels(const PLLDataset& dataset, const FlipSpec& flip,
                              std::uint64_t seed) {
  flip.validate();
  require(dataset.true_labels.has_value(),
          "gen_partial_labels: dataset must carry true labels");
  const int K = dataset.num_classes();
  PLLDataset out = dataset;
  out.masks = MaskMatrix::Zero(dataset.n(), K);

  Rng rng = Rng::stream(seed, "flip");
  for (int i = 0; i < dataset.n(); ++i) {
    const int y = (*dataset.true_labels)(i);
    out.masks(i, y) = 1;
    const int distractor = (y + 1) % K;
    for (int k = 0; k < K; ++k) {
      if (k == y) continue;
      const double p = (flip.kind == FlipKind::CoupledDistractor && k == distractor)
                           ? flip.c
                           : flip.q;
      if (rng.bernoulli(p)) out.masks(i, k) = 1;
    }
  }
  return out;
}

double ambiguity_degree_analytic(const FlipSpec& flip) {
  flip.validate();
  return flip.kind == FlipKind::UniformFlip ? flip.q : std::max(flip.q, flip.c);
}

AmbiguityEstimate ambiguity_degree_estimate(const PLLDataset& dataset) {
  require(dataset.true_labels.has_value(),
          "ambiguity_degree_estimate: dataset must carry true labels");
  const int K = dataset.num_classes();
  std::vector<std::int64_t> class_count(K, 0);
  // co_count[y][k]: how often label k appears in the candidate set of an
  // example with true label y.
  std::vector<std::vector<std::int64_t>> co_count(K, std::vector<std::int64_t>(K, 0));
  for (int i = 0; i < dataset.n(); ++i) {
    const int y = (*dataset.true_labels)(i);
    ++class_count[y];
    for (int k = 0; k < K; ++k) {
      if (k != y && dataset.masks(i, k) != 0) ++co_count[y][k];
    }
  }
  AmbiguityEstimate est;
  for (int y = 0; y < K; ++y) {
    if (class_count[y] == 0) {
      est.skipped_classes.push_back(y);
      continue;
    }
    for (int k = 0; k < K; ++k) {
      if (k == y) continue;
      const double freq =
          static_cast<double>(co_count[y][k]) / static_cast<double>(class_count[y]);
      est.gamma = std::max(est.gamma, freq);
    }
  }
  return est;
}

std::vector<FoldSplit> kfold_split(int n, int k, int repeats, std::uint64_t seed) {
  require(n >= 1, "kfold_split: n must be >= 1");
  require(k >= 2, "kfold_split: k must be >= 2");
  require(k <= n, "kfold_split: k must not exceed n");
  require(repeats >= 1, "kfold_split: repeats must be >= 1");

  std::vector<FoldSplit> splits;
  splits.reserve(static_cast<std::size_t>(repeats) * k);
  for (int r = 0; r < repeats; ++r) {
    Rng rng = Rng::stream(seed, "kfold", static_cast<std::uint64_t>(r));
    const std::vector<int> perm = rng.permutation(n);
    // First (n mod k) folds take the extra element.
    const int base = n / k;
    const int extra = n % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
      const int size = base + (f < extra ? 1 : 0);
      FoldSplit split;
      split.test.assign(perm.begin() + pos, perm.begin() + pos + size);
      split.train.reserve(n - size);
      split.train.insert(split.train.end(), perm.begin(), perm.begin() + pos);
      split.train.insert(split.train.end(), perm.begin() + pos + size, perm.end());
      pos += size;
      splits.push_back(std::move(split));
    }
  }
  return splits;
}

void save_dataset(const PLLDataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::ofstream os(path, std::ios::binary);  // binary: LF endings everywhere
  require(os.good(), "save_dataset: cannot open " + path.string());
  const bool labeled = dataset.true_labels.has_value();
  os << "PLLD v1 n=" << dataset.n() << " d=" << dataset.d()
     << " K=" << dataset.num_classes() << " labeled=" << (labeled ? 1 : 0) << "\n";
  for (int i = 0; i < dataset.n(); ++i) {
    for (int c = 0; c < dataset.d(); ++c) {
      if (c) os << ' ';
      os << format_double(dataset.features(i, c));
    }
    os << " | ";
    bool first = true;
    for (int k = 0; k < dataset.num_classes(); ++k) {
      if (dataset.masks(i, k) != 0) {
        if (!first) os << ',';
        os << k;
        first = false;
      }
    }
    if (labeled) os << " | " << (*dataset.true_labels)(i);
    os << "\n";
  }
  require(os.good(), "save_dataset: write failed for " + path.string());
}

PLLDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is.good()) throw std::runtime_error("load_dataset: cannot open " + path.string());

  std::string line;
  int line_no = 1;
  if (!std::getline(is, line)) throw ParseError(path, 1, "missing header");
  int n = -1, d = -1, K = -1, labeled = -1;
  {
    std::istringstream hs(line);
    std::string magic, version, kv;
    hs >> magic >> version;
    if (magic != "PLLD" || version != "v1")
      throw ParseError(path, 1, "expected 'PLLD v1' header");
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParseError(path, 1, "malformed header field '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      int value = 0;
      const std::string sval = kv.substr(eq + 1);
      const auto res = std::from_chars(sval.data(), sval.data() + sval.size(), value);
      if (res.ec != std::errc{} || res.ptr != sval.data() + sval.size())
        throw ParseError(path, 1, "non-integer header value '" + kv + "'");
      if (key == "n") n = value;
      else if (key == "d") d = value;
      else if (key == "K") K = value;
      else if (key == "labeled") labeled = value;
      else throw ParseError(path, 1, "unknown header key '" + key + "'");
    }
    if (n < 0 || d < 1 || K < 1 || (labeled != 0 && labeled != 1))
      throw ParseError(path, 1, "header must define n, d, K and labeled=0|1");
  }

  PLLDataset ds;
  ds.features.resize(n, d);
  ds.masks = MaskMatrix::Zero(n, K);
  if (labeled == 1) ds.true_labels = LabelVector(n);

  for (int i = 0; i < n; ++i) {
    ++line_no;
    if (!std::getline(is, line))
      throw ParseError(path, line_no, "unexpected end of file (expected " +
                                          std::to_string(n) + " data lines)");
    // Split on " | " separators.
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto sep = line.find(" | ", start);
      if (sep == std::string::npos) {
        parts.push_back(line.substr(start));
        break;
      }
      parts.push_back(line.substr(start, sep - start));
      start = sep + 3;
    }
    const std::size_t expected = labeled == 1 ? 3 : 2;
    if (parts.size() != expected)
      throw ParseError(path, line_no,
                       "expected " + std::to_string(expected) + " ' | '-separated fields");

    {
      std::istringstream fs(parts[0]);
      for (int c = 0; c < d; ++c) {
        if (!(fs >> ds.features(i, c)))
          throw ParseError(path, line_no, "expected " + std::to_string(d) + " floats");
      }
      std::string rest;
      if (fs >> rest) throw ParseError(path, line_no, "trailing feature tokens");
    }

    if (parts[1].empty())
      throw ParseError(path, line_no, "empty candidate set");
    int prev = -1;
    std::size_t pos = 0;
    while (pos <= parts[1].size()) {
      auto comma = parts[1].find(',', pos);
      if (comma == std::string::npos) comma = parts[1].size();
      const std::string tok = parts[1].substr(pos, comma - pos);
      int k = -1;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), k);
      if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError(path, line_no, "bad candidate index '" + tok + "'");
      if (k < 0 || k >= K)
        throw ParseError(path, line_no, "candidate index out of range: " + tok);
      if (k <= prev)
        throw ParseError(path, line_no, "candidate indices must be strictly ascending");
      ds.masks(i, k) = 1;
      prev = k;
      pos = comma + 1;
    }

    if (labeled == 1) {
      int y = -1;
      const std::string& tok = parts[2];
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), y);
      if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw ParseError(path, line_no, "bad true label '" + tok + "'");
      if (y < 0 || y >= K)
        throw ParseError(path, line_no, "true label out of range: " + tok);
      if (ds.masks(i, y) == 0)
        throw ParseError(path, line_no, "true label not in candidate set");
      (*ds.true_labels)(i) = y;
    }
  }
  return ds;
}

}  // namespace pll
