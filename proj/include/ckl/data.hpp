#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "ckl/alignment.hpp"
#include "ckl/kernels.hpp"

namespace ckl {

/// Portable random source: std::mt19937_64 (its output sequence is fixed by
/// the standard) with hand-written uniform and normal transforms, since the
/// standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal, Box-Muller (one value per pair is cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Dataset {
  DataMatrix X;
  Labels y;
  std::string name;
  std::uint64_t seed = 0;

  [[nodiscard]] Eigen::Index size() const noexcept { return X.rows(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return X.cols(); }
  [[nodiscard]] bool has_both_classes() const;
  /// Rows in the given order.
  [[nodiscard]] Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
};

struct SplitSpec {
  Eigen::Index n_train = 0;
  Eigen::Index n_val = 0;
  Eigen::Index n_test = 0;
  std::uint64_t seed = 0;
};

/// sin(sqrt2 x) + sin(sqrt12 x) + sin(sqrt60 x).
double sine_mixture(double x);

/// x ~ U[-10, 10], y = sign(f(x)); draws with f(x) == 0 are redrawn. The
/// three sets come from one generator in train, val, test order.
Splits gen_sine_mixture(std::uint64_t seed, Eigen::Index n_train = 500, Eigen::Index n_val = 500,
                        Eigen::Index n_test = 1000);

/// theta_i = (i/d)^gamma for i = 1..d.
Vector relevance_vector(double gamma, Eigen::Index d);

/// Two Gaussians N(+-mu, I) with mu = rho theta/|theta|, equal class priors.
Splits gen_gauss50(double gamma, std::uint64_t seed, double rho = 1.75, Eigen::Index d = 50,
                   Eigen::Index n_train = 50, Eigen::Index n_val = 1000, Eigen::Index n_test = 1000);

/// Plain comma-separated values with an optional header. `label_column` is a
/// header name or a zero-based index; rows whose label equals
/// `positive_label` become +1, all others -1.
Dataset load_csv(const std::string& path, const std::string& label_column, const std::string& positive_label);
Dataset read_csv(std::istream& in, const std::string& label_column, const std::string& positive_label,
                 const std::string& name = "csv");

/// Features then a final `label` column, with header.
void write_csv(std::ostream& out, const Dataset& ds);

/// Seeded shuffle, then consecutive blocks of the requested sizes.
Splits split(const Dataset& ds, const SplitSpec& spec);

}  // namespace ckl
