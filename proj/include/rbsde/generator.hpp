#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbsde/errors.hpp"

namespace rbsde {

enum class ZNorm { l2, l1 };

/// Driver g(t, y, z) of a backward equation together with the metadata the
/// rest of the library relies on: declared Lipschitz constants, structural
/// flags, and (optionally) a dominating slope mu for the |z|-driver
/// comparisons. The constants are declared, never inferred; construction
/// spot-checks catch obvious lies early and validate_generator probes harder.
class Generator {
 public:
  using Fn = std::function<double(double t, double y, std::span<const double> z)>;

  Generator(std::string name, int zdim, Fn fn, double lip_y, double lip_z,
            bool y_independent, bool zero_at_zero,
            std::optional<double> mu = std::nullopt, bool spot_check = true)
      : name_(std::move(name)),
        zdim_(zdim),
        fn_(std::move(fn)),
        lip_y_(lip_y),
        lip_z_(lip_z),
        y_independent_(y_independent),
        zero_at_zero_(zero_at_zero),
        mu_(mu) {
    if (zdim_ < 1) throw ParameterError("Generator: z dimension must be >= 1");
    if (lip_y_ < 0.0 || lip_z_ < 0.0)
      throw ParameterError("Generator: Lipschitz constants must be >= 0");
    if (!fn_) throw ParameterError("Generator: missing evaluation map");
    if (spot_check) run_spot_checks();
  }

  double operator()(double t, double y, std::span<const double> z) const {
    return fn_(t, y, z);
  }

  const std::string& name() const { return name_; }
  int zdim() const { return zdim_; }
  double lip_y() const { return lip_y_; }
  double lip_z() const { return lip_z_; }
  bool y_independent() const { return y_independent_; }
  bool zero_at_zero() const { return zero_at_zero_; }
  std::optional<double> mu() const { return mu_; }

  /// Slope used by the |z|-driver comparison checks: the declared mu if
  /// present, otherwise the declared Lipschitz constant in z.
  double dominating_mu() const { return mu_ ? *mu_ : lip_z_; }

  // ---- built-in catalog ----

  static Generator zero(int zdim = 1) {
    return Generator("ZERO", zdim,
                     [](double, double, std::span<const double>) { return 0.0; },
                     0.0, 0.0, true, true, 0.0);
  }

  /// g = <b, z>.
  static Generator linear(std::vector<double> b) {
    if (b.empty()) throw ParameterError("LINEAR: empty coefficient vector");
    double norm = 0.0;
    for (double x : b) norm += x * x;
    norm = std::sqrt(norm);
    const int zdim = static_cast<int>(b.size());
    auto coef = std::make_shared<std::vector<double>>(std::move(b));
    return Generator(
        "LINEAR", zdim,
        [coef](double, double, std::span<const double> z) {
          double s = 0.0;
          for (std::size_t c = 0; c < coef->size(); ++c) s += (*coef)[c] * z[c];
          return s;
        },
        0.0, norm, true, true, norm);
  }

  /// g = mu * ||z||. The reference driver of the whole library.
  static Generator emu(double mu, int zdim = 1, ZNorm norm = ZNorm::l2) {
    if (mu < 0.0) throw ParameterError("EMU: mu must be >= 0");
    return Generator(
        "EMU", zdim,
        [mu, norm](double, double, std::span<const double> z) {
          return mu * znorm(z, norm);
        },
        0.0, mu, true, true, mu);
  }

  /// g = -mu * ||z||, the lower companion of emu.
  static Generator neg_emu(double mu, int zdim = 1, ZNorm norm = ZNorm::l2) {
    if (mu < 0.0) throw ParameterError("NEG_EMU: mu must be >= 0");
    return Generator(
        "NEG_EMU", zdim,
        [mu, norm](double, double, std::span<const double> z) {
          return -mu * znorm(z, norm);
        },
        0.0, mu, true, true, mu);
  }

  /// g = -rate * y; plain discounting for the pricing runs.
  static Generator discount(double rate, int zdim = 1) {
    if (rate < 0.0) throw ParameterError("DISCOUNT: rate must be >= 0");
    return Generator(
        "DISCOUNT", zdim,
        [rate](double, double y, std::span<const double>) { return -rate * y; },
        rate, 0.0, false, true, 0.0);
  }

 private:
  static double znorm(std::span<const double> z, ZNorm norm) {
    if (norm == ZNorm::l1) {
      double s = 0.0;
      for (double x : z) s += std::abs(x);
      return s;
    }
    double s = 0.0;
    for (double x : z) s += x * x;
    return std::sqrt(s);
  }

  /// Cheap construction-time probes: zero-at-zero on a 10^3 point grid and
  /// the declared z-Lipschitz bound on 10^3 random pairs. These are sanity
  /// checks, not proofs; validate_generator does the configurable version.
  void run_spot_checks() const {
    std::vector<double> z0(zdim_, 0.0);
    if (zero_at_zero_) {
      for (int k = 0; k < 1000; ++k) {
        const double t = 10.0 * k / 999.0;
        const double y = y_independent_ ? -5.0 + 10.0 * ((k * 7) % 1000) / 999.0
                                        : 0.0;
        if (std::abs(fn_(t, y, z0)) > 1e-12)
          throw ParameterError("Generator " + name_ +
                               ": zero_at_zero declared but g(t, y, 0) != 0");
      }
    }
    std::mt19937_64 eng(0x67656e5f63686bULL);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<double> za(zdim_), zb(zdim_);
    for (int k = 0; k < 1000; ++k) {
      const double t = 0.01 * (k % 100);
      const double y = y_independent_ ? 0.0 : u(eng);
      double dist = 0.0;
      for (int c = 0; c < zdim_; ++c) {
        za[c] = u(eng);
        zb[c] = u(eng);
        dist += (za[c] - zb[c]) * (za[c] - zb[c]);
      }
      dist = std::sqrt(dist);
      const double gap = std::abs(fn_(t, y, za) - fn_(t, y, zb));
      if (gap > lip_z_ * dist * (1.0 + 1e-10) + 1e-14)
        throw ParameterError("Generator " + name_ +
                             ": declared z-Lipschitz constant violated");
    }
  }

  std::string name_;
  int zdim_;
  Fn fn_;
  double lip_y_;
  double lip_z_;
  bool y_independent_;
  bool zero_at_zero_;
  std::optional<double> mu_;
};

/// Probe box for validate_generator.
struct ProbeBox {
  double t_max = 1.0;
  double y_bound = 5.0;
  double z_bound = 5.0;
};

struct GeneratorCheck {
  double worst_y_ratio = 0.0;
  double worst_z_ratio = 0.0;
  bool pass = true;
  // witness of the worst z-ratio probe
  double t = 0.0, y = 0.0;
  std::vector<double> za, zb;
};

/// Monte-Carlo check of the declared Lipschitz constants on a box. Fails if
/// an observed difference quotient exceeds the declaration by more than
/// 1e-10 relative.
inline GeneratorCheck validate_generator(const Generator& gen, int probes,
                                         const ProbeBox& box,
                                         std::uint64_t seed = 0x76616c6964ULL) {
  if (probes < 1) throw ParameterError("validate_generator: probes must be >= 1");
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> ut(0.0, box.t_max);
  std::uniform_real_distribution<double> uy(-box.y_bound, box.y_bound);
  std::uniform_real_distribution<double> uz(-box.z_bound, box.z_bound);
  GeneratorCheck out;
  out.za.resize(gen.zdim());
  out.zb.resize(gen.zdim());
  std::vector<double> z(gen.zdim()), za(gen.zdim()), zb(gen.zdim());
  for (int k = 0; k < probes; ++k) {
    const double t = ut(eng);
    // y direction, z held fixed
    const double y1 = uy(eng), y2 = uy(eng);
    for (int c = 0; c < gen.zdim(); ++c) z[c] = uz(eng);
    if (y1 != y2) {
      const double r = std::abs(gen(t, y1, z) - gen(t, y2, z)) / std::abs(y1 - y2);
      out.worst_y_ratio = std::max(out.worst_y_ratio, r);
    }
    // z direction, y held fixed
    const double y = uy(eng);
    double dist = 0.0;
    for (int c = 0; c < gen.zdim(); ++c) {
      za[c] = uz(eng);
      zb[c] = uz(eng);
      dist += (za[c] - zb[c]) * (za[c] - zb[c]);
    }
    dist = std::sqrt(dist);
    if (dist > 0.0) {
      const double r = std::abs(gen(t, y, za) - gen(t, y, zb)) / dist;
      if (r > out.worst_z_ratio) {
        out.worst_z_ratio = r;
        out.t = t;
        out.y = y;
        out.za = za;
        out.zb = zb;
      }
    }
  }
  out.pass = out.worst_y_ratio <= gen.lip_y() * (1.0 + 1e-10) + 1e-14 &&
             out.worst_z_ratio <= gen.lip_z() * (1.0 + 1e-10) + 1e-14;
  return out;
}

}  // namespace rbsde
