#ifndef SEPCA_MODEL_HPP
#define SEPCA_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sepca/matrix.hpp"
#include "sepca/rng.hpp"

namespace sepca {

inline constexpr double kUnitNormTolerance = 1e-12;

/// Optional sink for non-fatal diagnostics (e.g. silent normalization).
using WarningSink = std::function<void(const std::string&)>;

inline bool is_equisigned(std::span<const double> v) {
  bool any_pos = false, any_neg = false;
  for (double x : v) {
    any_pos = any_pos || x > 0;
    any_neg = any_neg || x < 0;
  }
  return !(any_pos && any_neg);
}

inline IndexSet support_of(std::span<const double> u) {
  IndexSet s;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) s.push_back(i);
  return s;
}

/// Ground truth for X = theta u v^T + sigma G, G_ij ~ N(0, 1/n).
class SignalModel {
 public:
  SignalModel(double theta, Vector u, Vector v, double sigma, bool v_equisigned = true)
      : theta_(theta), u_(std::move(u)), v_(std::move(v)), sigma_(sigma), equisigned_(v_equisigned) {
    if (!(theta_ >= 0.0) || !std::isfinite(theta_)) throw std::invalid_argument("SignalModel: theta must be finite and >= 0");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw std::invalid_argument("SignalModel: sigma must be finite and >= 0");
    if (u_.empty() || v_.empty()) throw std::invalid_argument("SignalModel: u and v must be nonempty");
    if (std::abs(norm2(u_) - 1.0) > kUnitNormTolerance) throw std::invalid_argument("SignalModel: u must have unit l2 norm");
    if (std::abs(norm2(v_) - 1.0) > kUnitNormTolerance) throw std::invalid_argument("SignalModel: v must have unit l2 norm");
    if (equisigned_ && !is_equisigned(v_)) throw std::invalid_argument("SignalModel: v flagged equisigned but has mixed signs");
    support_ = support_of(u_);
  }

  double theta() const noexcept { return theta_; }
  double sigma() const noexcept { return sigma_; }
  const Vector& u() const noexcept { return u_; }
  const Vector& v() const noexcept { return v_; }
  std::size_t p() const noexcept { return u_.size(); }
  std::size_t n() const noexcept { return v_.size(); }
  std::size_t sparsity() const noexcept { return support_.size(); }
  const IndexSet& support() const noexcept { return support_; }
  bool v_equisigned() const noexcept { return equisigned_; }

 private:
  double theta_;
  Vector u_;
  Vector v_;
  double sigma_;
  bool equisigned_;
  IndexSet support_;
};

/// Draws X = theta u v^T + sigma G. Bit-identical for identical (model, seed) in one build.
inline DataMatrix generate_data(const SignalModel& model, std::uint64_t seed) {
  const std::size_t p = model.p(), n = model.n();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise_scale = model.sigma() / std::sqrt(static_cast<double>(n));
  Vector values(p * n);
  for (std::size_t i = 0; i < p; ++i) {
    const double a = model.theta() * model.u()[i];
    for (std::size_t k = 0; k < n; ++k) values[i * n + k] = a * model.v()[k] + noise_scale * gauss(rng);
  }
  return DataMatrix(p, n, std::move(values));
}

// ---------------------------------------------------------------------------
// Right singular vector profiles

struct VProfile {
  enum class Kind { rise_fall, power_decay, uniform, custom };
  Kind kind = Kind::uniform;
  Vector custom;  // used when kind == custom
};

inline VProfile::Kind parse_v_kind(const std::string& name) {
  if (name == "rise-fall") return VProfile::Kind::rise_fall;
  if (name == "power-decay") return VProfile::Kind::power_decay;
  if (name == "uniform") return VProfile::Kind::uniform;
  if (name == "custom") return VProfile::Kind::custom;
  throw std::invalid_argument("unknown v profile '" + name + "' (expected rise-fall, power-decay, uniform or custom)");
}

inline std::string to_string(VProfile::Kind kind) {
  switch (kind) {
    case VProfile::Kind::rise_fall: return "rise-fall";
    case VProfile::Kind::power_decay: return "power-decay";
    case VProfile::Kind::uniform: return "uniform";
    case VProfile::Kind::custom: return "custom";
  }
  return "?";
}

/// Unit-norm right singular vector of length n. Custom vectors are rescaled;
/// the applied scale is reported on `warn` when it differs from 1.
inline Vector make_v(const VProfile& profile, std::size_t n, const WarningSink& warn = {}) {
  if (n == 0) throw std::invalid_argument("make_v: n must be >= 1");
  Vector v(n);
  const double dn = static_cast<double>(n);
  switch (profile.kind) {
    case VProfile::Kind::rise_fall:
      for (std::size_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k) / dn;
        v[k - 1] = std::exp(-5.0 * x) * std::abs(std::sin(4.0 * x));
      }
      break;
    case VProfile::Kind::power_decay:
      for (std::size_t k = 1; k <= n; ++k) v[k - 1] = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
      break;
    case VProfile::Kind::uniform:
      for (double& x : v) x = 1.0;
      break;
    case VProfile::Kind::custom:
      if (profile.custom.size() != n)
        throw std::invalid_argument("make_v: custom profile has length " + std::to_string(profile.custom.size()) +
                                    ", expected " + std::to_string(n));
      v = profile.custom;
      break;
  }
  const double norm = norm2(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("make_v: profile has zero or non-finite norm");
  const double scale = 1.0 / norm;
  for (double& x : v) x *= scale;
  if (profile.kind == VProfile::Kind::custom && warn && std::abs(scale - 1.0) > kUnitNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "custom v normalized to unit l2 norm (scale " << scale << ")";
    warn(msg.str());
  }
  return v;
}

// ---------------------------------------------------------------------------
// Sparse left singular vectors

/// Values placed on an explicit support (0-based); empty `values` means equal entries.
struct ExplicitSupport {
  IndexSet indices;
  Vector values;
};

/// u_0 = sqrt(1 - r^2), u_1..u_m = r / sqrt(m), zero elsewhere.
struct WorstCase {
  std::size_t m = 1;
  double r = 0.0;
};

using USpec = std::variant<ExplicitSupport, WorstCase>;

inline Vector make_u(std::size_t p, const USpec& spec) {
  Vector u(p, 0.0);
  if (const auto* ex = std::get_if<ExplicitSupport>(&spec)) {
    if (ex->indices.empty()) throw std::invalid_argument("make_u: empty support");
    if (ex->indices.size() > p) throw std::invalid_argument("make_u: support larger than p");
    if (!ex->values.empty() && ex->values.size() != ex->indices.size())
      throw std::invalid_argument("make_u: support and values differ in length");
    for (std::size_t j = 0; j < ex->indices.size(); ++j) {
      const std::size_t i = ex->indices[j];
      if (i >= p) throw std::invalid_argument("make_u: support index " + std::to_string(i) + " out of range");
      if (u[i] != 0.0) throw std::invalid_argument("make_u: duplicate support index " + std::to_string(i));
      u[i] = ex->values.empty() ? 1.0 : ex->values[j];
      if (u[i] == 0.0 || !std::isfinite(u[i])) throw std::invalid_argument("make_u: support values must be finite and nonzero");
    }
    const double scale = 1.0 / norm2(u);
    for (double& x : u) x *= scale;
    return u;
  }
  const auto& wc = std::get<WorstCase>(spec);
  if (!(wc.r >= 0.0 && wc.r < 1.0)) throw std::invalid_argument("make_u: worst-case r must lie in [0, 1)");
  if (wc.m < 1 || wc.m + 1 > p) throw std::invalid_argument("make_u: worst-case requires 1 <= m and m + 1 <= p");
  u[0] = std::sqrt(1.0 - wc.r * wc.r);
  const double tail = wc.r / std::sqrt(static_cast<double>(wc.m));
  for (std::size_t i = 1; i <= wc.m; ++i) u[i] = tail;
  return u;
}

/// First s coordinates equal to 1/sqrt(s).
inline Vector make_u_leading(std::size_t p, std::size_t s) {
  IndexSet idx(s);
  for (std::size_t i = 0; i < s; ++i) idx[i] = i;
  return make_u(p, ExplicitSupport{idx, {}});
}

}  // namespace sepca

#endif  // SEPCA_MODEL_HPP
