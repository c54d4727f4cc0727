#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydrolab/disorder.hpp"

namespace hydrolab {

/// Inclusive integer window [lo, hi].
struct Window {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t size() const noexcept { return hi - lo + 1; }
  bool contains(std::int64_t x) const noexcept { return x >= lo && x <= hi; }
  friend bool operator==(const Window&, const Window&) = default;
};

/// Realised environment alpha on a finite window.
class Environment {
 public:
  Environment() = default;
  Environment(Window window, std::vector<double> values, DisorderLaw law,
              std::vector<std::int64_t> defects = {}, nlohmann::json provenance = {});

  const Window& window() const noexcept { return window_; }
  std::int64_t x_min() const noexcept { return window_.lo; }
  std::int64_t x_max() const noexcept { return window_.hi; }
  std::size_t size() const noexcept { return values_.size(); }
  bool contains(std::int64_t x) const noexcept { return window_.contains(x); }

  double operator()(std::int64_t x) const noexcept { return values_[static_cast<std::size_t>(x - window_.lo)]; }
  double at(std::int64_t x) const;
  const std::vector<double>& values() const noexcept { return values_; }

  double floor() const noexcept { return law_.floor(); }
  const DisorderLaw& law() const noexcept { return law_; }
  /// Designated slow sites inside the window.
  const std::vector<std::int64_t>& defects() const noexcept { return defects_; }
  const nlohmann::json& provenance() const noexcept { return provenance_; }

  nlohmann::json to_json() const;
  static Environment from_json(const nlohmann::json& j);

 private:
  Window window_;
  std::vector<double> values_;
  DisorderLaw law_;
  std::vector<std::int64_t> defects_;
  nlohmann::json provenance_;
};

/// Environment floor equal to C unless floor_override is given (must not exceed C).
Environment sample_iid(const DisorderLaw& law, std::uint64_t seed, Window window,
                       std::optional<double> floor_override = std::nullopt);

/// Integer sequence indexed by n in Z, strictly increasing.
struct SequenceSpec {
  enum class Kind { power, geometric, explicit_list };
  Kind kind = Kind::power;
  double kappa = 2.0;
  /// For explicit_list: values[i] is the term of index first_index + i.
  std::vector<std::int64_t> values;
  std::int64_t first_index = 0;
  /// Power and geometric families take the value 0 at n = 0.
  std::int64_t term(std::int64_t n) const;

  static SequenceSpec power(double kappa);
  static SequenceSpec geometric(double kappa);
};

struct DefectValues {
  enum class Kind { standard, constant, explicit_list };
  Kind kind = Kind::standard;
  double value = 0.0;
  std::vector<double> values;
  std::int64_t first_index = 0;
  /// alpha_n; standard is c + (1 - c) / (|n| + 2).
  double at(std::int64_t n, double c) const;
};

struct DeterministicEnvSpec {
  SequenceSpec defects = SequenceSpec::power(2.0);
  SequenceSpec uniform = SequenceSpec::power(2.0);
  DefectValues defect_values;
  DisorderLaw law;
};

/// Terms of a sequence whose values reach beyond [lo, hi], with their indices.
struct SequenceTerms {
  std::vector<std::int64_t> index;
  std::vector<std::int64_t> value;
};
SequenceTerms sequence_terms(const SequenceSpec& seq, std::int64_t lo, std::int64_t hi);

/// u(x) = (x - y_n) / (y_{n+1} - y_n) on [y_n, y_{n+1}).
std::vector<double> uniform_field(const SequenceSpec& y, Window window);

Environment build_deterministic(const DeterministicEnvSpec& spec, Window window);

struct EmpiricalLaw {
  std::vector<double> right;  // sorted alpha(0..n)
  std::vector<double> left;   // sorted alpha(-n..0)
  double ks_right = 0.0;
  double ks_left = 0.0;
};

/// Two-sided empirical laws over [0, n] and [-n, 0] with KS distances to Q0.
EmpiricalLaw empirical_law(const Environment& env, std::int64_t n);
double ks_distance(std::vector<double> sample, const DisorderLaw& law);

/// Offsets (A_eps, a_eps) of the nearest sites left and right of x0 with alpha <= c + eps.
/// Absent sites give -inf and +inf.
struct DefectRadii {
  double left = 0.0;
  double right = 0.0;
};
DefectRadii defect_radii(const Environment& env, std::int64_t x0, double eps);

struct ConditionCheck {
  std::string name;
  double at_edge = 0.0;
  double at_quarter = 0.0;
  bool pass = false;
};

struct AssumptionReport {
  std::vector<ConditionCheck> conditions;
  bool empirical_law_condition = false;  // uniform ratio and growth conditions
  bool dense_defects = false;
  bool all_pass() const noexcept { return empirical_law_condition && dense_defects; }
  nlohmann::json to_json() const;
};

/// Finite-window diagnostics of the sequence conditions, measured at |index| reaching edge.
AssumptionReport check_assumptions(const DeterministicEnvSpec& spec, std::int64_t edge = 1000000);
/// Spacing diagnostics of sites with alpha <= c + eps inside a realised window.
AssumptionReport check_assumptions(const Environment& env, double eps = 0.05);

nlohmann::json to_json(const DeterministicEnvSpec& spec);
DeterministicEnvSpec deterministic_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DisorderLaw& law);
DisorderLaw disorder_from_json(const nlohmann::json& j);

}  // namespace hydrolab
