#include "hydrolab/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hydrolab/random.hpp"

namespace hydrolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kMaxTerms = 50000000;

std::int64_t signed_floor(std::int64_t n, double magnitude) {
  if (!(magnitude < 9.0e18)) throw std::overflow_error("sequence term overflows");
  const auto v = static_cast<std::int64_t>(std::floor(magnitude));
  return n < 0 ? -v : v;
}

}  // namespace

Environment::Environment(Window window, std::vector<double> values, DisorderLaw law,
                         std::vector<std::int64_t> defects, nlohmann::json provenance)
    : window_(window), values_(std::move(values)), law_(std::move(law)),
      defects_(std::move(defects)), provenance_(std::move(provenance)) {
  if (window_.size() <= 0 || static_cast<std::size_t>(window_.size()) != values_.size())
    throw std::invalid_argument("environment window and values disagree");
  for (double a : values_)
    if (!(a >= law_.floor() - 1e-12 && a <= 1.0)) throw std::invalid_argument("environment value outside [c, 1]");
}

double Environment::at(std::int64_t x) const {
  if (!contains(x)) throw std::out_of_range("site outside environment window");
  return (*this)(x);
}

nlohmann::json Environment::to_json() const {
  return {{"window", {window_.lo, window_.hi}},
          {"values", values_},
          {"law", hydrolab::to_json(law_)},
          {"defects", defects_},
          {"provenance", provenance_}};
}

Environment Environment::from_json(const nlohmann::json& j) {
  Window w{j.at("window").at(0).get<std::int64_t>(), j.at("window").at(1).get<std::int64_t>()};
  return Environment(w, j.at("values").get<std::vector<double>>(), disorder_from_json(j.at("law")),
                     j.value("defects", std::vector<std::int64_t>{}), j.value("provenance", nlohmann::json{}));
}

Environment sample_iid(const DisorderLaw& law, std::uint64_t seed, Window window,
                       std::optional<double> floor_override) {
  if (window.size() <= 0) throw std::invalid_argument("empty window");
  const DisorderLaw used = floor_override ? law.with_floor(*floor_override) : law.with_floor(law.support_min());
  std::vector<double> values(static_cast<std::size_t>(window.size()));
  for (std::int64_t x = window.lo; x <= window.hi; ++x)
    values[static_cast<std::size_t>(x - window.lo)] =
        used.quantile(to_unit(derive_seed(seed, 0x656e76ULL, static_cast<std::uint64_t>(x))));
  nlohmann::json prov = {{"kind", "iid"}, {"seed", seed}};
  return Environment(window, std::move(values), used, {}, prov);
}

SequenceSpec SequenceSpec::power(double kappa) {
  SequenceSpec s;
  s.kind = Kind::power;
  s.kappa = kappa;
  return s;
}

SequenceSpec SequenceSpec::geometric(double kappa) {
  SequenceSpec s;
  s.kind = Kind::geometric;
  s.kappa = kappa;
  return s;
}

std::int64_t SequenceSpec::term(std::int64_t n) const {
  switch (kind) {
    case Kind::power:
      if (n == 0) return 0;
      return signed_floor(n, std::pow(std::abs(static_cast<double>(n)), kappa));
    case Kind::geometric:
      if (n == 0) return 0;
      return signed_floor(n, std::pow(kappa, std::abs(static_cast<double>(n))));
    case Kind::explicit_list: {
      const std::int64_t i = n - first_index;
      if (i < 0 || i >= static_cast<std::int64_t>(values.size()))
        throw std::out_of_range("sequence does not cover window");
      return values[static_cast<std::size_t>(i)];
    }
  }
  return 0;
}

double DefectValues::at(std::int64_t n, double c) const {
  switch (kind) {
    case Kind::standard:
      return c + (1.0 - c) / (static_cast<double>(std::abs(n)) + 2.0);
    case Kind::constant:
      return value;
    case Kind::explicit_list: {
      const std::int64_t i = n - first_index;
      if (i < 0 || i >= static_cast<std::int64_t>(values.size()))
        throw std::out_of_range("defect values do not cover window");
      return values[static_cast<std::size_t>(i)];
    }
  }
  return c;
}

SequenceTerms sequence_terms(const SequenceSpec& seq, std::int64_t lo, std::int64_t hi) {
  SequenceTerms out;
  if (seq.kind == SequenceSpec::Kind::explicit_list) {
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
      out.index.push_back(seq.first_index + static_cast<std::int64_t>(i));
      out.value.push_back(seq.values[i]);
    }
  } else {
    if (!(seq.kappa > 1.0)) throw std::invalid_argument("invalid spec: kappa must exceed 1");
    std::vector<std::int64_t> neg_idx;
    std::vector<std::int64_t> neg_val;
    for (std::int64_t n = -1; n > -kMaxTerms; --n) {
      const std::int64_t v = seq.term(n);
      neg_idx.push_back(n);
      neg_val.push_back(v);
      if (v <= lo) break;
    }
    if (lo >= 0) {
      neg_idx.clear();
      neg_val.clear();
    }
    for (std::size_t i = neg_idx.size(); i-- > 0;) {
      out.index.push_back(neg_idx[i]);
      out.value.push_back(neg_val[i]);
    }
    for (std::int64_t n = 0; n < kMaxTerms; ++n) {
      const std::int64_t v = seq.term(n);
      out.index.push_back(n);
      out.value.push_back(v);
      if (v > hi) break;
    }
  }
  for (std::size_t i = 1; i < out.value.size(); ++i)
    if (out.value[i] <= out.value[i - 1]) throw std::invalid_argument("invalid spec: sequence not strictly increasing");
  if (out.value.empty() || out.value.front() > lo || out.value.back() <= hi)
    throw std::out_of_range("sequence does not cover window");
  return out;
}

std::vector<double> uniform_field(const SequenceSpec& y, Window window) {
  const SequenceTerms t = sequence_terms(y, window.lo, window.hi);
  std::vector<double> u(static_cast<std::size_t>(window.size()));
  std::size_t k = 0;
  for (std::int64_t x = window.lo; x <= window.hi; ++x) {
    while (k + 1 < t.value.size() && t.value[k + 1] <= x) ++k;
    const double a = static_cast<double>(t.value[k]);
    const double b = static_cast<double>(t.value[k + 1]);
    u[static_cast<std::size_t>(x - window.lo)] = (static_cast<double>(x) - a) / (b - a);
  }
  return u;
}

Environment build_deterministic(const DeterministicEnvSpec& spec, Window window) {
  if (window.size() <= 0) throw std::invalid_argument("invalid spec: empty window");
  const DisorderLaw& law = spec.law;
  const double c = law.floor();
  const bool use_defects = c < law.support_min();

  const std::vector<double> u = uniform_field(spec.uniform, window);
  std::vector<double> alpha(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) alpha[i] = law.quantile(u[i]);

  std::vector<std::int64_t> defects;
  if (use_defects) {
    const SequenceTerms xs = sequence_terms(spec.defects, window.lo, window.hi);
    for (std::size_t i = 0; i < xs.value.size(); ++i) {
      const std::int64_t x = xs.value[i];
      if (!window.contains(x)) continue;
      const double a = spec.defect_values.at(xs.index[i], c);
      if (!(a >= c && a <= 1.0)) throw std::invalid_argument("invalid spec: defect value outside [c, 1]");
      alpha[static_cast<std::size_t>(x - window.lo)] = a;
      defects.push_back(x);
    }
  } else {
    const SequenceTerms ys = sequence_terms(spec.uniform, window.lo, window.hi);
    for (std::int64_t y : ys.value)
      if (window.contains(y)) defects.push_back(y);
  }
  nlohmann::json prov = {{"kind", "deterministic"}, {"spec", to_json(spec)}};
  return Environment(window, std::move(alpha), law, std::move(defects), prov);
}

double ks_distance(std::vector<double> sample, const DisorderLaw& law) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j < sample.size() && sample[j] == sample[i]) ++j;
    const double v = sample[i];
    d = std::max(d, std::abs(static_cast<double>(i) / m - law.cdf_left(v)));
    d = std::max(d, std::abs(static_cast<double>(j) / m - law.cdf(v)));
    i = j;
  }
  for (const auto& atom : law.atoms()) {
    const auto below = std::lower_bound(sample.begin(), sample.end(), atom.location) - sample.begin();
    const auto upto = std::upper_bound(sample.begin(), sample.end(), atom.location) - sample.begin();
    d = std::max(d, std::abs(static_cast<double>(below) / m - law.cdf_left(atom.location)));
    d = std::max(d, std::abs(static_cast<double>(upto) / m - law.cdf(atom.location)));
  }
  return d;
}

EmpiricalLaw empirical_law(const Environment& env, std::int64_t n) {
  if (n < 1 || !env.contains(-n) || !env.contains(n)) throw std::out_of_range("window does not cover [-n, n]");
  EmpiricalLaw out;
  for (std::int64_t x = 0; x <= n; ++x) out.right.push_back(env(x));
  for (std::int64_t x = -n; x <= 0; ++x) out.left.push_back(env(x));
  std::sort(out.right.begin(), out.right.end());
  std::sort(out.left.begin(), out.left.end());
  out.ks_right = ks_distance(out.right, env.law());
  out.ks_left = ks_distance(out.left, env.law());
  return out;
}

DefectRadii defect_radii(const Environment& env, std::int64_t x0, double eps) {
  if (!env.contains(x0)) throw std::out_of_range("site outside environment window");
  if (!(eps >= 0.0)) throw std::domain_error("negative eps");
  const double thr = env.floor() + eps;
  DefectRadii r{-kInf, kInf};
  for (std::int64_t x = x0; x <= env.x_max(); ++x)
    if (env(x) <= thr) {
      r.right = static_cast<double>(x - x0);
      break;
    }
  for (std::int64_t x = x0; x >= env.x_min(); --x)
    if (env(x) <= thr) {
      r.left = static_cast<double>(x - x0);
      break;
    }
  return r;
}

namespace {

template <class Fn>
ConditionCheck vanishing(std::string name, std::int64_t n_edge, Fn&& fn) {
  ConditionCheck c;
  c.name = std::move(name);
  c.at_edge = fn(n_edge);
  c.at_quarter = fn(std::max<std::int64_t>(1, n_edge / 4));
  c.pass = c.at_edge < 0.1 && (c.at_edge == 0.0 || c.at_edge < 0.9 * c.at_quarter);
  return c;
}

std::int64_t edge_index(const SequenceSpec& seq, std::int64_t edge) {
  const SequenceTerms t = sequence_terms(seq, -edge, edge);
  std::int64_t best = 1;
  for (std::size_t i = 0; i + 1 < t.value.size(); ++i)
    if (t.index[i] >= 1 && t.value[i + 1] <= edge) best = std::max(best, t.index[i]);
  return best;
}

double ratio_gap(const SequenceSpec& s, std::int64_t n) {
  const double right = static_cast<double>(s.term(n + 1)) / static_cast<double>(s.term(n)) - 1.0;
  double left = 0.0;
  try {
    left = static_cast<double>(s.term(-n - 1)) / static_cast<double>(s.term(-n)) - 1.0;
  } catch (const std::out_of_range&) {
  }
  return std::max(right, left);
}

double growth(const SequenceSpec& s, std::int64_t n) {
  return static_cast<double>(n) / static_cast<double>(std::abs(s.term(n)));
}

}  // namespace

nlohmann::json AssumptionReport::to_json() const {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : conditions)
    conds.push_back({{"name", c.name}, {"at_edge", c.at_edge}, {"at_quarter", c.at_quarter}, {"pass", c.pass}});
  return {{"conditions", conds},
          {"empirical_law_condition", empirical_law_condition},
          {"dense_defects", dense_defects},
          {"all_pass", all_pass()}};
}

AssumptionReport check_assumptions(const DeterministicEnvSpec& spec, std::int64_t edge) {
  AssumptionReport rep;
  const bool use_defects = spec.law.floor() < spec.law.support_min();
  const std::int64_t ny = edge_index(spec.uniform, edge);
  auto y_ratio = vanishing("y_ratio", ny, [&](std::int64_t n) { return ratio_gap(spec.uniform, n); });
  auto y_growth = vanishing("y_growth", ny, [&](std::int64_t n) { return growth(spec.uniform, n); });
  rep.conditions = {y_ratio, y_growth};
  rep.empirical_law_condition = y_ratio.pass && y_growth.pass;
  rep.dense_defects = y_ratio.pass;
  if (use_defects) {
    const std::int64_t nx = edge_index(spec.defects, edge);
    auto x_ratio = vanishing("x_ratio", nx, [&](std::int64_t n) { return ratio_gap(spec.defects, n); });
    auto x_growth = vanishing("x_growth", nx, [&](std::int64_t n) { return growth(spec.defects, n); });
    rep.conditions.push_back(x_ratio);
    rep.conditions.push_back(x_growth);
    rep.empirical_law_condition = rep.empirical_law_condition && x_growth.pass;
    rep.dense_defects = x_ratio.pass;
  }
  return rep;
}

AssumptionReport check_assumptions(const Environment& env, double eps) {
  AssumptionReport rep;
  const std::int64_t half = std::min(-env.x_min(), env.x_max());
  if (half < 8) throw std::out_of_range("window too small for diagnostics");
  const EmpiricalLaw emp = empirical_law(env, half);
  ConditionCheck ks{"ks_distance", std::max(emp.ks_left, emp.ks_right), 0.0, false};
  ks.pass = ks.at_edge < 0.05;

  const double thr = env.floor() + eps;
  std::vector<std::int64_t> right;
  std::vector<std::int64_t> left;
  for (std::int64_t x = 1; x <= half; ++x) {
    if (env(x) <= thr) right.push_back(x);
    if (env(-x) <= thr) left.push_back(x);
  }
  auto gap_at = [](const std::vector<std::int64_t>& d, std::size_t k) {
    return static_cast<double>(d[k + 1]) / static_cast<double>(d[k]) - 1.0;
  };
  ConditionCheck dense{"slow_site_ratio", kInf, kInf, false};
  if (right.size() >= 8 && left.size() >= 8) {
    dense.at_edge = std::max(gap_at(right, right.size() - 2), gap_at(left, left.size() - 2));
    dense.at_quarter = std::max(gap_at(right, right.size() / 4), gap_at(left, left.size() / 4));
    dense.pass = dense.at_edge < 0.1;
  }
  rep.conditions = {ks, dense};
  rep.empirical_law_condition = ks.pass;
  rep.dense_defects = dense.pass;
  return rep;
}

nlohmann::json to_json(const DisorderLaw& law) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : law.atoms()) atoms.push_back({a.location, a.weight});
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : law.pieces())
    pieces.push_back({{"lo", p.lo}, {"hi", p.hi}, {"mass", p.mass}, {"exponent", p.exponent}});
  return {{"atoms", atoms}, {"pieces", pieces}, {"floor", law.floor()}};
}

DisorderLaw disorder_from_json(const nlohmann::json& j) {
  std::vector<Atom> atoms;
  for (const auto& a : j.value("atoms", nlohmann::json::array()))
    atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  std::vector<PowerLawPiece> pieces;
  for (const auto& p : j.value("pieces", nlohmann::json::array()))
    pieces.push_back({p.at("lo").get<double>(), p.at("hi").get<double>(), p.value("mass", 1.0),
                      p.value("exponent", 0.0)});
  std::optional<double> floor;
  if (j.contains("floor") && !j.at("floor").is_null()) floor = j.at("floor").get<double>();
  return DisorderLaw(std::move(atoms), std::move(pieces), floor);
}

namespace {

nlohmann::json seq_json(const SequenceSpec& s) {
  switch (s.kind) {
    case SequenceSpec::Kind::power:
      return {{"family", "power"}, {"kappa", s.kappa}};
    case SequenceSpec::Kind::geometric:
      return {{"family", "geometric"}, {"kappa", s.kappa}};
    case SequenceSpec::Kind::explicit_list:
      return {{"family", "explicit"}, {"values", s.values}, {"first_index", s.first_index}};
  }
  return {};
}

SequenceSpec seq_from_json(const nlohmann::json& j) {
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "power") return SequenceSpec::power(j.at("kappa").get<double>());
  if (fam == "geometric") return SequenceSpec::geometric(j.at("kappa").get<double>());
  if (fam == "explicit") {
    SequenceSpec s;
    s.kind = SequenceSpec::Kind::explicit_list;
    s.values = j.at("values").get<std::vector<std::int64_t>>();
    s.first_index = j.value("first_index", std::int64_t{0});
    return s;
  }
  throw std::invalid_argument("invalid spec: unknown sequence family " + fam);
}

}  // namespace

nlohmann::json to_json(const DeterministicEnvSpec& spec) {
  nlohmann::json dv;
  switch (spec.defect_values.kind) {
    case DefectValues::Kind::standard:
      dv = {{"kind", "standard"}};
      break;
    case DefectValues::Kind::constant:
      dv = {{"kind", "constant"}, {"value", spec.defect_values.value}};
      break;
    case DefectValues::Kind::explicit_list:
      dv = {{"kind", "explicit"}, {"values", spec.defect_values.values},
            {"first_index", spec.defect_values.first_index}};
      break;
  }
  return {{"defects", seq_json(spec.defects)},
          {"uniform", seq_json(spec.uniform)},
          {"defect_values", dv},
          {"law", to_json(spec.law)}};
}

DeterministicEnvSpec deterministic_spec_from_json(const nlohmann::json& j) {
  DeterministicEnvSpec s;
  if (j.contains("defects")) s.defects = seq_from_json(j.at("defects"));
  if (j.contains("uniform")) s.uniform = seq_from_json(j.at("uniform"));
  s.law = disorder_from_json(j.at("law"));
  if (j.contains("defect_values")) {
    const auto& dv = j.at("defect_values");
    const std::string kind = dv.value("kind", std::string("standard"));
    if (kind == "standard") {
      s.defect_values.kind = DefectValues::Kind::standard;
    } else if (kind == "constant") {
      s.defect_values.kind = DefectValues::Kind::constant;
      s.defect_values.value = dv.at("value").get<double>();
    } else if (kind == "explicit") {
      s.defect_values.kind = DefectValues::Kind::explicit_list;
      s.defect_values.values = dv.at("values").get<std::vector<double>>();
      s.defect_values.first_index = dv.value("first_index", std::int64_t{0});
    } else {
      throw std::invalid_argument("invalid spec: unknown defect value kind " + kind);
    }
  }
  return s;
}

}  // namespace hydrolab
