#include "lrtrunc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "lrtrunc/dispersion.hpp"
#include "lrtrunc/overlap.hpp"
#include "lrtrunc/percolation.hpp"
#include "lrtrunc/treepaths.hpp"

namespace lrtrunc {

namespace {

constexpr const char* kParams = "params";

/// Runs model construction and maps argument errors to ConfigError, so that
/// invalid parameters are reported before any sampling starts.
template <class F>
auto validated(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_only(const ExperimentConfig& c, const std::string& section,
                  const std::set<std::string>& allowed, const std::string& family) {
  auto it = c.sections.find(section);
  if (it == c.sections.end()) return;
  for (const auto& [key, value] : it->second)
    require(allowed.count(key) > 0,
            "[" + section + "] " + key + ": not used by family '" + family + "'");
}

std::string fmt(double x) { return format_number(x); }
std::string fmt_u(std::uint64_t x) { return std::to_string(x); }
std::string fmt_i(std::int64_t x) { return std::to_string(x); }
std::string verdict(bool ok) { return ok ? "holds" : "fails"; }

std::size_t dimension_key(const ExperimentConfig& c, const std::string& section,
                          std::int64_t fallback) {
  const auto d = c.get_i64(section, "dim", fallback);
  require(d >= 1 && d <= 16, "[" + section + "] dim must lie in 1..16");
  return static_cast<std::size_t>(d);
}

Site site_key(const ExperimentConfig& c, const std::string& key, std::size_t dim) {
  auto v = c.get_int_list(kParams, key);
  require(v.size() == dim, "[params] " + key + " must have " + std::to_string(dim) + " entries");
  return Site(v.begin(), v.end());
}

void stamp(ResultTable& t, const ExperimentConfig& c) {
  t.add_provenance("kind", c.kind());
  t.add_provenance("config_hash", config_hash(c));
  t.add_provenance("seed", std::to_string(c.seed()));
  t.add_provenance("version", version_string());
}

// ---------------------------------------------------------------------------

ResultTable run_truncation(const ExperimentConfig& c) {
  const Kernel kernel = kernel_from_config(c);
  const auto half = c.get_i64(kParams, "half_side");
  const auto shell = c.get_i64(kParams, "shell_width", 1);
  const auto radii = c.get_int_list(kParams, "radii");
  const auto trials = c.get_u64(kParams, "trials");
  const auto cap = c.get_u64(kParams, "vertex_cap", kDefaultVertexCap);
  const Norm norm = validated([&] { return parse_norm(c.get_or(kParams, "norm", "linf")); });
  require(trials >= 1, "[params] trials must be >= 1");
  require(!radii.empty(), "[params] radii must be nonempty");
  for (auto r : radii) require(r >= 1, "[params] radii must be >= 1");
  const BoxRegion region =
      validated([&] { return BoxRegion(kernel.dimension(), half, shell); });

  const auto curve =
      truncation_curve(kernel, region, radii, trials, c.seed(), c.workers(), norm, cap);
  ResultTable t({"radius", "theta_hat", "ci_low", "ci_high", "trials", "seed",
                 "containment_violations"});
  for (std::size_t j = 0; j < curve.radii.size(); ++j) {
    const auto& e = curve.estimates[j];
    t.add_row({fmt_i(curve.radii[j]), fmt(e.estimate), fmt(e.ci_low), fmt(e.ci_high),
               fmt_u(e.trials), fmt_u(e.seed), fmt_u(curve.containment_violations)});
  }
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_dispersion(const ExperimentConfig& c) {
  if (c.has(kParams, "coefficients")) {
    require(!c.has(kParams, "max_coefficient") && !c.has(kParams, "max_terms") &&
                !c.has(kParams, "max_cosine_n"),
            "[params] coefficients excludes the grid keys");
    std::vector<std::uint64_t> a;
    for (auto v : c.get_int_list(kParams, "coefficients")) {
      require(v >= 0, "[params] coefficients must be nonnegative");
      a.push_back(static_cast<std::uint64_t>(v));
    }
    require(!a.empty(), "[params] coefficients must be nonempty");
    SignedSumDistribution dist;
    try {
      dist = exact_distribution(a);
    } catch (const std::length_error& e) {
      throw ResourceLimitError(e.what());
    }
    ResultTable t({"value", "numerator", "denominator_exponent"});
    for (std::size_t i = 0; i < dist.support.size(); ++i)
      t.add_row({fmt_i(dist.support[i]), fmt_u(dist.counts[i]), fmt_u(dist.terms)});
    return t;
  }

  const auto max_coef = c.get_i64(kParams, "max_coefficient", 3);
  const auto max_terms = c.get_i64(kParams, "max_terms", 8);
  const auto max_cos = c.get_i64(kParams, "max_cosine_n", 30);
  require(max_coef >= 1, "[params] max_coefficient must be >= 1");
  require(max_terms >= 0 && max_terms <= static_cast<std::int64_t>(kEnumerationMaxTerms),
          "[params] max_terms must lie in 0..24");
  require(max_cos >= 0, "[params] max_cosine_n must be >= 0");
  // Both checks are permutation invariant, so nondecreasing vectors suffice.
  long double multisets = 1;
  for (std::int64_t n = 1; n <= max_terms; ++n)
    multisets = multisets * static_cast<long double>(max_coef - 1 + n) / n;
  if (multisets > 2e7L) throw ResourceLimitError("dispersion grid too large");

  ResultTable t({"n", "multisets", "max_point_mass", "sqrt_bound", "point_mass_bound",
                 "min_p_pos", "min_p_nonzero", "min_p_nonneg", "tail_bounds", "cosine_moment",
                 "cosine_bound"});
  const auto last = std::max(max_terms, max_cos);
  for (std::int64_t n = 1; n <= last; ++n) {
    std::vector<std::string> row(t.columns().size());
    row[0] = fmt_i(n);
    if (n <= max_terms) {
      std::uint64_t count = 0;
      double worst_mass = 0.0, min_pos = 1.0, min_nz = 1.0, min_nn = 1.0;
      bool mass_ok = true, tail_ok = true;
      std::vector<std::uint64_t> a(static_cast<std::size_t>(n), 1);
      while (true) {
        ++count;
        const auto m = max_point_mass(a);
        const auto tb = tail_bounds(a);
        worst_mass = std::max(worst_mass, m.value);
        mass_ok = mass_ok && m.holds;
        tail_ok = tail_ok && tb.all_hold();
        min_pos = std::min(min_pos, tb.p_pos);
        min_nz = std::min(min_nz, tb.p_nonzero);
        min_nn = std::min(min_nn, tb.p_nonneg);
        // Next nondecreasing vector over 1..max_coef.
        std::int64_t i = n - 1;
        while (i >= 0 && a[static_cast<std::size_t>(i)] == static_cast<std::uint64_t>(max_coef))
          --i;
        if (i < 0) break;
        const auto v = a[static_cast<std::size_t>(i)] + 1;
        for (auto j = static_cast<std::size_t>(i); j < a.size(); ++j) a[j] = v;
      }
      row[1] = fmt_u(count);
      row[2] = fmt(worst_mass);
      row[3] = fmt(1.0 / std::sqrt(static_cast<double>(n)));
      row[4] = verdict(mass_ok);
      row[5] = fmt(min_pos);
      row[6] = fmt(min_nz);
      row[7] = fmt(min_nn);
      row[8] = verdict(tail_ok);
    }
    if (n <= max_cos) {
      const auto cm = cosine_moment(static_cast<std::uint64_t>(n));
      row[9] = fmt(cm.value);
      row[10] = verdict(cm.within_sqrt_bound && cm.within_even_bound);
    }
    t.add_row(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_tree(const ExperimentConfig& c) {
  const auto max_level = c.get_i64(kParams, "max_level", 5);
  const auto table_level = c.get_i64(kParams, "table_level", 2);
  const auto ks = c.get_int_list(kParams, "predict_levels", std::vector<std::int64_t>{});
  const auto history = c.get_u64(kParams, "history_length", 0);
  const auto trials = c.get_u64(kParams, "trials", 10000);
  const auto histories = c.get_u64(kParams, "histories", 1);
  require(max_level >= 0 && max_level <= static_cast<std::int64_t>(kMaxExactLevel),
          "[params] max_level must lie in 0.." + std::to_string(kMaxExactLevel));
  require(table_level >= 0 && table_level <= max_level,
          "[params] table_level must lie in 0..max_level");
  for (auto k : ks) require(k >= 1, "[params] predict_levels must be >= 1");
  require(ks.empty() || trials >= 1, "[params] trials must be >= 1");
  require(histories >= 1, "[params] histories must be >= 1");

  ResultTable t({"record", "level", "k", "history", "value", "probability", "ci_low", "ci_high",
                 "bound", "holds"});
  for (std::int64_t n = 0; n <= max_level; ++n) {
    const auto dist = exact_levelsum(static_cast<unsigned>(n));
    const double bound = BppConstants::bound_constant * std::ldexp(1.0, -static_cast<int>(n));
    if (n == table_level) {
      for (std::size_t i = 0; i < dist.support.size(); ++i) {
        const double p = dist.probability(i);
        t.add_row({"levelsum", fmt_i(n), "", "", fmt_i(dist.support[i]), fmt(p), fmt(p),
                   fmt(p), fmt(bound), verdict(p <= bound)});
      }
    }
    const double mx = dist.max_probability();
    t.add_row({"levelmax", fmt_i(n), "", "", "", fmt(mx), fmt(mx), fmt(mx), fmt(bound),
               verdict(dist.within_bound())});
  }
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const auto k = static_cast<std::uint64_t>(ks[j]);
    const auto e = estimate_predictability(k, history, trials, derive_seed(c.seed(), j),
                                           histories, c.workers());
    const double bound = predictability_bound(k);
    t.add_row({"predictability", "", fmt_u(k), fmt_u(history), "", fmt(e.estimate),
               fmt(e.ci_low), fmt(e.ci_high), fmt(bound), verdict(e.ci_low <= bound)});
  }
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_overlap(const ExperimentConfig& c) {
  const Kernel kernel = kernel_from_config(c);
  const PathMeasure measure = measure_from_config(c, kernel);
  const auto horizons_raw = c.get_int_list(kParams, "horizons");
  const auto trials = c.get_u64(kParams, "trials");
  require(trials >= 2, "[params] trials must be >= 2");
  std::vector<std::size_t> horizons;
  for (auto h : horizons_raw) {
    require(h >= 1, "[params] horizons must be >= 1");
    horizons.push_back(static_cast<std::size_t>(h));
  }
  require(!horizons.empty(), "[params] horizons must be nonempty");

  const auto curve = overlap_curve(measure, measure, horizons, trials, c.seed(), c.workers());
  ResultTable t({"n", "estimate", "ci_low", "ci_high", "implied_lower_bound", "running_max"});
  for (const auto& p : curve)
    t.add_row({fmt_u(p.horizon), fmt(p.estimate.estimate), fmt(p.estimate.ci_low),
               fmt(p.estimate.ci_high), fmt(p.implied_lower_bound), fmt(p.running_max)});
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_intersection(const ExperimentConfig& c) {
  const Kernel kernel = kernel_from_config(c);
  const PathMeasure first = measure_from_config(c, kernel);
  PathMeasure second = first;
  if (c.has(kParams, "second_phase")) {
    require(first.tag() == MeasureTag::M2, "[params] second_phase applies to m2 only");
    const auto ph = c.get_i64(kParams, "second_phase");
    require(ph >= 0 && ph <= 5, "[params] second_phase must lie in 0..5");
    second = PathMeasure::m2(*first.m2_config(), static_cast<unsigned>(ph));
  }
  const Site offset = c.has(kParams, "offset") ? site_key(c, "offset", kernel.dimension())
                                               : Site(kernel.dimension(), 0);
  const auto h1 = c.get_i64(kParams, "horizon_first");
  const auto h2 = c.get_i64(kParams, "horizon_second", h1);
  const auto trials = c.get_u64(kParams, "trials");
  require(h1 >= 1 && h2 >= 1, "[params] horizons must be >= 1");
  require(trials >= 1, "[params] trials must be >= 1");

  const auto r = estimate_intersection(first, second, offset, static_cast<std::size_t>(h1),
                                       static_cast<std::size_t>(h2), trials, c.seed(),
                                       c.workers());
  ResultTable t({"measure", "offset", "horizon_first", "horizon_second", "estimate", "ci_low",
                 "ci_high", "bound", "vacuous"});
  t.add_row({to_string(first.tag()), format_site(offset), fmt_i(h1), fmt_i(h2),
             fmt(r.estimate.estimate), fmt(r.estimate.ci_low), fmt(r.estimate.ci_high),
             fmt(r.bound), r.vacuous ? "true" : "false"});
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_potts(const ExperimentConfig& c) {
  const Potential potential = potential_from_config(c);
  const auto qs = c.get_int_list(kParams, "q");
  const auto betas = c.get_double_list(kParams, "beta");
  const auto radii = c.get_int_list(kParams, "radius");
  require(!qs.empty() && !betas.empty() && !radii.empty(),
          "[params] q, beta and radius must be nonempty");
  for (auto q : qs) require(q >= 2 && q <= 1000000, "[params] q must be an integer >= 2");
  for (auto b : betas) require(std::isfinite(b) && b > 0.0, "[params] beta must be positive");
  for (auto r : radii) require(r >= 1, "[params] radius must be >= 1");
  long double points = 1;
  for (std::size_t i = 0; i < potential.dimension(); ++i)
    points *= 2.0L * static_cast<long double>(*std::max_element(radii.begin(), radii.end())) + 1;
  if (points > 5e7L) throw ResourceLimitError("interaction sum radius too large");

  ResultTable t({"q", "beta", "R", "interaction_sum", "bound", "vacuous"});
  for (auto q : qs)
    for (auto b : betas)
      for (auto r : radii) {
        const auto rep = theorem_b_bound(potential, b, static_cast<int>(q), r);
        t.add_row({fmt_i(q), fmt(b), fmt_i(r), format_number(rep.interaction_sum),
                   fmt(rep.bound), rep.vacuous ? "true" : "false"});
      }
  return t;
}

// ---------------------------------------------------------------------------

ResultTable run_counterexample(const ExperimentConfig& c) {
  const auto dim = dimension_key(c, kParams, 3);
  const auto range = c.get_i64(kParams, "range", 5);
  const auto eps = c.get_double_list(kParams, "epsilons");
  const auto ks = c.get_int_list(kParams, "k_values");
  const auto mode = c.get_or(kParams, "mode", "auto");
  const auto trials = c.get_u64(kParams, "trials", 20000);
  const auto radius = c.get_i64(kParams, "radius", range);
  require(dim >= 2, "[params] dim must be >= 2");
  require(range >= 1, "[params] range must be >= 1");
  require(!eps.empty() && !ks.empty(), "[params] epsilons and k_values must be nonempty");
  for (auto e : eps) require(e >= 0.0 && e < 1.0, "[params] epsilons must lie in [0, 1)");
  for (auto k : ks) require(k >= 0, "[params] k_values must be >= 0");
  require(mode == "exact" || mode == "mc" || mode == "auto",
          "[params] mode must be exact, mc or auto");
  require(radius >= 1, "[params] radius must be >= 1");
  require(mode == "exact" || trials >= 2, "[params] trials must be >= 2");

  auto internal_edges = [&](std::int64_t k) {
    std::uint64_t e = 0;
    for (std::int64_t s = 1; s <= std::min(range, 2 * k); ++s)
      e += static_cast<std::uint64_t>(2 * k + 1 - s);
    return e;
  };
  ResultTable t({"epsilon", "K", "mode", "phi", "sigma", "expected_cluster", "below_one"});
  std::uint64_t row = 0;
  for (double e : eps) {
    const Kernel kernel = validated([&] { return Kernel::counterexample(dim, range, e); });
    for (auto k : ks) {
      std::vector<Site> set;
      for (std::int64_t i = -k; i <= k; ++i) set.push_back(unit_vector(dim, 0, i));
      const bool exact =
          mode == "exact" || (mode == "auto" && internal_edges(k) <= kPhiExactEdgeLimit);
      const auto v = phi_functional(kernel, set, exact ? PhiMode::Exact : PhiMode::MonteCarlo,
                                    radius, exact ? 0 : trials, derive_seed(c.seed(), row++));
      t.add_row({fmt(e), fmt_i(k), exact ? "exact" : "mc", fmt(v.value), fmt(v.sigma),
                 fmt(v.expected_cluster), v.value < 1.0 ? "true" : "false"});
    }
  }
  return t;
}

}  // namespace

std::string kind_for_subcommand(const std::string& subcommand) {
  static const std::map<std::string, std::string> table = {
      {"simulate", "truncation-curve"},    {"dispersion", "dispersion-suite"},
      {"tree", "tree-suite"},              {"pathmeasure", "intersection-probe"},
      {"overlap", "overlap-curve"},        {"potts", "potts-report"},
      {"counterexample", "counterexample-scan"}};
  auto it = table.find(subcommand);
  if (it == table.end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

Kernel kernel_from_config(const ExperimentConfig& c) {
  const std::string s = "kernel";
  require(c.sections.count(s) > 0, "missing [kernel] section");
  const auto family = c.get(s, "family");
  const auto dim = dimension_key(c, s, 0);
  Kernel kernel = validated([&]() -> Kernel {
    if (family == "inverse-power") {
      require_only(c, s, {"family", "dim", "scale", "exponent", "norm", "cap", "truncate",
                          "truncate_norm"}, family);
      std::optional<double> cap;
      if (c.has(s, "cap")) cap = c.get_double(s, "cap");
      return Kernel::inverse_power(dim, c.get_double(s, "scale", 1.0), c.get_double(s, "exponent"),
                                   parse_norm(c.get_or(s, "norm", "linf")), cap);
    }
    if (family == "flat-box") {
      require_only(c, s, {"family", "dim", "value", "radius", "truncate", "truncate_norm"}, family);
      return Kernel::flat_box(dim, c.get_double(s, "value"), c.get_i64(s, "radius"));
    }
    if (family == "counterexample") {
      require_only(c, s, {"family", "dim", "range", "epsilon", "truncate", "truncate_norm"},
                   family);
      return Kernel::counterexample(dim, c.get_i64(s, "range"), c.get_double(s, "epsilon"));
    }
    throw ConfigError("[kernel] family: unknown kernel family '" + family + "'");
  });
  if (c.has(s, "truncate")) {
    const auto r = c.get_i64(s, "truncate");
    require(r >= 1, "[kernel] truncate must be >= 1");
    kernel = validated(
        [&] { return kernel.truncated(r, parse_norm(c.get_or(s, "truncate_norm", "linf"))); });
  } else {
    require(!c.has(s, "truncate_norm"), "[kernel] truncate_norm needs truncate");
  }
  // Probe a value so that out-of-range families fail at validation time.
  validated([&] { return kernel.prob_at(unit_vector(dim, 0)); });
  return kernel;
}

Potential potential_from_config(const ExperimentConfig& c) {
  const std::string s = "potential";
  require(c.sections.count(s) > 0, "missing [potential] section");
  const auto family = c.get(s, "family");
  const auto dim = dimension_key(c, s, 0);
  return validated([&]() -> Potential {
    if (family == "inverse-power") {
      require_only(c, s, {"family", "dim", "scale", "exponent", "norm"}, family);
      return Potential::inverse_power(dim, c.get_double(s, "scale", 1.0),
                                      c.get_double(s, "exponent"),
                                      parse_norm(c.get_or(s, "norm", "linf")));
    }
    if (family == "flat-box") {
      require_only(c, s, {"family", "dim", "value", "radius"}, family);
      return Potential::flat_box(dim, c.get_double(s, "value"), c.get_i64(s, "radius"));
    }
    throw ConfigError("[potential] family: unknown potential family '" + family + "'");
  });
}

PathMeasure measure_from_config(const ExperimentConfig& c, const Kernel& kernel) {
  const auto name = c.get(kParams, "measure");
  std::optional<std::int64_t> radius;
  if (c.has(kParams, "radius")) radius = c.get_i64(kParams, "radius");
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      require(!c.has(kParams, k), std::string("[params] ") + k + " is not used by " + name);
  };
  return validated([&]() -> PathMeasure {
    if (name == "m1") {
      forbid({"phase", "axis", "radius", "second_phase"});
      Site u, v;
      if (c.has(kParams, "u") || c.has(kParams, "v")) {
        u = site_key(c, "u", kernel.dimension());
        v = site_key(c, "v", kernel.dimension());
      } else {
        std::tie(u, v) = choose_m1_vectors(kernel);
      }
      return PathMeasure::m1(
          build_m1(kernel, u, v, c.get_i64(kParams, "m"), c.get_bool(kParams, "strict", false)));
    }
    forbid({"u", "v", "m", "strict"});
    if (name == "m2") {
      forbid({"axis"});
      const auto phase = c.get_i64(kParams, "phase", 0);
      require(phase >= 0 && phase <= 5, "[params] phase must lie in 0..5");
      return PathMeasure::m2(build_m2(kernel, radius), static_cast<unsigned>(phase));
    }
    forbid({"phase", "second_phase"});
    if (name == "m3") {
      forbid({"axis"});
      return PathMeasure::m3(build_m3(kernel, radius));
    }
    if (name == "directed") {
      const auto axis = c.get_i64(kParams, "axis", 0);
      require(axis >= 0, "[params] axis must be >= 0");
      return PathMeasure::directed(kernel, static_cast<std::size_t>(axis), radius);
    }
    throw ConfigError("[params] measure: unknown measure '" + name + "'");
  });
}

ResultTable run(const ExperimentConfig& config) {
  validate_keys(config);
  const auto kind = config.kind();
  config.seed();
  config.workers();
  static const std::map<std::string, std::function<ResultTable(const ExperimentConfig&)>>
      runners = {{"truncation-curve", run_truncation},   {"dispersion-suite", run_dispersion},
                 {"tree-suite", run_tree},               {"overlap-curve", run_overlap},
                 {"intersection-probe", run_intersection}, {"potts-report", run_potts},
                 {"counterexample-scan", run_counterexample}};
  ResultTable table = runners.at(kind)(config);
  stamp(table, config);
  return table;
}

}  // namespace lrtrunc
