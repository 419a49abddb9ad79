#include "wsetlab/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wsetlab/errors.hpp"
#include "wsetlab/integrability.hpp"
#include "wsetlab/metrics.hpp"
#include "wsetlab/parallel.hpp"
#include "wsetlab/robustness.hpp"

namespace wsetlab {
namespace cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& msg) {
  fail(ErrorCode::BadConfig, msg);
}

// Strict schema core: every object must carry exactly the declared keys.
void check_fields(const json& j, const std::string& ctx,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
  if (!j.is_object()) bad(ctx + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!required.count(key) && !optional.count(key))
      bad(ctx + ": unknown field \"" + key + "\"");
  }
  for (const std::string& key : required) {
    if (!j.contains(key)) bad(ctx + ": missing field \"" + key + "\"");
  }
}

double get_num(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    bad(ctx + ": field \"" + key + "\" must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number_integer())
    bad(ctx + ": field \"" + key + "\" must be an integer");
  return j[key].get<int>();
}

std::string get_str(const json& j, const std::string& key,
                    const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_string())
    bad(ctx + ": field \"" + key + "\" must be a string");
  return j[key].get<std::string>();
}

std::vector<double> get_num_array(const json& j, const std::string& key,
                                  const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_array())
    bad(ctx + ": field \"" + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) bad(ctx + ": \"" + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::size_t> get_size_array(const json& j, const std::string& key,
                                        const std::string& ctx) {
  std::vector<std::size_t> out;
  for (double v : get_num_array(j, key, ctx)) {
    if (v < 1.0 || v != std::floor(v))
      bad(ctx + ": \"" + key + "\" must hold positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Literal parsers

Distribution parse_distribution(const json& j) {
  const std::string ctx = "distribution";
  if (!j.is_object() || !j.contains("kind")) bad(ctx + ": needs a kind tag");
  const std::string kind = get_str(j, "kind", ctx);
  if (kind == "normal") {
    check_fields(j, ctx, {"kind", "m", "sigma"});
    return Distribution::normal(get_num(j, "m", ctx), get_num(j, "sigma", ctx));
  }
  if (kind == "exponential") {
    check_fields(j, ctx, {"kind", "theta"});
    return Distribution::exponential(get_num(j, "theta", ctx));
  }
  if (kind == "gamma") {
    check_fields(j, ctx, {"kind", "kappa", "theta"});
    return Distribution::gamma(get_num(j, "kappa", ctx),
                               get_num(j, "theta", ctx));
  }
  if (kind == "pareto") {
    check_fields(j, ctx, {"kind", "a", "x_min"});
    return Distribution::pareto(get_num(j, "a", ctx), get_num(j, "x_min", ctx));
  }
  if (kind == "gumbel") {
    check_fields(j, ctx, {"kind", "a"});
    return Distribution::gumbel(get_num(j, "a", ctx));
  }
  if (kind == "dirac") {
    check_fields(j, ctx, {"kind", "c"});
    return Distribution::dirac(get_num(j, "c", ctx));
  }
  if (kind == "empirical") {
    check_fields(j, ctx, {"kind", "points"}, {"weights"});
    std::vector<double> pts = get_num_array(j, "points", ctx);
    if (j.contains("weights"))
      return Distribution::empirical(std::move(pts),
                                     get_num_array(j, "weights", ctx));
    std::vector<double> counts(pts.size(), 1.0);
    const double den = static_cast<double>(pts.size());
    return Distribution::empirical_counts(std::move(pts), std::move(counts),
                                          den);
  }
  if (kind == "mixture") {
    check_fields(j, ctx, {"kind", "components"});
    if (!j["components"].is_array() || j["components"].empty())
      bad(ctx + ": components must be a nonempty array");
    std::vector<std::pair<double, Distribution>> comps;
    for (const auto& c : j["components"]) {
      check_fields(c, ctx + ".component", {"weight", "dist"});
      comps.emplace_back(get_num(c, "weight", ctx),
                         parse_distribution(c["dist"]));
    }
    return Distribution::mixture(std::move(comps));
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

YoungFunction parse_young(const json& j) {
  const std::string ctx = "young";
  const std::string form = get_str(j, "form", ctx);
  if (form == "power_over_p") {
    check_fields(j, ctx, {"form", "p"});
    return YoungFunction::power_over_p(get_num(j, "p", ctx));
  }
  if (form == "exponential") {
    check_fields(j, ctx, {"form", "beta"});
    return YoungFunction::exponential(get_num(j, "beta", ctx));
  }
  if (form == "linear") {
    check_fields(j, ctx, {"form"});
    return YoungFunction::linear();
  }
  bad(ctx + ": unknown form \"" + form + "\"");
}

GaugeFunction parse_gauge(const json& j) {
  const std::string ctx = "gauge";
  const std::string form = get_str(j, "form", ctx);
  if (form == "power") {
    check_fields(j, ctx, {"form", "p"});
    return GaugeFunction::power(get_num(j, "p", ctx));
  }
  if (form == "exp_power") {
    check_fields(j, ctx, {"form", "lambda", "alpha"});
    return GaugeFunction::exp_power(get_num(j, "lambda", ctx),
                                    get_num(j, "alpha", ctx));
  }
  if (form == "abs_log_density") {
    check_fields(j, ctx, {"form", "model", "theta"});
    const std::string model = get_str(j, "model", ctx);
    if (model == "exponential")
      return GaugeFunction::abs_log_density(LogDensityModel::Exponential,
                                            get_num(j, "theta", ctx));
    if (model == "gumbel")
      return GaugeFunction::abs_log_density(LogDensityModel::Gumbel,
                                            get_num(j, "theta", ctx));
    bad(ctx + ": unknown model \"" + model + "\"");
  }
  if (form == "constant1") {
    check_fields(j, ctx, {"form"});
    return GaugeFunction::constant1();
  }
  if (form == "young_scaled") {
    check_fields(j, ctx, {"form", "young", "k"});
    return GaugeFunction::scaled(parse_young(j["young"]),
                                 get_num(j, "k", ctx));
  }
  bad(ctx + ": unknown form \"" + form + "\"");
}

GaugeSequence parse_gauge_sequence(const json& j) {
  const std::string ctx = "gauges";
  const std::string kind = get_str(j, "kind", ctx);
  if (kind == "constant") {
    check_fields(j, ctx, {"kind", "gauge"});
    return GaugeSequence::constant(parse_gauge(j["gauge"]));
  }
  if (kind == "power_ladder") {
    check_fields(j, ctx, {"kind", "p_star"});
    return GaugeSequence::power_ladder(get_num(j, "p_star", ctx));
  }
  if (kind == "exp_ladder") {
    check_fields(j, ctx, {"kind", "beta_star"});
    return GaugeSequence::exp_ladder(get_num(j, "beta_star", ctx));
  }
  if (kind == "log_density_enumeration") {
    check_fields(j, ctx, {"kind", "model"});
    const std::string model = get_str(j, "model", ctx);
    if (model == "exponential")
      return GaugeSequence::log_density_enumeration(
          LogDensityModel::Exponential);
    if (model == "gumbel")
      return GaugeSequence::log_density_enumeration(LogDensityModel::Gumbel);
    bad(ctx + ": unknown model \"" + model + "\"");
  }
  if (kind == "young_scaled") {
    check_fields(j, ctx, {"kind", "young"});
    return GaugeSequence::young_scaled(parse_young(j["young"]));
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

RiskFunctionalSpec parse_risk_spec(const json& j) {
  const std::string ctx = "risk spec";
  const std::string kind = get_str(j, "kind", ctx);
  if (kind == "avar") {
    check_fields(j, ctx, {"kind", "alpha"});
    return RiskFunctionalSpec::avar(get_num(j, "alpha", ctx));
  }
  if (kind == "distortion") {
    check_fields(j, ctx, {"kind", "g", "alpha"});
    if (get_str(j, "g", ctx) != "avar")
      bad(ctx + ": only the tail-mean distortion \"avar\" is shipped");
    return RiskFunctionalSpec::distortion_avar(get_num(j, "alpha", ctx));
  }
  if (kind == "shortfall") {
    check_fields(j, ctx, {"kind", "young", "x0"});
    return RiskFunctionalSpec::shortfall(parse_young(j["young"]),
                                         get_num(j, "x0", ctx));
  }
  if (kind == "one_sided_moment") {
    check_fields(j, ctx, {"kind", "p"});
    return RiskFunctionalSpec::one_sided_moment(get_num(j, "p", ctx));
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

StatisticalFunctional parse_functional(const json& j) {
  const std::string ctx = "functional";
  const std::string id = get_str(j, "id", ctx);
  if (id == "mean") {
    check_fields(j, ctx, {"id"});
    return StatisticalFunctional::mean();
  }
  if (id == "lower_quantile") {
    check_fields(j, ctx, {"id", "alpha"});
    return StatisticalFunctional::lower_quantile(get_num(j, "alpha", ctx));
  }
  if (id == "mle_exponential") {
    check_fields(j, ctx, {"id"});
    return StatisticalFunctional::mle_exponential();
  }
  if (id == "mle_gumbel") {
    check_fields(j, ctx, {"id"});
    return StatisticalFunctional::mle_gumbel();
  }
  if (id == "risk") {
    check_fields(j, ctx, {"id", "spec"});
    return StatisticalFunctional::risk(parse_risk_spec(j["spec"]));
  }
  bad(ctx + ": unknown id \"" + id + "\"");
}

FrechetSpec::Coupling parse_coupling(const json& j) {
  const std::string ctx = "coupling";
  const std::string kind = get_str(j, "kind", ctx);
  if (kind == "independent") {
    check_fields(j, ctx, {"kind"});
    return FrechetSpec::Independent{};
  }
  if (kind == "comonotone") {
    check_fields(j, ctx, {"kind"});
    return FrechetSpec::Comonotone{};
  }
  if (kind == "countermonotone") {
    check_fields(j, ctx, {"kind"});
    return FrechetSpec::Countermonotone{};
  }
  if (kind == "gaussian_copula") {
    check_fields(j, ctx, {"kind", "correlation"});
    if (!j["correlation"].is_array())
      bad(ctx + ": correlation must be an array of rows");
    std::vector<double> corr;
    const std::size_t d = j["correlation"].size();
    for (const auto& row : j["correlation"]) {
      if (!row.is_array() || row.size() != d)
        bad(ctx + ": correlation must be square");
      for (const auto& v : row) corr.push_back(v.get<double>());
    }
    return FrechetSpec::GaussianCopula{std::move(corr)};
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

AggregationMap parse_aggregation_map(const json& j) {
  const std::string ctx = "aggregation map";
  const std::string kind = get_str(j, "kind", ctx);
  if (kind == "identity") {
    check_fields(j, ctx, {"kind"});
    return AggregationMap::identity();
  }
  if (kind == "sum") {
    check_fields(j, ctx, {"kind"});
    return AggregationMap::sum();
  }
  if (kind == "max") {
    check_fields(j, ctx, {"kind"});
    return AggregationMap::max();
  }
  if (kind == "stop_loss_sum") {
    check_fields(j, ctx, {"kind", "thresholds"});
    return AggregationMap::stop_loss_sum(
        get_num_array(j, "thresholds", ctx));
  }
  if (kind == "aggregate_stop_loss") {
    check_fields(j, ctx, {"kind", "threshold"});
    return AggregationMap::aggregate_stop_loss(get_num(j, "threshold", ctx));
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

std::vector<double> read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadConfig, "cannot open data file " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* begin = line.data();
    const char* end = begin + line.size();
    double v;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{}) {
      if (out.empty()) continue;  // header line
      fail(ErrorCode::BadConfig, "bad number in " + path + ": " + line);
    }
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorCode::BadConfig, "no observations in " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Sequence families and contamination paths

namespace {

struct SequenceFamily {
  std::function<Distribution(int)> at;
  Distribution limit;
};

SequenceFamily parse_sequence_family(const json& j) {
  const std::string ctx = "sequence family";
  const std::string kind = get_str(j, "kind", ctx);
  if (kind == "exponential") {
    check_fields(j, ctx, {"kind", "theta0", "amplitude"});
    const double t0 = get_num(j, "theta0", ctx);
    const double amp = get_num(j, "amplitude", ctx);
    return {[t0, amp](int n) {
              return Distribution::exponential(t0 + amp / n);
            },
            Distribution::exponential(t0)};
  }
  if (kind == "gamma") {
    check_fields(j, ctx, {"kind", "kappa", "theta0", "amplitude"});
    const double k = get_num(j, "kappa", ctx);
    const double t0 = get_num(j, "theta0", ctx);
    const double amp = get_num(j, "amplitude", ctx);
    return {[k, t0, amp](int n) {
              return Distribution::gamma(k, t0 + amp / n);
            },
            Distribution::gamma(k, t0)};
  }
  if (kind == "pareto") {
    check_fields(j, ctx, {"kind", "a0", "x_min", "amplitude"});
    const double a0 = get_num(j, "a0", ctx);
    const double xm = get_num(j, "x_min", ctx);
    const double amp = get_num(j, "amplitude", ctx);
    return {[a0, xm, amp](int n) {
              return Distribution::pareto(a0 + amp / n, xm);
            },
            Distribution::pareto(a0, xm)};
  }
  if (kind == "gumbel") {
    check_fields(j, ctx, {"kind", "a0", "amplitude"});
    const double a0 = get_num(j, "a0", ctx);
    const double amp = get_num(j, "amplitude", ctx);
    return {[a0, amp](int n) { return Distribution::gumbel(a0 + amp / n); },
            Distribution::gumbel(a0)};
  }
  if (kind == "normal") {
    check_fields(j, ctx, {"kind", "m", "sigma0", "amplitude"});
    const double m = get_num(j, "m", ctx);
    const double s0 = get_num(j, "sigma0", ctx);
    const double amp = get_num(j, "amplitude", ctx);
    return {[m, s0, amp](int n) {
              return Distribution::normal(m, s0 + amp / n);
            },
            Distribution::normal(m, s0)};
  }
  if (kind == "point_mass_escape") {
    check_fields(j, ctx, {"kind"});
    return {[](int n) {
              const double nd = static_cast<double>(n);
              if (n == 1) return Distribution::dirac(1.0);
              return Distribution::empirical_counts({0.0, nd},
                                                    {nd - 1.0, 1.0}, nd);
            },
            Distribution::dirac(0.0)};
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

ContaminationPath parse_path(const json& j, const Distribution& base) {
  const std::string ctx = "path";
  const std::string kind = get_str(j, "kind", ctx);
  const std::vector<double> t_grid = get_num_array(j, "t_grid", ctx);
  if (t_grid.empty()) bad(ctx + ": t_grid must be nonempty");
  if (kind == "within_family") {
    check_fields(j, ctx, {"kind", "model", "amplitude", "t_grid"});
    const std::string model = get_str(j, "model", ctx);
    const double amp = get_num(j, "amplitude", ctx);
    std::function<Distribution(double)> curve;
    if (model == "exponential") {
      const auto* f = std::get_if<Distribution::Exponential>(&base.form());
      if (!f) bad(ctx + ": base must be exponential for this model");
      const double t0 = f->theta;
      curve = [t0, amp](double t) {
        return Distribution::exponential(t0 + amp * t);
      };
    } else if (model == "gamma") {
      const auto* f = std::get_if<Distribution::Gamma>(&base.form());
      if (!f) bad(ctx + ": base must be gamma for this model");
      const double k = f->kappa, t0 = f->theta;
      curve = [k, t0, amp](double t) {
        return Distribution::gamma(k, t0 + amp * t);
      };
    } else if (model == "pareto") {
      const auto* f = std::get_if<Distribution::Pareto>(&base.form());
      if (!f) bad(ctx + ": base must be pareto for this model");
      const double a0 = f->a, xm = f->x_min;
      curve = [a0, xm, amp](double t) {
        return Distribution::pareto(a0 + amp * t, xm);
      };
    } else if (model == "gumbel") {
      const auto* f = std::get_if<Distribution::Gumbel>(&base.form());
      if (!f) bad(ctx + ": base must be gumbel for this model");
      const double a0 = f->a;
      curve = [a0, amp](double t) { return Distribution::gumbel(a0 + amp * t); };
    } else if (model == "normal") {
      const auto* f = std::get_if<Distribution::Normal>(&base.form());
      if (!f) bad(ctx + ": base must be normal for this model");
      const double m = f->m, s0 = f->sigma;
      curve = [m, s0, amp](double t) {
        return Distribution::normal(m, s0 + amp * t);
      };
    } else {
      bad(ctx + ": unknown model \"" + model + "\"");
    }
    return ContaminationPath::within_family(std::move(curve), t_grid);
  }
  if (kind == "point_mass") {
    check_fields(j, ctx, {"kind", "c", "t_grid"});
    return ContaminationPath::point_mass(base, get_num(j, "c", ctx), t_grid);
  }
  if (kind == "general_mixture") {
    check_fields(j, ctx, {"kind", "contaminant", "t_grid"});
    return ContaminationPath::general_mixture(
        base, parse_distribution(j["contaminant"]), t_grid);
  }
  bad(ctx + ": unknown kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Runners (summary json + optional csv)

struct CommandResult {
  json summary;
  std::string csv;
};

Distribution parse_data_or_dist(const json& payload, const std::string& ctx,
                                const std::string& base_dir) {
  const bool has_dist = payload.contains("dist");
  const bool has_csv = payload.contains("data_csv");
  if (has_dist == has_csv)
    bad(ctx + ": exactly one of \"dist\" or \"data_csv\" is required");
  if (has_dist) return parse_distribution(payload["dist"]);
  const fs::path p = fs::path(base_dir) / get_str(payload, "data_csv", ctx);
  const std::vector<double> xs = read_sample_csv(p.string());
  return Distribution::from_sample(xs);
}

CommandResult run_metric(const json& payload) {
  const std::string ctx = "metric payload";
  check_fields(payload, ctx, {"metric", "a", "b"}, {"gauges", "depth"});
  const std::string metric = get_str(payload, "metric", ctx);
  const Distribution a = parse_distribution(payload["a"]);
  const Distribution b = parse_distribution(payload["b"]);
  MetricReport report;
  if (metric == "levy") {
    report = levy_distance(a, b);
  } else if (metric == "prohorov") {
    if (!a.is_atomic() || !b.is_atomic()) {
      // Documented fallback: exact Prohorov is finite-support only.
      report = levy_distance(a, b);
      report.method = MetricMethod::GridScan;
    } else {
      report = prohorov_distance_finite(a, b);
    }
  } else if (metric == "psi") {
    if (!payload.contains("gauges")) bad(ctx + ": psi metric needs gauges");
    const int depth =
        payload.contains("depth") ? get_int(payload, "depth", ctx) : 20;
    report = psi_metric(a, b, parse_gauge_sequence(payload["gauges"]), depth);
  } else {
    bad(ctx + ": unknown metric \"" + metric + "\"");
  }
  const char* method = report.method == MetricMethod::ClosedForm
                           ? "closed_form"
                           : report.method == MetricMethod::StrassenFlow
                                 ? "strassen_flow"
                                 : "grid_scan";
  CommandResult out;
  out.summary = {{"value", report.value},
                 {"method", method},
                 {"error_bound", report.error_bound}};
  return out;
}

CommandResult run_wset_check(const json& payload) {
  const std::string ctx = "wset-check payload";
  const std::string mode = get_str(payload, "mode", ctx);
  CommandResult out;
  if (mode == "uniform") {
    check_fields(payload, ctx,
                 {"mode", "family", "gauges", "depth", "epsilon"});
    std::vector<Distribution> family;
    for (const auto& d : payload["family"])
      family.push_back(parse_distribution(d));
    const auto report = uniform_integrating_check(
        family, parse_gauge_sequence(payload["gauges"]),
        get_int(payload, "depth", ctx), get_num(payload, "epsilon", ctx));
    json per_k = json::array();
    std::ostringstream csv;
    csv << "k,epsilon,threshold,achieved_sup,found\n";
    for (const auto& e : report.per_k) {
      per_k.push_back({{"k", e.k},
                       {"threshold", e.threshold},
                       {"achieved_sup", e.achieved_sup},
                       {"found", e.found}});
      csv << e.k << ',' << format_double(e.epsilon) << ','
          << format_double(e.threshold) << ','
          << format_double(e.achieved_sup) << ',' << (e.found ? 1 : 0)
          << '\n';
    }
    out.summary = {{"mode", "uniform"},
                   {"pass", report.pass},
                   {"family_size", report.family_size},
                   {"note", report.note},
                   {"per_k", per_k}};
    out.csv = csv.str();
    return out;
  }
  auto emit_sequence = [](const SequenceConvergenceReport& rep,
                          std::ostringstream& csv, int probe_index,
                          bool with_probe_column) {
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
      if (with_probe_column) csv << probe_index << ',';
      csv << rep.n_values[i] << ',' << format_double(rep.levy_gaps[i]);
      for (const auto& gk : rep.gauge_gaps) csv << ',' << format_double(gk[i]);
      csv << '\n';
    }
  };
  auto sequence_json = [](const SequenceConvergenceReport& rep) {
    return json{{"pass", rep.pass},
                {"failing_k", rep.failing_k},
                {"final_levy_gap", rep.levy_gaps.back()},
                {"final_gauge_gaps",
                 [&rep] {
                   json gaps = json::array();
                   for (const auto& gk : rep.gauge_gaps)
                     gaps.push_back(gk.back());
                   return gaps;
                 }()},
                {"tol", rep.tol}};
  };
  if (mode == "sequence") {
    check_fields(payload, ctx,
                 {"mode", "family", "gauges", "depth", "n_max", "tol"});
    const SequenceFamily fam = parse_sequence_family(payload["family"]);
    const int depth = get_int(payload, "depth", ctx);
    const auto report = sequence_condition_e(
        fam.at, fam.limit, parse_gauge_sequence(payload["gauges"]), depth,
        get_int(payload, "n_max", ctx), get_num(payload, "tol", ctx));
    std::ostringstream csv;
    csv << "n,levy_gap";
    for (int k = 1; k <= depth; ++k) csv << ",gauge_gap_k" << k;
    csv << '\n';
    emit_sequence(report, csv, 0, false);
    out.summary = sequence_json(report);
    out.summary["mode"] = "sequence";
    out.summary["note"] = report.note;
    out.csv = csv.str();
    return out;
  }
  if (mode == "parametric") {
    check_fields(payload, ctx,
                 {"mode", "grid", "gauges", "depth", "probes", "tol"},
                 {"injectivity_floor"});
    std::vector<Distribution> grid;
    for (const auto& d : payload["grid"]) grid.push_back(parse_distribution(d));
    std::vector<ParametricProbe> probes;
    for (const auto& p : payload["probes"]) {
      check_fields(p, ctx + ".probe", {"family", "n_max"});
      const SequenceFamily fam = parse_sequence_family(p["family"]);
      probes.push_back(
          ParametricProbe{fam.at, fam.limit, get_int(p, "n_max", ctx)});
    }
    const double floor = payload.contains("injectivity_floor")
                             ? get_num(payload, "injectivity_floor", ctx)
                             : 1e-4;
    const int depth = get_int(payload, "depth", ctx);
    const auto report = parametric_wset_check(
        grid, parse_gauge_sequence(payload["gauges"]), depth, probes,
        get_num(payload, "tol", ctx), floor);
    std::ostringstream csv;
    csv << "probe,n,levy_gap";
    for (int k = 1; k <= depth; ++k) csv << ",gauge_gap_k" << k;
    csv << '\n';
    json probe_json = json::array();
    for (std::size_t i = 0; i < report.probe_reports.size(); ++i) {
      emit_sequence(report.probe_reports[i], csv, static_cast<int>(i), true);
      probe_json.push_back(sequence_json(report.probe_reports[i]));
    }
    out.summary = {{"mode", "parametric"},
                   {"pass", report.pass},
                   {"injectivity_ok", report.injectivity_ok},
                   {"min_pairwise_levy", report.min_pairwise_levy},
                   {"probes", probe_json},
                   {"note", report.note}};
    out.csv = csv.str();
    return out;
  }
  bad(ctx + ": unknown mode \"" + mode + "\"");
}

CommandResult run_eval(const json& payload, const std::string& base_dir) {
  const std::string ctx = "eval payload";
  check_fields(payload, ctx, {"functional"}, {"dist", "data_csv"});
  const StatisticalFunctional T = parse_functional(payload["functional"]);
  const Distribution mu = parse_data_or_dist(payload, ctx, base_dir);
  CommandResult out;
  out.summary = {{"value", T.evaluate(mu)},
                 {"diagnostics",
                  {{"functional", T.describe()},
                   {"in_domain", T.in_domain(mu)},
                   {"input", mu.describe()}}}};
  return out;
}

CommandResult run_risk(const json& payload, const std::string& base_dir) {
  const std::string ctx = "risk payload";
  check_fields(payload, ctx, {"spec"}, {"dist", "data_csv"});
  const RiskFunctionalSpec spec = parse_risk_spec(payload["spec"]);
  const Distribution mu = parse_data_or_dist(payload, ctx, base_dir);
  CommandResult out;
  out.summary = {{"value", eval_risk(spec, mu)},
                 {"spec", spec.describe()}};
  return out;
}

CommandResult run_sdwn(const json& payload) {
  const std::string ctx = "sdwn payload";
  check_fields(payload, ctx, {"family", "young", "n_max", "tol"},
               {"depth", "ladder"});
  const SequenceFamily fam = parse_sequence_family(payload["family"]);
  const int depth =
      payload.contains("depth") ? get_int(payload, "depth", ctx) : 10;
  std::vector<int> ladder;
  if (payload.contains("ladder"))
    for (double v : get_num_array(payload, "ladder", ctx))
      ladder.push_back(static_cast<int>(v));
  const SdwnReport report = sdwn_convergence(
      fam.at, fam.limit, parse_young(payload["young"]),
      get_int(payload, "n_max", ctx), get_num(payload, "tol", ctx), depth,
      ladder);
  std::ostringstream csv;
  csv << "n,luxemburg_norm,psi_metric\n";
  for (const auto& row : report.rows)
    csv << row.n << ',' << format_double(row.luxemburg) << ','
        << format_double(row.psi_metric) << '\n';
  CommandResult out;
  out.summary = {{"norm_converges", report.norm_converges},
                 {"metric_converges", report.metric_converges},
                 {"equivalent", report.equivalent},
                 {"tol", report.tol},
                 {"final_luxemburg", report.rows.back().luxemburg},
                 {"final_psi_metric", report.rows.back().psi_metric}};
  out.csv = csv.str();
  return out;
}

CommandResult run_aggregate(const json& payload, std::uint64_t seed) {
  const std::string ctx = "aggregate payload";
  check_fields(payload, ctx, {"marginals", "coupling", "map", "n"},
               {"output", "bound_check"});
  FrechetSpec spec;
  for (const auto& d : payload["marginals"])
    spec.marginals.push_back(parse_distribution(d));
  spec.coupling = parse_coupling(payload["coupling"]);
  const AggregationMap map = parse_aggregation_map(payload["map"]);
  const std::size_t n = static_cast<std::size_t>(get_int(payload, "n", ctx));
  const std::string output = payload.contains("output")
                                 ? get_str(payload, "output", ctx)
                                 : "summary";
  CommandResult out;
  std::ostringstream csv;
  if (!map.scalar_valued()) {
    // Identity map: raw coordinate samples only.
    for (std::size_t i = 0; i < spec.dimension(); ++i)
      csv << (i ? "," : "") << "y" << (i + 1);
    csv << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = sample_vector(spec, seed, 0, i);
      for (std::size_t c = 0; c < y.size(); ++c)
        csv << (c ? "," : "") << format_double(y[c]);
      csv << '\n';
    }
    out.summary = {{"map", map.describe()},
                   {"coupling", spec.coupling_name()},
                   {"n", n},
                   {"dimension", spec.dimension()}};
  } else {
    const Distribution law = sample_aggregate(spec, map, seed, 0, n);
    if (output == "samples") {
      csv << "value\n";
      const auto& e = std::get<Distribution::Empirical>(law.form());
      for (std::size_t i = 0; i < e.atoms.size(); ++i)
        for (int c = 0; c < static_cast<int>(e.counts[i]); ++c)
          csv << format_double(e.atoms[i]) << '\n';
    } else {
      csv << "statistic,value\n";
      csv << "mean," << format_double(law.mean()) << '\n';
      csv << "q10," << format_double(law.quantile(0.1)) << '\n';
      csv << "q50," << format_double(law.quantile(0.5)) << '\n';
      csv << "q90," << format_double(law.quantile(0.9)) << '\n';
    }
    out.summary = {{"map", map.describe()},
                   {"coupling", spec.coupling_name()},
                   {"n", n},
                   {"sample_mean", law.mean()}};
    if (payload.contains("bound_check")) {
      const json& bc = payload["bound_check"];
      check_fields(bc, ctx + ".bound_check", {"young", "depth", "epsilon"});
      const auto report = aggregation_ui_bound(
          spec, map,
          GaugeSequence::young_scaled(parse_young(bc["young"])),
          get_int(bc, "depth", ctx), get_num(bc, "epsilon", ctx));
      json per_k = json::array();
      for (const auto& e : report.per_k)
        per_k.push_back({{"k", e.k},
                         {"threshold", e.threshold},
                         {"achieved_sup", e.achieved_sup}});
      out.summary["bound_check"] = {{"pass", report.pass},
                                    {"per_k", per_k},
                                    {"note", report.note}};
    }
  }
  out.csv = csv.str();
  return out;
}

CommandResult run_robustness(const json& payload, std::uint64_t seed,
                             int threads) {
  const std::string ctx = "robustness payload";
  check_fields(payload, ctx,
               {"functional", "source", "n_grid", "replications"},
               {"tail_check"});
  const StatisticalFunctional T = parse_functional(payload["functional"]);
  const std::vector<std::size_t> n_grid =
      get_size_array(payload, "n_grid", ctx);
  const std::size_t R =
      static_cast<std::size_t>(get_int(payload, "replications", ctx));

  const json& source = payload["source"];
  const std::string source_kind = get_str(source, "kind", ctx + ".source");
  RobustnessProfile prof;
  json extra;
  if (source_kind == "distribution") {
    check_fields(source, ctx + ".source", {"kind", "base", "path"});
    const Distribution base = parse_distribution(source["base"]);
    const ContaminationPath path = parse_path(source["path"], base);
    prof = robustness_profile(T, base, path, n_grid, R, seed, threads);
    // Weak closeness of the path endpoints, for the record.
    json levy = json::array();
    for (double t : path.t_grid())
      levy.push_back(
          {{"t", t}, {"levy", levy_distance(base, path.at(t)).value}});
    extra["path_levy"] = levy;
  } else if (source_kind == "coupling_sweep") {
    check_fields(source, ctx + ".source",
                 {"kind", "marginals", "base_coupling", "observed_coupling",
                  "map", "t_grid"});
    FrechetSpec base_spec, obs_spec;
    for (const auto& d : source["marginals"]) {
      base_spec.marginals.push_back(parse_distribution(d));
      obs_spec.marginals.push_back(parse_distribution(d));
    }
    base_spec.coupling = parse_coupling(source["base_coupling"]);
    obs_spec.coupling = parse_coupling(source["observed_coupling"]);
    const AggregationMap map = parse_aggregation_map(source["map"]);
    const std::vector<double> t_grid =
        get_num_array(source, "t_grid", ctx + ".source");
    const DataSource base_src = [base_spec, obs_spec, map](
                                    std::uint64_t s, std::uint64_t st,
                                    std::size_t n) {
      return sample_aggregate_values_mixed(base_spec, obs_spec, 0.0, map, s,
                                           st, n);
    };
    const auto path_src = [base_spec, obs_spec, map](double t) -> DataSource {
      return [base_spec, obs_spec, map, t](std::uint64_t s, std::uint64_t st,
                                           std::size_t n) {
        return sample_aggregate_values_mixed(base_spec, obs_spec, t, map, s,
                                             st, n);
      };
    };
    prof = robustness_profile_sources(T, base_src, path_src, t_grid, n_grid,
                                      R, seed, threads);
    if (payload.contains("tail_check")) {
      const json& tc = payload["tail_check"];
      check_fields(tc, ctx + ".tail_check",
                   {"young", "depth", "thresholds", "sample_n"});
      const YoungFunction young = parse_young(tc["young"]);
      const GaugeSequence gauges = GaugeSequence::young_scaled(young);
      const int depth = get_int(tc, "depth", ctx);
      const std::vector<double> thresholds =
          get_num_array(tc, "thresholds", ctx);
      const std::size_t sample_n =
          static_cast<std::size_t>(get_int(tc, "sample_n", ctx));
      json rows = json::array();
      bool pass = true;
      std::uint64_t stream = 900000;
      for (const FrechetSpec* spec : {&base_spec, &obs_spec}) {
        const Distribution law =
            sample_aggregate(*spec, map, seed, stream++, sample_n);
        for (int k = 1; k <= depth; ++k) {
          for (double a : thresholds) {
            const double sampled =
                tail_gauge_integral(law, gauges.at(k), a).value;
            const double bound =
                aggregation_tail_bound(*spec, map, gauges.at(k), a);
            const bool ok = sampled <= bound + 1e-6;
            pass = pass && ok;
            rows.push_back({{"coupling", spec->coupling_name()},
                            {"k", k},
                            {"a", a},
                            {"sampled_tail", sampled},
                            {"bound", bound},
                            {"ok", ok}});
          }
        }
      }
      extra["tail_check"] = {{"pass", pass}, {"rows", rows}};
    }
  } else {
    bad(ctx + ": unknown source kind \"" + source_kind + "\"");
  }

  std::ostringstream csv;
  csv << "n,t,pi_hat,mc_se,R,failures\n";
  for (const auto& row : prof.rows)
    csv << row.n << ',' << format_double(row.t) << ','
        << format_double(row.pi_hat) << ',' << format_double(row.mc_se) << ','
        << row.R << ',' << row.failures << '\n';
  json sup = json::array();
  for (const auto& [t, s] : prof.sup_over_n)
    sup.push_back({{"t", t}, {"sup", s}});
  json rows = json::array();
  for (const auto& row : prof.rows)
    rows.push_back({{"n", row.n},
                    {"t", row.t},
                    {"pi_hat", row.pi_hat},
                    {"mc_se", row.mc_se},
                    {"R", row.R},
                    {"failures", row.failures}});
  CommandResult out;
  out.summary = {{"note", prof.note}, {"rows", rows}, {"sup_over_n", sup}};
  for (const auto& [key, value] : extra.items()) out.summary[key] = value;
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// Assertions

bool apply_assertion(const json& summary, const json& a, std::string& why) {
  check_fields(a, "assertion", {"path", "op", "bound"}, {"tol"});
  const std::string path = get_str(a, "path", "assertion");
  const std::string op = get_str(a, "op", "assertion");
  json value;
  try {
    value = summary.at(json::json_pointer(path));
  } catch (const json::exception&) {
    why = "path " + path + " not found in the summary";
    return false;
  }
  const json& bound = a["bound"];
  auto numeric = [&](double& lhs, double& rhs) {
    if (!value.is_number() || !bound.is_number()) {
      why = "comparator " + op + " needs numeric operands at " + path;
      return false;
    }
    lhs = value.get<double>();
    rhs = bound.get<double>();
    return true;
  };
  bool ok = false;
  double lhs = 0.0, rhs = 0.0;
  if (op == "le") {
    if (!numeric(lhs, rhs)) return false;
    ok = lhs <= rhs;
  } else if (op == "ge") {
    if (!numeric(lhs, rhs)) return false;
    ok = lhs >= rhs;
  } else if (op == "lt") {
    if (!numeric(lhs, rhs)) return false;
    ok = lhs < rhs;
  } else if (op == "gt") {
    if (!numeric(lhs, rhs)) return false;
    ok = lhs > rhs;
  } else if (op == "eq") {
    ok = value == bound;
  } else if (op == "ne") {
    ok = value != bound;
  } else if (op == "approx") {
    if (!numeric(lhs, rhs)) return false;
    const double tol = a.contains("tol") ? a["tol"].get<double>() : 1e-9;
    ok = std::abs(lhs - rhs) <= tol;
  } else {
    why = "unknown comparator \"" + op + "\"";
    return false;
  }
  if (!ok)
    why = path + " " + op + " " + bound.dump() + " failed (value " +
          value.dump() + ")";
  return ok;
}

}  // namespace

// ---------------------------------------------------------------------------

RunOutcome run_config(const json& config, const std::string& out_dir,
                      std::optional<std::uint64_t> seed_override, int threads,
                      const std::string& base_dir) {
  RunOutcome outcome;
  try {
    check_fields(config, "config",
                 {"schema_version", "seed", "command", "payload"},
                 {"assertions", "outputs"});
    if (get_int(config, "schema_version", "config") != 1)
      bad("config: unsupported schema_version");
    std::uint64_t seed =
        static_cast<std::uint64_t>(get_num(config, "seed", "config"));
    if (seed_override) seed = *seed_override;
    const std::string command = get_str(config, "command", "config");
    const json& payload = config["payload"];
    if (!payload.is_object()) bad("config: payload must be an object");

    CommandResult result;
    if (command == "metric") {
      result = run_metric(payload);
    } else if (command == "wset-check") {
      result = run_wset_check(payload);
    } else if (command == "eval") {
      result = run_eval(payload, base_dir);
    } else if (command == "risk") {
      result = run_risk(payload, base_dir);
    } else if (command == "sdwn") {
      result = run_sdwn(payload);
    } else if (command == "aggregate") {
      result = run_aggregate(payload, seed);
    } else if (command == "robustness") {
      result = run_robustness(payload, seed, threads);
    } else {
      bad("config: unknown command \"" + command + "\"");
    }
    result.summary["seed"] = seed;
    result.summary["command"] = command;
    outcome.summary = result.summary;

    if (config.contains("outputs")) {
      const json& outs = config["outputs"];
      check_fields(outs, "outputs", {}, {"json", "csv"});
      fs::create_directories(out_dir);
      if (outs.contains("json")) {
        const fs::path p = fs::path(out_dir) / outs["json"].get<std::string>();
        std::ofstream f(p, std::ios::binary);
        f << result.summary.dump(2) << '\n';
        outcome.written.push_back(p.string());
      }
      if (outs.contains("csv")) {
        if (result.csv.empty()) bad("outputs: command emits no csv");
        const fs::path p = fs::path(out_dir) / outs["csv"].get<std::string>();
        std::ofstream f(p, std::ios::binary);
        f << result.csv;
        outcome.written.push_back(p.string());
      }
    }

    if (config.contains("assertions")) {
      if (!config["assertions"].is_array())
        bad("config: assertions must be an array");
      for (const auto& a : config["assertions"]) {
        std::string why;
        if (!apply_assertion(outcome.summary, a, why)) {
          outcome.exit_code = kExitAssertionFailed;
          outcome.message = "assertion failed: " + why;
          return outcome;
        }
      }
    }
    outcome.exit_code = kExitOk;
    return outcome;
  } catch (const Error& e) {
    outcome.exit_code =
        e.code() == ErrorCode::BadConfig ? kExitSchema : kExitRuntime;
    outcome.message = e.what();
    return outcome;
  } catch (const json::exception& e) {
    outcome.exit_code = kExitSchema;
    outcome.message = e.what();
    return outcome;
  }
}

RunOutcome run_config_file(const std::string& path, const std::string& out_dir,
                           std::optional<std::uint64_t> seed_override,
                           int threads) {
  RunOutcome outcome;
  std::ifstream in(path);
  if (!in) {
    outcome.exit_code = kExitSchema;
    outcome.message = "cannot open config " + path;
    return outcome;
  }
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    outcome.exit_code = kExitSchema;
    outcome.message = e.what();
    return outcome;
  }
  return run_config(config, out_dir, seed_override, threads,
                    fs::path(path).parent_path().string());
}

const std::vector<std::string>& shipped_config_names() {
  static const std::vector<std::string> names = {
      "mean-escape-counterexample.json",
      "exponential-mle-robustness.json",
      "normal-family-wset.json",
      "pareto-family-wset.json",
      "gamma-family-wset.json",
      "gumbel-family-wset.json",
      "aggregation-maps-demo.json",
      "gumbel-mle-eval.json",
      "avar-normal-robustness.json",
      "shortfall-risk-eval.json",
      "onesided-moment-eval.json",
      "sdwn-exponential-family.json",
      "sdwn-pointmass-counterexample.json",
      "aggregation-avar-robustness.json",
  };
  return names;
}

RunOutcome run_reproduce_all(const std::string& config_dir,
                             const std::string& out_dir, int threads) {
  RunOutcome outcome;
  json results = json::array();
  bool all_ok = true;
  for (const std::string& name : shipped_config_names()) {
    const fs::path cfg = fs::path(config_dir) / name;
    const fs::path sub =
        fs::path(out_dir) / fs::path(name).stem().string();
    const RunOutcome one =
        run_config_file(cfg.string(), sub.string(), std::nullopt, threads);
    results.push_back({{"config", name},
                       {"exit_code", one.exit_code},
                       {"message", one.message}});
    all_ok = all_ok && one.exit_code == kExitOk;
    for (const auto& w : one.written) outcome.written.push_back(w);
  }
  outcome.summary = {{"configs", results}, {"pass", all_ok}};
  fs::create_directories(out_dir);
  const fs::path p = fs::path(out_dir) / "reproduce-summary.json";
  std::ofstream f(p, std::ios::binary);
  f << outcome.summary.dump(2) << '\n';
  outcome.written.push_back(p.string());
  outcome.exit_code = all_ok ? kExitOk : kExitAssertionFailed;
  return outcome;
}

}  // namespace cli
}  // namespace wsetlab
