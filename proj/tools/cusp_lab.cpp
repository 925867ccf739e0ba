#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cusplab/contours.hpp"
#include "cusplab/ensemble_mc.hpp"
#include "cusplab/fredholm.hpp"
#include "cusplab/kernels.hpp"
#include "cusplab/parallel.hpp"
#include "cusplab/pde_lab.hpp"
#include "cusplab/scaling.hpp"
#include "cusplab/spectral_curve.hpp"

using namespace cusplab;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("list", "not a number: " + item);
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v != std::floor(v)) throw CLI::ValidationError("list", "not an integer: " + num(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// "y1,y2;y3,y4"
IntervalUnion parse_union(const std::string& text) {
  IntervalUnion E;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::vector<double> v = parse_list(part);
    if (v.size() != 2) throw CLI::ValidationError("--E", "each interval needs two endpoints: " + part);
    E.endpoints.insert(E.endpoints.end(), v.begin(), v.end());
  }
  return E;
}

// Sets for several times, separated by '|'.
std::vector<IntervalUnion> parse_sets(const std::string& text) {
  std::vector<IntervalUnion> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '|')) out.push_back(parse_union(part));
  return out;
}

// Output with a leading manifest line; written to --out or stdout.
struct Output {
  std::ostringstream body;
  void kv(const std::string& key, double v) { body << key << '=' << num(v) << '\n'; }
  void kv(const std::string& key, const std::string& v) { body << key << '=' << v << '\n'; }
  void line(const std::string& text) { body << text << '\n'; }
  void row(const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) body << (k ? "," : "") << num(values[k]);
    body << '\n';
  }
};

struct Targets {
  double a = 1.0, b = -1.0, p = 0.5, t = 0.5;
  std::string targets, fractions;

  void add(CLI::App* sub, bool with_time) {
    sub->add_option("--a", a, "upper target");
    sub->add_option("--b", b, "lower target");
    sub->add_option("--p", p, "fraction of paths at the upper target");
    if (with_time) sub->add_option("--t", t, "time in (0, 1)");
    sub->add_option("--targets", targets, "comma-separated targets (overrides --a/--b/--p)");
    sub->add_option("--fractions", fractions, "comma-separated fractions matching --targets");
  }
  TargetConfig config() const {
    if (targets.empty()) return TargetConfig::two_target(a, b, p, t);
    TargetConfig c;
    c.targets = parse_list(targets);
    c.fractions = parse_list(fractions);
    c.time = t;
    c.validate();
    return c;
  }
};

std::string manifest_value(const CLI::Option* opt) {
  if (opt->count() == 0) return opt->get_default_str();
  std::string joined;
  for (const auto& r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
  return joined;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-matrix cusp laboratory: spectral curve, Pearcey kernels, Fredholm determinants, "
               "scaling limits, PDE checks and Monte Carlo."};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "output file (default: standard output)");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--seed", seed, "random seed (Monte Carlo subcommands only)");

  std::map<CLI::App*, std::function<void(Output&)>> actions;
  auto command = [&](const std::string& name, const std::string& help) { return app.add_subcommand(name, help); };

  Targets tg;
  double t = 0.0, s = 0.0, x = 0.0, h = 0.05, tau = 0.0, q = 2.0;
  int m = 40, n = 64, l = 2, samples = 200, steps = 100, points = 201;
  std::string E_text = "-1,1", list_text, y_text, times_text, sets_text, kind = "pearcey";

  // cusp
  CLI::App* cusp = command("cusp", "critical point of two targets");
  cusp->add_option("--a", tg.a);
  cusp->add_option("--b", tg.b);
  cusp->add_option("--p", tg.p);
  actions[cusp] = [&](Output& o) {
    CriticalData c = find_cusp(tg.a, tg.b, tg.p);
    for (auto [k, v] : std::vector<std::pair<std::string, double>>{
             {"a", c.a}, {"b", c.b}, {"p", c.p}, {"q", c.q}, {"r", c.r}, {"t0", c.t0}, {"x0", c.x0}, {"c0", c.c0},
             {"mu", c.mu}, {"A", c.A}, {"alpha", c.alpha}, {"beta", c.beta}, {"z0", c.z0}, {"u0", c.u0}})
      o.kv(k, v);
  };

  // density
  CLI::App* density = command("density", "limiting density in the matrix variable");
  tg.add(density, true);
  double zmin = -4.0, zmax = 4.0;
  density->add_option("--zmin", zmin);
  density->add_option("--zmax", zmax);
  density->add_option("--points", points);
  actions[density] = [&](Output& o) {
    std::vector<double> zs;
    for (int k = 0; k < points; ++k) zs.push_back(zmin + (zmax - zmin) * k / std::max(1, points - 1));
    o.line("z,density");
    for (const auto& d : density_sweep(tg.config(), zs)) o.row({d.z.real(), d.density});
  };

  // support
  CLI::App* support = command("support", "support intervals of the limiting density");
  tg.add(support, true);
  actions[support] = [&](Output& o) {
    SupportSet sup = support_set(tg.config());
    o.kv("intervals", static_cast<double>(sup.intervals.size()));
    for (std::size_t k = 0; k < sup.intervals.size(); ++k) {
      o.kv("left_" + std::to_string(k + 1), sup.intervals[k].first);
      o.kv("right_" + std::to_string(k + 1), sup.intervals[k].second);
    }
    o.kv("mass", total_mass(tg.config()));
  };

  // track
  CLI::App* track = command("track", "merging of branch points in the rescaled time T = 2t/(1-t)");
  tg.add(track, false);
  double T_min = 0.01, T_max = 10.0;
  track->add_option("--T-min", T_min);
  track->add_option("--T-max", T_max);
  track->add_option("--steps", steps);
  actions[track] = [&](Output& o) {
    TargetConfig c = tg.config();
    o.line("T,t,z,index_1,index_2");
    for (const auto& e : track_merges(c.targets, c.fractions, T_min, T_max, steps))
      o.row({e.T, time_from_rescaled(e.T), e.z, static_cast<double>(e.indices.first),
             static_cast<double>(e.indices.second)});
  };

  // kernel
  CLI::App* kernel = command("kernel", "kernel values on a grid");
  kernel->add_option("--kind", kind, "pearcey | pearcey-double | airy | finite-n | rescaled")
      ->check(CLI::IsMember({"pearcey", "pearcey-double", "airy", "finite-n", "rescaled"}));
  kernel->add_option("--s", s, "first time (Pearcey tau, or finite-n t)");
  kernel->add_option("--t", t, "second time");
  kernel->add_option("--x", list_text, "comma-separated row points")->required();
  kernel->add_option("--y", y_text, "comma-separated column points (default: --x)");
  kernel->add_option("--n", n);
  kernel->add_option("--a", tg.a);
  kernel->add_option("--b", tg.b);
  kernel->add_option("--p", tg.p);
  actions[kernel] = [&](Output& o) {
    std::vector<double> xs = parse_list(list_text), ys = y_text.empty() ? xs : parse_list(y_text);
    Eigen::MatrixXd K(xs.size(), ys.size());
    if (kind == "pearcey") {
      K = pearcey_kernel_matrix(s, t, xs, ys);
    } else if (kind == "pearcey-double") {
      K = PearceyDoubleIntegral(s, t).matrix(xs, ys);
    } else if (kind == "airy") {
      K = airy_kernel_fn()(xs, ys);
    } else if (kind == "finite-n") {
      K = FiniteNKernel({n, tg.a, tg.b, tg.p}).matrix(s, t, xs, ys);
    } else {
      K = RescaledKernel({n, tg.a, tg.b, tg.p}).matrix(s, t, xs, ys);
    }
    o.line("x,y,kernel");
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j) o.row({xs[i], ys[j], K(i, j)});
  };

  // gap
  CLI::App* gap = command("gap", "gap probability det(I - K) on a union of intervals");
  gap->add_option("--kind", kind, "pearcey | airy")->check(CLI::IsMember({"pearcey", "airy"}));
  gap->add_option("--t", t, "Pearcey time");
  gap->add_option("--E", E_text, "intervals y1,y2;y3,y4 (Pearcey)");
  gap->add_option("--s", s, "left end of (s, inf) (Airy)");
  gap->add_option("--m", m, "nodes per interval");
  actions[gap] = [&](Output& o) {
    GapResult r = kind == "airy" ? airy_gap(s, m) : gap_probability(pearcey_kernel_fn(t), parse_union(E_text), m);
    o.kv("value", r.value);
    o.kv("log_value", r.log_value);
    o.kv("error_estimate", r.error_estimate);
    if (kind == "airy") o.kv("truncated_at", r.truncated_at);
  };

  // multigap
  CLI::App* multigap = command("multigap", "multi-time Pearcey gap probability");
  multigap->add_option("--times", times_text, "comma-separated ascending times")->required();
  multigap->add_option("--sets", sets_text, "one interval union per time, separated by '|'")->required();
  multigap->add_option("--m", m);
  actions[multigap] = [&](Output& o) {
    GapResult r = multitime_gap(pearcey_time_kernel_fn(), parse_list(times_text), parse_sets(sets_text), m);
    o.kv("value", r.value);
    o.kv("log_value", r.log_value);
    o.kv("error_estimate", r.error_estimate);
  };

  // resolvent
  CLI::App* resolvent = command("resolvent", "resolvent quantities and the endpoint identity");
  resolvent->add_option("--t", t);
  resolvent->add_option("--E", E_text);
  resolvent->add_option("--m", m);
  resolvent->add_option("--step", h, "shift step for the second E-derivative of log det");
  actions[resolvent] = [&](Output& o) {
    IntervalUnion E = parse_union(E_text);
    ResolventData d = resolvent_quantities(t, E, m);
    o.kv("u", d.u);
    o.kv("log_det", d.log_det);
    o.kv("condition", d.condition);
    o.kv("identity_residual", d.identity_residual());
    for (std::size_t k = 0; k < d.p_hat_end.size(); ++k) {
      o.kv("p_hat_" + std::to_string(k + 1), d.p_hat_end[k]);
      o.kv("q_hat_" + std::to_string(k + 1), d.q_hat_end[k]);
    }
    auto K = pearcey_kernel_fn(t);
    auto logdet = [&](double shift) { return log_fredholm_det(K, NystromGrid::build(E.shifted(shift), m)); };
    o.kv("endpoint_sum", endpoint_sum(d));
    o.kv("d2E_log_det", (logdet(h) - 2.0 * logdet(0.0) + logdet(-h)) / (h * h));
    o.kv("dE_u", (resolvent_quantities(t, E.shifted(h), m).u - resolvent_quantities(t, E.shifted(-h), m).u) / (2 * h));
  };

  // pde-residual
  CLI::App* pde = command("pde-residual", "finite-difference residual of the Pearcey PDE");
  double t0 = 0.0, t1 = NAN, corrupt = 1.0, bracket = 1.0;
  pde->add_option("--t0", t0, "first time");
  pde->add_option("--t1", t1, "last time (default: --t0)");
  pde->add_option("--E", E_text, "single interval y1,y2");
  pde->add_option("--step", h, "grid step in t and in the endpoints");
  pde->add_option("--m", m);
  pde->add_option("--corrupt", corrupt, "multiply Q by this factor (negative control)");
  pde->add_option("--bracket-sign", bracket, "sign of the Wronskian term");
  actions[pde] = [&](Output& o) {
    IntervalUnion E = parse_union(E_text);
    if (E.count() != 1) throw std::invalid_argument("pde-residual: E must be a single interval");
    double c = 0.5 * (E.endpoints[0] + E.endpoints[1]), w = 0.5 * (E.endpoints[1] - E.endpoints[0]);
    QSurface surface = q_surface({t0, std::isnan(t1) ? t0 : t1}, c, w, h, h, m);
    o.body << pearcey_pde_residual(surface.scaled(corrupt), bracket).to_csv();
  };

  // lemma-checks
  CLI::App* lemma = command("lemma-checks", "small-interval estimates for u on E = [x, x + h]");
  lemma->add_option("--t", t);
  lemma->add_option("--x", x);
  lemma->add_option("--widths", list_text, "comma-separated widths, decreasing");
  lemma->add_option("--m", m);
  actions[lemma] = [&](Output& o) {
    std::vector<double> hs = list_text.empty() ? std::vector<double>{1e-2, 5e-3, 2.5e-3} : parse_list(list_text);
    SmallIntervalTable tab = small_interval_checks(t, x, hs, std::min(m, 20));
    o.line("h,dE_u,dt_u,dE_u_over_h,dt_u_over_h");
    for (const auto& r : tab.rows) o.row({r.h, r.dE_u, r.dt_u, r.dE_u / r.h, r.dt_u / r.h});
    o.line("# coefficient_E=" + num(tab.coefficient_E) + " closed_E=" + num(tab.closed_E));
    o.line("# coefficient_t=" + num(tab.coefficient_t) + " closed_t=" + num(tab.closed_t));
  };

  // wronskian
  CLI::App* wr = command("wronskian", "coefficient 2pq(pq)'' - 3(p'q')'(p'q'' - p''q')");
  wr->add_option("--t", t);
  wr->add_option("--x", x);
  double wr_h = 0.0;
  wr->add_option("--width", wr_h, "also evaluate the small-interval Wronskian at this width");
  actions[wr] = [&](Output& o) {
    o.kv("value", wronskian_coefficient(t, x));
    if (wr_h > 0.0) {
      o.kv("small_interval", small_interval_wronskian(t, x, wr_h));
      o.kv("predicted", 0.5 * wr_h * wr_h * wronskian_coefficient(t, x));
    }
  };

  // scaling-solve
  CLI::App* ss = command("scaling-solve", "scaling coefficients at the cusp of a two-target action");
  ss->add_option("--a", tg.a);
  ss->add_option("--b", tg.b);
  ss->add_option("--p", tg.p);
  ss->add_option("--l", l, "order of the singularity");
  ss->add_option("--tau", tau);
  actions[ss] = [&](Output& o) {
    CriticalData c = find_cusp(tg.a, tg.b, tg.p);
    ActionDerivatives d = target_action_derivatives(TargetConfig::two_target(tg.a, tg.b, tg.p, c.t0), c.x0, c.u0, c.t0);
    ScalingCoefficients k = solve_scaling(d, l, tau);
    o.kv("alpha_t", k.alpha_t);
    o.kv("alpha_x", k.alpha_x);
    o.kv("beta_x", k.beta_x);
    o.kv("alpha_y", k.alpha_y);
    o.kv("orientation", k.orientation);
    o.kv("criticality_defect", d.criticality_defect(l));
    std::vector<double> res = scaling_residuals(d, l, tau, k);
    for (std::size_t i = 0; i < res.size(); ++i) o.kv("residual_" + std::to_string(i + 1), res[i]);
  };

  // exponents
  CLI::App* ex = command("exponents", "critical exponents for a singularity of order l");
  ex->add_option("--l", l);
  actions[ex] = [&](Output& o) {
    ScalingExponents e = critical_exponents(l);
    auto rat = [](const Rational& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); };
    o.kv("l", static_cast<double>(e.l));
    o.kv("gamma_y", rat(e.gamma_y));
    o.kv("gamma_x", rat(e.gamma_x));
    o.kv("gamma_t", rat(e.gamma_t));
  };

  // descent-check
  CLI::App* dc = command("descent-check", "monotonicity of Re F along the steepest-descent contours");
  dc->add_option("--q", q);
  dc->add_option("--samples", samples, "samples per segment");
  actions[dc] = [&](Output& o) {
    DescentReport r = contour_descent_check(q, samples);
    o.kv("ok", r.ok ? "true" : "false");
    o.kv("samples_checked", static_cast<double>(r.samples_checked));
    o.kv("violations", static_cast<double>(r.violations.size()));
    for (const auto& v : r.violations)
      o.line("# violation contour=" + v.contour + " at=" + num(v.to.real()) + "," + num(v.to.imag()) +
             " increase=" + num(v.increase));
    if (!r.ok) throw std::runtime_error("descent check failed with " + std::to_string(r.violations.size()) + " violations");
  };

  // converge
  CLI::App* cv = command("converge", "finite-n kernel against the Pearcey kernel in rescaled coordinates");
  cv->add_option("--a", tg.a);
  cv->add_option("--b", tg.b);
  cv->add_option("--p", tg.p);
  cv->add_option("--n", list_text, "comma-separated sizes")->required();
  actions[cv] = [&](Output& o) {
    ConvergenceStudy st = convergence_study(tg.a, tg.b, tg.p, parse_int_list(list_text));
    o.line("n,max_abs_error");
    for (const auto& r : st.rows) o.row({static_cast<double>(r.n), r.max_abs_error});
    o.line("# fitted_slope=" + num(st.fitted_slope));
    o.line(std::string("# decreasing_tail=") + (st.decreasing_tail ? "true" : "false"));
  };

  // sample-spectrum
  CLI::App* sp = command("sample-spectrum", "eigenvalues of the Gaussian matrix with external source");
  tg.add(sp, true);
  sp->add_option("--n", n);
  sp->add_option("--samples", samples);
  actions[sp] = [&](Output& o) {
    o.line("sample_index,eigenvalue_index,value");
    for (const auto& smp : sample_spectra(n, tg.config(), seed, samples))
      for (std::size_t k = 0; k < smp.eigenvalues.size(); ++k)
        o.row({static_cast<double>(smp.index), static_cast<double>(k), smp.eigenvalues[k]});
  };

  // sample-paths
  CLI::App* pth = command("sample-paths", "non-intersecting Brownian bridges");
  tg.add(pth, false);
  pth->add_option("--n", n);
  pth->add_option("--steps", steps);
  actions[pth] = [&](Output& o) {
    PathBundle b = sample_bridge_paths(n, tg.config(), steps, seed);
    o.line("time,path_index,position");
    for (std::size_t k = 0; k < b.times.size(); ++k)
      for (std::size_t i = 0; i < b.paths.size(); ++i) o.row({b.times[k], static_cast<double>(i), b.paths[i][k]});
  };

  // compare-density
  CLI::App* cd = command("compare-density", "Kolmogorov-Smirnov distance between sampled and limiting densities");
  tg.add(cd, true);
  cd->add_option("--n", n);
  cd->add_option("--samples", samples);
  double shift = 0.0;
  cd->add_option("--shift", shift, "shift the predicted density (negative control)");
  actions[cd] = [&](Output& o) {
    TargetConfig c = tg.config();
    std::vector<SpectrumSample> draws = sample_spectra(n, c, seed, samples);
    double ks;
    if (shift == 0.0) {
      ks = density_compare(draws);
    } else {
      SupportSet sup = support_set(c);
      auto f = limiting_density(c);
      ks = density_compare(draws, [&](double z) { return f(z - shift); }, sup.intervals.front().first + shift,
                           sup.intervals.back().second + shift);
    }
    o.kv("ks", ks);
    o.kv("samples", static_cast<double>(samples));
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  set_default_threads(threads);
  const auto start = std::chrono::steady_clock::now();
  Output out;
  try {
    actions.at(chosen)(out);
  } catch (const std::exception& e) {
    std::cerr << "cusp-lab " << chosen->get_name() << ": " << e.what() << '\n';
    return 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json flags;
  std::string manifest = std::string("# cusp-lab version=") + kVersion + " subcommand=" + chosen->get_name();
  auto record = [&](const CLI::Option* opt) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "out") return;
    const std::string value = manifest_value(opt);
    flags[name] = value;
    manifest += " " + name + "=" + (value.empty() ? "\"\"" : value);
  };
  for (const CLI::Option* opt : app.get_options()) record(opt);
  for (const CLI::Option* opt : chosen->get_options()) record(opt);

  const std::string text = manifest + "\n" + out.body.str();
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "cusp-lab: cannot write " << out_path << '\n';
      return 1;
    }
    f << text;
    nlohmann::ordered_json sidecar = {{"tool", "cusp-lab"},      {"version", kVersion},
                                      {"subcommand", chosen->get_name()}, {"flags", flags},
                                      {"seed", seed},            {"wall_time_seconds", wall}};
    std::ofstream(out_path + ".json") << sidecar.dump(2) << '\n';
  }
  return 0;
}
