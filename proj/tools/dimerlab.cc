// dimerlab: exact dimer statistics on the discrete torus and their
// bead-model scaling limit, from the command line.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure,
// 4 self-check failed.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dimer/dimer.hpp"

namespace {

using dimer::cplx;
using nlohmann::json;

std::string f17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string ctok(cplx v) {
  std::string s = f17(v.real());
  s += v.imag() < 0 ? "-" : "+";
  s += f17(std::abs(v.imag()));
  s += "i";
  return s;
}

json jc(cplx v) { return {{"re", v.real()}, {"im", v.imag()}}; }

json jlog(const dimer::log_complex& v) {
  json j{{"log_mag", v.log_mag()}, {"phase", v.phase()}};
  if (v.is_zero() || v.log_mag() < 700.0) {
    cplx val = v.value();
    j["re"] = val.real();
    j["im"] = val.imag();
  }
  return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    parts.push_back(s.substr(pos, next == std::string::npos ? next : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

long parse_long(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("cannot parse ") + what + ": '" + s + "'");
  }
}

cplx parse_complex(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() == 1) return {parse_double(parts[0], "real part"), 0.0};
  if (parts.size() == 2)
    return {parse_double(parts[0], "real part"), parse_double(parts[1], "imaginary part")};
  throw std::invalid_argument("complex value must be 're' or 're,im': '" + s + "'");
}

dimer::theta parse_sector(const std::string& s) {
  auto parts = split(s, ',');
  if (parts.size() != 2) throw std::invalid_argument("sector must be 't1,t2': '" + s + "'");
  int t1 = static_cast<int>(parse_long(parts[0], "theta1"));
  int t2 = static_cast<int>(parse_long(parts[1], "theta2"));
  if ((t1 != 0 && t1 != 1) || (t2 != 0 && t2 != 1))
    throw std::invalid_argument("sector components must be 0 or 1");
  return {t1, t2};
}

dimer::move parse_move(const std::string& s) {
  if (s == "stay") return dimer::move::stay;
  if (s == "e1") return dimer::move::step1;
  if (s == "e2") return dimer::move::step2;
  throw std::invalid_argument("move must be stay, e1 or e2: '" + s + "'");
}

dimer::edge_event parse_event(const std::string& s) {
  auto halves = split(s, ':');
  if (halves.size() != 2) throw std::invalid_argument("event must be 'x1,x2:move': '" + s + "'");
  auto coords = split(halves[0], ',');
  if (coords.size() != 2) throw std::invalid_argument("event site must be 'x1,x2': '" + s + "'");
  dimer::edge_event ev;
  ev.x.x1 = static_cast<int>(parse_long(coords[0], "x1"));
  ev.x.x2 = static_cast<int>(parse_long(coords[1], "x2"));
  ev.mv = parse_move(halves[1]);
  return ev;
}

dimer::query_point parse_point(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() != 3)
    throw std::invalid_argument("point must be 't:h:class' with class bead, occ or unocc: '" + s + "'");
  dimer::query_point p;
  p.t = parse_double(parts[0], "time");
  p.h = static_cast<int>(parse_long(parts[1], "string index"));
  if (parts[2] == "bead")
    p.cls = dimer::point_class::bead;
  else if (parts[2] == "occ")
    p.cls = dimer::point_class::occupied;
  else if (parts[2] == "unocc")
    p.cls = dimer::point_class::unoccupied;
  else
    throw std::invalid_argument("point class must be bead, occ or unocc: '" + parts[2] + "'");
  if (p.t < 0.0 || p.t >= 1.0) throw std::invalid_argument("point time must lie in [0,1)");
  return p;
}

std::vector<long> parse_long_list(const std::string& s) {
  std::vector<long> out;
  for (const std::string& part : split(s, ',')) out.push_back(parse_long(part, "list entry"));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

/// Per-site weights drawn uniformly from [0.5, 1.5), in site-index order
/// alpha, beta, gamma. Deterministic for a fixed seed.
dimer::weight_field random_field(dimer::torus_shape shape, std::uint64_t seed) {
  dimer::weight_field f(shape);
  std::mt19937_64 rng(seed);
  auto u = [&] { return 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < shape.sites(); ++i) {
    dimer::site_weights& w = f.w[static_cast<std::size_t>(i)];
    w.alpha = u();
    w.beta = u();
    w.gamma = u();
  }
  return f;
}

struct field_options {
  int m1 = 0;
  int m2 = 0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  std::uint64_t field_seed = 0;
  bool has_seed = false;

  dimer::weight_field build() const {
    dimer::torus_shape shape(m1, m2);
    if (has_seed) return random_field(shape, field_seed);
    return dimer::weight_field(shape, {alpha, beta, gamma});
  }
  bool constant() const { return !has_seed; }
};

void add_field_options(CLI::App* cmd, field_options& fo, bool allow_random) {
  cmd->add_option("--m1", fo.m1, "torus extent in direction 1")->required();
  cmd->add_option("--m2", fo.m2, "torus extent in direction 2")->required();
  cmd->add_option("--alpha", fo.alpha, "stay weight (default 1)");
  cmd->add_option("--beta", fo.beta, "step-1 weight (default 1)");
  cmd->add_option("--gamma", fo.gamma, "step-2 weight (default 1)");
  if (allow_random) {
    auto* opt = cmd->add_option("--random-field", fo.field_seed,
                                "draw per-site weights uniformly from [0.5,1.5) with this seed");
    opt->each([&fo](const std::string&) { fo.has_seed = true; });
  }
}

int run_enumerate(const field_options& fo, bool as_json) {
  dimer::weight_field field = fo.build();
  auto matchings = dimer::enumerate_matchings(field.shape);
  cplx total = 0.0;
  json items = json::array();
  for (const dimer::matching& m : matchings) {
    cplx w = dimer::weight_of_matching(field, m);
    total += w;
    dimer::matching_exit_counts ty = dimer::matching_type(m);
    std::vector<std::string> rows;
    for (int x2 = 0; x2 < fo.m2; ++x2) {
      std::string row;
      for (int x1 = 0; x1 < fo.m1; ++x1) row += dimer::move_char(m.at({x1, x2}));
      rows.push_back(row);
    }
    if (as_json) {
      items.push_back({{"rows", rows},
                       {"weight", jc(w)},
                       {"h1", ty.h1},
                       {"h2", ty.h2},
                       {"sign", dimer::matching_sign(m)}});
    } else {
      for (int x2 = fo.m2 - 1; x2 >= 0; --x2) std::cout << rows[static_cast<std::size_t>(x2)] << "\n";
      std::cout << "weight=" << ctok(w) << " exits=(" << ty.h1 << "," << ty.h2
                << ") sign=" << dimer::matching_sign(m) << "\n\n";
    }
  }
  if (as_json) {
    json out{{"m1", fo.m1},
             {"m2", fo.m2},
             {"count", matchings.size()},
             {"total_weight", jc(total)},
             {"matchings", items}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "matchings=" << matchings.size() << " total_weight=" << ctok(total) << "\n";
  }
  return 0;
}

int run_partition(const field_options& fo, bool as_json, bool check) {
  dimer::weight_field field = fo.build();
  dimer::torus_shape shape = field.shape;
  dimer::site_weights cw{fo.alpha, fo.beta, fo.gamma};

  std::array<dimer::log_complex, 4> zs;
  dimer::log_complex total;
  for (dimer::theta th : dimer::all_sectors) {
    dimer::log_complex z = fo.constant() ? dimer::sector_partition_constant_log(shape, cw, th)
                                         : dimer::sector_partition_log(field, th);
    zs[static_cast<std::size_t>(dimer::sector_index(th))] = z;
    total = dimer::sector_index(th) == 0 ? z : total + z;
  }

  int status = 0;
  json sectors = json::array();
  for (dimer::theta th : dimer::all_sectors) {
    const dimer::log_complex& z = zs[static_cast<std::size_t>(dimer::sector_index(th))];
    json entry{{"theta", {th.t1, th.t2}}, {"value", jlog(z)}};
    if (!total.is_zero()) entry["mu"] = jc((z / total).value());
    sectors.push_back(entry);
  }
  json out{{"m1", fo.m1}, {"m2", fo.m2}, {"partition", jlog(total)}, {"sectors", sectors}};
  if (check) {
    cplx by_enum = dimer::partition_by_enumeration(field);
    double diff = std::abs(total.value() - by_enum);
    double rel = diff / std::max(1e-300, std::abs(by_enum));
    out["enumeration"] = jc(by_enum);
    out["enumeration_rel_diff"] = rel;
    if (rel > 1e-10) status = 4;
  }
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "partition=" << ctok(total.value()) << " log_mag=" << f17(total.log_mag())
              << " phase=" << f17(total.phase()) << "\n";
    for (dimer::theta th : dimer::all_sectors) {
      const dimer::log_complex& z = zs[static_cast<std::size_t>(dimer::sector_index(th))];
      std::cout << "sector(" << th.t1 << "," << th.t2 << ")=" << ctok(z.value());
      if (!total.is_zero()) std::cout << " mu=" << ctok((z / total).value());
      std::cout << "\n";
    }
    if (check)
      std::cout << "enumeration=" << ctok(out["enumeration"]["re"].get<double>() +
                                          cplx(0.0, 1.0) * out["enumeration"]["im"].get<double>())
                << " rel_diff=" << f17(out["enumeration_rel_diff"].get<double>()) << "\n";
  }
  return status;
}

int run_correlate(const field_options& fo, const std::vector<std::string>& event_strs,
                  const std::string& sector_str, bool as_json, bool check) {
  dimer::weight_field field = fo.build();
  std::vector<dimer::edge_event> events;
  for (const std::string& s : event_strs) {
    dimer::edge_event ev = parse_event(s);
    if (ev.x.x1 < 0 || ev.x.x1 >= fo.m1 || ev.x.x2 < 0 || ev.x.x2 >= fo.m2)
      throw std::invalid_argument("event site outside the torus: '" + s + "'");
    events.push_back(ev);
  }
  json out{{"m1", fo.m1}, {"m2", fo.m2}};
  json evs = json::array();
  for (const dimer::edge_event& e : events)
    evs.push_back({{"x1", e.x.x1}, {"x2", e.x.x2}, {"move", std::string(1, dimer::move_char(e.mv))}});
  out["events"] = evs;

  cplx value;
  if (!sector_str.empty()) {
    dimer::theta th = parse_sector(sector_str);
    value = dimer::sector_edge_probability(field, th, events);
    out["sector"] = {th.t1, th.t2};
    out["sector_probability"] = jc(value);
  } else {
    value = dimer::edge_probability(field, events);
    out["probability"] = jc(value);
    dimer::sector_weight_set mu = dimer::sector_weights(field);
    json mus = json::array();
    for (dimer::theta th : dimer::all_sectors)
      mus.push_back({{"theta", {th.t1, th.t2}}, {"mu", jc(mu.at(th))}});
    out["sector_weights"] = mus;
  }

  int status = 0;
  if (check) {
    if (!sector_str.empty())
      throw std::invalid_argument("--check-enumeration applies to the full measure, not one sector");
    cplx oracle = dimer::edge_probability_by_enumeration(field, events);
    double diff = std::abs(value - oracle);
    out["enumeration"] = jc(oracle);
    out["enumeration_abs_diff"] = diff;
    if (diff > 1e-10) status = 4;
  }
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << (sector_str.empty() ? "probability=" : "sector_probability=") << ctok(value) << "\n";
    if (check) std::cout << "enumeration_abs_diff=" << f17(out["enumeration_abs_diff"].get<double>()) << "\n";
  }
  return status;
}

int run_bead_corr(int n, double lambda, double temp, const std::vector<std::string>& point_strs,
                  const std::string& sector_str, long discrete_m, bool as_json) {
  dimer::theta th = sector_str.empty() ? dimer::theta{0, 0} : parse_sector(sector_str);
  std::vector<dimer::query_point> pts;
  for (const std::string& s : point_strs) {
    dimer::query_point p = parse_point(s);
    if (p.h < 0 || p.h >= n) throw std::invalid_argument("point string index outside 0..n-1: '" + s + "'");
    pts.push_back(p);
  }
  cplx density = dimer::correlation_density(n, lambda, temp, th, pts);
  json out{{"n", n}, {"lambda", lambda}, {"temp", temp}, {"theta", {th.t1, th.t2}}};
  json jpts = json::array();
  for (const dimer::query_point& p : pts) {
    const char* cls = p.cls == dimer::point_class::bead
                          ? "bead"
                          : (p.cls == dimer::point_class::occupied ? "occ" : "unocc");
    jpts.push_back({{"t", p.t}, {"h", p.h}, {"class", cls}});
  }
  out["points"] = jpts;
  out["density"] = jc(density);
  if (discrete_m > 0) {
    cplx disc = dimer::discrete_correlation_density(static_cast<int>(discrete_m), n, lambda, temp, th, pts);
    out["discrete_m"] = discrete_m;
    out["discrete"] = jc(disc);
    out["abs_diff"] = std::abs(disc - density);
  }
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "density=" << ctok(density) << "\n";
    if (discrete_m > 0)
      std::cout << "discrete(m=" << discrete_m << ")=" << ctok(out["discrete"]["re"].get<double>() +
                                                               cplx(0.0, 1.0) * out["discrete"]["im"].get<double>())
                << " abs_diff=" << f17(out["abs_diff"].get<double>()) << "\n";
  }
  return 0;
}

void print_sweep(const dimer::sweep_result& sw) {
  std::cout << "m,finite,limit,abs_err,rel_err\n";
  for (const dimer::sweep_row& row : sw.rows)
    std::cout << row.m << "," << ctok(row.finite) << "," << ctok(row.limit) << ","
              << f17(row.abs_err) << "," << f17(row.rel_err) << "\n";
}

int run_limits(const std::string& quantity, cplx z, int theta1, double s, bool half,
               int n, double lambda, double temp, std::vector<long> ms) {
  if (theta1 != 0 && theta1 != 1) throw std::invalid_argument("--theta1 must be 0 or 1");
  for (long m : ms)
    if (m < 1) throw std::invalid_argument("list entries must be positive");

  dimer::sweep_result sw;
  if (quantity == "root-product") {
    sw = dimer::make_sweep(
        [&](long m) { return cplx(dimer::finite_root_product(static_cast<int>(m), theta1, z), 0.0); },
        cplx(dimer::root_product_limit(theta1, z), 0.0), ms);
  } else if (quantity == "integral") {
    sw = dimer::make_sweep(
        [&](long m) { return cplx(dimer::product_log_integral(static_cast<int>(m), z), 0.0); },
        cplx(dimer::product_log_integral_limit(z), 0.0), ms);
  } else if (quantity == "correction") {
    sw = dimer::make_sweep(
        [&](long m) { return cplx(dimer::product_log_correction(static_cast<int>(m), theta1, z), 0.0); },
        cplx(dimer::correction_limit(theta1, z), 0.0), ms);
  } else if (quantity == "fourier") {
    sw = dimer::make_sweep(
        [&](long m) { return dimer::fourier_partial_sum(z, s, static_cast<int>(m), half); },
        dimer::fourier_sum_limit(z, s, half), ms);
  } else if (quantity == "inverse-kernel") {
    for (long m : ms)
      if (m % 2 != 0) throw std::invalid_argument("inverse-kernel requires even list entries");
    sw = dimer::make_sweep(
        [&](long m) { return dimer::inverse_kernel_sum_finite(static_cast<int>(m), theta1, s, z); },
        dimer::inverse_kernel_sum_limit(theta1, s, z), ms);
  } else if (quantity == "inverse-kernel-delta") {
    for (long m : ms)
      if (m % 2 != 0) throw std::invalid_argument("inverse-kernel-delta requires even list entries");
    sw = dimer::make_sweep(
        [&](long m) { return dimer::inverse_kernel_sum_finite_delta(static_cast<int>(m), theta1, z); },
        dimer::inverse_kernel_sum_limit_delta(theta1, z), ms);
  } else if (quantity == "partition-scaling") {
    for (long m : ms)
      if (m % 2 != 0 || m < 2) throw std::invalid_argument("partition-scaling requires even list entries");
    sw = dimer::partition_scaling_sweep(n, lambda, temp, ms);
  } else {
    throw std::invalid_argument(
        "unknown quantity; expected root-product, integral, correction, fourier, "
        "inverse-kernel, inverse-kernel-delta or partition-scaling");
  }
  print_sweep(sw);
  return 0;
}

int run_volume(int n, int k, long samples, std::uint64_t seed, int threads) {
  dimer::bead_volume_series series = dimer::bead_partition_series(n, k);
  dimer::volume_estimate est = dimer::bead_volume_mc(n, k, samples, seed, threads);
  int status = 0;
  std::cout << "l,estimate,std_error,series,z_score\n";
  for (int l = 0; l <= n; ++l) {
    double se = est.std_error[static_cast<std::size_t>(l)];
    double zscore = (est.value[static_cast<std::size_t>(l)] - series.at(k, l)) / se;
    if (std::abs(zscore) > 4.0) status = 4;
    std::cout << l << "," << f17(est.value[static_cast<std::size_t>(l)]) << "," << f17(se) << ","
              << f17(series.at(k, l)) << "," << f17(zscore) << "\n";
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dimerlab: dimer matchings on the discrete torus (exact partition functions, "
      "sector measures, move correlations) and the bead-model scaling limit"};
  app.require_subcommand(1);

  field_options fo;
  bool as_json = false;
  bool check = false;
  std::vector<std::string> event_strs;
  std::vector<std::string> point_strs;
  std::string sector_str;
  int n = 1;
  double lambda = 0.5;
  double temp = 1.0;
  long discrete_m = 0;
  std::string quantity;
  std::string z_str = "1";
  int theta1 = 0;
  double s = 0.0;
  bool half = false;
  std::string m_list = "64,256,1024,4096";
  int k = 1;
  long samples = 1000000;
  std::uint64_t seed = 0;
  int threads = 1;

  int status = 0;

  CLI::App* c_enum = app.add_subcommand("enumerate", "list all matchings of a small torus");
  add_field_options(c_enum, fo, false);
  c_enum->add_flag("--json", as_json, "structured output");
  c_enum->callback([&] { status = run_enumerate(fo, as_json); });

  field_options fo_p;
  CLI::App* c_part = app.add_subcommand("partition", "partition function and sector measures");
  add_field_options(c_part, fo_p, true);
  c_part->add_flag("--json", as_json, "structured output");
  c_part->add_flag("--check-enumeration", check,
                   "compare against exhaustive enumeration (small tori); exit 4 on mismatch");
  c_part->callback([&] { status = run_partition(fo_p, as_json, check); });

  field_options fo_c;
  CLI::App* c_corr = app.add_subcommand("correlate", "probability of a joint move-label event");
  add_field_options(c_corr, fo_c, true);
  c_corr->add_option("--event", event_strs, "event 'x1,x2:move' with move stay, e1 or e2")
      ->required()
      ->take_all();
  c_corr->add_option("--sector", sector_str, "restrict to one sector 't1,t2'");
  c_corr->add_flag("--json", as_json, "structured output");
  c_corr->add_flag("--check-enumeration", check,
                   "compare against exhaustive enumeration (small tori); exit 4 on mismatch");
  c_corr->callback([&] { status = run_correlate(fo_c, event_strs, sector_str, as_json, check); });

  CLI::App* c_bead = app.add_subcommand("bead-corr", "bead-model correlation density");
  c_bead->add_option("--n", n, "number of strings")->required();
  c_bead->add_option("--lambda", lambda, "occupation rate parameter");
  c_bead->add_option("--temp", temp, "temperature parameter");
  c_bead->add_option("--point", point_strs, "query point 't:h:class', class bead, occ or unocc")
      ->required()
      ->take_all();
  c_bead->add_option("--sector", sector_str, "sector 't1,t2' (default 0,0)");
  c_bead->add_option("--discrete-m", discrete_m, "also evaluate the lattice counterpart at this even m");
  c_bead->add_flag("--json", as_json, "structured output");
  c_bead->callback([&] { status = run_bead_corr(n, lambda, temp, point_strs, sector_str, discrete_m, as_json); });

  CLI::App* c_lim = app.add_subcommand("limits", "finite-size values against their limits (CSV)");
  c_lim->add_option("--quantity", quantity,
                    "root-product | integral | correction | fourier | inverse-kernel | "
                    "inverse-kernel-delta | partition-scaling")
      ->required();
  c_lim->add_option("--z", z_str, "complex parameter 're' or 're,im'");
  c_lim->add_option("--theta1", theta1, "boundary sector bit, 0 or 1");
  c_lim->add_option("--s", s, "normalized displacement");
  c_lim->add_flag("--half", half, "half-integer modes (fourier)");
  c_lim->add_option("--n", n, "number of strings (partition-scaling)");
  c_lim->add_option("--lambda", lambda, "occupation rate parameter (partition-scaling)");
  c_lim->add_option("--temp", temp, "temperature parameter (partition-scaling)");
  c_lim->add_option("--m-list", m_list, "comma-separated sizes");
  c_lim->callback([&] {
    status = run_limits(quantity, parse_complex(z_str), theta1, s, half, n, lambda, temp,
                        parse_long_list(m_list));
  });

  CLI::App* c_vol = app.add_subcommand(
      "volume", "Monte Carlo configuration volumes against the series expansion (CSV)");
  c_vol->add_option("--n", n, "number of strings")->required();
  c_vol->add_option("--k", k, "beads per string")->required();
  c_vol->add_option("--samples", samples, "sample count (default 1e6)");
  c_vol->add_option("--seed", seed, "random seed")->required();
  c_vol->add_option("--threads", threads, "worker threads (default 1)");
  c_vol->callback([&] { status = run_volume(n, k, samples, seed, threads); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return status;
}
