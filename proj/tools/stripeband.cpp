#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <stripeband/stripeband.hpp>

using namespace stripeband;
using nlohmann::ordered_json;

namespace {

struct options {
  std::string model;
  std::string out;
  std::string out_dir = ".";
  double alpha = 0, beta = 0, kappa = 0;
  std::string mu;
  std::vector<std::string> mus;
  std::string kappa_grid = "-0.2:0.2:0.01";
  std::string alpha_grid = "-0.01:0.03:0.001";
  int points = 201;
  int N = 32;
  double tol = 1e-11, h1 = 1e-3, h2 = 5e-4;
  bool analytic_only = false;
  std::string spectrum_out;
  double d = 500, m = 0.45;
};

std::ostream& output(const options& o, std::ofstream& file) {
  if (o.out.empty() || o.out == "-") return std::cout;
  file.open(o.out);
  if (!file) throw error(error_kind::io, "cannot write " + o.out);
  return file;
}

void finish(std::ostream& os, const std::string& path) {
  os.flush();
  if (!os) throw error(error_kind::io, "write failed: " + path);
}

rd_model checked_model(const std::string& path) {
  rd_model m = load_model(path);
  auto v = validate_model(m);
  if (!v.pass()) {
    std::string failed;
    for (const auto& c : v.checks)
      if (!c.pass) failed += (failed.empty() ? "" : "; ") + c.name + " (" + fmt(c.value) + ")";
    throw error(error_kind::validation, "model violates Turing conditions: " + failed);
  }
  return m;
}

parameters parse_mu(const std::string& s) {
  auto v = parse_list(s, "mu");
  if (v.size() != 3) throw error(error_kind::validation, "mu must be alpha,beta,kappa_tilde");
  return {v[0], v[1], v[2]};
}

oracle_settings settings(const options& o) {
  if (o.N < 8) throw error(error_kind::validation, "N must be at least 8");
  if (!(o.tol > 0) || !(o.h1 > 0) || !(o.h2 > 0) || o.h2 >= o.h1)
    throw error(error_kind::validation, "oracle settings need tol > 0 and 0 < h2 < h1");
  oracle_settings c;
  c.N = o.N;
  c.tol = o.tol;
  c.h1 = o.h1;
  c.h2 = o.h2;
  return c;
}

ordered_json vec_json(const vec2& v) { return {v(0), v(1)}; }

int analyze(const options& o) {
  rd_model m = checked_model(o.model);
  auto tc = check_turing(m);
  if (!tc.pass) throw error(error_kind::validation, "Turing check failed: " + tc.reason);
  auto e = expand(m);
  auto s = zigzag_coefficients(m, e);
  const auto& d = e.lin;
  ordered_json r;
  r["model"] = m.name;
  r["turing"] = {{"kc", d.kc}, {"E0", vec_json(d.E0)}, {"E0_adjoint", vec_json(d.E0s)},
                 {"b", {d.b[0], d.b[1], d.b[2], d.b[3]}}, {"c", d.c}, {"lambda_beta", d.lambda_beta},
                 {"lambda_betabeta", d.lambda_betabeta}, {"lambda_M", d.lambda_M},
                 {"lambda_Mbeta", d.lambda_Mbeta}, {"lambda_Mkappa", d.lambda_Mkappa},
                 {"lambda_kappabeta", d.lambda_kappabeta}, {"rho_beta", d.rho_beta},
                 {"rho_kappa", d.rho_kappa}};
  r["expansion"] = {{"Q0", vec_json(e.quad.Q0)}, {"Q2", vec_json(e.quad.Q2)},
                    {"Q2_adjoint", vec_json(e.quad.Q2s)}, {"q0", e.nl.q0}, {"q2", e.nl.q2},
                    {"k0", e.nl.k0}, {"rho_nl", e.nl.rho_nl}, {"supercritical", e.nl.supercritical}};
  r["sideband"] = {{"rho_alpha", s.rho_alpha}, {"rho_betabeta", s.rho_betabeta}, {"q22", s.q22},
                   {"zigzag_kappa_slope", s.rho_alpha != 0 ? -s.kc * s.rho_kappa / s.rho_alpha : NAN},
                   {"zigzag_beta2", s.rho_alpha != 0 ? -s.rho_betabeta / s.rho_alpha : NAN},
                   {"eckhaus_kappa2", -3 * d.rho_kappa}, {"bifurcation_kappa2", -d.rho_kappa},
                   {"bifurcation_beta2", -d.rho_beta},
                   {"scenario_beta0", zigzag_scenario(s, 0)}, {"scenario_advected", zigzag_scenario(s, 1)}};
  ordered_json checks = ordered_json::array();
  for (const auto& c : d.checks)
    checks.push_back({{"name", c.name}, {"dispersion", c.dispersion}, {"inner_product", c.inner_product},
                      {"rel", c.rel}});
  r["cross_checks"] = checks;
  r["diagnostics"] = {{"lambda_Mbeta_closed_form", d.lambda_Mbeta_closed},
                      {"rho_alpha_amplitude_corrected", s.rho_alpha_amplitude_corrected},
                      {"max_cross_check_discrepancy", d.max_discrepancy()},
                      {"correction_residual", d.w.max_residual}};
  if (!m.has_quadratic()) r["diagnostics"]["rho_betabeta_closed_form"] = rho_betabeta_closed_form(m, d.core());
  auto dir = motion_direction(m);
  r["motion"] = {{"sign", dir.sign}, {"degenerate", dir.degenerate}, {"consistent", dir.consistent}};
  parameters mu{o.alpha, o.beta, o.kappa};
  auto A = amplitude(d, e.nl, mu);
  r["at"] = {{"alpha", mu.alpha}, {"beta", mu.beta}, {"kappa_tilde", mu.kappa_tilde},
             {"growth_rate", growth_rate(d, mu)}, {"velocity", velocity(d, mu)}};
  if (A) {
    r["at"]["amplitude"] = *A;
    r["at"]["region"] = region_name(classify_region(e, s, mu));
  } else {
    r["at"]["region"] = region_name(region::no_stripes);
  }
  std::ofstream f;
  auto& os = output(o, f);
  os << r.dump(2) << '\n';
  finish(os, o.out);
  return 0;
}

int boundaries_cmd(const options& o) {
  rd_model m = checked_model(o.model);
  auto e = expand(m);
  auto s = zigzag_coefficients(m, e);
  auto ks = parse_grid(o.kappa_grid, "kappa");
  std::ofstream f;
  auto& os = output(o, f);
  csv_row(os, {"kappa_tilde", "bifurcation", "eckhaus", "zigzag", "eckhaus_shifted", "zigzag_shifted"});
  for (double k : ks) {
    auto b = boundaries(s, k, o.beta);
    csv_row(os, {fmt(k), fmt(b.alpha_bif), fmt(b.alpha_eckhaus), b.alpha_zigzag ? fmt(*b.alpha_zigzag) : "nan",
                 fmt(b.alpha_tilde_eckhaus), b.alpha_tilde_zigzag ? fmt(*b.alpha_tilde_zigzag) : "nan"});
  }
  finish(os, o.out);
  return 0;
}

int stripe_cmd(const options& o) {
  rd_model m = checked_model(o.model);
  auto e = expand(m);
  parameters mu = parse_mu(o.mu);
  if (o.points < 2) throw error(error_kind::validation, "points must be at least 2");
  if (!amplitude(e.lin, e.nl, mu)) throw error(error_kind::validation, "no stripe at these parameters");
  const double two_pi = 2 * std::acos(-1.0);
  std::vector<double> xs;
  for (int i = 0; i < o.points; ++i) xs.push_back(two_pi * i / (o.points - 1));
  std::ofstream f;
  auto& os = output(o, f);
  csv_row(os, {"x", "u1", "u2"});
  for (const auto& p : stripe_profile(e, mu, xs)) csv_row(os, {fmt(p.x), fmt(p.u(0)), fmt(p.u(1))});
  finish(os, o.out);
  return 0;
}

double rel(double a, double ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }

int verify_cmd(const options& o) {
  rd_model m = checked_model(o.model);
  auto e = expand(m);
  auto s = zigzag_coefficients(m, e);
  auto cfg = settings(o);
  std::vector<parameters> mus;
  for (const auto& t : o.mus) mus.push_back(parse_mu(t));
  if (mus.empty()) throw error(error_kind::validation, "verify needs at least one --mu");

  struct row {
    std::vector<std::string> cells;
  };
  std::vector<row> rows(mus.size());
  std::vector<numeric_stripe> stripes(mus.size());
  parallel_for(mus.size(), [&](std::size_t i) {
    const auto& mu = mus[i];
    std::vector<std::string> c = {fmt(mu.alpha), fmt(mu.beta), fmt(mu.kappa_tilde)};
    if (!amplitude(e.lin, e.nl, mu)) {
      c.insert(c.end(), {"no-stripes", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan"});
      rows[i].cells = c;
      return;
    }
    numeric_stripe st;
    try {
      st = solve_stripe_numeric(m, e, mu, cfg);
    } catch (const error& err) {
      if (err.kind() != error_kind::numerical) throw;
      c.insert(c.end(), {"no-convergence", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan"});
      rows[i].cells = c;
      return;
    }
    stripes[i] = st;
    if (st.trivial) {
      c.insert(c.end(), {"no-stripes", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan"});
      rows[i].cells = c;
      return;
    }
    auto zz = curvature_fd(m, st, direction::ell, cfg.h1, cfg.h2);
    auto eh = curvature_fd(m, st, direction::gamma, cfg.h1, cfg.h2);
    double zza = zigzag_curvature(e, s, mu);
    auto ec = eckhaus_spectrum_coefficients(e, mu);
    double zzo = 0.5 * zz.second, eho = 0.5 * eh.second;
    bool agree = (zzo > 0) == (zza > 0) && (eho > 0) == (ec.second > 0);
    c.insert(c.end(), {"ok", fmt(st.amplitude()), fmt(zzo), fmt(zza), fmt(rel(zza, zzo)), fmt(eho), fmt(ec.second),
                       fmt(rel(ec.second, eho)), fmt(eh.first_imag), fmt(ec.first_imag), agree ? "yes" : "no"});
    rows[i].cells = c;
  });
  std::ofstream f;
  auto& os = output(o, f);
  csv_row(os, {"alpha", "beta", "kappa_tilde", "status", "A_numeric", "zz_oracle", "zz_analytic", "zz_rel",
               "eh_oracle", "eh_analytic", "eh_rel", "eh_first_imag_oracle", "eh_first_imag_analytic",
               "signs_agree"});
  for (const auto& r : rows) csv_row(os, r.cells);
  finish(os, o.out);

  if (!o.spectrum_out.empty()) {
    if (stripes[0].coeffs.empty() || stripes[0].trivial)
      throw error(error_kind::numerical, "no stripe for spectrum dump at the first mu");
    std::vector<double> gs, ls;
    for (int i = 0; i <= 20; ++i) gs.push_back(-0.5 + 0.05 * i);
    for (int i = 0; i <= 10; ++i) ls.push_back(0.05 * i);
    auto sc = full_spectrum_scan(m, stripes[0], gs, ls, true);
    std::ofstream sf(o.spectrum_out);
    if (!sf) throw error(error_kind::io, "cannot write " + o.spectrum_out);
    csv_row(sf, {"gamma", "ell", "re_lambda", "im_lambda"});
    for (const auto& p : sc.points) csv_row(sf, {fmt(p.gamma), fmt(p.ell), fmt(p.lambda.real()), fmt(p.lambda.imag())});
    finish(sf, o.spectrum_out);
  }
  return 0;
}

void write_map(const std::string& path, const std::vector<map_point>& pts) {
  std::ofstream f(path);
  if (!f) throw error(error_kind::io, "cannot write " + path);
  csv_row(f, {"kappa_tilde", "alpha", "label", "max_re_lambda", "zz_curvature", "eh_curvature", "A_numeric",
              "c_numeric"});
  for (const auto& p : pts)
    csv_row(f, {fmt(p.kappa_tilde), fmt(p.alpha), p.label, fmt(p.max_re_lambda), fmt(p.zz_curvature),
                fmt(p.eh_curvature), fmt(p.A_numeric), fmt(p.c_numeric)});
  finish(f, path);
}

int scan_cmd(const options& o) {
  rd_model m = checked_model(o.model);
  auto e = expand(m);
  auto s = zigzag_coefficients(m, e);
  auto as = parse_grid(o.alpha_grid, "alpha");
  auto ks = parse_grid(o.kappa_grid, "kappa");
  std::filesystem::path dir(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw error(error_kind::io, "cannot create " + dir.string());
  auto an = analytic_map(e, s, as, ks, o.beta);
  write_map((dir / "analytic_map.csv").string(), an);
  ordered_json summary = {{"beta", o.beta}, {"points", an.size()}};
  if (!o.analytic_only) {
    auto om = stability_map(m, e, as, ks, o.beta, settings(o));
    write_map((dir / "oracle_map.csv").string(), om);
    std::size_t converged = 0, agree = 0;
    std::map<std::string, std::size_t> confusion;
    for (std::size_t i = 0; i < om.size(); ++i) {
      confusion[an[i].label + " -> " + om[i].label]++;
      if (om[i].label == "no-convergence") continue;
      ++converged;
      if (om[i].label == an[i].label) ++agree;
    }
    summary["converged"] = converged;
    summary["agreeing"] = agree;
    summary["agreement"] = converged ? double(agree) / converged : 0.0;
    summary["analytic_to_oracle"] = confusion;
  }
  std::ofstream f((dir / "summary.json").string());
  if (!f) throw error(error_kind::io, "cannot write summary");
  f << summary.dump(2) << '\n';
  finish(f, "summary.json");
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int klausmeier_cmd(const options& o) {
  klausmeier_params k{o.d, o.m, 0, o.beta};
  auto r = klausmeier_normal_form(k);
  auto v = validate_model(r.model);
  auto tc = check_turing(r.model);
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw error(error_kind::io, "cannot write " + o.out);
    f << model_to_json(r.model).dump(2) << '\n';
    finish(f, o.out);
  }
  ordered_json rep = {{"d", o.d}, {"m", o.m}, {"a_T", r.a_T}, {"lambda_M", r.lambda_M},
                      {"u_plus", r.state.u_plus}, {"v_plus", r.state.v_plus},
                      {"valid", v.pass()}, {"turing", tc.pass}};
  if (o.out.empty()) rep["model"] = model_to_json(r.model);
  std::cout << rep.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sideband stability of advected Turing stripes"};
  app.require_subcommand(1);
  options o;

  auto oracle_flags = [&](CLI::App* c) {
    c->add_option("--N", o.N, "Fourier modes")->capture_default_str();
    c->add_option("--tol", o.tol, "Newton tolerance")->capture_default_str();
    c->add_option("--h1", o.h1, "coarse finite-difference step")->capture_default_str();
    c->add_option("--h2", o.h2, "fine finite-difference step")->capture_default_str();
  };

  auto* an = app.add_subcommand("analyze", "coefficient report (JSON)");
  an->add_option("--model", o.model)->required();
  an->add_option("--alpha", o.alpha);
  an->add_option("--beta", o.beta);
  an->add_option("--kappa", o.kappa);
  an->add_option("--out", o.out);

  auto* bd = app.add_subcommand("boundaries", "bifurcation, Eckhaus and zigzag curves (CSV)");
  bd->add_option("--model", o.model)->required();
  bd->add_option("--beta", o.beta);
  bd->add_option("--kappa", o.kappa_grid, "start:stop:step")->capture_default_str();
  bd->add_option("--out", o.out);

  auto* sp = app.add_subcommand("stripe", "leading-order stripe profile (CSV)");
  sp->add_option("--model", o.model)->required();
  sp->add_option("--mu", o.mu, "alpha,beta,kappa_tilde")->required();
  sp->add_option("--points", o.points)->capture_default_str();
  sp->add_option("--out", o.out);

  auto* vf = app.add_subcommand("verify", "analytic vs numerical curvatures (CSV)");
  vf->add_option("--model", o.model)->required();
  vf->add_option("--mu", o.mus, "alpha,beta,kappa_tilde (repeatable)")->required();
  vf->add_option("--out", o.out);
  vf->add_option("--spectrum-out", o.spectrum_out, "Bloch spectrum dump for the first mu");
  oracle_flags(vf);

  auto* sc = app.add_subcommand("scan", "analytic and numerical stability maps");
  sc->add_option("--model", o.model)->required();
  sc->add_option("--beta", o.beta);
  sc->add_option("--alpha", o.alpha_grid, "start:stop:step")->capture_default_str();
  sc->add_option("--kappa", o.kappa_grid, "start:stop:step")->capture_default_str();
  sc->add_option("--out-dir", o.out_dir)->capture_default_str();
  sc->add_flag("--analytic-only", o.analytic_only);
  oracle_flags(sc);

  auto* kl = app.add_subcommand("klausmeier", "normal form of the Klausmeier model");
  kl->add_option("--d", o.d)->capture_default_str();
  kl->add_option("--m", o.m)->capture_default_str();
  kl->add_option("--beta", o.beta);
  kl->add_option("--out", o.out, "model file to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(error_kind::validation);
  }

  try {
    if (*an) return analyze(o);
    if (*bd) return boundaries_cmd(o);
    if (*sp) return stripe_cmd(o);
    if (*vf) return verify_cmd(o);
    if (*sc) return scan_cmd(o);
    if (*kl) return klausmeier_cmd(o);
  } catch (const error& e) {
    std::cerr << ordered_json{{"error", kind_name(e.kind())}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "numerical"}, {"message", e.what()}}.dump() << '\n';
    return exit_code(error_kind::numerical);
  }
  return 0;
}
