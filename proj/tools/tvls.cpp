// tvls: command-line front end. Every run writes a manifest holding the
// subcommand, its resolved parameters and the model files' contents, so
// `tvls replay <manifest>` reproduces the output byte for byte.

#include "tvls.hpp"
#include "tvls/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;
using namespace tvls;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError(what + ": cannot parse '" + s + "' as a number");
  }
}

std::vector<int> parse_ns(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    const double v = parse_double(item, "--Ns");
    if (v < 1 || v != static_cast<int>(v)) throw PreconditionError("--Ns: '" + item + "' is not a positive integer");
    out.push_back(static_cast<int>(v));
  }
  require(!out.empty(), "--Ns must list at least one N");
  return out;
}

/// "a,b,c" or "lo:hi:n".
std::vector<double> parse_grid(const std::string& s, const std::string& what) {
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    require(parts.size() == 3, what + ": expected lo:hi:n");
    const double lo = parse_double(parts[0], what);
    const double hi = parse_double(parts[1], what);
    const double n = parse_double(parts[2], what);
    require(n >= 1 && n == static_cast<int>(n), what + ": n must be a positive integer");
    if (n == 1) return {lo};
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / (n - 1));
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_double(item, what));
  require(!out.empty(), what + ": empty grid");
  return out;
}

int parse_n(const std::string& s) {
  if (s == "limit" || s == "inf") return kLimit;
  const double v = parse_double(s, "--N");
  require(v >= 1 && v == static_cast<int>(v), "--N must be a positive integer or 'limit'");
  return static_cast<int>(v);
}

TransitionMethod parse_method(const std::string& s) {
  if (s == "pb") return TransitionMethod::peano_baker;
  if (s == "ode") return TransitionMethod::ode;
  if (s == "comm") return TransitionMethod::commutative_exp;
  if (s == "auto") return TransitionMethod::automatic;
  throw PreconditionError("--method must be one of pb, ode, comm, auto");
}

std::optional<double> opt(const json& p, const char* key) {
  if (!p.contains(key) || p[key].is_null()) return std::nullopt;
  return p[key].get<double>();
}

/// The model's own certificate, or one computed on a window that is widened
/// until it covers `reach(cert)` to the left of `lo`.
StabilityCertificate resolve_certificate(const io::ModelBundle& b, double lo, double hi,
                                         const std::function<double(const StabilityCertificate&)>& reach) {
  if (b.certificate) return *b.certificate;
  double width = 1.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const auto rep = certify(b.model.A, lo - width, hi + 1.0);
    if (!rep.passes) throw PreconditionError("no stability certificate could be established: " + rep.message);
    const double need = reach(*rep.certificate);
    if (need <= width) return *rep.certificate;
    width = need * 1.25;
  }
  throw PreconditionError("stability window did not settle; supply a certificate in the model file");
}

struct Result {
  std::string body;
  json resolved = json::object();
};

std::string csv_header(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out + "\n";
}

Result run_simulate(const json& p, const io::ModelBundle& b) {
  SimulationConfig cfg;
  cfg.n = p["N"].get<int>();
  cfg.t_start = p["t0"].get<double>();
  cfg.t_end = p["t1"].get<double>();
  cfg.dt = p["dt"].get<double>();
  cfg.seed = p["seed"].get<std::uint64_t>();
  cfg.record_stride = p["stride"].get<int>();
  cfg.burn_in = opt(p, "burn_in");
  const int paths = p["paths"].get<int>();
  const auto cert = resolve_certificate(b, cfg.t_start, cfg.t_end, [&](const StabilityCertificate& c) {
    return (cfg.burn_in ? *cfg.burn_in : 12.0 / c.lambda) / cfg.n;
  });
  cfg.certificate = &cert;
  const auto samples = simulate_paths(b.model, cfg, paths);
  std::vector<std::string> cols{"path", "time"};
  for (int i = 0; i < b.model.dimension(); ++i) cols.push_back("x" + std::to_string(i + 1));
  cols.push_back("y");
  std::string out = csv_header(cols);
  for (int k = 0; k < paths; ++k) {
    const auto& s = samples[k];
    for (std::size_t j = 0; j < s.times.size(); ++j) {
      out += std::to_string(k) + "," + fmt(s.times[j]);
      for (int i = 0; i < s.states.rows(); ++i) out += "," + fmt(s.states(i, static_cast<Eigen::Index>(j)));
      out += "," + fmt(s.observations[j]) + "\n";
    }
  }
  Result r{out};
  r.resolved["certificate"] = io::to_json(cert);
  r.resolved["burn_in"] = cfg.burn_in ? *cfg.burn_in : 12.0 / cert.lambda;
  json seeds = json::array();
  for (int k = 0; k < paths; ++k) seeds.push_back(derive_seed(cfg.seed, k));
  r.resolved["path_seeds"] = seeds;
  return r;
}

Result run_kernel(const json& p, const io::ModelBundle& b) {
  const double t = p["t"].get<double>();
  const int n = parse_n(p["N"].get<std::string>());
  const double du = p["du"].get<double>();
  auto umax = opt(p, "umax");
  std::optional<StabilityCertificate> cert;
  if (!umax || b.certificate) {
    cert = resolve_certificate(b, t, t, [&](const StabilityCertificate& c) {
      return (umax ? *umax : default_u_max(c)) / std::max(n, 1);
    });
  }
  if (!umax) umax = default_u_max(*cert);
  KernelOptions ko;
  ko.transition.method = parse_method(p["method"].get<std::string>());
  ko.certificate = cert ? &*cert : nullptr;
  const auto grid = kernel_grid(b.model, n, t, *umax, du, ko);
  std::string out = csv_header({"u", "value"});
  for (std::size_t k = 0; k < grid.size(); ++k) out += fmt(grid.u(k)) + "," + fmt(grid.values[k]) + "\n";
  Result r{out};
  r.resolved["umax"] = *umax;
  r.resolved["warnings"] = grid.warnings;
  if (grid.tail_bound) r.resolved["tail_bound"] = *grid.tail_bound;
  if (cert) r.resolved["certificate"] = io::to_json(*cert);
  return r;
}

json table_json(const ConvergenceTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) rows.push_back({{"N", row.n}, {"distance", row.distance}});
  return {{"rows", rows},
          {"passes", t.passes},
          {"preconditions", t.preconditions},
          {"notes", t.notes},
          {"window", {t.window_lo, t.window_hi}}};
}

std::string table_csv(const ConvergenceTable& t) {
  std::string out = csv_header({"N", "distance"});
  for (const auto& row : t.rows) out += std::to_string(row.n) + "," + fmt(row.distance) + "\n";
  return out;
}

Result run_converge(const json& p, const io::ModelBundle& b) {
  const double t = p["t"].get<double>();
  const auto ns = parse_ns(p["Ns"].get<std::string>());
  const double du = p["du"].get<double>();
  auto umax = opt(p, "umax");
  const auto cert =
      resolve_certificate(b, t, t, [&](const StabilityCertificate& c) { return (umax ? *umax : default_u_max(c)) / ns.front(); });
  if (!umax) umax = default_u_max(cert);
  const auto table = convergence_diagnostic(b.model, t, ns, *umax, du, {{}, &cert});
  Result r{table_csv(table)};
  r.resolved["umax"] = *umax;
  r.resolved["certificate"] = io::to_json(cert);
  r.resolved["report"] = table_json(table);
  return r;
}

SpectralConfig spectral_config(const json& p, const io::ModelBundle& b, double t, int n_min,
                               std::optional<StabilityCertificate>& cert_store) {
  SpectralConfig cfg;
  cfg.du = p["du"].get<double>();
  cfg.u_max = opt(p, "umax");
  cfg.s_max = opt(p, "smax");
  cfg.ds = p.value("ds", 0.05);
  cert_store = resolve_certificate(b, t, t + 1.0, [&](const StabilityCertificate& c) {
    const double u = cfg.u_max ? *cfg.u_max : default_u_max(c);
    const double s = cfg.s_max ? *cfg.s_max : 30.0 / c.lambda;
    return (u + 0.5 * s) / n_min;
  });
  cfg.certificate = &*cert_store;
  return cfg;
}

std::string spectrum_csv(const SpectrumGrid& g, const char* name) {
  std::string out = csv_header({"lambda", name});
  for (std::size_t i = 0; i < g.lambda.size(); ++i) out += fmt(g.lambda[i]) + "," + fmt(g.values[i]) + "\n";
  return out;
}

Result run_spectrum(const json& p, const io::ModelBundle& b) {
  const double t = p["t"].get<double>();
  std::optional<StabilityCertificate> cert;
  const auto cfg = spectral_config(p, b, t, 1, cert);
  const auto grid = spectral_density(b.model, t, lambda_grid(p["lmax"].get<double>(), p["dl"].get<double>()), cfg);
  Result r{spectrum_csv(grid, "f")};
  r.resolved["umax"] = cfg.resolved_u_max();
  r.resolved["certificate"] = io::to_json(*cert);
  r.resolved["warnings"] = grid.warnings;
  return r;
}

Result run_wigner(const json& p, const io::ModelBundle& b) {
  const double t = p["t"].get<double>();
  const int n = parse_n(p["N"].get<std::string>());
  require(n != kLimit, "wigner needs a finite N");
  std::optional<StabilityCertificate> cert;
  const auto cfg = spectral_config(p, b, t, n, cert);
  const auto grid = wigner_ville(b.model, n, t, lambda_grid(p["lmax"].get<double>(), p["dl"].get<double>()),
                                 cfg.resolved_s_max(), cfg.ds, cfg);
  Result r{spectrum_csv(grid, "f_N")};
  r.resolved["umax"] = cfg.resolved_u_max();
  r.resolved["smax"] = cfg.resolved_s_max();
  r.resolved["certificate"] = io::to_json(*cert);
  r.resolved["warnings"] = grid.warnings;
  return r;
}

Result run_wvconv(const json& p, const io::ModelBundle& b) {
  const double t = p["t"].get<double>();
  const auto ns = parse_ns(p["Ns"].get<std::string>());
  std::optional<StabilityCertificate> cert;
  const auto cfg = spectral_config(p, b, t, ns.front(), cert);
  const auto table = wv_convergence(b.model, t, lambda_grid(p["lmax"].get<double>(), p["dl"].get<double>()), ns, cfg);
  Result r{table_csv(table)};
  r.resolved["umax"] = cfg.resolved_u_max();
  r.resolved["smax"] = cfg.resolved_s_max();
  r.resolved["certificate"] = io::to_json(*cert);
  r.resolved["report"] = table_json(table);
  return r;
}

Result run_transition(const json& p, const io::ModelBundle& b) {
  TransitionOptions o;
  o.method = parse_method(p["method"].get<std::string>());
  o.tol = p["tol"].get<double>();
  o.steps = p["steps"].get<int>();
  o.max_terms = p["max_terms"].get<int>();
  const auto psi = transition(b.model.A, p["s0"].get<double>(), p["s"].get<double>(), o);
  return {io::to_json(psi).dump(2) + "\n"};
}

Result run_stability(const json& p, const io::ModelBundle& b) {
  const auto w = parse_grid(p["window"].get<std::string>(), "--window");
  require(w.size() == 2, "--window expects a,b");
  const std::string route = p["route"].get<std::string>();
  StabilityOptions so;
  so.grid_points = p["grid"].get<int>();
  json out;
  if (route == "a") {
    out = io::to_json(lambda_max_check(b.model.A, w[0], w[1], so));
  } else if (route == "b") {
    out = io::to_json(eigen_bound_check(b.model.A, w[0], w[1], so));
  } else if (route == "comm") {
    out = io::to_json(commutative_route_check(b.model.A, w[0], w[1], so));
  } else if (route == "auto") {
    out = io::to_json(certify(b.model.A, w[0], w[1], so));
  } else {
    throw PreconditionError("--route must be one of a, b, comm, auto");
  }
  if (out.contains("certificate") && !out["certificate"].is_null())
    out["spot_check_ratio"] = certificate_spot_check(b.model.A, io::certificate_from_json(out["certificate"]));
  return {out.dump(2) + "\n"};
}

Result run_control(const json& p, const io::ModelBundle& b) {
  const auto grid = parse_grid(p["tgrid"].get<std::string>(), "--tgrid");
  return {io::to_json(instantaneous_controllability(b.model, grid)).dump(2) + "\n"};
}

Result run_equiv(const json& p, const io::ModelBundle& b1, const io::ModelBundle& b2) {
  return {io::to_json(transfer_equivalence(b1.model, b2.model, p["t"].get<double>())).dump(2) + "\n"};
}

Result execute(const std::string& command, const json& params, const json& models) {
  auto model = [&](const char* key) {
    if (!models.contains(key)) throw ModelFormatError(key, "model missing from the run");
    return io::model_from_json(models[key]);
  };
  if (command == "simulate") return run_simulate(params, model("model"));
  if (command == "kernel") return run_kernel(params, model("model"));
  if (command == "converge") return run_converge(params, model("model"));
  if (command == "spectrum") return run_spectrum(params, model("model"));
  if (command == "wigner") return run_wigner(params, model("model"));
  if (command == "wvconv") return run_wvconv(params, model("model"));
  if (command == "transition") return run_transition(params, model("model"));
  if (command == "stability") return run_stability(params, model("model"));
  if (command == "control") return run_control(params, model("model"));
  if (command == "equiv") return run_equiv(params, model("model1"), model("model2"));
  throw PreconditionError("unknown subcommand '" + command + "'");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << text;
}

struct Invocation {
  std::string command;
  json params = json::object();
  std::map<std::string, std::string> model_paths;
  std::string out;
  std::string manifest;
};

std::string default_manifest(const std::string& out) { return out.empty() ? "tvls-manifest.json" : out + ".manifest.json"; }

int finish(const Invocation& inv, const json& models) {
  for (const auto& [key, path] : inv.model_paths)
    if (!inv.out.empty() && std::filesystem::exists(inv.out) && std::filesystem::exists(path) &&
        std::filesystem::equivalent(inv.out, path))
      throw PreconditionError("--out would overwrite the input file '" + path + "'");
  const Result r = execute(inv.command, inv.params, models);
  if (inv.out.empty()) {
    std::cout << r.body;
  } else {
    write_text(inv.out, r.body);
  }
  json manifest = {{"tool", "tvls"},
                   {"version", kVersion},
                   {"command", inv.command},
                   {"params", inv.params},
                   {"model_paths", inv.model_paths},
                   {"models", models},
                   {"out", inv.out},
                   {"resolved", r.resolved}};
  write_text(inv.manifest.empty() ? default_manifest(inv.out) : inv.manifest, manifest.dump(2) + "\n");
  return 0;
}

int error_exit(const char* kind, const std::exception& e, const json& extra = json::object()) {
  json err = {{"error", kind}, {"message", e.what()}};
  err.update(extra);
  std::cerr << err.dump() << "\n";
  return 2;
}

int run(int argc, char** argv) {
  CLI::App app{"Simulation and analysis of time-varying Levy-driven state-space and CARMA models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Invocation inv;
  std::string model_path, model1, model2, replay_path;

  auto common = [&](CLI::App* sub, bool needs_model = true) {
    if (needs_model) sub->add_option("--model", model_path, "model JSON file")->required();
    sub->add_option("--out", inv.out, "output file (default: stdout)");
    sub->add_option("--manifest", inv.manifest, "manifest path (default: <out>.manifest.json or tvls-manifest.json)");
  };

  // Parameters are collected into these holders and copied into inv.params.
  int n_int = 1, paths = 1, stride = 1, steps = 0, max_terms = 200, grid = 201;
  std::uint64_t seed = 0;
  double t = 0.0, t0 = 0.0, t1 = 1.0, dt = 0.01, du = 0.01, lmax = 5.0, dl = 0.05, ds = 0.05, s0 = 0.0, s = 1.0,
         tol = 1e-10;
  std::optional<double> burn_in, umax, smax;
  std::string n_str = "limit", ns = "1,2,4,8,16", method = "auto", window = "-10,10", route = "auto", tgrid = "0";

  auto* sim = app.add_subcommand("simulate", "sample paths of Y_N on a time grid");
  common(sim);
  sim->add_option("--N", n_int, "rescaling N")->default_val(1);
  sim->add_option("--t0", t0, "first rescaled time")->default_val(0.0);
  sim->add_option("--t1", t1, "last rescaled time")->default_val(1.0);
  sim->add_option("--dt", dt, "physical step")->default_val(0.01);
  sim->add_option("--paths", paths, "number of paths")->default_val(1);
  sim->add_option("--seed", seed, "run seed")->default_val(0);
  sim->add_option("--stride", stride, "record every stride-th step")->default_val(1);
  sim->add_option("--burn-in", burn_in, "physical burn-in (default 12/lambda)");

  auto* ker = app.add_subcommand("kernel", "kernel g_N(Nt, .) or its limit on a lag grid");
  common(ker);
  ker->add_option("--t", t)->default_val(0.0);
  ker->add_option("--N", n_str, "positive integer or 'limit'")->default_val("limit");
  ker->add_option("--umax", umax, "largest lag (default from the certificate)");
  ker->add_option("--du", du)->default_val(0.01);
  ker->add_option("--method", method, "pb|ode|comm|auto")->default_val("auto");

  auto* conv = app.add_subcommand("converge", "L2 distance of finite-N kernels to the limit");
  common(conv);
  conv->add_option("--t", t)->default_val(0.0);
  conv->add_option("--Ns", ns, "comma-separated increasing N")->default_val("1,2,4,8,16");
  conv->add_option("--umax", umax);
  conv->add_option("--du", du)->default_val(0.01);

  auto spectral_flags = [&](CLI::App* sub) {
    sub->add_option("--t", t)->default_val(0.0);
    sub->add_option("--lmax", lmax)->default_val(5.0);
    sub->add_option("--dl", dl)->default_val(0.05);
    sub->add_option("--du", du)->default_val(0.01);
    sub->add_option("--umax", umax);
  };
  auto* spec = app.add_subcommand("spectrum", "time-varying spectral density f(t, lambda)");
  common(spec);
  spectral_flags(spec);
  auto* wig = app.add_subcommand("wigner", "Wigner-Ville spectrum f_N(t, lambda)");
  common(wig);
  spectral_flags(wig);
  wig->add_option("--N", n_str)->required();
  wig->add_option("--smax", smax, "covariance lag truncation (default 30/lambda)");
  wig->add_option("--ds", ds)->default_val(0.05);
  auto* wvc = app.add_subcommand("wvconv", "L2 distance of f_N(t, .) to f(t, .)");
  common(wvc);
  spectral_flags(wvc);
  wvc->add_option("--Ns", ns)->default_val("2,4,8,16,32,64");
  wvc->add_option("--smax", smax);
  wvc->add_option("--ds", ds)->default_val(0.05);

  auto* tr = app.add_subcommand("transition", "transition matrix Psi(s, s0)");
  common(tr);
  tr->add_option("--s0", s0)->default_val(0.0);
  tr->add_option("--s", s)->default_val(1.0);
  tr->add_option("--method", method, "pb|ode|comm|auto")->default_val("auto");
  tr->add_option("--tol", tol)->default_val(1e-10);
  tr->add_option("--steps", steps, "RK4 steps (0: automatic)")->default_val(0);
  tr->add_option("--max-terms", max_terms)->default_val(200);

  auto* st = app.add_subcommand("stability", "uniform exponential stability certificate");
  common(st);
  st->add_option("--window", window, "a,b")->capture_default_str();
  st->add_option("--route", route, "a|b|comm|auto")->default_val("auto");
  st->add_option("--grid", grid)->default_val(201);

  auto* ctl = app.add_subcommand("control", "instantaneous controllability over a t grid");
  common(ctl);
  ctl->add_option("--tgrid", tgrid, "a,b,c or lo:hi:n")->default_val("0");

  auto* eq = app.add_subcommand("equiv", "frozen transfer-function equivalence of two models");
  common(eq, false);
  eq->add_option("--model1", model1)->required();
  eq->add_option("--model2", model2)->required();
  eq->add_option("--t", t)->default_val(0.0);

  auto* rep = app.add_subcommand("replay", "re-run a manifest");
  rep->add_option("file", replay_path, "manifest written by an earlier run")->required();
  rep->add_option("--out", inv.out, "override the recorded output path");
  rep->add_option("--manifest", inv.manifest, "where to write the new manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    json err = {{"error", "usage"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  inv.command = sub->get_name();
  auto nul = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json models = json::object();

  if (inv.command == "replay") {
    const json m = io::read_json_file(replay_path);
    for (const char* key : {"command", "params", "models"})
      if (!m.contains(key)) throw ModelFormatError(std::string("manifest.") + key, "missing");
    inv.command = m["command"].get<std::string>();
    inv.params = m["params"];
    models = m["models"];
    if (m.contains("model_paths")) inv.model_paths = m["model_paths"].get<std::map<std::string, std::string>>();
    if (inv.out.empty() && m.contains("out")) inv.out = m["out"].get<std::string>();
    return finish(inv, models);
  }

  auto& p = inv.params;
  if (inv.command == "simulate") {
    p = {{"N", n_int}, {"t0", t0}, {"t1", t1}, {"dt", dt}, {"paths", paths}, {"seed", seed}, {"stride", stride},
         {"burn_in", nul(burn_in)}};
  } else if (inv.command == "kernel") {
    p = {{"t", t}, {"N", n_str}, {"umax", nul(umax)}, {"du", du}, {"method", method}};
  } else if (inv.command == "converge") {
    p = {{"t", t}, {"Ns", ns}, {"umax", nul(umax)}, {"du", du}};
  } else if (inv.command == "spectrum") {
    p = {{"t", t}, {"lmax", lmax}, {"dl", dl}, {"du", du}, {"umax", nul(umax)}};
  } else if (inv.command == "wigner") {
    p = {{"t", t}, {"N", n_str}, {"lmax", lmax}, {"dl", dl}, {"du", du}, {"umax", nul(umax)}, {"smax", nul(smax)}, {"ds", ds}};
  } else if (inv.command == "wvconv") {
    p = {{"t", t}, {"Ns", ns}, {"lmax", lmax}, {"dl", dl}, {"du", du}, {"umax", nul(umax)}, {"smax", nul(smax)}, {"ds", ds}};
  } else if (inv.command == "transition") {
    p = {{"s0", s0}, {"s", s}, {"method", method}, {"tol", tol}, {"steps", steps}, {"max_terms", max_terms}};
  } else if (inv.command == "stability") {
    p = {{"window", window}, {"route", route}, {"grid", grid}};
  } else if (inv.command == "control") {
    p = {{"tgrid", tgrid}};
  } else if (inv.command == "equiv") {
    p = {{"t", t}};
  }
  if (inv.command == "equiv") {
    inv.model_paths = {{"model1", model1}, {"model2", model2}};
  } else {
    inv.model_paths = {{"model", model_path}};
  }
  for (const auto& [key, path] : inv.model_paths) models[key] = io::read_json_file(path);
  return finish(inv, models);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tvls::ModelFormatError& e) {
    return error_exit("model_format", e, {{"field", e.field()}});
  } catch (const tvls::DivergenceError& e) {
    return error_exit("divergence", e, {{"term_norms", e.term_norms()}});
  } catch (const tvls::PreconditionError& e) {
    return error_exit("precondition", e);
  } catch (const nlohmann::json::exception& e) {
    return error_exit("model_format", e);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}
