// blowup_lab: command-line front end for the blowup library.
//
// Exit codes: 0 ok, 1 verification failed or internal error, 2 invalid input,
// 3 numerical abort, 4 NOT_FOUND verdict.

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <variant>

#include "blowup/blowup.hpp"
#include "blowup/io.hpp"

using namespace blowup;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitAbort = 3;
constexpr int kExitNotFound = 4;

using Slot = std::variant<int*, long*, double*, std::string*, std::vector<double>*>;

struct Param {
  std::string name;
  Slot slot;
  CLI::Option* option;
};

/// A subcommand whose options double as its RunConfig record.
class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help)
      : name_(name), app_(app.add_subcommand(name, help)) {}

  template <typename T>
  void add(const std::string& name, T& var, const std::string& help) {
    auto* o = app_->add_option("--" + name, var, help)->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<double>>) o->delimiter(',');
    params_.push_back({name, &var, o});
  }

  const std::string& name() const { return name_; }
  bool active() const { return app_->parsed(); }

  /// Fills options not given on the command line from a JSON object.
  void apply_config(const json& cfg) {
    detail::require(cfg.is_object(), "config: top level must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      if (key == "command") {
        detail::require(value == name_, "config: written for command '" +
                                            value.dump() + "', running '" + name_ + "'");
        continue;
      }
      if (key == "format_version" || key == "version") continue;
      auto it = std::find_if(params_.begin(), params_.end(),
                             [&](const Param& p) { return p.name == key; });
      detail::require(it != params_.end(), "config: unknown key '" + key + "' for " + name_);
      if (it->option->count() > 0) continue;
      try {
        std::visit(
            [&](auto* p) {
              using T = std::remove_pointer_t<decltype(p)>;
              if constexpr (std::is_same_v<T, std::string>) {
                *p = value.is_string() ? value.get<std::string>() : value.dump();
              } else {
                *p = value.get<T>();
              }
            },
            it->slot);
      } catch (const json::exception& e) {
        throw PreconditionError("config: bad value for '" + key + "': " + e.what());
      }
    }
  }

  json run_config() const {
    json j;
    j["format_version"] = 1;
    j["command"] = name_;
    for (const auto& p : params_)
      std::visit([&](auto* v) { j[p.name] = *v; }, p.slot);
    return j;
  }

 private:
  std::string name_;
  CLI::App* app_;
  std::vector<Param> params_;
};

Schedule make_schedule(int b, const std::string& mode, double eps) {
  if (mode == "loglog") return Schedule::loglog(b);
  if (mode == "constant") return Schedule::constant(b, eps);
  throw PreconditionError("schedule must be 'loglog' or 'constant', got '" + mode + "'");
}

/// Grid for a bump-type field: axis 0 at r, other axes at r_t. M = 0 picks a
/// power of two that resolves p-th powers of the bump exactly.
TorusGrid bump_grid(int n, int b, int r, int r_t, std::size_t M, std::size_t M_t) {
  require_supercritical(n, b);
  const double rho = 1.0 / (2.0 * b);
  const double band = 0.5 * n * b * (b - 1) * rho;
  std::vector<int> rs{r};
  std::vector<std::size_t> ms{M ? M : modes_for_band(band, r)};
  for (int a = 1; a < n; ++a) {
    rs.push_back(r_t);
    ms.push_back(M_t ? M_t : modes_for_band(band, r_t));
  }
  return TorusGrid(rs, ms);
}

double default_w_l1(int n, int b) {
  return l1_spectrum(build_bump(bump_grid(n, b, 8, 5, 0, 0), BumpSpec::for_exponent(b)).spectrum);
}

std::string out_path(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_safe(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-time blowup experiments for u_t = Laplace(u) + u^b"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--config", config_path, "JSON file with option values");

  std::vector<Command*> commands;

  // bump
  int bp_n = 1, bp_b = 4, bp_r = 8, bp_rt = 5;
  long bp_M = 0, bp_Mt = 0;
  double bp_amp = 1.0;
  Command bump(app, "bump", "build the spectral bump w");
  bump.add("n", bp_n, "dimension");
  bump.add("b", bp_b, "exponent b");
  bump.add("r", bp_r, "period exponent on axis 0");
  bump.add("r-transverse", bp_rt, "period exponent on other axes");
  bump.add("M", bp_M, "modes on axis 0 (0 = auto)");
  bump.add("M-transverse", bp_Mt, "modes on other axes (0 = auto)");
  bump.add("amplitude", bp_amp, "density value at xi = 0");
  commands.push_back(&bump);

  // data
  int da_n = 1, da_b = 4, da_N = 4, da_r = 8, da_rt = 5;
  std::string da_sched = "loglog";
  double da_eps = 1.0;
  Command data(app, "data", "build the initial datum u_{0,N}");
  data.add("n", da_n, "dimension");
  data.add("b", da_b, "exponent b");
  data.add("N", da_N, "number of modulated terms minus one");
  data.add("schedule", da_sched, "epsilon schedule: loglog or constant");
  data.add("eps", da_eps, "epsilon for the constant schedule");
  data.add("r", da_r, "period exponent on axis 0");
  data.add("r-transverse", da_rt, "period exponent on other axes");
  commands.push_back(&data);

  // besov
  int be_n = 1, be_b = 4, be_N = 6, be_r = 8, be_rt = 5, be_jmin = -1;
  double be_q = 8.0, be_eps = 1.0;
  std::string be_sched = "loglog";
  Command besov(app, "besov", "critical Besov norm of u_{0,N}, block by block");
  besov.add("n", be_n, "dimension");
  besov.add("b", be_b, "exponent b");
  besov.add("N", be_N, "data level");
  besov.add("q", be_q, "summation index q");
  besov.add("schedule", be_sched, "epsilon schedule: loglog or constant");
  besov.add("eps", be_eps, "epsilon for the constant schedule");
  besov.add("r", be_r, "period exponent on axis 0");
  besov.add("r-transverse", be_rt, "period exponent on other axes");
  besov.add("j-min", be_jmin, "lowest dyadic block");
  commands.push_back(&besov);

  // certificate
  int ce_b = 4, ce_n = 1, ce_kmax = 60;
  double ce_delta = 1.0, ce_wl1 = 0.0;
  std::string ce_A = "2x";
  Command cert(app, "certificate", "lower-bound recursion and divergence verdict");
  cert.add("b", ce_b, "exponent b");
  cert.add("n", ce_n, "dimension");
  cert.add("delta", ce_delta, "time scale delta");
  cert.add("A", ce_A, "amplitude, absolute or a multiple of A_min such as 2x");
  cert.add("w-l1", ce_wl1, "sum |c| of w_hat (0 = default bump)");
  cert.add("k-max", ce_kmax, "last recursion index");
  commands.push_back(&cert);

  // threshold
  int th_b = 4, th_n = 1;
  double th_delta = 1.0, th_eps = 1.0, th_wl1 = 0.0;
  long th_cap = 1000000000L;
  std::string th_sched = "loglog";
  Command thresh(app, "threshold", "smallest N with a certified blowup before delta");
  thresh.add("b", th_b, "exponent b");
  thresh.add("n", th_n, "dimension (for the default bump)");
  thresh.add("delta", th_delta, "time scale delta");
  thresh.add("schedule", th_sched, "epsilon schedule: loglog or constant");
  thresh.add("eps", th_eps, "epsilon for the constant schedule");
  thresh.add("w-l1", th_wl1, "sum |c| of w_hat (0 = default bump)");
  thresh.add("cap", th_cap, "largest N searched");
  commands.push_back(&thresh);

  // simulate
  int si_n = 1, si_b = 4, si_r = 8, si_rt = 5, si_N = 0, si_rec = 1;
  long si_M = 4096, si_Mt = 64;
  std::string si_data = "bump", si_A = "1", si_sched = "loglog";
  double si_eps = 1.0, si_delta = 1.0, si_tend = 1.0, si_dtmax = 1e-3, si_dtmin = 1e-14,
         si_safety = 0.1, si_cap = 1e8, si_zp = 0.0;
  Command sim(app, "simulate", "time-integrate from A w or u_{0,N}");
  sim.add("n", si_n, "dimension");
  sim.add("b", si_b, "exponent b");
  sim.add("r", si_r, "period exponent on axis 0");
  sim.add("r-transverse", si_rt, "period exponent on other axes");
  sim.add("M", si_M, "modes on axis 0");
  sim.add("M-transverse", si_Mt, "modes on other axes");
  sim.add("data", si_data, "initial datum: bump (A w) or u0N");
  sim.add("N", si_N, "data level for u0N");
  sim.add("schedule", si_sched, "epsilon schedule for u0N");
  sim.add("eps", si_eps, "epsilon for the constant schedule");
  sim.add("A", si_A, "amplitude for bump data, absolute or a multiple of A_min");
  sim.add("delta", si_delta, "delta used to resolve A_min multiples");
  sim.add("t-end", si_tend, "final time");
  sim.add("dt-max", si_dtmax, "largest step");
  sim.add("dt-min", si_dtmin, "step floor (blowup when reached)");
  sim.add("dt-safety", si_safety, "C in dt = C / (1 + sup^{b-1})");
  sim.add("cap", si_cap, "sup-norm blowup cap");
  sim.add("record-every", si_rec, "record every k steps");
  sim.add("z-p", si_zp, "exponent of the weighted norm (0 = window middle)");
  commands.push_back(&sim);

  // verify
  int ve_n = 1, ve_b = 4, ve_r = 8, ve_kmax = 2, ve_rec = 10;
  long ve_M = 4096;
  std::string ve_A = "2x";
  double ve_delta = 1.0, ve_probe = 0.01, ve_dtmax = 1e-3, ve_dtmin = 1e-14, ve_cap = 1e8;
  Command ver(app, "verify", "compare the solver against the certificate lower bounds");
  ver.add("n", ve_n, "dimension");
  ver.add("b", ve_b, "exponent b");
  ver.add("r", ve_r, "period exponent on axis 0");
  ver.add("M", ve_M, "modes on axis 0");
  ver.add("A", ve_A, "amplitude, absolute or a multiple of A_min");
  ver.add("delta", ve_delta, "time scale delta");
  ver.add("k-max", ve_kmax, "highest bound index (<= 2)");
  ver.add("probe", ve_probe, "probe offset after t_k");
  ver.add("dt-max", ve_dtmax, "largest step");
  ver.add("dt-min", ve_dtmin, "step floor");
  ver.add("cap", ve_cap, "sup-norm blowup cap");
  ver.add("record-every", ve_rec, "record every k steps");
  commands.push_back(&ver);

  // sweep
  std::string sw_kind = "besov-series", sw_sched = "loglog";
  int sw_b = 4, sw_threads = 0, sw_r = 8;
  long sw_M = 2048;
  double sw_eps = 1.0, sw_tend = 1.0, sw_dtmax = 1e-3;
  std::vector<double> sw_N{10, 100, 1000, 10000}, sw_q, sw_delta{1.0}, sw_A{0.5, 1, 2, 4};
  Command sweep(app, "sweep", "parameter sweeps: besov-series, theorem-constant, amplitude");
  sweep.add("kind", sw_kind, "besov-series, theorem-constant or amplitude");
  sweep.add("b", sw_b, "exponent b");
  sweep.add("schedule", sw_sched, "epsilon schedule: loglog or constant");
  sweep.add("eps", sw_eps, "epsilon for the constant schedule");
  sweep.add("N", sw_N, "N values");
  sweep.add("q", sw_q, "q values (default b and 2b)");
  sweep.add("delta", sw_delta, "delta values");
  sweep.add("A", sw_A, "amplitudes as multiples of A_min (amplitude sweep)");
  sweep.add("r", sw_r, "period exponent (amplitude sweep)");
  sweep.add("M", sw_M, "modes (amplitude sweep)");
  sweep.add("t-end", sw_tend, "final time (amplitude sweep)");
  sweep.add("dt-max", sw_dtmax, "largest step (amplitude sweep)");
  sweep.add("threads", sw_threads, "worker threads (0 = hardware)");
  commands.push_back(&sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  Command* cmd = nullptr;
  for (auto* c : commands)
    if (c->active()) cmd = c;

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      detail::require(static_cast<bool>(in), "config: cannot read " + config_path);
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const json::exception& e) {
        throw PreconditionError(std::string("config: invalid JSON: ") + e.what());
      }
      cmd->apply_config(cfg);
    }
    const json rc = cmd->run_config();
    fs::create_directories(out_dir);

    if (cmd == &bump) {
      const auto g = bump_grid(bp_n, bp_b, bp_r, bp_rt, bp_M, bp_Mt);
      const auto w = build_bump(g, BumpSpec::for_exponent(bp_b, bp_amp));
      const double p = critical_besov_indices(bp_n, bp_b).p;
      json j{{"config", rc},
             {"version", kVersion},
             {"rho", w.spec.rho},
             {"w_l1", l1_spectrum(w.spectrum)},
             {"w_sup", lp_norm(w.physical, std::numeric_limits<double>::infinity())},
             {"w_lp", {{"p", p}, {"value", lp_norm(w.physical, p)}}},
             {"field", field_to_json(w.spectrum)}};
      write_json(out_path(out_dir, "bump.json"), j);
      std::cout << "bump rho=" << format_double(w.spec.rho)
                << " ||w_hat||_1=" << format_double(l1_spectrum(w.spectrum)) << " ||w||_"
                << p << "=" << format_double(lp_norm(w.physical, p)) << " grid "
                << g.describe() << "\n";
      return kExitOk;
    }

    if (cmd == &data) {
      const auto s = make_schedule(da_b, da_sched, da_eps);
      require_supercritical(da_n, da_b);
      const auto g = data_grid(da_n, da_b, da_N, da_r, da_rt, false);
      const auto w = build_bump(g, BumpSpec::for_exponent(da_b));
      const auto u = build_u0N(g, da_N, s, w.spectrum);
      const double sup = lp_norm(u.physical, std::numeric_limits<double>::infinity());
      json j{{"config", rc},
             {"version", kVersion},
             {"l1_spectrum", l1_spectrum(u.spectrum)},
             {"sup_norm", sup},
             {"field", field_to_json(u.spectrum)}};
      write_json(out_path(out_dir, "data.json"), j);
      std::cout << "u_{0," << da_N << "} ||u_hat||_1=" << format_double(l1_spectrum(u.spectrum))
                << " sup=" << format_double(sup) << " grid " << g.describe() << "\n";
      return kExitOk;
    }

    if (cmd == &besov) {
      const auto s = make_schedule(be_b, be_sched, be_eps);
      require_supercritical(be_n, be_b);
      const auto g = data_grid(be_n, be_b, be_N, be_r, be_rt, true);
      const auto w = build_bump(g, BumpSpec::for_exponent(be_b));
      const auto u = build_u0N(g, be_N, s, w.spectrum);
      const auto c = critical_besov_indices(be_n, be_b);
      const auto rep = besov_report(u.spectrum, c.s, c.p, be_q,
                                    FilterBank(g, be_jmin, std::max(be_N, be_jmin + 1)));
      CsvWriter csv(out_path(out_dir, "besov.csv"), rc, {"j", "block_norm", "weighted", "total"});
      for (const auto& blk : rep.blocks)
        csv.row({static_cast<long>(blk.j), blk.block_norm, blk.weighted, rep.total});
      double sum = 0.0;
      for (int j = 0; j <= be_N; ++j) sum += std::pow(s.eta(j), be_q);
      const double bound = s.eps(be_N) * (std::isinf(be_q) ? 1.0 : std::pow(sum, 1.0 / be_q)) *
                           lp_norm(w.physical, c.p);
      std::cout << "besov s=" << format_double(c.s) << " p=" << format_double(c.p)
                << " q=" << format_double(be_q) << " total=" << format_double(rep.total)
                << " bound=" << format_double(bound) << "\n";
      return kExitOk;
    }

    if (cmd == &cert) {
      CertificateParams p;
      p.b = ce_b;
      p.n = ce_n;
      p.delta = ce_delta;
      p.A = Amplitude::parse(ce_A);
      p.w_l1 = ce_wl1 > 0.0 ? ce_wl1 : default_w_l1(ce_n, ce_b);
      const auto rep = divergence_report(p, ce_kmax);
      const auto& seq = rep.sequence;
      CsvWriter csv(out_path(out_dir, "certificate.csv"), rc,
                    {"k", "t_k", "log_alpha_k", "Lambda_k"});
      for (const auto& r : seq.rows)
        csv.row({static_cast<long>(r.k), r.t, r.log_alpha, r.Lambda});
      json j{{"verdict", to_string(seq.verdict)},
             {"k_star", seq.k_star ? json(*seq.k_star) : json(nullptr)},
             {"A_min", seq.threshold},
             {"N_min", nullptr},
             {"guarantee_text", rep.guarantee},
             {"marginal", seq.at_threshold || seq.verdict == Verdict::Marginal},
             {"amplitude", p.amplitude()},
             {"w_l1", p.w_l1},
             {"growth_coefficient", seq.growth_coefficient},
             {"linear_slope", seq.linear_slope},
             {"config", rc},
             {"version", kVersion}};
      write_json(out_path(out_dir, "verdict.json"), j);
      std::cout << "certificate " << to_string(seq.verdict) << " A=" << format_double(p.amplitude())
                << " A_min=" << format_double(seq.threshold)
                << (seq.k_star ? " k*=" + std::to_string(*seq.k_star) : std::string()) << "\n";
      return kExitOk;
    }

    if (cmd == &thresh) {
      const auto s = make_schedule(th_b, th_sched, th_eps);
      const double w = th_wl1 > 0.0 ? th_wl1 : default_w_l1(th_n, th_b);
      const auto r = certified_blowup_N(th_delta, s, w, th_cap);
      json j{{"verdict", r.found ? "FOUND" : "NOT_FOUND"},
             {"k_star", nullptr},
             {"A_min", nullptr},
             {"N_min", r.found ? json(r.N) : json(nullptr)},
             {"guarantee_text", r.guarantee},
             {"log_c_at_N", r.found ? json(r.log_c) : json(nullptr)},
             {"log_rhs", r.log_rhs},
             {"cap", r.cap},
             {"log10_N_estimate", r.found ? json(nullptr) : nullable(r.log10_N_estimate)},
             {"w_l1", w},
             {"config", rc},
             {"version", kVersion}};
      write_json(out_path(out_dir, "threshold.json"), j);
      std::cout << "threshold " << (r.found ? "N=" + std::to_string(r.N) : "NOT_FOUND") << " ("
                << r.guarantee << ")\n";
      return r.found ? kExitOk : kExitNotFound;
    }

    if (cmd == &sim) {
      SolverConfig c;
      c.b = si_b;
      c.t_end = si_tend;
      c.dt_max = si_dtmax;
      c.dt_min = si_dtmin;
      c.dt_safety = si_safety;
      c.blowup_cap = si_cap;
      c.record_every = si_rec;
      c.z_exponent = si_zp;
      c.validate(si_n);
      SpectralField u0 = [&] {
        if (si_data == "bump") {
          const auto g = bump_grid(si_n, si_b, si_r, si_rt, si_M, si_Mt);
          auto w = build_bump(g, BumpSpec::for_exponent(si_b)).spectrum;
          CertificateParams p;
          p.b = si_b;
          p.n = si_n;
          p.delta = si_delta;
          p.A = Amplitude::parse(si_A);
          p.w_l1 = l1_spectrum(w);
          w *= p.amplitude();
          return w;
        }
        detail::require(si_data == "u0N", "--data must be bump or u0N");
        const auto g = data_grid(si_n, si_b, si_N, si_r, si_rt, false);
        const auto w = build_bump(g, BumpSpec::for_exponent(si_b));
        return build_u0N(g, si_N, make_schedule(si_b, si_sched, si_eps), w.spectrum).spectrum;
      }();
      const auto traj = simulate(u0, c);
      CsvWriter csv(out_path(out_dir, "trajectory.csv"), rc,
                    {"t", "dt", "l1_spectrum", "sup_norm", "lp_crit", "positivity_margin",
                     "z_norm_p"});
      for (const auto& r : traj.records)
        csv.row({r.t, r.dt, r.l1_spectrum, r.sup_norm, r.lp_crit, r.positivity_margin, r.z_norm_p});
      json j{{"T_star_num", traj.blowup ? json(traj.blowup->T_star) : json(nullptr)},
             {"reason", traj.blowup ? json(traj.blowup->reason) : json("none")},
             {"last_t", traj.records.back().t},
             {"kind", "observed"},
             {"steps", traj.steps},
             {"config", rc},
             {"version", kVersion}};
      write_json(out_path(out_dir, "blowup.json"), j);
      if (traj.blowup)
        std::cout << "observed blowup T*_num=" << format_double(traj.blowup->T_star) << " ("
                  << traj.blowup->reason << ", " << traj.steps << " steps)\n";
      else
        std::cout << "no blowup through t=" << format_double(traj.records.back().t) << " ("
                  << traj.steps << " steps)\n";
      return kExitOk;
    }

    if (cmd == &ver) {
      const auto g = bump_grid(ve_n, ve_b, ve_r, 5, ve_M, 64);
      const auto w = build_bump(g, BumpSpec::for_exponent(ve_b)).spectrum;
      CertificateParams p;
      p.b = ve_b;
      p.n = ve_n;
      p.delta = ve_delta;
      p.A = Amplitude::parse(ve_A);
      p.w_l1 = l1_spectrum(w);
      p.validate();
      LowerBoundInputs in;
      in.A = p.amplitude();
      in.b = ve_b;
      in.delta = ve_delta;
      in.k_max = ve_kmax;
      in.probe_offset = ve_probe;
      SolverConfig c;
      c.dt_max = ve_dtmax;
      c.dt_min = ve_dtmin;
      c.blowup_cap = ve_cap;
      c.record_every = ve_rec;
      c.t_end = ve_probe;
      const auto run = verify_with_simulation(w, in, c);
      json checks = json::array();
      for (const auto& ch : run.report.checks)
        checks.push_back({{"k", ch.k},
                          {"t_k", ch.t_k},
                          {"t_probe", ch.t_probe},
                          {"status", to_string(ch.status)},
                          {"margin", ch.status == CheckStatus::Skipped ? json(nullptr) : json(ch.margin)},
                          {"tolerance", ch.tolerance},
                          {"bound_l1", ch.bound_l1}});
      const auto& traj = run.trajectory;
      json j{{"overall", run.report.overall},
             {"checks", checks},
             {"A", in.A},
             {"A_min", p.threshold()},
             {"T_star_num", traj.blowup ? json(traj.blowup->T_star) : json(nullptr)},
             {"config", rc},
             {"version", kVersion}};
      write_json(out_path(out_dir, "verify.json"), j);
      std::cout << "verify " << run.report.overall;
      for (const auto& ch : run.report.checks) std::cout << " k=" << ch.k << ":" << to_string(ch.status);
      if (traj.blowup) std::cout << " (observed blowup at " << format_double(traj.blowup->T_star) << ")";
      std::cout << "\n";
      return run.report.overall == "PASS" ? kExitOk : kExitFailed;
    }

    if (cmd == &sweep) {
      const auto s = make_schedule(sw_b, sw_sched, sw_eps);
      struct Cell {
        std::vector<std::string> params;
        std::function<double()> compute;
      };
      std::vector<Cell> cells;
      std::vector<std::string> header;
      for (double v : sw_N) detail::require(v >= 0 && v == std::floor(v), "sweep: N values must be integers >= 0");
      if (sw_kind == "besov-series") {
        header = {"kind", "b", "q", "N", "metric", "value", "status"};
        if (sw_q.empty()) sw_q = {double(sw_b), 2.0 * sw_b};
        for (double q : sw_q)
          for (double N : sw_N)
            cells.push_back({{format_double(q), format_double(N), "besov_bound"}, [=, &s] {
                               return besov_bound_series(static_cast<long>(N), q, s).back();
                             }});
      } else if (sw_kind == "theorem-constant") {
        header = {"kind", "b", "delta", "N", "metric", "value", "status"};
        auto series = std::make_shared<GrowthSeries>(sw_b);
        const auto gc = default_growth_constants(sw_b);
        for (double d : sw_delta)
          for (double N : sw_N)
            cells.push_back({{format_double(d), format_double(N), "log_c"}, [=, &s] {
                               return log_theorem_constant(N, d, s, *series, gc);
                             }});
      } else if (sw_kind == "amplitude") {
        header = {"kind", "b", "delta", "A_multiple", "metric", "value", "status"};
        const auto g = bump_grid(1, sw_b, sw_r, 5, sw_M, 0);
        const auto w = build_bump(g, BumpSpec::for_exponent(sw_b)).spectrum;
        for (double d : sw_delta)
          for (double a : sw_A)
            cells.push_back({{format_double(d), format_double(a), "T_star_num"}, [=] {
                               SpectralField u0 = w;
                               u0 *= a * lemma2_threshold(d, sw_b, l1_spectrum(w));
                               SolverConfig c;
                               c.b = sw_b;
                               c.t_end = sw_tend;
                               c.dt_max = sw_dtmax;
                               c.record_every = 1000000;
                               const auto traj = simulate(u0, c);
                               return traj.blowup ? traj.blowup->T_star
                                                  : std::numeric_limits<double>::infinity();
                             }});
      } else {
        throw PreconditionError("sweep: unknown kind '" + sw_kind + "'");
      }

      std::vector<std::pair<double, std::string>> results(cells.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i; (i = next++) < cells.size();) {
          try {
            results[i] = {cells[i].compute(), "ok"};
          } catch (const std::exception& e) {
            results[i] = {std::numeric_limits<double>::quiet_NaN(), "error: " + csv_safe(e.what())};
          }
        }
      };
      unsigned nthreads = sw_threads > 0 ? static_cast<unsigned>(sw_threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
      nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();

      CsvWriter csv(out_path(out_dir, "sweep.csv"), rc, header);
      std::size_t failed = 0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& p = cells[i].params;
        std::string status = results[i].second;
        if (status == "ok" && std::isinf(results[i].first)) status = "no_blowup";
        failed += status.rfind("error", 0) == 0;
        csv.row({sw_kind, static_cast<long>(sw_b), p[0], p[1], p[2], results[i].first, status});
      }
      std::cout << "sweep " << sw_kind << ": " << cells.size() << " cells, " << failed
                << " failed\n";
      return kExitOk;
    }
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitFailed;
}
