#include "stfem/runs.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace stfem {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("levels: not an integer: " + tok);
    out.push_back(v);
  }
  return out;
}

}  // namespace

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "method")
    cfg.method = value;
  else if (key == "problem")
    cfg.problem = value;
  else if (key == "beta")
    cfg.beta = std::stod(value);
  else if (key == "levels")
    cfg.levels = parse_levels(value);
  else if (key == "ref_factor")
    cfg.ref_factor = std::stoi(value);
  else if (key == "solver")
    cfg.solver = value;
  else if (key == "out")
    cfg.out = value;
  else
    throw std::invalid_argument("unknown config key: " + key);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not key=value: " + line);
    set_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.method != "new_mixed" && cfg.method != "andreev" && cfg.method != "steinbach")
    throw std::invalid_argument("method must be new_mixed, andreev or steinbach");
  if (cfg.problem != "smooth" && cfg.problem != "singular")
    throw std::invalid_argument("problem must be smooth or singular");
  if (!(cfg.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (cfg.ref_factor < 2) throw std::invalid_argument("ref_factor must be >= 2");
  if (cfg.solver != "direct" && cfg.solver != "schur_cg")
    throw std::invalid_argument("solver must be direct or schur_cg");
  if (cfg.solver == "schur_cg" && cfg.method == "steinbach")
    throw std::invalid_argument("schur_cg applies to the 2x2 mixed systems only");
  if (cfg.levels.empty()) throw std::invalid_argument("levels must be nonempty");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    if (cfg.levels[i] < 2) throw std::invalid_argument("each level must be >= 2");
    if (i > 0 && cfg.levels[i] <= cfg.levels[i - 1])
      throw std::invalid_argument("levels must be strictly increasing");
  }
}

SpaceTimeSpace make_trial_space(int N) {
  return SpaceTimeSpace(FESpace1D(Partition1D::uniform(N), Family::P1),
                        FESpace1D(Partition1D::uniform(N), Family::P1, true, true));
}

SpaceTimeSpace make_trial_space_zero_left(int N) {
  return SpaceTimeSpace(FESpace1D(Partition1D::uniform(N), Family::P1, true, false),
                        FESpace1D(Partition1D::uniform(N), Family::P1, true, true));
}

SpaceTimeSpace make_test_space(const std::string& method, const SpaceTimeSpace& Xd) {
  if (method == "new_mixed")
    return SpaceTimeSpace(FESpace1D(Xd.temporal.part, Family::P0), Xd.spatial);
  if (method == "andreev")
    return SpaceTimeSpace(FESpace1D(Xd.temporal.part.refined(2), Family::P1), Xd.spatial);
  throw std::invalid_argument("no separate test space for method " + method);
}

ProblemDef make_problem(const RunConfig& cfg) {
  return cfg.problem == "smooth" ? make_smooth_problem(cfg.beta)
                                 : make_singular_problem(cfg.beta);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ls_slope: need two samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace {

struct LevelResult {
  Solution sol;
  ErrorReport rep;
};

LevelResult solve_one_level(const RunConfig& cfg, const ProblemDef& p, int N) {
  LevelResult r;
  if (cfg.method == "steinbach") {
    const SpaceTimeSpace X0 = make_trial_space_zero_left(N);
    const SpaceTimeSpace Xd = make_trial_space(N);
    r.sol = solve_direct(build_steinbach(X0, p));
    r.rep = error_report(p, r.sol, Xd, cfg.ref_factor);
    return r;
  }
  const SpaceTimeSpace Xd = make_trial_space(N);
  const SpaceTimeSpace Yd = make_test_space(cfg.method, Xd);
  const SaddleSystem sys = cfg.method == "new_mixed" ? build_new_mixed(Xd, Yd, p)
                                                     : build_andreev(Xd, Yd, p);
  r.sol = cfg.solver == "direct" ? solve_direct(sys) : solve_schur_cg(sys);
  r.rep = error_report(p, r.sol, Xd, Yd, cfg.ref_factor);
  return r;
}

}  // namespace

std::vector<ConvergeRow> run_converge(const RunConfig& cfg) {
  validate_config(cfg);
  const ProblemDef p = make_problem(cfg);
  std::vector<ConvergeRow> rows;
  rows.reserve(cfg.levels.size());
  for (const int N : cfg.levels) {
    const auto t0 = std::chrono::steady_clock::now();
    ConvergeRow row;
    row.N = N;
    LevelResult lr = solve_one_level(cfg, p, N);
    row.rep = lr.rep;
    const auto [best_coeffs, best_err] =
        best_approx_xnorm(p, make_trial_space(N), std::max(4, cfg.ref_factor));
    (void)best_coeffs;
    row.quasiopt_ratio = lr.rep.err_X / best_err;
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

void cmd_converge(const RunConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const std::vector<ConvergeRow> rows = run_converge(cfg);
  csv << "N,dim_X,err_X,err_Y,err_0,err_T,err_aux_Y,quasiopt_ratio,wall_seconds\n";
  for (const ConvergeRow& r : rows) {
    csv << r.N << ',' << r.rep.dim_X << ',' << num(r.rep.err_X) << ',' << num(r.rep.err_Y) << ','
        << num(r.rep.err_0) << ',' << num(r.rep.err_T) << ','
        << (r.rep.err_aux_Y ? num(*r.rep.err_aux_Y) : std::string()) << ','
        << num(r.quasiopt_ratio) << ',' << num(r.wall_seconds) << '\n';
  }
  summary << "# converge method=" << cfg.method << " problem=" << cfg.problem
          << " beta=" << num(cfg.beta) << " solver=" << cfg.solver
          << " ref_factor=" << cfg.ref_factor << '\n';
  if (rows.size() >= 2) {
    std::vector<double> ld, lx, ly, l0, lt, la;
    bool have_aux = true;
    for (const ConvergeRow& r : rows) {
      ld.push_back(std::log(double(r.rep.dim_X)));
      lx.push_back(std::log(r.rep.err_X));
      ly.push_back(std::log(r.rep.err_Y));
      l0.push_back(std::log(r.rep.err_0));
      lt.push_back(std::log(r.rep.err_T));
      if (r.rep.err_aux_Y)
        la.push_back(std::log(*r.rep.err_aux_Y));
      else
        have_aux = false;
    }
    summary << "rate_X = " << num(ls_slope(ld, lx)) << '\n';
    summary << "rate_Y = " << num(ls_slope(ld, ly)) << '\n';
    summary << "rate_0 = " << num(ls_slope(ld, l0)) << '\n';
    summary << "rate_T = " << num(ls_slope(ld, lt)) << '\n';
    if (have_aux) summary << "rate_aux_Y = " << num(ls_slope(ld, la)) << '\n';
  }
}

void cmd_infsup(const RunConfig& cfg, std::ostream& csv) {
  validate_config(cfg);
  csv << "N,spatial_gamma,temporal_gamma,factorized_gamma,full_gamma,steinbach_gamma,"
         "zigzag_value,aa_norm,C_delta\n";
  for (const int N : cfg.levels) {
    const SpaceTimeSpace Xd = make_trial_space(N);
    // the square scheme has no separate test space; its rows report the
    // stabilized P0 pair in the shared columns
    const SpaceTimeSpace Yd =
        make_test_space(cfg.method == "steinbach" ? "new_mixed" : cfg.method, Xd);
    const InfSupResult sp = spatial_infsup(Xd.spatial);
    const InfSupResult tm = temporal_infsup(Xd.temporal, Yd.temporal);
    const InfSupResult fact = spacetime_infsup(Xd, Yd, InfSupMode::Factorized, cfg.ref_factor);
    // the coupled eigenproblem is dense; skip it at large levels
    std::string full;
    if (N * Xd.spatial.dim() <= 2200)
      full = num(spacetime_infsup(Xd, Yd, InfSupMode::Full, cfg.ref_factor).gamma);
    double aa;
    if (cfg.method == "steinbach")
      aa = aa_norm_estimate(make_trial_space_zero_left(N), cfg.beta);
    else
      aa = aa_norm_estimate(Yd, cfg.beta);
    const QuasiOptConstants qc = quasiopt_constants(fact.gamma, aa);
    std::string st_gamma, st_zigzag;
    if (cfg.method == "steinbach") {
      const DegradationResult deg = steinbach_degradation(make_trial_space_zero_left(N));
      if (deg.full_computed) st_gamma = num(deg.gamma_full);
      st_zigzag = num(deg.zigzag_value);
    }
    csv << N << ',' << num(sp.gamma) << ',' << num(tm.gamma) << ',' << num(fact.gamma) << ','
        << full << ',' << st_gamma << ',' << st_zigzag << ',' << num(aa) << ',' << num(qc.C)
        << '\n';
  }
}

void cmd_solve(const RunConfig& cfg, int level, std::ostream& out) {
  validate_config(cfg);
  if (level < 2) throw std::invalid_argument("level must be >= 2");
  const ProblemDef p = make_problem(cfg);
  const LevelResult lr = solve_one_level(cfg, p, level);
  out << "# method=" << cfg.method << " problem=" << cfg.problem << " beta=" << num(cfg.beta)
      << " N=" << level << " solver=" << cfg.solver << " ref_factor=" << cfg.ref_factor << '\n';
  out << "# u_coeffs " << lr.sol.u_coeffs.size() << '\n';
  for (Eigen::Index i = 0; i < lr.sol.u_coeffs.size(); ++i) out << num(lr.sol.u_coeffs[i]) << '\n';
  if (lr.sol.aux_coeffs) {
    out << "# aux_coeffs " << lr.sol.aux_coeffs->size() << '\n';
    for (Eigen::Index i = 0; i < lr.sol.aux_coeffs->size(); ++i)
      out << num((*lr.sol.aux_coeffs)[i]) << '\n';
  }
  out << "# error_report\n";
  out << "dim_X=" << lr.rep.dim_X << '\n';
  out << "err_X=" << num(lr.rep.err_X) << '\n';
  out << "err_Y=" << num(lr.rep.err_Y) << '\n';
  out << "err_0=" << num(lr.rep.err_0) << '\n';
  out << "err_T=" << num(lr.rep.err_T) << '\n';
  out << "err_aux_Y=" << (lr.rep.err_aux_Y ? num(*lr.rep.err_aux_Y) : std::string()) << '\n';
  out << "ref_refinement=" << lr.rep.ref_refinement << '\n';
  out << "residual=" << num(lr.sol.residual) << '\n';
  out << "iterations=" << lr.sol.iterations << '\n';
}

}  // namespace stfem
