// Command-line front end: JSON models in, coefficient/gain JSON and CSV
// root lists or trajectories out.
//
// Exit codes: 0 success, 2 validation error (bad flags, bad input file,
// infeasible design request), 3 numerical failure (root finder or fit did
// not converge).  Diagnostics go to stderr as "error[CODE]: message".

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "delaymid/feedback.hpp"
#include "delaymid/io.hpp"
#include "delaymid/mid.hpp"
#include "delaymid/quasipoly.hpp"
#include "delaymid/rootfinder.hpp"
#include "delaymid/simulate.hpp"

namespace {

using nlohmann::json;
using namespace delaymid;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CliError {
  int code;
  std::string tag;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& tag, const std::string& message) {
  throw CliError{code, tag, message};
}

unsigned thread_cap_from_env() {
  const char* v = std::getenv("MID_DELAY_THREADS");
  if (!v) return 1;
  const long n = std::strtol(v, nullptr, 10);
  return n > 0 ? static_cast<unsigned>(n) : 1;
}

void emit(const std::string& output_path, const std::string& content) {
  if (output_path.empty())
    std::cout << content;
  else
    write_file(output_path, content);
}

Rectangle rect_from_flag(const std::vector<double>& w) {
  Rectangle r{w[0], w[1], w[2], w[3]};
  if (!r.valid()) fail(kExitValidation, "E_WINDOW", "window must satisfy re_min < re_max and im_min < im_max");
  return r;
}

json root_to_json(const Root& r) {
  return json{{"re", r.location.real()},
              {"im", r.location.imag()},
              {"multiplicity", r.multiplicity},
              {"residual", r.residual}};
}

// Multiplicity certificate for a synthesized quasipolynomial: scaled
// derivative residuals at s0 up to the first nonvanishing order.
json certificate(const Quasipolynomial& q, double s0, int expected) {
  const MultiplicityResult m = multiplicity_at(q, s0);
  return json{{"multiplicity", m.value},
              {"degree_capped", m.degree_capped},
              {"scaled_derivative_residuals", derivative_residuals(q, {s0, 0.0}, expected)}};
}

int run_roots(const std::string& input, const std::string& output,
              const std::vector<double>& window, double tol, unsigned threads) {
  const Quasipolynomial q = quasipolynomial_from_json(read_file(input));
  FindOptions opts;
  opts.tol = tol;
  opts.threads = threads;
  const std::vector<Root> roots = find_roots(q, rect_from_flag(window), opts);
  std::ostringstream csv;
  write_roots_csv(csv, roots);
  emit(output, csv.str());
  return kExitOk;
}

int run_mid_retarded(int n, double s0, double tau, const std::string& output) {
  const RetardedSpec spec = retarded_mid(n, s0, tau);
  const Quasipolynomial q = from_retarded(spec);
  json out{{"n", n},
           {"s0", s0},
           {"tau", tau},
           {"a_coeffs", spec.a_coeffs},
           {"alpha_coeffs", spec.alpha_coeffs},
           {"certificate", certificate(q, s0, 2 * n)}};
  emit(output, out.dump(2) + "\n");
  return kExitOk;
}

int run_mid_ddae(double s0, double tau, int K, const std::string& output) {
  const MidDdaeConditions cond = ddae_mid(s0, tau);
  const DdaeScalar sys = to_ddae_scalar(cond);
  json out{{"a", cond.a},
           {"d", cond.d},
           {"bc", cond.bc},
           {"s0", cond.s0},
           {"tau", cond.tau},
           {"system", json::parse(to_json(sys))},
           {"certificate", certificate(from_ddae_scalar(sys), s0, 3)}};
  if (K >= 1) {
    // The full root set is the lattice s0 + i (2/tau) xi_k; emit the
    // 2K+1 points around the placed root.
    json lattice = json::array();
    for (const Complex z : ddae_root_lattice(s0, tau, K))
      lattice.push_back({z.real(), z.imag()});
    out["root_lattice"] = lattice;
  }
  emit(output, out.dump(2) + "\n");
  return kExitOk;
}

int run_design(const std::string& input, const std::string& output) {
  const FeedbackPlant plant = plant_from_json(read_file(input));
  const DesignResult result = design_gains(plant);
  json out{{"k1", result.gains.k1},
           {"k2", result.gains.k2},
           {"s0", result.s0},
           {"solvability", to_string(solvability(plant))}};
  emit(output, out.dump(2) + "\n");
  return kExitOk;
}

int run_verify(const std::string& input, const std::string& output,
               const std::vector<double>& window, double tol, unsigned threads) {
  const json doc = json::parse(read_file(input), nullptr, false);
  if (doc.is_discarded() || !doc.contains("plant") || !doc.contains("gains"))
    fail(kExitValidation, "E_SCHEMA", "verify input must be {\"plant\":.., \"gains\":.., [\"s0\":..]}");
  const FeedbackPlant plant = plant_from_json(doc["plant"].dump());
  const FeedbackGains gains = gains_from_json(doc["gains"].dump());
  const double s0 = doc.contains("s0") && doc["s0"].is_number()
                        ? doc["s0"].get<double>()
                        : plant.a - 2.0 / plant.tau;

  FindOptions opts;
  opts.tol = tol;
  opts.threads = threads;
  std::optional<Rectangle> rect;
  if (!window.empty()) rect = rect_from_flag(window);
  const VerifyReport report =
      verify_design(plant, gains, s0, rect ? &*rect : nullptr, opts);

  json roots = json::array();
  for (const Root& r : report.roots) roots.push_back(root_to_json(r));
  json out{{"s0", report.s0},
           {"multiplicity", report.multiplicity.value},
           {"degree_capped", report.multiplicity.degree_capped},
           {"scaled_derivative_residuals", report.derivative_residuals},
           {"dominance", to_string(report.dominance)},
           {"window", {report.window.re_min, report.window.re_max, report.window.im_min,
                       report.window.im_max}},
           {"roots", roots}};
  emit(output, out.dump(2) + "\n");
  return kExitOk;
}

MatrixDdae closed_loop_system(const FeedbackPlant& p, const FeedbackGains& g) {
  MatrixDdae sys;
  sys.A = Eigen::MatrixXd::Constant(1, 1, p.a);
  sys.B = {(Eigen::MatrixXd(1, 2) << p.b * g.k1, p.b * g.k2).finished()};
  sys.C = (Eigen::MatrixXd(2, 1) << p.c1, p.c2).finished();
  sys.D = {(Eigen::MatrixXd(2, 2) << p.d1 * g.k1, p.d1 * g.k2, p.d2 * g.k1, p.d2 * g.k2)
               .finished()};
  sys.taus = {p.tau};
  return sys;
}

int run_simulate(const std::string& input, const std::string& output, double T, double dt,
                 double fit_lo, double fit_hi) {
  const json doc = json::parse(read_file(input), nullptr, false);
  if (doc.is_discarded()) fail(kExitValidation, "E_PARSE", "invalid JSON input");

  MatrixDdae sys;
  if (doc.contains("plant") && doc.contains("gains")) {
    const FeedbackPlant plant = plant_from_json(doc["plant"].dump());
    const FeedbackGains gains = gains_from_json(doc["gains"].dump());
    sys = closed_loop_system(plant, gains);
  } else {
    const DdaeScalar scalar = ddae_scalar_from_json(doc.dump());
    sys = to_matrix_ddae(scalar);
  }

  History hist = constant_history(Eigen::VectorXd::Ones(1),
                                  Eigen::VectorXd::Zero(sys.dim_y()));
  if (doc.contains("x0")) {
    if (!doc["x0"].is_number()) fail(kExitValidation, "E_SCHEMA", "x0 must be a number");
    hist.x0(0) = doc["x0"].get<double>();
  }

  const Trajectory traj = simulate(sys, hist, T, dt);
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  emit(output, csv.str());

  json summary{{"T", T}, {"dt", dt}};
  if (fit_hi > fit_lo) {
    try {
      summary["decay_rate"] = fit_decay_rate(traj, fit_lo, fit_hi);
      summary["fit_window"] = {fit_lo, fit_hi};
    } catch (const DegenerateError& e) {
      summary["decay_rate"] = nullptr;
      summary["fit_error"] = e.what();
    }
  }
  // keep stdout clean for piped CSV when no output path was given
  (output.empty() ? std::cerr : std::cout) << summary.dump() << "\n";
  return kExitOk;
}

int run_circuit(const std::string& input, const std::string& output) {
  const CircuitParams params = circuit_from_json(read_file(input));
  emit(output, to_json(circuit_to_ddae(params)) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrum analysis and maximal-multiplicity root placement for time-delay systems"};
  app.require_subcommand(1);

  std::string input, output;
  std::vector<double> window;
  double tol = 1e-9;
  double s0 = 0.0, tau = 1.0;
  int n = 1, K = 1;
  double T = 30.0, dt = 0.0075;
  double fit_lo = 5.0, fit_hi = 30.0;
  const unsigned threads = thread_cap_from_env();

  auto* roots = app.add_subcommand("roots", "Locate all quasipolynomial roots in a window");
  roots->add_option("--input", input, "quasipolynomial JSON")->required();
  roots->add_option("--output", output, "CSV destination (stdout if omitted)");
  roots->add_option("--window", window, "re_min re_max im_min im_max")->expected(4)->required();
  roots->add_option("--tol", tol, "location tolerance");

  auto* midr = app.add_subcommand("mid-retarded",
                                  "Coefficients placing a root of multiplicity 2n (retarded)");
  midr->add_option("--n", n, "equation order")->required();
  midr->add_option("--s0", s0, "root to place")->required();
  midr->add_option("--tau", tau, "delay")->required();
  midr->add_option("--output", output, "JSON destination (stdout if omitted)");

  auto* midd = app.add_subcommand("mid-ddae",
                                  "Coefficients placing a triple root (scalar DDAE)");
  midd->add_option("--s0", s0, "root to place")->required();
  midd->add_option("--tau", tau, "delay")->required();
  midd->add_option("--K", K, "emit the root lattice s0 + 2i xi_k/tau for k = -K..K");
  midd->add_option("--output", output, "JSON destination (stdout if omitted)");

  auto* design = app.add_subcommand("design", "Delayed-output-feedback gains for a plant");
  design->add_option("--input", input, "plant JSON")->required();
  design->add_option("--output", output, "gains JSON destination (stdout if omitted)");

  auto* verify = app.add_subcommand("verify", "Multiplicity and dominance report for a design");
  verify->add_option("--input", input, "{plant, gains, [s0]} JSON")->required();
  verify->add_option("--output", output, "report destination (stdout if omitted)");
  verify->add_option("--window", window, "re_min re_max im_min im_max")->expected(4);
  verify->add_option("--tol", tol, "root location tolerance");

  auto* simulate_cmd = app.add_subcommand("simulate", "Method-of-steps time-domain integration");
  simulate_cmd->add_option("--input", input, "scalar DDAE JSON or {plant, gains} JSON")->required();
  simulate_cmd->add_option("--output", output, "trajectory CSV destination (stdout if omitted)");
  simulate_cmd->add_option("--T", T, "horizon")->required();
  simulate_cmd->add_option("--dt", dt, "step (must divide tau)")->required();
  simulate_cmd->add_option("--fit-lo", fit_lo, "decay-fit window start");
  simulate_cmd->add_option("--fit-hi", fit_hi, "decay-fit window end");

  auto* circuit = app.add_subcommand("circuit", "Transmission-line circuit to scalar DDAE");
  circuit->add_option("--input", input, "circuit JSON")->required();
  circuit->add_option("--output", output, "DDAE JSON destination (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (roots->parsed()) return run_roots(input, output, window, tol, threads);
    if (midr->parsed()) return run_mid_retarded(n, s0, tau, output);
    if (midd->parsed()) return run_mid_ddae(s0, tau, K, output);
    if (design->parsed()) return run_design(input, output);
    if (verify->parsed()) return run_verify(input, output, window, tol, threads);
    if (simulate_cmd->parsed()) return run_simulate(input, output, T, dt, fit_lo, fit_hi);
    if (circuit->parsed()) return run_circuit(input, output);
  } catch (const CliError& e) {
    std::cerr << "error[" << e.tag << "]: " << e.message << "\n";
    return e.code;
  } catch (const ValidationError& e) {
    std::cerr << "error[E_SCHEMA]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NotStabilizableError& e) {
    std::cerr << "error[E_NOT_STABILIZABLE]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const UnsolvableError& e) {
    std::cerr << "error[E_UNSOLVABLE]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GridMismatchError& e) {
    std::cerr << "error[E_GRID]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const HorizonError& e) {
    std::cerr << "error[E_HORIZON]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error[E_PRECONDITION]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const RootfinderError& e) {
    std::cerr << "error[E_NUMERIC]: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error[E_NUMERIC]: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
