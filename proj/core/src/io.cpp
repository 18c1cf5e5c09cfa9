#include "delaymid/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace delaymid {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("invalid JSON document");
  return j;
}

double number_at(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError(std::string("missing or non-numeric field '") + key + "'");
  return j[key].get<double>();
}

std::vector<double> number_list_at(const json& j, const char* key, std::size_t expected = 0) {
  if (!j.contains(key) || !j[key].is_array())
    throw ValidationError(std::string("missing or non-array field '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number())
      throw ValidationError(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  if (expected != 0 && out.size() != expected)
    throw ValidationError(std::string("field '") + key + "' must have " +
                          std::to_string(expected) + " entries");
  return out;
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be > 0");
}

}  // namespace

Quasipolynomial quasipolynomial_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.contains("terms") || !j["terms"].is_array())
    throw ValidationError("quasipolynomial: missing 'terms' array");
  std::vector<QuasiTerm> terms;
  for (const auto& t : j["terms"]) {
    QuasiTerm term;
    term.coeffs = number_list_at(t, "coeffs");
    if (term.coeffs.empty()) throw ValidationError("quasipolynomial: empty 'coeffs'");
    term.lambda = number_at(t, "lambda");
    terms.push_back(std::move(term));
  }
  return Quasipolynomial(std::move(terms));
}

std::string to_json(const Quasipolynomial& q) {
  json terms = json::array();
  for (const auto& t : q.terms())
    terms.push_back(json{{"coeffs", t.coeffs}, {"lambda", t.lambda}});
  return json{{"terms", terms}}.dump();
}

DdaeScalar ddae_scalar_from_json(const std::string& text) {
  const json j = parse(text);
  DdaeScalar sys{number_at(j, "a"), number_at(j, "b"), number_at(j, "c"), number_at(j, "d"),
                 number_at(j, "tau")};
  require_positive(sys.tau, "tau");
  return sys;
}

std::string to_json(const DdaeScalar& sys) {
  return json{{"a", sys.a}, {"b", sys.b}, {"c", sys.c}, {"d", sys.d}, {"tau", sys.tau}}.dump();
}

FeedbackPlant plant_from_json(const std::string& text) {
  const json j = parse(text);
  FeedbackPlant plant;
  plant.a = number_at(j, "a");
  plant.b = number_at(j, "b");
  const auto c = number_list_at(j, "c", 2);
  const auto d = number_list_at(j, "d", 2);
  plant.c1 = c[0];
  plant.c2 = c[1];
  plant.d1 = d[0];
  plant.d2 = d[1];
  plant.tau = number_at(j, "tau");
  require_positive(plant.tau, "tau");
  return plant;
}

std::string to_json(const FeedbackPlant& plant) {
  return json{{"a", plant.a},
              {"b", plant.b},
              {"c", {plant.c1, plant.c2}},
              {"d", {plant.d1, plant.d2}},
              {"tau", plant.tau}}
      .dump();
}

FeedbackGains gains_from_json(const std::string& text) {
  const json j = parse(text);
  return {number_at(j, "k1"), number_at(j, "k2")};
}

std::string to_json(const FeedbackGains& gains) {
  return json{{"k1", gains.k1}, {"k2", gains.k2}}.dump();
}

CircuitParams circuit_from_json(const std::string& text) {
  const json j = parse(text);
  CircuitParams p{number_at(j, "R0"), number_at(j, "R1"), number_at(j, "C1"),
                  number_at(j, "L"), number_at(j, "C")};
  require_positive(p.R0, "R0");
  require_positive(p.R1, "R1");
  require_positive(p.C1, "C1");
  require_positive(p.L, "L");
  require_positive(p.C, "C");
  return p;
}

std::string to_json(const CircuitParams& params) {
  return json{{"R0", params.R0},
              {"R1", params.R1},
              {"C1", params.C1},
              {"L", params.L},
              {"C", params.C}}
      .dump();
}

void write_roots_csv(std::ostream& out, const std::vector<Root>& roots) {
  out << "re,im,multiplicity,residual\n";
  out.precision(17);
  for (const Root& r : roots)
    out << r.location.real() << ',' << r.location.imag() << ',' << r.multiplicity << ','
        << r.residual << '\n';
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (Eigen::Index k = 0; k < traj.x.rows(); ++k) out << ",x" << (k + 1);
  for (Eigen::Index k = 0; k < traj.y.rows(); ++k) out << ",y" << (k + 1);
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << traj.times[i];
    for (Eigen::Index k = 0; k < traj.x.rows(); ++k)
      out << ',' << traj.x(k, static_cast<Eigen::Index>(i));
    for (Eigen::Index k = 0; k < traj.y.rows(); ++k)
      out << ',' << traj.y(k, static_cast<Eigen::Index>(i));
    out << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << content;
}

}  // namespace delaymid
