#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "delaymid/feedback.hpp"
#include "delaymid/quasipoly.hpp"
#include "delaymid/rootfinder.hpp"
#include "delaymid/simulate.hpp"

namespace delaymid {

/// Raised when an input document does not match the expected schema.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON schemas (field names are part of the file-format contract):
//   quasipolynomial  {"terms": [{"coeffs": [...], "lambda": r}, ...]}
//   scalar DDAE      {"a":, "b":, "c":, "d":, "tau":}
//   plant            {"a":, "b":, "c": [c1, c2], "d": [d1, d2], "tau":}
//   gains            {"k1":, "k2":}
//   circuit          {"R0":, "R1":, "C1":, "L":, "C":}

Quasipolynomial quasipolynomial_from_json(const std::string& text);
std::string to_json(const Quasipolynomial& q);

DdaeScalar ddae_scalar_from_json(const std::string& text);
std::string to_json(const DdaeScalar& sys);

FeedbackPlant plant_from_json(const std::string& text);
std::string to_json(const FeedbackPlant& plant);

FeedbackGains gains_from_json(const std::string& text);
std::string to_json(const FeedbackGains& gains);

CircuitParams circuit_from_json(const std::string& text);
std::string to_json(const CircuitParams& params);

/// CSV with header "re,im,multiplicity,residual", one row per root.
void write_roots_csv(std::ostream& out, const std::vector<Root>& roots);

/// CSV with header "t,x1..,y1.."; one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace delaymid
