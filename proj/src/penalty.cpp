#include "cards/penalty.hpp"

#include <cmath>

namespace cards {

namespace {
void check(const PenaltySpec& spec) {
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
    throw Error(ErrorCode::InvalidSpec, "penalty lambda must be finite and >= 0");
  }
  if (spec.kind == PenaltySpec::Kind::Scad && !(spec.a > 2.0)) {
    throw Error(ErrorCode::InvalidSpec, "SCAD requires a > 2");
  }
  if (spec.kind == PenaltySpec::Kind::Mcp && !(spec.a > 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "MCP requires a > 1");
  }
}
}  // namespace

PenaltySpec PenaltySpec::scad(double lambda, double a) {
  PenaltySpec s{Kind::Scad, lambda, a};
  check(s);
  return s;
}

PenaltySpec PenaltySpec::mcp(double lambda, double a) {
  PenaltySpec s{Kind::Mcp, lambda, a};
  check(s);
  return s;
}

PenaltySpec PenaltySpec::l1(double lambda) {
  PenaltySpec s{Kind::L1, lambda, 0.0};
  check(s);
  return s;
}

const char* PenaltySpec::kind_name() const {
  switch (kind) {
    case Kind::Scad: return "scad";
    case Kind::Mcp: return "mcp";
    case Kind::L1: return "l1";
  }
  return "?";
}

double penalty_value(const PenaltySpec& spec, double t) {
  check(spec);
  const double x = std::abs(t);
  const double lam = spec.lambda;
  const double a = spec.a;
  switch (spec.kind) {
    case PenaltySpec::Kind::L1:
      return lam * x;
    case PenaltySpec::Kind::Scad:
      if (x <= lam) return lam * x;
      if (x < a * lam) return (2.0 * a * lam * x - x * x - lam * lam) / (2.0 * (a - 1.0));
      return lam * lam * (a + 1.0) / 2.0;  // flat from a*lambda on, bit-exactly
    case PenaltySpec::Kind::Mcp:
      if (x < a * lam) return lam * x - x * x / (2.0 * a);
      return a * lam * lam / 2.0;
  }
  return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double t) {
  check(spec);
  if (t < 0.0) t = -t;
  const double lam = spec.lambda;
  const double a = spec.a;
  switch (spec.kind) {
    case PenaltySpec::Kind::L1:
      return lam;
    case PenaltySpec::Kind::Scad:
      if (t <= lam) return lam;
      if (t < a * lam) return (a * lam - t) / (a - 1.0);
      return 0.0;
    case PenaltySpec::Kind::Mcp:
      return t < a * lam ? lam - t / a : 0.0;
  }
  return 0.0;
}

double rho_derivative(const PenaltySpec& spec, double t) {
  check(spec);
  if (spec.lambda == 0.0) {
    throw Error(ErrorCode::LambdaZero, "rho'(t) undefined at lambda = 0");
  }
  return penalty_derivative(spec, t) / spec.lambda;
}

}  // namespace cards
