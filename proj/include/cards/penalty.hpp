#pragma once

#include "cards/types.hpp"

namespace cards {

/// Folded-concave (SCAD, MCP) and L1 penalties. SCAD requires a > 2, MCP
/// a > 1; L1 ignores a. The SCAD/MCP closed forms follow Fan & Li (2001).
struct PenaltySpec {
  enum class Kind { Scad, Mcp, L1 };

  Kind kind = Kind::Scad;
  double lambda = 0.0;
  double a = 3.7;

  static PenaltySpec scad(double lambda, double a = 3.7);
  static PenaltySpec mcp(double lambda, double a = 3.0);
  static PenaltySpec l1(double lambda);

  const char* kind_name() const;
  /// True when the derivative vanishes beyond a*lambda (SCAD/MCP).
  bool flat_tail() const { return kind != Kind::L1; }
};

/// p_lambda(|t|); symmetric in t, constant for |t| >= a*lambda (SCAD/MCP).
double penalty_value(const PenaltySpec& spec, double t);

/// p'_lambda(t) for t >= 0, with p'(0) taken as the right limit p'(0+).
double penalty_derivative(const PenaltySpec& spec, double t);

/// rho'(t) = p'_lambda(t) / lambda. Throws LambdaZero when lambda == 0.
double rho_derivative(const PenaltySpec& spec, double t);

}  // namespace cards
