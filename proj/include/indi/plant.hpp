#pragma once

#include <map>
#include <string>

#include <Eigen/Dense>

#include "indi/polynomial.hpp"

namespace indi {

enum class PlantKind { generic, short_period, roll };

/// SISO LTI plant  x' = A x + B u,  y = C x.
struct PlantModel {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  /// State-derivative increment per unit gust angle of attack (alpha_g = w_g / V).
  Eigen::VectorXd gust_input;
  PlantKind kind = PlantKind::generic;
  /// Named stability/control derivatives for parametric plants (Monte-Carlo).
  std::map<std::string, double> derivatives;
  std::string label;

  int order() const noexcept { return static_cast<int>(A.rows()); }
  /// Control effectiveness CB.
  double cb() const { return C.dot(B); }
};

/// Generic plant; throws std::invalid_argument on dimension mismatch or CB == 0.
PlantModel make_plant(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C, std::string label = "generic");

/// alpha' = Z_alpha alpha + q + Z_eta eta,  q' = M_alpha alpha + M_q q + M_eta eta,  y = q.
PlantModel make_short_period(double Z_alpha, double Z_eta, double M_alpha, double M_q, double M_eta);

/// p' = L_p p + L_da da,  y = p.
PlantModel make_roll(double L_p, double L_da);

/// Rebuilds a parametric plant with derivatives scaled by (1 + relative[name]).
PlantModel perturb_plant(const PlantModel& m, const std::map<std::string, double>& relative);

/// det(sI - A) by Faddeev–LeVerrier.
Polynomial characteristic_polynomial(const Eigen::MatrixXd& A);

/// P(s) = C adj(sI - A) B / det(sI - A).
Rational plant_tf(const PlantModel& m);

}  // namespace indi
