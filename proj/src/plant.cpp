#include "indi/plant.hpp"

#include <stdexcept>

namespace indi {
namespace {

// Faddeev–LeVerrier: returns det(sI-A) coefficients (ascending) and the
// matrices M_k with adj(sI - A) = sum_{k=1..n} M_k s^{n-k}.
std::pair<std::vector<double>, std::vector<Eigen::MatrixXd>> leverrier(const Eigen::MatrixXd& A) {
  const auto n = A.rows();
  std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
  c[static_cast<size_t>(n)] = 1.0;
  std::vector<Eigen::MatrixXd> M;
  Eigen::MatrixXd Mk = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Mk = A * Mk + c[static_cast<size_t>(n - k + 1)] * I;
    M.push_back(Mk);
    c[static_cast<size_t>(n - k)] = -(A * Mk).trace() / static_cast<double>(k);
  }
  return {std::move(c), std::move(M)};
}

}  // namespace

PlantModel make_plant(Eigen::MatrixXd A, Eigen::VectorXd B, Eigen::RowVectorXd C, std::string label) {
  const auto n = A.rows();
  if (n < 1 || A.cols() != n || B.size() != n || C.size() != n)
    throw std::invalid_argument("plant: inconsistent A, B, C dimensions");
  PlantModel m;
  m.A = std::move(A);
  m.B = std::move(B);
  m.C = std::move(C);
  m.gust_input = Eigen::VectorXd::Zero(n);
  m.label = std::move(label);
  if (m.cb() == 0.0) throw std::invalid_argument("plant: C*B must be nonzero (relative degree one)");
  return m;
}

PlantModel make_short_period(double Z_alpha, double Z_eta, double M_alpha, double M_q, double M_eta) {
  if (M_eta == 0.0) throw std::invalid_argument("short-period plant: M_eta must be nonzero");
  Eigen::Matrix2d A;
  A << Z_alpha, 1.0, M_alpha, M_q;
  Eigen::Vector2d B(Z_eta, M_eta);
  Eigen::RowVector2d C(0.0, 1.0);
  PlantModel m = make_plant(A, B, C, "short_period");
  m.gust_input = A.col(0);
  m.kind = PlantKind::short_period;
  m.derivatives = {{"Z_alpha", Z_alpha}, {"Z_eta", Z_eta}, {"M_alpha", M_alpha}, {"M_q", M_q}, {"M_eta", M_eta}};
  return m;
}

PlantModel make_roll(double L_p, double L_da) {
  if (L_da == 0.0) throw std::invalid_argument("roll plant: L_da must be nonzero");
  Eigen::MatrixXd A(1, 1);
  A(0, 0) = L_p;
  Eigen::VectorXd B(1);
  B(0) = L_da;
  Eigen::RowVectorXd C(1);
  C(0) = 1.0;
  PlantModel m = make_plant(A, B, C, "roll");
  m.kind = PlantKind::roll;
  m.derivatives = {{"L_p", L_p}, {"L_da", L_da}};
  return m;
}

PlantModel perturb_plant(const PlantModel& m, const std::map<std::string, double>& relative) {
  auto d = m.derivatives;
  for (const auto& [name, rel] : relative) {
    auto it = d.find(name);
    if (it == d.end()) throw std::invalid_argument("perturb_plant: unknown derivative '" + name + "' for " + m.label);
    it->second *= 1.0 + rel;
  }
  switch (m.kind) {
    case PlantKind::short_period:
      return make_short_period(d.at("Z_alpha"), d.at("Z_eta"), d.at("M_alpha"), d.at("M_q"), d.at("M_eta"));
    case PlantKind::roll:
      return make_roll(d.at("L_p"), d.at("L_da"));
    case PlantKind::generic:
      break;
  }
  if (!relative.empty()) throw std::invalid_argument("perturb_plant: generic plants carry no named derivatives");
  return m;
}

Polynomial characteristic_polynomial(const Eigen::MatrixXd& A) { return Polynomial(leverrier(A).first); }

Rational plant_tf(const PlantModel& m) {
  auto [c, M] = leverrier(m.A);
  const auto n = static_cast<size_t>(m.order());
  std::vector<double> num(n, 0.0);
  for (size_t k = 1; k <= n; ++k) num[n - k] = m.C * M[k - 1] * m.B;
  return {Polynomial(std::move(num)), Polynomial(std::move(c))};
}

}  // namespace indi
