#pragma once

#include <array>
#include <functional>
#include <map>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "geomflow/diff_operator.hpp"

namespace geomflow {

/// H(k) = int density(k, k', ..., k^(jet_order)) dx.
struct Functional {
  std::function<double(std::span<const double>)> density;
  int jet_order = 0;  // at most 4
};

double evaluate(const Functional& h, const GridFunction& k);

/// Euler operator sum_j (-D)^j d(density)/d k^(j); the partials are fourth-order
/// central differences in the jet coordinates with step 1e-3 * max(1, |k^(j)|).
GridFunction variational_derivative(const Functional& h, const GridFunction& k);

using FieldMap = std::map<std::string, GridFunction>;

/// Names: kdv-first, kdv-second, rp1-reduced, rp1-companion, euclid-R, euclid-A,
/// euclid-B, euclid-C, conformal-cc, lagrangian-diag. Scalar operators come back
/// as 1 x 1 blocks. Required fields: k (kdv-second, rp1-reduced), kappa and tau
/// (euclid-*), k1 and k2 (conformal-cc), s0, s1, ... (lagrangian-diag).
BlockOperator poisson_catalog(const std::string& name, const PeriodicGrid& grid, const FieldMap& fields = {});
const std::vector<std::string>& poisson_names();

/// max over random band-limited f, g of |<op f, g> + <f, op g>| / (|f| |g|).
double adjoint_residual(const BlockOperator& op, int trials = 8, unsigned seed = 7);
double adjoint_residual(const DiffOperator& op, int trials = 8, unsigned seed = 7);

/// P = -R C^{-1} R on (g, h), returning (kappa_t, tau_t). The second row of R
/// is D o W, so C^{-1} is applied as y1 = kappa W(g, h) with zero constant and
/// y2 = D^{-1}(kappa g' + tau h') with zero mean. The latter requires
/// mean(kappa g' + tau h') = 0; otherwise Unsolvable carries that mean.
class EuclidP {
 public:
  EuclidP(const GridFunction& kappa, const GridFunction& tau);

  std::array<GridFunction, 2> apply(const GridFunction& g, const GridFunction& h) const;
  const BlockOperator& R() const noexcept { return r_; }
  const BlockOperator& C() const noexcept { return c_; }

 private:
  GridFunction kappa_;
  BlockOperator r_, c_;
  DiffOperator w_g_, w_h_;  // second row of R with the leading D removed
};

std::array<GridFunction, 2> euclid_P(const GridFunction& kappa, const GridFunction& tau, const GridFunction& g,
                                     const GridFunction& h);

using Fields = std::vector<GridFunction>;
using OperatorBuilder = std::function<BlockOperator(const Fields&)>;
using Gradient = std::function<Fields(const Fields&)>;

Gradient gradient_of(const Functional& h);

struct HamiltonianRun {
  std::vector<double> times;
  std::vector<Fields> history;
  bool blew_up = false;
  std::string message;
};

/// RK4 for k_t = op(k) * grad H(k); the operator is rebuilt at every stage.
HamiltonianRun hamiltonian_flow(const OperatorBuilder& op, const Gradient& grad, const Fields& k0, double dt,
                                int steps, int stride = 1);

/// Audit dump: {"name", "size", "entries": [[{"chains": [{"coeff", "factors"}]}]], "ordering"}.
nlohmann::json operator_json(const BlockOperator& op, const std::string& name);

}  // namespace geomflow
