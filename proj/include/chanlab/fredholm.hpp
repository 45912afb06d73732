#pragma once
// Galerkin matrices of the operators over a StreamBasis, their spectra in the
// Dirichlet pairing, and the invertibility / compactness / conjugate-point
// reports built on them.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "chanlab/basis.hpp"
#include "chanlab/euler.hpp"
#include "chanlab/operators.hpp"

namespace chanlab {

enum class OperatorName { Lambda, LambdaInverse, OmegaHat, Gamma, Phi, K };

std::string to_string(OperatorName op);
// Throws ConfigError for unknown names.
OperatorName operator_from_string(const std::string& name);

// Basis with precomputed weighted gradients, Gram matrix of the Dirichlet
// pairing and its Cholesky factor.
class GalerkinSpace {
 public:
  explicit GalerkinSpace(const StreamBasis& basis);

  const StreamBasis& basis() const { return basis_; }
  const ChannelGrid& grid() const { return basis_.grid(); }
  int dim() const { return basis_.dim(); }
  const Eigen::MatrixXd& gram() const { return gram_; }

  // F_ij = <grad b_i, grad h_j> for the given fields.
  Eigen::MatrixXd form_with(const std::vector<ScalarField>& h) const;
  // S_ij = <grad b_i, G grad b_j>.
  Eigen::MatrixXd metric_form(const MetricTensorField& G) const;
  // Basis coordinates of the functionals in a form: Gram^{-1} F.
  Eigen::MatrixXd coordinates(const Eigen::MatrixXd& form) const;
  // sqrt(weight)-scaled (f_x, f_y) stacked per node, one column per field.
  Eigen::MatrixXd gradients(const std::vector<ScalarField>& h) const;
  // Basis elements composed with psi, evaluated exactly at the images.
  std::vector<ScalarField> composed_basis(const AreaDiffeo& psi) const;
  // Matrix of f -> f o psi, projected onto the span.
  Eigen::MatrixXd composition(const AreaDiffeo& psi) const;
  // F_ij = <v, ad_{v_j} v_i> for the velocities of the fields h (antisymmetric);
  // the weak form of K_v tested against the same fields.
  Eigen::MatrixXd k_form(const VectorField& v, const std::vector<ScalarField>& h, const Eigen::MatrixXd& grad_h) const;
  // Matrix of K_v in stream form.
  Eigen::MatrixXd k_matrix(const VectorField& v) const;

  // L^T A L^{-T} with Gram = L L^T: coordinates in which the pairing is Euclidean.
  Eigen::MatrixXd orthonormal(const Eigen::MatrixXd& A) const;
  // A L^{-T}: orthonormal coordinates on the input side only.
  Eigen::MatrixXd right_orthonormal(const Eigen::MatrixXd& A) const;
  // Coordinates of a grid stream (Dirichlet projection onto the span).
  Eigen::VectorXd project(const StreamFunction& f) const;

 private:
  StreamBasis basis_;
  std::vector<double> weights_;  // quadrature weight per grid node
  Eigen::MatrixXd grad_;         // rows (x-part, y-part) per node, scaled by sqrt(weight)
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct OperatorMatrix {
  const StreamBasis* basis = nullptr;
  Eigen::MatrixXd entries;
  OperatorName op = OperatorName::Lambda;
  double t = 0.0;
  std::string pairing = "dirichlet";
  // Pairing on the output side when it differs from the basis Gram (Phi is
  // measured after push-forward by eta(t)).
  Eigen::MatrixXd output_gram;
};

// Node-by-node Galerkin matrices along a trajectory. The Volterra solve for
// Phi and Gamma runs once and keeps every node.
class OperatorAssembler {
 public:
  OperatorAssembler(const OperatorContext& ctx, const GalerkinSpace& space);

  const OperatorContext& context() const { return ctx_; }
  const GalerkinSpace& space() const { return space_; }

  Eigen::MatrixXd lambda(int m) const;
  Eigen::MatrixXd lambda_inverse(int m) const;
  Eigen::MatrixXd k(int m) const;
  // Omega-hat and Y = Omega-hat - Gamma at node n, in label coordinates.
  const Eigen::MatrixXd& omega_hat(int n) const;
  const Eigen::MatrixXd& volterra(int n) const;
  // Phi_t = D eta(t) Y_t: coefficients are those of Y, measured in the
  // Dirichlet pairing of the basis pushed forward by eta(t).
  OperatorMatrix phi(int n) const;

  OperatorMatrix assemble(OperatorName op) const;

 private:
  void run_volterra() const;

  const OperatorContext& ctx_;
  const GalerkinSpace& space_;
  mutable std::vector<Eigen::MatrixXd> omega_, y_, pushed_gram_;
};

OperatorMatrix assemble(OperatorName op, const OperatorContext& ctx, const GalerkinSpace& space);

struct SpectralReport {
  std::vector<double> singular_values;  // descending
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  std::optional<double> symmetric_lambda_min;
  double decay_fit_alpha = 0.0;
};

// Spectrum in the Dirichlet pairing; symmetric_lambda_min is that of the
// symmetric part.
SpectralReport spectral_report(const OperatorMatrix& A, const GalerkinSpace& space);

// Least-squares slope of -log sigma_k against log k over the numerically
// nonzero singular values.
double decay_exponent(const std::vector<double>& sigma);

struct CompactnessSignature {
  SpectralReport spectrum;
  double tail_ratio = 0.0;  // max sigma_k / sigma_1 over the last third
  bool tail_small = false;  // tail_ratio < 1e-3
};

CompactnessSignature compactness_signature(const OperatorMatrix& A, const GalerkinSpace& space);

// sum over nodes of trapezoid weight * ||D eta(tau)||_inf^{-2}.
double lemma1_constant(const OperatorContext& ctx);

struct InvertibilityCertificate {
  SpectralReport spectrum;
  double C_t = 0.0;
  bool lemma1_floor = false;            // symmetric lambda_min >= 0.9 C_t
  double enlarged_sigma_min = 0.0;
  double enlargement_change = 0.0;      // relative change of sigma_min
  bool stable_under_enlargement = false;
};

// Omega-hat_t on a basis and on its 50% enlargement (both sizes scaled by 3/2).
InvertibilityCertificate invertibility_certificate(const GeodesicTrajectory& traj, double t, int quadrature_nodes,
                                                   int max_k, int max_l);

struct ConjugateScanPoint {
  double t = 0.0;
  double sigma_min_over_t = 0.0;
  int multiplicity = 0;   // singular values below 1e-3 * median
  bool flagged = false;
};

// sigma_min(Phi_t) / t at every record of the trajectory in (0, t_max].
std::vector<ConjugateScanPoint> conjugate_scan(const GeodesicTrajectory& traj, double t_max,
                                               const GalerkinSpace& space);

}  // namespace chanlab
