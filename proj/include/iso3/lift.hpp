#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "iso3/jordan.hpp"
#include "iso3/operator_matrix.hpp"

// Numerical recovery of a Jordan-model extension: given T with quadratic
// power growth at parameter c, find a unitary U and an isometry V with
// V T ~= J(U, c) V. The solver alternates an exact unitary Procrustes step
// for U with a damped least-squares step for V on the isometry manifold.

namespace iso3 {

struct LiftingCertificate {
  JordanModel model{OperatorMatrix(Mat::Identity(1, 1)), 1.0};
  Mat v;  // 2d x n, top block feeds the cU coupling of the model
  double residual = 0.0;         // |V T - J V|_F
  double isometry_defect = 0.0;  // |V* V - I|_F
  int restarts_used = 0;
  std::vector<double> objective_trace;  // per-sweep residuals, winning restart
};

struct FitOptions {
  Eigen::Index d = 0;  // model block size; 0 = start at dim T and escalate
  int restarts = 8;
  int sweeps = 200;
  bool allow_nonmember = false;
  std::uint64_t seed = 12345;
  double target = 1e-9;  // relative stopping residual
};

// Throws std::domain_error when the membership pencil for (T, c) scans
// negative, unless opts.allow_nonmember is set.
LiftingCertificate fit_lifting(const OperatorMatrix& t, double c,
                               FitOptions opts = {});

struct LiftReport {
  std::vector<std::pair<int, double>> power_residuals;  // (k, |V T^k - J^k V|)
  double isometry_defect = 0.0;
  double spectral_gap = 0.0;  // max over eig(T) of distance to eig(U)
  bool t_invertible = true;
  std::string detail;
};

LiftReport verify_lifting(const OperatorMatrix& t, const LiftingCertificate& cert);

struct TrimOptions {
  double delta = 1e-4;    // spectral distance that marks a U-eigenvalue far
  double eps_rel = 1e-6;  // allowed embedding mass on far eigenvectors
  double residual_threshold = 1e-6;  // relative; inputs above this are refused
};

struct TrimResult {
  bool ok = false;
  std::string reason;
  LiftingCertificate cert;  // trimmed certificate when ok
  std::vector<std::pair<cx, double>> deleted;  // (eigenvalue, embedding mass)
};

// Deletes U-eigenvectors whose eigenvalue stays away from the spectrum of T,
// provided the embedding carries no mass there; refuses, naming the
// eigenvalue, when it does.
TrimResult trim_spectrum(const OperatorMatrix& t, const LiftingCertificate& cert,
                         TrimOptions opts = {});

}  // namespace iso3
