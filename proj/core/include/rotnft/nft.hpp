#pragma once

#include "rotnft/geometry.hpp"
#include "rotnft/simulate.hpp"

namespace rotnft {

enum class SelectionCase { kH5i, kH5iiA, kH5iiB, kFarFromS };

const char* to_string(SelectionCase c);

// Thrown when the S-form near the query point is not non-positive.
class H5ViolationError : public Error {
 public:
  H5ViolationError(const std::string& what, SymForm2 form)
      : Error(what), form_(form) {}
  const SymForm2& form() const { return form_; }

 private:
  SymForm2 form_;
};

struct DropSelection {
  DropCurve drop;
  int sign_omega = -1;
  double k_x = 1.0;          // inward alignment -w.r(0)/|w| at the anchor
  SelectionCase sel = SelectionCase::kH5i;
  double psi_x = 0.0;        // angle of (grad h . f1, grad h . f2)
  Vector2d inward = Vector2d::Zero();  // -w/|w| (first-order inward direction)
  Vector anchor;             // the S-projection used for classification
  double d_s = 0.0;
};

// Drop generator choice at a point x in C: far from S falls back to the
// first-order inward direction; near S the phase/half-amplitude come from the
// geometry of the S form with the paper's A)/B) inner-product dichotomy.
DropSelection select_drop_params(const ControlAffineSystem& sys, const Constraint& con,
                                 const SingularSetModel& singular, const Vector& x,
                                 double eps, double tau0 = 1.0);

struct NFTConfig {
  double eps = 0.25;          // far-from-S threshold (collar scale)
  double tau0 = 1.0;          // drop period used for rotational legs
  double d_max = 0.5;         // refuse references violating more than this
  double gamma_hat = 1.0;     // calibration factor in the tau(d) seed
  int max_attempts = 20;      // (tau, omega) enlargements per leg
  int leg_budget = 400;
  double progress_min_rel = 5e-3;  // a leg must certify at least this * T
  StepPolicy policy;
  bool collect_distances = true;
};

struct LegRecord {
  double t_splice = 0.0;
  double tau_ins = 0.0;
  double omega = 0.0;
  int k = 1;
  SelectionCase sel = SelectionCase::kH5i;
  int attempts = 0;
  double certified_until = 0.0;
};

struct LegAttempt {
  double tau_ins = 0.0;
  double omega = 0.0;
  double first_violation = 0.0;
  double max_h = 0.0;
};

struct Obstruction {
  std::string message;
  LegAttempt best;
  double t_splice = 0.0;
  int legs_done = 0;
};

struct NFTResult {
  Process y;
  ControlFunction w;
  double tau_d = 0.0;            // first-leg insertion duration tau(d)
  double total_delay = 0.0;      // sum of insertions over all legs
  double d = 0.0;                // violation extent of the reference
  double tau1 = 0.0;             // first violation time of the reference
  bool feasible = false;
  double margin = 0.0;           // min of -h(y) over (tau1, T]
  std::vector<LegRecord> legs;
  // Distances to the reference (raw; fits happen in verify_estimates):
  double sup_dist = 0.0;                  // ||y - x||_Linf(0,T)
  double l1_control_gap = 0.0;            // ||w - u||_L1(0,T)
  double l1_deriv_gap = 0.0;              // ||y' - x'||_L1(0,T)
  double delayed_control_modulus = 0.0;   // ||u(.-tau) - u||_L1(tau1+tau,T)
  double delayed_deriv_modulus = 0.0;     // same for x'
};

struct NFTOutcome {
  bool success = false;
  NFTResult result;
  Obstruction obstruction;
};

// The splicing construction: reference control up to the first violation, a
// rotational (or first-order inward) leg of duration tau(d), then the delayed
// reference; repeated per leg until the whole horizon is certified.
NFTOutcome construct_nft(const ControlAffineSystem& sys, const Constraint& con,
                         const SingularSetModel& singular, const Process& reference,
                         const NFTConfig& cfg = {});

struct EstimateRow {
  double d = 0.0;
  double sup_dist = 0.0;
  double l1_control = 0.0;
  double l1_deriv = 0.0;
  double w11 = 0.0;
  double delayed_control_modulus = 0.0;
  double delayed_deriv_modulus = 0.0;
};

struct EstimateCertificate {
  double slope = 0.0;     // fitted log sup_dist vs log d
  double K = 0.0;         // max sup_dist / sqrt(d)
  double Kprime = 0.0;    // max w11 / sqrt(d)
  std::vector<EstimateRow> rows;
};

// Distance estimates over a sweep of (reference, result) pairs; d = 0 rows are
// excluded from the fit.
EstimateCertificate verify_estimates(const std::vector<std::pair<Process, NFTResult>>& sweep);

}  // namespace rotnft
