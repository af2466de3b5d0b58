#pragma once

#include <map>
#include <string>
#include <vector>

#include "rdt/flow.hpp"
#include "rdt/geometry.hpp"

namespace rdt {

struct EigenRecord {
  double t = 0.0;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
};

/// Largest snapshot time t such that every record with time <= t has its
/// relative eigenvalues inside [1 - delta, 1 + delta]; 0 when the first
/// record already fails. Records are sorted by time first.
std::map<double, double> uniform_equivalence_window(std::vector<EigenRecord> records,
                                                    const std::vector<double>& deltas);
std::map<double, double> uniform_equivalence_window(const std::vector<FlowState>& snapshots,
                                                    const std::vector<double>& deltas);

/// Shell suprema of one audited quantity. With rotational symmetry a shell is
/// a single grid radius.
struct ShellProfile {
  std::string quantity;  // "nabla_g", "deturck", "riemann", "nabla_riemann"
  int order = 0;
  int exponent = 0;  // the rho power the continuum estimate allows
  double t = 0.0;
  bool applicable = true;
  std::string status;  // reason when not applicable
  std::vector<double> rho;
  std::vector<double> norm;
};

struct FitOptions {
  double slack = 0.2;
  double rho_max = 1.0;        // only shells with rho <= rho_max
  double noise_floor = 1e-10;  // envelope values below this count as zero
};

struct ScalingFit {
  std::string quantity;
  int exponent = 0;
  bool applicable = true;
  bool degenerate = false;
  std::vector<double> rho;       // shells used, increasing
  std::vector<double> envelope;  // sup of the profile over rho' >= rho
  double slope = 0.0;            // d log(envelope) / d log(1/rho)
  double intercept = 0.0;        // log C in envelope ~ C rho^{-slope}
  double residual = 0.0;         // max |log envelope - fit|
  double slack = 0.2;
  bool pass = true;
};

/// Excludes the outer collar: points with r >= r_out - collar (r_out - r_in).
struct ProfileOptions {
  double outer_collar = 0.25;
};

/// |nabla_bg^m g| in the background norm; m >= 1.
ShellProfile derivative_profile(const MetricField& g, const BackgroundGeometry& bg, int m,
                                const ProfileOptions& options = {});

/// |V| in the background norm.
ShellProfile deturck_norm_audit(const MetricField& g, const BackgroundGeometry& bg,
                                const ProfileOptions& options = {});

/// |Rm(g)| (m = 0) or |nabla^m Rm(g)| with the connection of g, in the norm of g.
ShellProfile curvature_audit(const MetricField& g, const BackgroundGeometry& bg, int m,
                             const ProfileOptions& options = {});

/// Least-squares slope of log(envelope) against log(1/rho) over shells with
/// rho <= rho_max. Requires at least 4 shells spanning a factor 4 in rho.
ScalingFit scaling_exponent_fit(const ShellProfile& profile, const FitOptions& options = {});

/// Norm of t measured with the metric g at each point.
std::vector<double> metric_norm(const TensorField& t, const MetricField& g);

}  // namespace rdt
