#pragma once

#include "pmu/case_model.hpp"
#include "pmu/kernels.hpp"
#include "pmu/network_matrices.hpp"

namespace pmu {

struct OperatingPoint {
    RealVector v_mag;
    RealVector v_ang;  // radians, slack at 0
    bool converged = false;
    double mismatch_inf_norm = 0.0;
    int iterations = 0;

    ComplexVector phasors() const;
};

struct PowerFlowOptions {
    double tolerance = 1e-8;  // per-unit power
    int max_iterations = 50;
};

/// Newton-Raphson in polar coordinates from a flat start (PQ magnitudes 1,
/// all angles 0, PV/slack at their set points). Throws NonConvergence.
OperatingPoint solve_power_flow(const PowerCase& pc, const PowerFlowOptions& options = {});

/// |V| = 1, angle 0 at every bus.
OperatingPoint flat_operating_point(const PowerCase& pc);

/// Net complex power injected at each bus, V .* conj(Y V).
ComplexVector power_injections(const ComplexMatrix& ybus, const ComplexVector& v);

/// dP_i/dtheta_j over all N buses (slack included) with magnitudes held fixed.
RealMatrix p_theta_jacobian(const PowerCase& pc, const OperatingPoint& op,
                            kernels::Execution exec = kernels::Execution::Parallel);

}  // namespace pmu
