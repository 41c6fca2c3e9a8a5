#include "pmu/power_flow.hpp"

#include <cmath>
#include <sstream>

#include "pmu/error.hpp"

namespace pmu {

ComplexVector OperatingPoint::phasors() const {
    ComplexVector v(v_mag.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::polar(v_mag(i), v_ang(i));
    return v;
}

ComplexVector power_injections(const ComplexMatrix& ybus, const ComplexVector& v) {
    ComplexVector current = ybus * v;
    return v.cwiseProduct(current.conjugate());
}

OperatingPoint flat_operating_point(const PowerCase& pc) {
    const auto n = static_cast<Eigen::Index>(pc.bus_count());
    OperatingPoint op;
    op.v_mag = RealVector::Ones(n);
    op.v_ang = RealVector::Zero(n);
    op.converged = true;
    return op;
}

OperatingPoint solve_power_flow(const PowerCase& pc, const PowerFlowOptions& options) {
    if (!(options.tolerance > 0.0)) throw PmuError(ErrorKind::InvalidArgument, "power-flow tolerance must be positive");
    if (options.max_iterations < 0) throw PmuError(ErrorKind::InvalidArgument, "negative iteration limit");

    const ComplexMatrix y = build_ybus(pc);
    const auto n = static_cast<Eigen::Index>(pc.bus_count());

    std::vector<int> pv_pq;  // buses with unknown angle
    std::vector<int> pq;     // buses with unknown magnitude
    ComplexVector s_scheduled(n);
    OperatingPoint op;
    op.v_mag = RealVector::Ones(n);
    op.v_ang = RealVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& bus = pc.buses[static_cast<std::size_t>(i)];
        s_scheduled(i) = {bus.p_gen - bus.p_load, bus.q_gen - bus.q_load};
        if (bus.type != BusType::PQ) op.v_mag(i) = bus.v_mag;
        if (bus.type != BusType::Slack) pv_pq.push_back(static_cast<int>(i));
        if (bus.type == BusType::PQ) pq.push_back(static_cast<int>(i));
    }
    const auto n_ang = static_cast<Eigen::Index>(pv_pq.size());
    const auto n_mag = static_cast<Eigen::Index>(pq.size());

    auto mismatch = [&](const ComplexVector& v) {
        ComplexVector mis = power_injections(y, v) - s_scheduled;
        RealVector f(n_ang + n_mag);
        for (Eigen::Index k = 0; k < n_ang; ++k) f(k) = mis(pv_pq[k]).real();
        for (Eigen::Index k = 0; k < n_mag; ++k) f(n_ang + k) = mis(pq[k]).imag();
        return f;
    };

    ComplexVector v = op.phasors();
    RealVector f = mismatch(v);
    op.mismatch_inf_norm = f.size() ? f.lpNorm<Eigen::Infinity>() : 0.0;
    int iter = 0;
    const std::complex<double> jay(0.0, 1.0);
    while (op.mismatch_inf_norm > options.tolerance && iter < options.max_iterations) {
        ++iter;
        // dS/dtheta = j diag(V) conj(diag(I) - Y diag(V))
        // dS/d|V|   = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        const ComplexVector current = y * v;
        ComplexMatrix ds_dang = -(y * v.asDiagonal()).conjugate();
        ds_dang.diagonal() += current.conjugate();
        ds_dang = (jay * v).asDiagonal() * ds_dang;
        const ComplexVector v_unit = v.cwiseQuotient(v.cwiseAbs().cast<std::complex<double>>());
        ComplexMatrix ds_dmag = v.asDiagonal() * (y * v_unit.asDiagonal()).conjugate();
        ds_dmag.diagonal() += current.conjugate().cwiseProduct(v_unit);

        RealMatrix jac(n_ang + n_mag, n_ang + n_mag);
        for (Eigen::Index r = 0; r < n_ang; ++r) {
            for (Eigen::Index c = 0; c < n_ang; ++c) jac(r, c) = ds_dang(pv_pq[r], pv_pq[c]).real();
            for (Eigen::Index c = 0; c < n_mag; ++c) jac(r, n_ang + c) = ds_dmag(pv_pq[r], pq[c]).real();
        }
        for (Eigen::Index r = 0; r < n_mag; ++r) {
            for (Eigen::Index c = 0; c < n_ang; ++c) jac(n_ang + r, c) = ds_dang(pq[r], pv_pq[c]).imag();
            for (Eigen::Index c = 0; c < n_mag; ++c) jac(n_ang + r, n_ang + c) = ds_dmag(pq[r], pq[c]).imag();
        }
        const RealVector dx = jac.partialPivLu().solve(-f);
        for (Eigen::Index k = 0; k < n_ang; ++k) op.v_ang(pv_pq[k]) += dx(k);
        for (Eigen::Index k = 0; k < n_mag; ++k) op.v_mag(pq[k]) += dx(n_ang + k);

        v = op.phasors();
        f = mismatch(v);
        op.mismatch_inf_norm = f.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(op.mismatch_inf_norm)) break;
    }
    op.iterations = iter;
    op.converged = std::isfinite(op.mismatch_inf_norm) && op.mismatch_inf_norm <= options.tolerance;
    if (!op.converged) {
        std::ostringstream msg;
        msg << "power flow for '" << pc.name << "' did not converge after " << iter
            << " iterations (mismatch " << op.mismatch_inf_norm << " p.u.)";
        throw PmuError(ErrorKind::NonConvergence, msg.str());
    }
    return op;
}

RealMatrix p_theta_jacobian(const PowerCase& pc, const OperatingPoint& op, kernels::Execution exec) {
    return kernels::p_theta_jacobian(build_ybus(pc), op.phasors(), exec);
}

}  // namespace pmu
