#pragma once

#include <complex>

#include "sharpld/model.hpp"

namespace sharpld {

using cplx = std::complex<double>;

/// d(u) = [(b + rho xi u)^2 + u(1 - u) xi^2]^{1/2}, principal branch.
cplx d_fn(const ModelParams& p, cplx u);

/// Building blocks of Lambda_M(u,t) = -(mu t / 2) [g_t(u) + 2 log f_t(u)],
/// evaluated at a complex argument. f_t^X is even in d, so the branch of d
/// does not matter.
cplx f_t(const ModelParams& p, Marginal m, cplx u, double t);
cplx g_t(const ModelParams& p, Marginal m, cplx u, double t);

/// Lambda_M at a complex argument using the principal logarithm of f_t. Only
/// unambiguous close to the real axis; the Fourier evaluator tracks the phase
/// itself for larger imaginary parts.
cplx cgf_complex(const ModelParams& p, Marginal m, cplx u, double t);

struct CgfValue {
    ExtendedReal lambda; // +inf when u is outside the effective domain
    cplx f;
    double g;
    bool finite;
};

/// Points closer than this to a domain end are reported as not finite.
inline constexpr double kBoundaryGuard = 1e-8;
inline constexpr double kRealnessTolerance = 1e-9;

/// Rescaled cgf t log E[exp(u M_t / t)]. Throws Error(NonRealResult) if the
/// assembled value has an imaginary residue above kRealnessTolerance.
CgfValue cgf_eval(const ModelParams& p, Marginal m, double u, double t);
CgfValue cgf_eval(const ModelParams& p, Marginal m, double u, double t,
                  const DomainBounds& bounds);

struct ExpansionCoeffs {
    double f0;
    double f1;
    double g0;
};

/// Small-time coefficients f_t = f0 + f1 t + O(t^2), g_t = g0 + O(t).
ExpansionCoeffs expansion_coeffs(const ModelParams& p, Marginal m, double u);

/// d f0 / du, closed form.
double f0_derivative(const ModelParams& p, Marginal m, double u);

/// First derivative by complex step (exact to rounding); second derivative by
/// central differences of the complex-step derivative with step
/// max(1e-6, 1e-6 |u|), shrunk to keep the stencil inside the domain.
/// Throws Error(TooCloseToBoundary) when u is not strictly interior or the
/// stencil cannot fit.
double cgf_derivative(const ModelParams& p, Marginal m, double u, double t, int order);
double cgf_derivative(const ModelParams& p, Marginal m, double u, double t, int order,
                      const DomainBounds& bounds);

} // namespace sharpld
