#pragma once

namespace qelab {

enum class ParameterKind { Tempered, Untempered, Trivial };

// Complex spectral parameter s = re + i*t with re in [0, tau].
// Tempered: t = 0. Untempered: re = 0 (positive eigenvalues, sign = +1)
// or re = tau (negative eigenvalues, sign = -1), t in (0, 1/2].
// Trivial marks the untempered classes with t = 1/2, i.e. eigenvalue +-1.
struct SpectralParameter {
    ParameterKind kind = ParameterKind::Tempered;
    double s = 0.0;
    double t = 0.0;
    int sign = 1;
    double lambda = 0.0;

    bool tempered() const { return kind == ParameterKind::Tempered; }
};

double band_edge(int q);
double tau(int q);

SpectralParameter tempered_parameter(double s, int q);
SpectralParameter untempered_parameter(double t, int sign, int q);

double lambda_from_s(double s, int q);
double lambda_from_s(const SpectralParameter& p, int q);
SpectralParameter s_from_lambda(double lambda, int q);

inline constexpr double kTemperedSlack = 1e-12;
inline constexpr double kTrivialTolerance = 1e-9;

// phi_s(k); at s in {0, tau} the sine ratio takes its limiting value.
double spherical(double s, int k, int q);
double spherical(const SpectralParameter& p, int k, int q);
// q^{k/2} phi_s(k), bounded by k+1 on the tempered band.
double spherical_scaled(double s, int k, int q);

// Number of vertices at distance k in the tree.
double sphere_size(int k, int q);

// Density of mu on [0, tau], total mass 1.
double plancherel_density(double s, int q);
double kesten_mckay_density(double lambda, int q);
// Kesten-McKay mass of (-inf, lambda].
double kesten_mckay_cdf(double lambda, int q);

}  // namespace qelab
