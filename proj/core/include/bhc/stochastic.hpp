// stochastic.hpp — reduction of the dissipated site to a single damped
// nonlinear oscillator driven by exponentially correlated complex noise, plus
// its stationary-state diagnostics.
//
// The noise stands in for the neighbor-sum drive xi(t) = a_{l+1} + a_{l-1} of
// the chaotic lattice: autocorrelation A exp(-|dt|/tau) with A = 2 for
// undepleted neighbors, phase-isotropic (<xi xi> = 0).

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bhc/model.hpp"
#include "bhc/rng.hpp"

namespace bhc {

struct OUProcessConfig {
    double A = 2.0;      // stationary second moment <|xi|^2>
    double tau = 0.5;    // correlation time
    double step = 1e-3;  // discretization step, also the SDE integration step

    void validate() const;
};

// Exact discrete Ornstein-Uhlenbeck update; the stationary law and the
// autocorrelation are exact at any step size.
class OUProcess {
public:
    OUProcess(const OUProcessConfig& cfg, RngStream& stream);

    Complex value() const { return xi_; }
    Complex advance();  // one step of size cfg.step

private:
    double decay_;  // exp(-h/tau)
    double kick_;   // sqrt(A (1 - exp(-2h/tau)) / 2) per quadrature
    Complex xi_;
    RngStream* stream_;
};

std::vector<Complex> ou_path(const OUProcessConfig& cfg, long n_steps, RngStream& stream);

struct SingleSiteConfig {
    double omega = 0.0;
    double gamma = 0.1;          // amplitude damping; occupation decays at 2 gamma
    double g = 0.0;
    double drive_strength = 0.0; // coefficient of xi(t), epsilon J / 2 for a weak link

    static SingleSiteConfig weak_link(double epsilon, double J, double gamma, double g,
                                      double omega = 0.0);
};

struct SingleSitePath {
    std::vector<double> times;
    std::vector<Complex> a;
};

// Integrates i da/dt = (omega - i gamma) a + g |a|^2 a - drive_strength * xi(t)
// with RK4, holding xi constant across each step (exact OU update between
// steps). Deterministic given the stream.
SingleSitePath propagate_single_site(Complex a0, const SingleSiteConfig& scfg,
                                     const OUProcessConfig& ocfg, double t_final,
                                     RngStream& stream, long sample_stride = 1);

// Stationary occupation of the weakly linked dissipated site,
// epsilon^2 J^2 tau / (2 gamma); valid for values << 1.
double stationary_occupation(double epsilon, double J, double tau, double gamma);

// Quasi-stationary occupation when the neighbors themselves deplete:
// J^2 n_neighbor tau / (2 gamma).
double quasi_stationary_occupation(double n_neighbor, double J, double tau, double gamma);

// Effective diffusion constant of the drive: the occupation of the undamped
// driven oscillator grows as D t. This is the two-sided correlation integral
// (eps J / 2)^2 * A * 2 tau = eps^2 J^2 tau for A = 2; it also fixes the
// damped stationary occupation as D / (2 gamma), consistent with
// stationary_occupation.
double diffusion_coefficient(double epsilon, double J, double tau);

struct DistributionTestReport {
    bool pass = false;
    long n_samples = 0;
    double mean_abs = 0.0;        // |<a>|, should vanish
    double var_re = 0.0;
    double var_im = 0.0;
    double occupation_mean = 0.0; // <|a|^2>
    double occupation_ratio = 0.0;  // <n^2>/<n>^2, 2 for exponential occupations
    std::vector<std::string> notes;
};

// Checks that the path samples follow the isotropic complex Gaussian fixed
// point: zero mean, equal quadrature variances matching sigma2_expected, and
// exponentially distributed occupation. `stride` thins correlated samples.
DistributionTestReport stationary_distribution_test(const std::vector<Complex>& path,
                                                    double sigma2_expected,
                                                    long stride = 1,
                                                    double tolerance = 0.10);

}  // namespace bhc
