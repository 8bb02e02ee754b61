// observables.hpp — post-processing of ensemble runs: depleted-atom counts,
// neighbor-drive autocorrelations with exponential fits, depletion-front
// growth exponents, and steady-current detection.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bhc/ensemble.hpp"
#include "bhc/integrator.hpp"

namespace bhc {

// N(t) = nbar * sum_l [1 - n_l(t)], the total number of depleted atoms
std::vector<double> depleted_total(const EnsembleResult& result, double nbar);

// xi(t) = a_{l+1}(t) + a_{l-1}(t), the drive felt by site l (periodic indices).
// Requires full amplitude storage.
std::vector<Complex> xi_series(const TrajectoryRecord& record, int l);

// Same drive assembled from ensemble probe data; one series per surviving
// trajectory. The probe must contain both neighbor sites of l.
std::vector<std::vector<Complex>> xi_from_probe(const ProbeData& probe, int l, int L);

struct CorrelationEstimate {
    std::vector<double> lags;
    std::vector<Complex> C;
    double A_fit = 0.0;
    double tau_fit = 0.0;
    double residual = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
    std::vector<std::string> warnings;
};

// C(lag) averaged over trajectories and window start times; series[i] are
// samples spaced dt apart, already restricted to the stationary window.
CorrelationEstimate autocorrelation(const std::vector<std::vector<Complex>>& series,
                                    double dt, double max_lag);

struct ExponentialFit {
    bool ok = false;
    std::string message;
    double A = 0.0;
    double tau = 0.0;
    double residual = 0.0;
    int lags_used = 0;
};

// Weighted least squares of ln|C| vs lag over lags with |C| above
// max(3 * noise floor, 0.05 * C(0)); writes A_fit/tau_fit back into corr.
ExponentialFit fit_exponential(CorrelationEstimate& corr);

struct FrontFit {
    bool ok = false;
    std::string message;
    std::vector<double> times;
    std::vector<int> counts;      // depleted wells vs time
    double exponent = 0.0;
    double prefactor = 0.0;
    double exponent_err = 0.0;    // bootstrap spread
    std::pair<double, double> fit_window{0.0, 0.0};
    double threshold = 0.5;
};

// Counts sites with mean occupation below `threshold` and fits
// count ~ c * t^exponent over the window where the count lies in
// [min_count, L - 4]. Error bars come from a seeded parametric bootstrap
// that perturbs the mean occupations within their standard errors.
FrontFit depletion_front(const EnsembleResult& result, double threshold,
                         std::uint64_t boot_seed = 0x626f6f74u, int n_boot = 200,
                         int min_count = 3);

struct LinearTailFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    bool steady = false;  // r2 >= 0.95 over the final third
};

// Linear fit of N(t) over the final third of the run; `steady` flags a
// stationary-current regime.
LinearTailFit steady_current_check(const EnsembleResult& result, double nbar);

// Largest sample-index window [0, end) on the result grid over which every
// listed site keeps its mean occupation within rel_drop of its initial value.
std::size_t stationary_window_end(const EnsembleResult& result,
                                  const std::vector<int>& sites, double rel_drop = 0.1);

}  // namespace bhc
