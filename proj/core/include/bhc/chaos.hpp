// chaos.hpp — diagnostics of the closed lattice (gamma = 0): largest Lyapunov
// exponents via tangent-space renormalization, Monte Carlo energy-shell
// volumes, and the plane-wave orbit catalog with its stability classification.

#pragma once

#include <cstdint>
#include <vector>

#include "bhc/ensemble.hpp"
#include "bhc/model.hpp"
#include "bhc/rng.hpp"

namespace bhc {

struct ChaosDefaults {
    static constexpr double T = 200.0;            // total integration time
    static constexpr double renorm_interval = 1.0;
    static constexpr double step = 2e-3;
    // classification threshold between regular and chaotic, in units of J;
    // summary statistics only, raw lambda values are always kept
    static constexpr double lambda_regular = 0.05;
};

struct LyapunovResult {
    double lambda = 0.0;
    std::vector<double> history;   // running estimate after each renormalization
    double T = 0.0;
    double renorm_interval = 0.0;
    bool converged = false;        // last-quartile spread small or orbit regular
    double spread = 0.0;           // relative spread of the last quartile
    int shrink_retries = 0;        // times renorm_interval was halved after range errors
};

// Benettin estimate with a random unit initial tangent drawn from `stream`.
// The closed system is the diagnostic target, so cfg.gamma must be 0.
LyapunovResult lyapunov_exponent(const TrajectoryState& initial, const LatticeConfig& cfg,
                                 double T, double renorm_interval, RngStream& stream,
                                 double step = ChaosDefaults::step);

struct ScanPoint {
    double energy = 0.0;
    double lambda = 0.0;
    bool converged = false;
};

// (E, lambda) pairs for n_samples uniform-hypersphere initial conditions.
// Sample i draws its state from stream (root_seed, 2i) and its tangent from
// (root_seed, 2i+1); scans parallelize like ensembles.
std::vector<ScanPoint> lyapunov_scan(long n_samples, const LatticeConfig& cfg, double T,
                                     std::uint64_t root_seed, int workers = 1,
                                     double renorm_interval = ChaosDefaults::renorm_interval,
                                     double step = ChaosDefaults::step);

struct ShellHistogram {
    std::vector<double> edges;  // bins + 1 monotone edges
    std::vector<double> mass;   // relative volume per bin, sums to 1
    long n_samples = 0;
};

// Monte Carlo energy histogram over the norm hypersphere, 50 uniform bins by
// default (finer than needed, coarsening is a plotting choice).
ShellHistogram energy_shell_histogram(long n_samples, int bins, const LatticeConfig& cfg,
                                      std::uint64_t root_seed);

struct BlochWave {
    int k = 0;
    double kappa = 0.0;   // folded to (-pi, pi]
    double energy = 0.0;  // L (omega - J cos kappa + g/2)
    bool stable = false;  // |kappa| < pi/2
};

std::vector<BlochWave> bloch_wave_catalog(const LatticeConfig& cfg);

// Propagates the exact plane-wave orbit and returns max_{l,t} |a_num - a_exact|.
double verify_bloch_wave(int k, const LatticeConfig& cfg, double t_final,
                         double step = 1e-3);

}  // namespace bhc
