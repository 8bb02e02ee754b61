// ensemble.hpp — initial-condition samplers and seeded ensemble propagation.
//
// The quantum ensembles mimic a BEC phase-space distribution: a plane-wave
// carrier plus complex Gaussian fluctuations of variance 1/(4 nbar) per
// quadrature. Trajectory i draws only from stream (root_seed, i), which makes
// ensembles reproducible and extendable without perturbing existing members.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhc/integrator.hpp"
#include "bhc/model.hpp"
#include "bhc/rng.hpp"

namespace bhc {

enum class Sampler { zone_edge_bec, ground_state_bec, uniform_hypersphere };

struct EnsembleConfig {
    long n_traj = 1000;
    std::uint64_t root_seed = 0;
    Sampler sampler = Sampler::zone_edge_bec;
    double nbar = 700.0;
};

// carrier (-1)^l, fluctuations ~ 1/(2 sqrt(nbar)) per quadrature
TrajectoryState sample_zone_edge_bec(int L, double nbar, RngStream& stream);
// carrier 1 (condensate at the band bottom), same noise model
TrajectoryState sample_ground_state_bec(int L, double nbar, RngStream& stream);
// uniform on the sphere sum |a_l|^2 = L
TrajectoryState sample_uniform_hypersphere(int L, RngStream& stream);

// the (root_seed, index)-keyed draw used by run_ensemble
TrajectoryState draw_initial_state(const EnsembleConfig& ecfg, int L,
                                   std::uint64_t traj_index);

// Optional per-trajectory complex amplitude recording on a dense grid,
// for observables that need phases (e.g. neighbor-sum autocorrelations).
struct ProbeConfig {
    std::vector<int> sites;
    double every = 0.0;
    double t_max = 0.0;
    bool enabled() const { return !sites.empty() && every > 0.0 && t_max > 0.0; }
};

struct ProbeData {
    std::vector<double> times;
    std::vector<int> sites;
    // amp[traj][sample * sites.size() + site_slot]
    std::vector<std::vector<Complex>> amp;
    bool empty() const { return amp.empty(); }
};

struct TrajectoryFailure {
    long index = -1;
    double t = 0.0;
    std::string what;
};

class EnsembleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<std::vector<double>> n;       // [sample][site] ensemble mean |a|^2
    std::vector<std::vector<double>> se;      // standard error of the mean
    long n_traj = 0;                          // requested
    long n_used = 0;                          // surviving trajectories
    std::vector<TrajectoryFailure> failures;
    ProbeData probe;

    EnsembleConfig ensemble;                  // resolved run metadata
    LatticeConfig lattice;
    IntegratorConfig integrator;
};

// Propagates n_traj independent trajectories and reduces per-site occupation
// statistics. The reduction runs in fixed chunk order, so results are
// bit-identical for any worker count. Fails if more than 0.1% of the
// trajectories blow up.
EnsembleResult run_ensemble(const EnsembleConfig& ecfg, const LatticeConfig& cfg,
                            const IntegratorConfig& icfg, int workers = 1,
                            const ProbeConfig& probe = {});

}  // namespace bhc
