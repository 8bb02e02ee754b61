// integrator.hpp — fixed-step RK4 propagation of lattice trajectories, with
// optional tangent-vector co-integration for Lyapunov bookkeeping.
//
// Fixed steps rather than adaptive ones: the trajectories of interest are
// chaotic, and a rigid step grid makes runs bit-reproducible and ensemble
// batching trivial.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bhc/model.hpp"

namespace bhc {

enum class RecordMode { occupations, amplitudes };

struct IntegratorConfig {
    double step = 1e-3;         // in units of 1/J
    double sample_every = 1e-3; // output sampling interval, integer multiple of step
    double t_final = 10.0;
    RecordMode record = RecordMode::occupations;

    void validate() const;      // throws std::invalid_argument
    long total_steps() const;
    long sample_stride() const;
};

struct TrajectoryRecord {
    std::vector<double> times;
    // one row per sample; occupations always present, amplitudes only in
    // RecordMode::amplitudes (full complex storage is the memory hog for
    // thousand-trajectory ensembles)
    std::vector<std::vector<double>> occupations;
    std::vector<std::vector<Complex>> amplitudes;
    RecordMode mode = RecordMode::occupations;
};

// any |a_l|^2 above this is far outside the physical range ~L and means the
// integrator is being misused
inline constexpr double kBlowUpThreshold = 1e6;

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, const std::string& detail)
        : std::runtime_error("trajectory blow-up at t = " + std::to_string(t) +
                             ": " + detail),
          t_fail(t) {}
    double t_fail;
};

// Step-by-step driver; time is derived from the step index, never accumulated.
class Propagator {
public:
    Propagator(TrajectoryState initial, const LatticeConfig& cfg, double step);

    void advance_steps(long n);  // throws BlowUpError on non-finite or huge |a|^2
    const std::vector<Complex>& amplitudes() const { return y_; }
    double time() const { return h_ * static_cast<double>(step_index_); }
    long step_index() const { return step_index_; }

private:
    void rk4_step();

    ModelWorkspace ws_;
    double h_;
    long step_index_ = 0;
    std::vector<Complex> y_, k1_, k2_, k3_, k4_, tmp_;
};

// Co-integrates the tangent flow alongside the trajectory and renormalizes the
// tangent on request, returning log growth factors.
class TangentPropagator {
public:
    TangentPropagator(TrajectoryState initial, TangentState tangent,
                      const LatticeConfig& cfg, double step);

    // advances n steps; throws BlowUpError / TangentRangeError
    void advance_steps(long n);
    // ln ||tangent|| then rescale to unit norm
    double renormalize();

    const std::vector<Complex>& amplitudes() const { return y_; }
    const std::vector<Complex>& tangent() const { return dy_; }
    double tangent_norm() const;
    double time() const { return h_ * static_cast<double>(step_index_); }

private:
    void rk4_step();

    ModelWorkspace ws_;
    double h_;
    long step_index_ = 0;
    std::vector<Complex> y_, dy_;
    std::vector<Complex> k1_, k2_, k3_, k4_, tmp_;    // trajectory stages
    std::vector<Complex> dk1_, dk2_, dk3_, dk4_, dtmp_;  // tangent stages
};

class TangentRangeError : public std::runtime_error {
public:
    explicit TangentRangeError(double t)
        : std::runtime_error("tangent norm left representable range at t = " +
                             std::to_string(t)),
          t_fail(t) {}
    double t_fail;
};

TrajectoryRecord propagate(const TrajectoryState& initial, const LatticeConfig& cfg,
                           const IntegratorConfig& icfg);

struct TangentRun {
    TrajectoryRecord record;
    std::vector<double> log_growth;  // ln growth factor per renormalization interval
    double renorm_interval = 0.0;
};

// renorm_interval and t_final must be integer multiples of the step;
// t_final must be an integer multiple of renorm_interval.
TangentRun propagate_with_tangent(const TrajectoryState& initial,
                                  const TangentState& tangent0,
                                  const LatticeConfig& cfg,
                                  const IntegratorConfig& icfg,
                                  double renorm_interval);

}  // namespace bhc
