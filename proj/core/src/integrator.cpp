#include "bhc/integrator.hpp"

#include <cmath>
#include <utility>

namespace bhc {

namespace {

long checked_stride(double interval, double step, const char* name) {
    const double ratio = interval / step;
    const long stride = std::lround(ratio);
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio + 1e-12) {
        throw std::invalid_argument(std::string(name) +
                                    " must be a positive integer multiple of step");
    }
    return stride;
}

bool occupations_ok(const std::vector<Complex>& y) {
    for (const Complex& a : y) {
        const double n = std::norm(a);
        if (!(n <= kBlowUpThreshold)) return false;  // catches NaN too
    }
    return true;
}

void record_sample(TrajectoryRecord& rec, double t, const std::vector<Complex>& y) {
    rec.times.push_back(t);
    std::vector<double> occ(y.size());
    for (std::size_t l = 0; l < y.size(); ++l) occ[l] = std::norm(y[l]);
    rec.occupations.push_back(std::move(occ));
    if (rec.mode == RecordMode::amplitudes) rec.amplitudes.push_back(y);
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("IntegratorConfig: step must be > 0");
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw std::invalid_argument("IntegratorConfig: t_final must be > 0");
    if (sample_every < step)
        throw std::invalid_argument("IntegratorConfig: sample_every must be >= step");
    checked_stride(sample_every, step, "sample_every");
}

long IntegratorConfig::total_steps() const {
    const long n = std::lround(t_final / step);
    return n > 0 ? n : 1;
}

long IntegratorConfig::sample_stride() const {
    return checked_stride(sample_every, step, "sample_every");
}

Propagator::Propagator(TrajectoryState initial, const LatticeConfig& cfg, double step)
    : ws_(cfg), h_(step), y_(std::move(initial.a)) {
    if (!(step > 0.0)) throw std::invalid_argument("Propagator: step must be > 0");
    if (y_.size() != static_cast<std::size_t>(cfg.L))
        throw std::invalid_argument("Propagator: state/config dimension mismatch");
    const std::size_t n = y_.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
}

void Propagator::rk4_step() {
    const std::size_t n = y_.size();
    const double h = h_;
    ws_.rhs(y_.data(), k1_.data());
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + 0.5 * h * k1_[i];
    ws_.rhs(tmp_.data(), k2_.data());
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + 0.5 * h * k2_[i];
    ws_.rhs(tmp_.data(), k3_.data());
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * k3_[i];
    ws_.rhs(tmp_.data(), k4_.data());
    const double w = h / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        y_[i] += w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    ++step_index_;
}

void Propagator::advance_steps(long n) {
    for (long s = 0; s < n; ++s) {
        rk4_step();
        if (!occupations_ok(y_)) throw BlowUpError(time(), "|a|^2 not finite or > 1e6");
    }
}

TrajectoryRecord propagate(const TrajectoryState& initial, const LatticeConfig& cfg,
                           const IntegratorConfig& icfg) {
    cfg.validate();
    icfg.validate();
    TrajectoryRecord rec;
    rec.mode = icfg.record;

    Propagator prop(initial, cfg, icfg.step);
    record_sample(rec, 0.0, prop.amplitudes());

    const long n_steps = icfg.total_steps();
    const long stride = icfg.sample_stride();
    long done = 0;
    while (done < n_steps) {
        const long chunk = std::min(stride, n_steps - done);
        prop.advance_steps(chunk);
        done += chunk;
        record_sample(rec, prop.time(), prop.amplitudes());
    }
    return rec;
}

TangentPropagator::TangentPropagator(TrajectoryState initial, TangentState tangent,
                                     const LatticeConfig& cfg, double step)
    : ws_(cfg), h_(step), y_(std::move(initial.a)), dy_(std::move(tangent.da)) {
    if (!(step > 0.0)) throw std::invalid_argument("TangentPropagator: step must be > 0");
    if (y_.size() != static_cast<std::size_t>(cfg.L) || dy_.size() != y_.size())
        throw std::invalid_argument("TangentPropagator: dimension mismatch");
    const std::size_t n = y_.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &dk1_, &dk2_, &dk3_, &dk4_, &dtmp_})
        v->resize(n);
}

double TangentPropagator::tangent_norm() const {
    double s = 0.0;
    for (const Complex& d : dy_) s += std::norm(d);
    return std::sqrt(s);
}

void TangentPropagator::rk4_step() {
    const std::size_t n = y_.size();
    const double h = h_;

    ws_.rhs(y_.data(), k1_.data());
    ws_.tangent_rhs(y_.data(), dy_.data(), dk1_.data());

    for (std::size_t i = 0; i < n; ++i) {
        tmp_[i] = y_[i] + 0.5 * h * k1_[i];
        dtmp_[i] = dy_[i] + 0.5 * h * dk1_[i];
    }
    ws_.rhs(tmp_.data(), k2_.data());
    ws_.tangent_rhs(tmp_.data(), dtmp_.data(), dk2_.data());

    for (std::size_t i = 0; i < n; ++i) {
        tmp_[i] = y_[i] + 0.5 * h * k2_[i];
        dtmp_[i] = dy_[i] + 0.5 * h * dk2_[i];
    }
    ws_.rhs(tmp_.data(), k3_.data());
    ws_.tangent_rhs(tmp_.data(), dtmp_.data(), dk3_.data());

    for (std::size_t i = 0; i < n; ++i) {
        tmp_[i] = y_[i] + h * k3_[i];
        dtmp_[i] = dy_[i] + h * dk3_[i];
    }
    ws_.rhs(tmp_.data(), k4_.data());
    ws_.tangent_rhs(tmp_.data(), dtmp_.data(), dk4_.data());

    const double w = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        y_[i] += w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
        dy_[i] += w * (dk1_[i] + 2.0 * (dk2_[i] + dk3_[i]) + dk4_[i]);
    }
    ++step_index_;
}

void TangentPropagator::advance_steps(long n) {
    for (long s = 0; s < n; ++s) {
        rk4_step();
        if (!occupations_ok(y_)) throw BlowUpError(time(), "|a|^2 not finite or > 1e6");
        const double tn = tangent_norm();
        if (!(tn > 1e-140 && tn < 1e140)) throw TangentRangeError(time());
    }
}

double TangentPropagator::renormalize() {
    const double norm = tangent_norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw TangentRangeError(time());
    const double inv = 1.0 / norm;
    for (Complex& d : dy_) d *= inv;
    return std::log(norm);
}

TangentRun propagate_with_tangent(const TrajectoryState& initial,
                                  const TangentState& tangent0,
                                  const LatticeConfig& cfg,
                                  const IntegratorConfig& icfg,
                                  double renorm_interval) {
    cfg.validate();
    icfg.validate();
    const long renorm_stride = checked_stride(renorm_interval, icfg.step, "renorm_interval");
    const long n_steps = icfg.total_steps();
    if (n_steps % renorm_stride != 0)
        throw std::invalid_argument(
            "propagate_with_tangent: t_final must be a multiple of renorm_interval");

    double norm0 = 0.0;
    for (const Complex& d : tangent0.da) norm0 += std::norm(d);
    if (!(norm0 > 0.0))
        throw std::invalid_argument("propagate_with_tangent: tangent0 must be nonzero");

    TangentRun run;
    run.renorm_interval = renorm_interval;
    run.record.mode = icfg.record;

    TangentPropagator prop(initial, tangent0, cfg, icfg.step);
    prop.renormalize();  // start from a unit tangent; initial scale is arbitrary
    record_sample(run.record, 0.0, prop.amplitudes());

    const long stride = icfg.sample_stride();
    long since_sample = 0;
    for (long done = 0; done < n_steps; done += renorm_stride) {
        long left = renorm_stride;
        while (left > 0) {
            const long chunk = std::min(left, stride - since_sample);
            prop.advance_steps(chunk);
            left -= chunk;
            since_sample += chunk;
            if (since_sample == stride) {
                record_sample(run.record, prop.time(), prop.amplitudes());
                since_sample = 0;
            }
        }
        run.log_growth.push_back(prop.renormalize());
    }
    if (since_sample != 0) record_sample(run.record, prop.time(), prop.amplitudes());
    return run;
}

}  // namespace bhc
