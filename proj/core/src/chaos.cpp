#include "bhc/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bhc/parallel.hpp"

namespace bhc {

namespace {

TangentState random_unit_tangent(int L, RngStream& stream) {
    TangentState tangent;
    tangent.da.resize(L);
    double norm = 0.0;
    for (int l = 0; l < L; ++l) {
        tangent.da[l] = stream.complex_normal();
        norm += std::norm(tangent.da[l]);
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& d : tangent.da) d *= scale;
    return tangent;
}

}  // namespace

LyapunovResult lyapunov_exponent(const TrajectoryState& initial, const LatticeConfig& cfg,
                                 double T, double renorm_interval, RngStream& stream,
                                 double step) {
    if (cfg.gamma != 0.0)
        throw std::invalid_argument("lyapunov_exponent: closed-system diagnostic, gamma must be 0");
    if (!(T > renorm_interval))
        throw std::invalid_argument("lyapunov_exponent: need T >> renorm_interval");

    const TangentState tangent0 = random_unit_tangent(cfg.L, stream);

    LyapunovResult result;
    for (int attempt = 0;; ++attempt) {
        // snap the bookkeeping grid to the step grid
        const long rstride = std::max(1L, std::lround(renorm_interval / step));
        const double r = step * static_cast<double>(rstride);
        const long n_intervals = std::max(1L, static_cast<long>(std::floor(T / r)));
        const double t_total = r * static_cast<double>(n_intervals);

        IntegratorConfig icfg;
        icfg.step = step;
        icfg.t_final = t_total;
        icfg.sample_every = t_total;  // occupations are not the point here
        try {
            TangentRun run = propagate_with_tangent(initial, tangent0, cfg, icfg, r);
            result.renorm_interval = r;
            result.T = t_total;
            result.history.resize(run.log_growth.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < run.log_growth.size(); ++i) {
                acc += run.log_growth[i];
                result.history[i] = acc / (r * static_cast<double>(i + 1));
            }
            result.lambda = result.history.empty() ? 0.0 : result.history.back();
            break;
        } catch (const TangentRangeError&) {
            if (attempt >= 6 || rstride == 1) throw;
            renorm_interval = 0.5 * r;  // growth too fast for this bookkeeping interval
            ++result.shrink_retries;
        }
    }

    // convergence: spread of the running estimate over its last quartile
    const std::size_t n = result.history.size();
    if (n >= 8) {
        const std::size_t q = n - n / 4;
        double lo = result.history[q], hi = result.history[q];
        for (std::size_t i = q; i < n; ++i) {
            lo = std::min(lo, result.history[i]);
            hi = std::max(hi, result.history[i]);
        }
        result.spread = hi - lo;
        const double lam = std::abs(result.lambda);
        result.converged = (result.spread <= 0.2 * lam) ||
                           (lam < ChaosDefaults::lambda_regular);
    } else {
        result.converged = false;
    }
    return result;
}

std::vector<ScanPoint> lyapunov_scan(long n_samples, const LatticeConfig& cfg, double T,
                                     std::uint64_t root_seed, int workers,
                                     double renorm_interval, double step) {
    if (n_samples < 1) throw std::invalid_argument("lyapunov_scan: n_samples must be >= 1");
    cfg.validate();

    std::vector<ScanPoint> points(n_samples);
    constexpr long kChunk = 2;
    const long n_chunks = (n_samples + kChunk - 1) / kChunk;

    auto compute = [&](long chunk) {
        std::vector<ScanPoint> part;
        const long begin = chunk * kChunk;
        const long end = std::min(n_samples, begin + kChunk);
        for (long i = begin; i < end; ++i) {
            RngStream state_stream(root_seed, 2 * static_cast<std::uint64_t>(i));
            RngStream tangent_stream(root_seed, 2 * static_cast<std::uint64_t>(i) + 1);
            const TrajectoryState initial = sample_uniform_hypersphere(cfg.L, state_stream);
            ScanPoint p;
            p.energy = hamiltonian_energy(initial, cfg);
            LyapunovResult lr =
                lyapunov_exponent(initial, cfg, T, renorm_interval, tangent_stream, step);
            p.lambda = lr.lambda;
            p.converged = lr.converged;
            part.push_back(p);
        }
        return part;
    };
    auto merge = [&](long chunk, std::vector<ScanPoint>&& part) {
        const long begin = chunk * kChunk;
        for (std::size_t j = 0; j < part.size(); ++j)
            points[begin + static_cast<long>(j)] = part[j];
    };
    detail::ordered_chunk_run<std::vector<ScanPoint>>(n_chunks, workers, compute, merge);
    return points;
}

ShellHistogram energy_shell_histogram(long n_samples, int bins, const LatticeConfig& cfg,
                                      std::uint64_t root_seed) {
    if (n_samples < 1 || bins < 1)
        throw std::invalid_argument("energy_shell_histogram: need n_samples >= 1, bins >= 1");
    cfg.validate();

    std::vector<double> energies(n_samples);
    for (long i = 0; i < n_samples; ++i) {
        RngStream stream(root_seed, static_cast<std::uint64_t>(i));
        energies[i] = hamiltonian_energy(sample_uniform_hypersphere(cfg.L, stream), cfg);
    }
    const auto [lo_it, hi_it] = std::minmax_element(energies.begin(), energies.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) hi = lo + 1.0;  // degenerate spread

    ShellHistogram hist;
    hist.n_samples = n_samples;
    hist.edges.resize(bins + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) hist.edges[b] = lo + width * b;
    hist.mass.assign(bins, 0.0);
    const double unit = 1.0 / static_cast<double>(n_samples);
    for (double e : energies) {
        int b = static_cast<int>((e - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        hist.mass[b] += unit;
    }
    return hist;
}

std::vector<BlochWave> bloch_wave_catalog(const LatticeConfig& cfg) {
    if (cfg.boundary != Boundary::periodic)
        throw std::invalid_argument("bloch_wave_catalog: requires periodic boundary");
    std::vector<BlochWave> waves(cfg.L);
    for (int k = 0; k < cfg.L; ++k) {
        double kappa = 2.0 * std::numbers::pi * k / cfg.L;
        if (kappa > std::numbers::pi)
            kappa -= 2.0 * std::numbers::pi;  // fold to (-pi, pi]
        BlochWave w;
        w.k = k;
        w.kappa = kappa;
        w.energy = cfg.L * (cfg.omega - cfg.J * std::cos(kappa) + 0.5 * cfg.g);
        w.stable = std::abs(kappa) < 0.5 * std::numbers::pi;
        waves[k] = w;
    }
    return waves;
}

double verify_bloch_wave(int k, const LatticeConfig& cfg, double t_final, double step) {
    if (cfg.boundary != Boundary::periodic)
        throw std::invalid_argument("verify_bloch_wave: requires periodic boundary");
    if (cfg.gamma != 0.0)
        throw std::invalid_argument("verify_bloch_wave: closed system only");
    for (double b : cfg.resolved_bond_factors())
        if (b != 1.0)
            throw std::invalid_argument("verify_bloch_wave: requires uniform bonds");

    IntegratorConfig icfg;
    icfg.step = step;
    icfg.t_final = t_final;
    icfg.sample_every = std::max(step, t_final / 100.0);
    icfg.record = RecordMode::amplitudes;

    const TrajectoryRecord rec = propagate(bloch_wave_state(k, cfg), cfg, icfg);
    double max_dev = 0.0;
    for (std::size_t s = 0; s < rec.times.size(); ++s) {
        for (int l = 0; l < cfg.L; ++l) {
            const Complex exact = bloch_wave_amplitude(k, l, rec.times[s], cfg);
            max_dev = std::max(max_dev, std::abs(rec.amplitudes[s][l] - exact));
        }
    }
    return max_dev;
}

}  // namespace bhc
