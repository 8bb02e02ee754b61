#include "bhc/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "bhc/parallel.hpp"

namespace bhc {

namespace {

constexpr long kChunkTraj = 4;  // fixed reduction granularity, part of the output contract

TrajectoryState carrier_bec(int L, double nbar, double sign, RngStream& stream) {
    if (!(nbar > 0.0)) throw std::invalid_argument("BEC sampler: nbar must be > 0");
    TrajectoryState state;
    state.a.resize(L);
    const double scale = 0.5 / std::sqrt(nbar);
    double carrier = 1.0;
    for (int l = 0; l < L; ++l) {
        state.a[l] = carrier + scale * stream.complex_normal();
        carrier *= sign;
    }
    return state;
}

struct ChunkPartial {
    std::vector<double> sum;    // samples * L, trajectory-index order within the chunk
    std::vector<double> sumsq;
    std::vector<std::pair<long, std::vector<Complex>>> probes;
    std::vector<TrajectoryFailure> failures;
    long used = 0;
};

}  // namespace

TrajectoryState sample_zone_edge_bec(int L, double nbar, RngStream& stream) {
    return carrier_bec(L, nbar, -1.0, stream);
}

TrajectoryState sample_ground_state_bec(int L, double nbar, RngStream& stream) {
    return carrier_bec(L, nbar, 1.0, stream);
}

TrajectoryState sample_uniform_hypersphere(int L, RngStream& stream) {
    if (L < 2) throw std::invalid_argument("hypersphere sampler: L must be >= 2");
    TrajectoryState state;
    state.a.resize(L);
    for (;;) {
        double norm = 0.0;
        for (int l = 0; l < L; ++l) {
            state.a[l] = stream.complex_normal();
            norm += std::norm(state.a[l]);
        }
        if (norm > 0.0) {
            const double scale = std::sqrt(static_cast<double>(L) / norm);
            for (auto& a : state.a) a *= scale;
            return state;
        }
        // all-zero draw has probability zero; redraw
    }
}

TrajectoryState draw_initial_state(const EnsembleConfig& ecfg, int L,
                                   std::uint64_t traj_index) {
    RngStream stream(ecfg.root_seed, traj_index);
    switch (ecfg.sampler) {
        case Sampler::zone_edge_bec: return sample_zone_edge_bec(L, ecfg.nbar, stream);
        case Sampler::ground_state_bec: return sample_ground_state_bec(L, ecfg.nbar, stream);
        case Sampler::uniform_hypersphere: return sample_uniform_hypersphere(L, stream);
    }
    throw std::invalid_argument("unknown sampler");
}

EnsembleResult run_ensemble(const EnsembleConfig& ecfg, const LatticeConfig& cfg,
                            const IntegratorConfig& icfg, int workers,
                            const ProbeConfig& probe) {
    cfg.validate();
    icfg.validate();
    if (ecfg.n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
    if (workers < 1) workers = 1;

    const int L = cfg.L;
    const double h = icfg.step;
    const long n_steps = icfg.total_steps();
    const long stride = icfg.sample_stride();

    // sample step grid (shared by every trajectory)
    std::vector<long> sample_steps{0};
    for (long s = stride; s < n_steps; s += stride) sample_steps.push_back(s);
    sample_steps.push_back(n_steps);
    const std::size_t n_samples = sample_steps.size();

    // probe step grid
    std::vector<long> probe_steps;
    long probe_stride = 0;
    if (probe.enabled()) {
        for (int site : probe.sites)
            if (site < 0 || site >= L)
                throw std::invalid_argument("run_ensemble: probe site out of range");
        const double ratio = probe.every / h;
        probe_stride = std::lround(ratio);
        if (probe_stride < 1 || std::abs(ratio - static_cast<double>(probe_stride)) > 1e-9)
            throw std::invalid_argument(
                "run_ensemble: probe.every must be an integer multiple of step");
        const long max_step = std::min(n_steps, std::lround(probe.t_max / h));
        for (long s = 0; s <= max_step; s += probe_stride) probe_steps.push_back(s);
    }
    const std::size_t n_probe_sites = probe.sites.size();

    EnsembleResult result;
    result.n_traj = ecfg.n_traj;
    result.ensemble = ecfg;
    result.lattice = cfg;
    result.integrator = icfg;
    result.times.resize(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s)
        result.times[s] = h * static_cast<double>(sample_steps[s]);
    if (!probe_steps.empty()) {
        result.probe.sites = probe.sites;
        result.probe.times.resize(probe_steps.size());
        for (std::size_t s = 0; s < probe_steps.size(); ++s)
            result.probe.times[s] = h * static_cast<double>(probe_steps[s]);
        result.probe.amp.resize(ecfg.n_traj);
    }

    const std::size_t flat = n_samples * static_cast<std::size_t>(L);
    std::vector<double> sum(flat, 0.0), sumsq(flat, 0.0);

    auto run_one = [&](long traj, std::vector<double>& occ_flat,
                       std::vector<Complex>& probe_flat) {
        occ_flat.assign(flat, 0.0);
        probe_flat.clear();
        if (!probe_steps.empty()) probe_flat.reserve(probe_steps.size() * n_probe_sites);

        TrajectoryState initial = draw_initial_state(ecfg, L, static_cast<std::uint64_t>(traj));
        Propagator prop(std::move(initial), cfg, h);

        std::size_t si = 0;  // next sample slot
        std::size_t pi = 0;  // next probe slot
        long cur = 0;
        auto emit = [&] {
            if (si < n_samples && sample_steps[si] == cur) {
                const auto& a = prop.amplitudes();
                double* row = occ_flat.data() + si * L;
                for (int l = 0; l < L; ++l) row[l] = std::norm(a[l]);
                ++si;
            }
            if (pi < probe_steps.size() && probe_steps[pi] == cur) {
                const auto& a = prop.amplitudes();
                for (int site : probe.sites) probe_flat.push_back(a[site]);
                ++pi;
            }
        };
        emit();
        while (cur < n_steps) {
            long target = n_steps;
            if (si < n_samples) target = std::min(target, sample_steps[si]);
            if (pi < probe_steps.size()) target = std::min(target, probe_steps[pi]);
            prop.advance_steps(target - cur);
            cur = target;
            emit();
        }
    };

    const long n_chunks = (ecfg.n_traj + kChunkTraj - 1) / kChunkTraj;

    auto compute = [&](long chunk) {
        ChunkPartial part;
        part.sum.assign(flat, 0.0);
        part.sumsq.assign(flat, 0.0);
        std::vector<double> occ_flat;
        std::vector<Complex> probe_flat;
        const long begin = chunk * kChunkTraj;
        const long end = std::min(ecfg.n_traj, begin + kChunkTraj);
        for (long traj = begin; traj < end; ++traj) {
            try {
                run_one(traj, occ_flat, probe_flat);
            } catch (const BlowUpError& e) {
                part.failures.push_back({traj, e.t_fail, e.what()});
                continue;
            }
            for (std::size_t i = 0; i < flat; ++i) {
                part.sum[i] += occ_flat[i];
                part.sumsq[i] += occ_flat[i] * occ_flat[i];
            }
            if (!probe_steps.empty()) part.probes.emplace_back(traj, std::move(probe_flat));
            ++part.used;
        }
        return part;
    };

    long used = 0;
    auto merge = [&](long, ChunkPartial&& part) {
        for (std::size_t i = 0; i < flat; ++i) {
            sum[i] += part.sum[i];
            sumsq[i] += part.sumsq[i];
        }
        for (auto& [traj, series] : part.probes)
            result.probe.amp[traj] = std::move(series);
        for (auto& f : part.failures) result.failures.push_back(std::move(f));
        used += part.used;
    };

    detail::ordered_chunk_run<ChunkPartial>(n_chunks, workers, compute, merge);

    result.n_used = used;
    const long n_failed = ecfg.n_traj - used;
    if (static_cast<double>(n_failed) > 1e-3 * static_cast<double>(ecfg.n_traj)) {
        std::string detail = "run_ensemble: " + std::to_string(n_failed) + " of " +
                             std::to_string(ecfg.n_traj) + " trajectories blew up";
        if (!result.failures.empty())
            detail += " (first: trajectory " + std::to_string(result.failures[0].index) +
                      ", " + result.failures[0].what + ")";
        throw EnsembleError(detail);
    }

    result.n.assign(n_samples, std::vector<double>(L, 0.0));
    result.se.assign(n_samples, std::vector<double>(L, 0.0));
    if (used > 0) {
        const double inv = 1.0 / static_cast<double>(used);
        for (std::size_t s = 0; s < n_samples; ++s) {
            for (int l = 0; l < L; ++l) {
                const std::size_t i = s * L + l;
                const double mean = sum[i] * inv;
                result.n[s][l] = mean;
                if (used > 1) {
                    double var = (sumsq[i] - sum[i] * sum[i] * inv) /
                                 static_cast<double>(used - 1);
                    if (var < 0.0) var = 0.0;  // roundoff
                    result.se[s][l] = std::sqrt(var * inv);
                }
            }
        }
    }
    return result;
}

}  // namespace bhc
