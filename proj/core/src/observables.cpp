#include "bhc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bhc/rng.hpp"

namespace bhc {

namespace {

struct WeightedLine {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // weighted RMS residual
};

WeightedLine weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>& w) {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    WeightedLine fit;
    const double det = sw * swxx - swx * swx;
    if (det == 0.0 || sw == 0.0) return fit;
    fit.slope = (sw * swxy - swx * swy) / det;
    fit.intercept = (swy - fit.slope * swx) / sw;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += w[i] * r * r;
    }
    fit.residual = std::sqrt(ss / sw);
    return fit;
}

std::vector<int> count_series(const std::vector<std::vector<double>>& n, double threshold) {
    std::vector<int> counts(n.size(), 0);
    for (std::size_t s = 0; s < n.size(); ++s)
        for (double occ : n[s])
            if (occ < threshold) ++counts[s];
    return counts;
}

struct PowerLaw {
    bool ok = false;
    double exponent = 0.0;
    double prefactor = 0.0;
    std::pair<double, double> window{0.0, 0.0};
};

PowerLaw fit_front_power_law(const std::vector<double>& times, const std::vector<int>& counts,
                             int min_count, int max_count) {
    PowerLaw out;
    // window: first time the count reaches min_count, last time it is <= max_count
    std::size_t lo = counts.size(), hi = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] >= min_count) {
            lo = s;
            break;
        }
    }
    if (lo == counts.size()) return out;
    hi = lo;
    for (std::size_t s = lo; s < counts.size(); ++s)
        if (counts[s] <= max_count) hi = s;

    std::vector<double> lx, ly, lw;
    for (std::size_t s = lo; s <= hi; ++s) {
        if (times[s] <= 0.0 || counts[s] < 1 || counts[s] > max_count) continue;
        lx.push_back(std::log(times[s]));
        ly.push_back(std::log(static_cast<double>(counts[s])));
        lw.push_back(1.0);
    }
    if (lx.size() < 5) return out;
    const WeightedLine line = weighted_line_fit(lx, ly, lw);
    out.ok = true;
    out.exponent = line.slope;
    out.prefactor = std::exp(line.intercept);
    out.window = {times[lo], times[hi]};
    return out;
}

}  // namespace

std::vector<double> depleted_total(const EnsembleResult& result, double nbar) {
    if (!(nbar > 0.0)) throw std::invalid_argument("depleted_total: nbar must be > 0");
    std::vector<double> N(result.times.size(), 0.0);
    for (std::size_t s = 0; s < result.n.size(); ++s) {
        double missing = 0.0;
        for (double occ : result.n[s]) missing += 1.0 - occ;
        N[s] = nbar * missing;
    }
    return N;
}

std::vector<Complex> xi_series(const TrajectoryRecord& record, int l) {
    if (record.mode != RecordMode::amplitudes || record.amplitudes.empty())
        throw std::invalid_argument(
            "xi_series: record stores occupations only; rerun with full amplitude storage");
    const int L = static_cast<int>(record.amplitudes.front().size());
    if (l < 0 || l >= L) throw std::invalid_argument("xi_series: site out of range");
    const int right = (l + 1) % L;
    const int left = (l - 1 + L) % L;
    std::vector<Complex> xi(record.amplitudes.size());
    for (std::size_t s = 0; s < record.amplitudes.size(); ++s)
        xi[s] = record.amplitudes[s][right] + record.amplitudes[s][left];
    return xi;
}

std::vector<std::vector<Complex>> xi_from_probe(const ProbeData& probe, int l, int L) {
    const int right = (l + 1) % L;
    const int left = (l - 1 + L) % L;
    auto slot_of = [&](int site) {
        for (std::size_t i = 0; i < probe.sites.size(); ++i)
            if (probe.sites[i] == site) return static_cast<long>(i);
        throw std::invalid_argument("xi_from_probe: probe lacks site " + std::to_string(site));
    };
    const long rs = slot_of(right), ls = slot_of(left);
    const long width = static_cast<long>(probe.sites.size());

    std::vector<std::vector<Complex>> out;
    out.reserve(probe.amp.size());
    for (const auto& series : probe.amp) {
        if (series.empty()) continue;  // failed trajectory
        const long n = static_cast<long>(series.size()) / width;
        std::vector<Complex> xi(n);
        for (long s = 0; s < n; ++s) xi[s] = series[s * width + rs] + series[s * width + ls];
        out.push_back(std::move(xi));
    }
    return out;
}

CorrelationEstimate autocorrelation(const std::vector<std::vector<Complex>>& series,
                                    double dt, double max_lag) {
    if (series.empty()) throw std::invalid_argument("autocorrelation: no series");
    if (!(dt > 0.0) || !(max_lag >= 0.0))
        throw std::invalid_argument("autocorrelation: need dt > 0 and max_lag >= 0");

    const long n_lags = std::max(1L, std::lround(max_lag / dt) + 1);
    CorrelationEstimate est;
    est.lags.resize(n_lags);
    est.C.assign(n_lags, Complex{0.0, 0.0});
    std::vector<double> pairs(n_lags, 0.0);
    for (long m = 0; m < n_lags; ++m) est.lags[m] = dt * static_cast<double>(m);

    for (const auto& s : series) {
        const long n = static_cast<long>(s.size());
        for (long m = 0; m < n_lags && m < n; ++m) {
            Complex acc{0.0, 0.0};
            for (long k = 0; k + m < n; ++k) acc += s[k + m] * std::conj(s[k]);
            est.C[m] += acc;
            pairs[m] += static_cast<double>(n - m);
        }
    }
    for (long m = 0; m < n_lags; ++m)
        if (pairs[m] > 0.0) est.C[m] /= pairs[m];

    // length warning relative to the shortest series
    std::size_t shortest = series.front().size();
    for (const auto& s : series) shortest = std::min(shortest, s.size());
    if (static_cast<double>(shortest) * dt < 10.0 * max_lag / 2.0)
        est.warnings.push_back("analysis window shorter than ~10 correlation-time guesses");
    return est;
}

ExponentialFit fit_exponential(CorrelationEstimate& corr) {
    ExponentialFit fit;
    if (corr.C.empty() || !(std::abs(corr.C[0]) > 0.0)) {
        fit.message = "C(0) must be positive";
        return fit;
    }
    const double c0 = std::abs(corr.C[0]);

    // noise floor from the final quarter of the lag range
    const std::size_t n = corr.C.size();
    double floor_est = 0.0;
    if (n >= 8) {
        const std::size_t q = n - n / 4;
        for (std::size_t m = q; m < n; ++m) floor_est += std::abs(corr.C[m]);
        floor_est /= static_cast<double>(n - q);
    }
    const double cut = std::max(3.0 * floor_est, 0.05 * c0);

    std::vector<double> x, y, w;
    for (std::size_t m = 0; m < n; ++m) {
        const double mag = std::abs(corr.C[m]);
        if (mag > cut || m == 0) {
            x.push_back(corr.lags[m]);
            y.push_back(std::log(mag));
            w.push_back(mag * mag);  // var(ln|C|) ~ 1/|C|^2
        } else {
            break;  // keep a contiguous leading window
        }
    }
    if (x.size() < 5) {
        fit.message = "fewer than 5 usable lags above the noise cut";
        return fit;
    }
    const WeightedLine line = weighted_line_fit(x, y, w);
    if (!(line.slope < 0.0)) {
        fit.message = "correlation does not decay over the usable lags";
        return fit;
    }
    fit.ok = true;
    fit.A = std::exp(line.intercept);
    fit.tau = -1.0 / line.slope;
    fit.residual = line.residual;
    fit.lags_used = static_cast<int>(x.size());
    corr.A_fit = fit.A;
    corr.tau_fit = fit.tau;
    corr.residual = fit.residual;
    corr.fit_window = {x.front(), x.back()};
    return fit;
}

FrontFit depletion_front(const EnsembleResult& result, double threshold,
                         std::uint64_t boot_seed, int n_boot, int min_count) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("depletion_front: threshold must be in (0, 1)");
    FrontFit fit;
    fit.threshold = threshold;
    fit.times = result.times;
    fit.counts = count_series(result.n, threshold);

    const int L = result.n.empty() ? 0 : static_cast<int>(result.n.front().size());
    const int max_count = std::max(min_count, L - 4);

    int peak = 0;
    for (int c : fit.counts) peak = std::max(peak, c);
    if (peak <= min_count) {
        fit.message = "scaling window absent: depleted count never exceeds " +
                      std::to_string(min_count);
        return fit;
    }

    const PowerLaw base = fit_front_power_law(fit.times, fit.counts, min_count, max_count);
    if (!base.ok) {
        fit.message = "scaling window too short for a power-law fit";
        return fit;
    }
    fit.ok = true;
    fit.exponent = base.exponent;
    fit.prefactor = base.prefactor;
    fit.fit_window = base.window;

    // parametric bootstrap: jitter the mean occupations within their standard
    // errors, recount, refit
    if (n_boot > 1) {
        RngStream stream(boot_seed, 0);
        std::vector<double> exps;
        exps.reserve(n_boot);
        std::vector<std::vector<double>> jittered = result.n;
        for (int b = 0; b < n_boot; ++b) {
            for (std::size_t s = 0; s < result.n.size(); ++s)
                for (std::size_t l = 0; l < result.n[s].size(); ++l)
                    jittered[s][l] = result.n[s][l] + result.se[s][l] * stream.normal();
            const auto counts = count_series(jittered, threshold);
            const PowerLaw pl = fit_front_power_law(fit.times, counts, min_count, max_count);
            if (pl.ok) exps.push_back(pl.exponent);
        }
        if (exps.size() >= 2) {
            double mean = 0.0;
            for (double e : exps) mean += e;
            mean /= static_cast<double>(exps.size());
            double var = 0.0;
            for (double e : exps) var += (e - mean) * (e - mean);
            fit.exponent_err = std::sqrt(var / static_cast<double>(exps.size() - 1));
        }
    }
    return fit;
}

LinearTailFit steady_current_check(const EnsembleResult& result, double nbar) {
    const std::vector<double> N = depleted_total(result, nbar);
    LinearTailFit fit;
    if (N.size() < 6) return fit;
    const std::size_t start = (2 * N.size()) / 3;

    std::vector<double> x(result.times.begin() + start, result.times.end());
    std::vector<double> y(N.begin() + start, N.end());
    std::vector<double> w(x.size(), 1.0);
    const WeightedLine line = weighted_line_fit(x, y, w);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.window = {x.front(), x.back()};

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_tot += (y[i] - mean) * (y[i] - mean);
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 0.0;
    fit.steady = fit.r2 >= 0.95;
    return fit;
}

std::size_t stationary_window_end(const EnsembleResult& result,
                                  const std::vector<int>& sites, double rel_drop) {
    if (result.n.empty()) return 0;
    std::size_t end = result.n.size();
    for (int site : sites) {
        if (site < 0 || site >= static_cast<int>(result.n.front().size()))
            throw std::invalid_argument("stationary_window_end: site out of range");
        const double initial = result.n.front()[site];
        for (std::size_t s = 0; s < end; ++s) {
            if (std::abs(result.n[s][site] - initial) > rel_drop * std::abs(initial)) {
                end = s;
                break;
            }
        }
    }
    return end;
}

}  // namespace bhc
