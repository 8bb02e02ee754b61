#include "bhc/stochastic.hpp"

#include <cmath>
#include <stdexcept>

#include "bhc/integrator.hpp"

namespace bhc {

void OUProcessConfig::validate() const {
    if (!(A > 0.0)) throw std::invalid_argument("OUProcessConfig: A must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("OUProcessConfig: tau must be > 0");
    if (!(step > 0.0)) throw std::invalid_argument("OUProcessConfig: step must be > 0");
}

OUProcess::OUProcess(const OUProcessConfig& cfg, RngStream& stream) : stream_(&stream) {
    cfg.validate();
    decay_ = std::exp(-cfg.step / cfg.tau);
    kick_ = std::sqrt(0.5 * cfg.A * (1.0 - decay_ * decay_));
    // stationary start: isotropic Gaussian with <|xi|^2> = A
    xi_ = std::sqrt(0.5 * cfg.A) * stream.complex_normal();
}

Complex OUProcess::advance() {
    xi_ = decay_ * xi_ + kick_ * stream_->complex_normal();
    return xi_;
}

std::vector<Complex> ou_path(const OUProcessConfig& cfg, long n_steps, RngStream& stream) {
    if (n_steps < 1) throw std::invalid_argument("ou_path: n_steps must be >= 1");
    OUProcess ou(cfg, stream);
    std::vector<Complex> path(n_steps);
    path[0] = ou.value();
    for (long i = 1; i < n_steps; ++i) path[i] = ou.advance();
    return path;
}

SingleSiteConfig SingleSiteConfig::weak_link(double epsilon, double J, double gamma,
                                             double g, double omega) {
    SingleSiteConfig cfg;
    cfg.omega = omega;
    cfg.gamma = gamma;
    cfg.g = g;
    cfg.drive_strength = 0.5 * epsilon * J;
    return cfg;
}

namespace {

inline Complex site_rhs(Complex a, const SingleSiteConfig& c, Complex xi) {
    constexpr Complex I{0.0, 1.0};
    return -I * ((c.omega + c.g * std::norm(a)) * a - c.drive_strength * xi) - c.gamma * a;
}

}  // namespace

SingleSitePath propagate_single_site(Complex a0, const SingleSiteConfig& scfg,
                                     const OUProcessConfig& ocfg, double t_final,
                                     RngStream& stream, long sample_stride) {
    ocfg.validate();
    if (!(t_final > 0.0)) throw std::invalid_argument("propagate_single_site: t_final must be > 0");
    if (sample_stride < 1) sample_stride = 1;

    const double h = ocfg.step;
    const long n_steps = std::max(1L, std::lround(t_final / h));

    OUProcess ou(ocfg, stream);
    SingleSitePath path;
    path.times.reserve(n_steps / sample_stride + 2);
    path.a.reserve(n_steps / sample_stride + 2);
    path.times.push_back(0.0);
    path.a.push_back(a0);

    Complex a = a0;
    for (long s = 0; s < n_steps; ++s) {
        const Complex xi = ou.value();  // frozen across the step
        const Complex k1 = site_rhs(a, scfg, xi);
        const Complex k2 = site_rhs(a + 0.5 * h * k1, scfg, xi);
        const Complex k3 = site_rhs(a + 0.5 * h * k2, scfg, xi);
        const Complex k4 = site_rhs(a + h * k3, scfg, xi);
        a += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
        ou.advance();
        const double n = std::norm(a);
        if (!(n <= kBlowUpThreshold))
            throw BlowUpError(h * static_cast<double>(s + 1), "|a|^2 not finite or > 1e6");
        if ((s + 1) % sample_stride == 0 || s + 1 == n_steps) {
            path.times.push_back(h * static_cast<double>(s + 1));
            path.a.push_back(a);
        }
    }
    return path;
}

double stationary_occupation(double epsilon, double J, double tau, double gamma) {
    if (!(epsilon > 0.0) || !(J > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("stationary_occupation: parameters must be > 0");
    if (!(gamma > 0.0))
        throw std::invalid_argument("stationary_occupation: undefined for gamma = 0");
    return epsilon * epsilon * J * J * tau / (2.0 * gamma);
}

double quasi_stationary_occupation(double n_neighbor, double J, double tau, double gamma) {
    if (n_neighbor < 0.0)
        throw std::invalid_argument("quasi_stationary_occupation: n_neighbor must be >= 0");
    if (!(gamma > 0.0))
        throw std::invalid_argument("quasi_stationary_occupation: undefined for gamma = 0");
    return J * J * n_neighbor * tau / (2.0 * gamma);
}

double diffusion_coefficient(double epsilon, double J, double tau) {
    return epsilon * epsilon * J * J * tau;
}

DistributionTestReport stationary_distribution_test(const std::vector<Complex>& path,
                                                    double sigma2_expected,
                                                    long stride, double tolerance) {
    DistributionTestReport report;
    if (stride < 1) stride = 1;

    double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
    double sum_n = 0.0, sum_n2 = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < path.size(); i += stride) {
        const double re = path[i].real(), im = path[i].imag();
        sum_re += re;
        sum_im += im;
        sum_re2 += re * re;
        sum_im2 += im * im;
        const double n = re * re + im * im;
        sum_n += n;
        sum_n2 += n * n;
        ++count;
    }
    report.n_samples = count;
    if (count < 10000) {
        report.notes.push_back("insufficient samples: " + std::to_string(count) +
                               " < 10000 after thinning");
        return report;
    }
    const double inv = 1.0 / static_cast<double>(count);
    const double mean_re = sum_re * inv, mean_im = sum_im * inv;
    report.mean_abs = std::hypot(mean_re, mean_im);
    report.var_re = sum_re2 * inv - mean_re * mean_re;
    report.var_im = sum_im2 * inv - mean_im * mean_im;
    report.occupation_mean = sum_n * inv;
    const double n_mean = sum_n * inv;
    report.occupation_ratio = (n_mean > 0.0) ? (sum_n2 * inv) / (n_mean * n_mean) : 0.0;

    bool ok = true;
    const double sigma = std::sqrt(sigma2_expected);
    if (report.mean_abs > 5.0 * sigma / std::sqrt(static_cast<double>(count)) +
                              0.05 * sigma) {
        ok = false;
        report.notes.push_back("mean amplitude does not vanish");
    }
    if (std::abs(report.var_re / sigma2_expected - 1.0) > tolerance) {
        ok = false;
        report.notes.push_back("Re-quadrature variance off expected sigma^2");
    }
    if (std::abs(report.var_im / sigma2_expected - 1.0) > tolerance) {
        ok = false;
        report.notes.push_back("Im-quadrature variance off expected sigma^2");
    }
    if (report.var_im > 0.0 && report.var_re > 0.0) {
        const double iso = report.var_re / report.var_im;
        if (std::abs(iso - 1.0) > tolerance) {
            ok = false;
            report.notes.push_back("quadrature variances are anisotropic");
        }
    } else {
        ok = false;
        report.notes.push_back("degenerate quadrature variance");
    }
    // exponential occupation law: second moment ratio = 2
    if (std::abs(report.occupation_ratio - 2.0) > 3.0 * tolerance) {
        ok = false;
        report.notes.push_back("occupation distribution is not exponential");
    }
    report.pass = ok;
    return report;
}

}  // namespace bhc
