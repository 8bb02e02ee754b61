#include "bhc/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bhc {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("LatticeConfig: " + what);
}

void check_state_dims(std::size_t n, const LatticeConfig& cfg, const char* where) {
    if (n != static_cast<std::size_t>(cfg.L)) {
        throw std::invalid_argument(std::string(where) + ": state has " +
                                    std::to_string(n) + " amplitudes, config has L = " +
                                    std::to_string(cfg.L));
    }
}

}  // namespace

void LatticeConfig::validate() const {
    require(L >= 2, "L must be >= 2");
    require(L % 2 == 0, "L must be even");
    require(J >= 0.0 && std::isfinite(J), "J must be finite and >= 0");
    require(std::isfinite(g) && std::isfinite(omega), "g and omega must be finite");
    require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be >= 0");
    require(dissipation_site >= 0 && dissipation_site < L,
            "dissipation_site out of range [0, L)");
    require(nbar > 0.0, "nbar must be > 0");
    if (!bond_factors.empty()) {
        require(bond_factors.size() == static_cast<std::size_t>(L),
                "bond_factors must have length L");
        for (double b : bond_factors)
            require(b > 0.0 && b <= 1.0, "bond factors must lie in (0, 1]");
    }
}

std::vector<double> LatticeConfig::resolved_bond_factors() const {
    if (bond_factors.empty()) return std::vector<double>(L, 1.0);
    return bond_factors;
}

LatticeConfig closed_lattice(int L, double J, double g, double omega) {
    LatticeConfig cfg;
    cfg.L = L;
    cfg.J = J;
    cfg.g = g;
    cfg.omega = omega;
    cfg.gamma = 0.0;
    cfg.dissipation_site = L / 2;
    cfg.validate();
    return cfg;
}

LatticeConfig dissipative_lattice(int L, double J, double g, double gamma, double nbar) {
    LatticeConfig cfg;
    cfg.L = L;
    cfg.J = J;
    cfg.g = g;
    cfg.gamma = gamma;
    cfg.dissipation_site = L / 2;
    cfg.nbar = nbar;
    cfg.validate();
    return cfg;
}

void set_weak_links(LatticeConfig& cfg, int site, int distance, double epsilon) {
    if (distance < 1 || distance > cfg.L / 2)
        throw std::invalid_argument("set_weak_links: distance must be in [1, L/2]");
    if (epsilon <= 0.0 || epsilon > 1.0)
        throw std::invalid_argument("set_weak_links: epsilon must be in (0, 1]");
    if (cfg.bond_factors.empty()) cfg.bond_factors.assign(cfg.L, 1.0);
    const int L = cfg.L;
    const int right = ((site + distance - 1) % L + L) % L;  // bond (site+k-1, site+k)
    const int left = ((site - distance) % L + L) % L;       // bond (site-k, site-k+1)
    cfg.bond_factors[right] = epsilon;
    cfg.bond_factors[left] = epsilon;
}

double total_norm(const TrajectoryState& state) {
    double n = 0.0;
    for (const Complex& a : state.a) n += std::norm(a);
    return n;
}

double hamiltonian_energy(const TrajectoryState& state, const LatticeConfig& cfg) {
    check_state_dims(state.a.size(), cfg, "hamiltonian_energy");
    const auto bonds = cfg.resolved_bond_factors();
    const int L = cfg.L;
    double onsite = 0.0;
    for (const Complex& a : state.a) {
        const double n = std::norm(a);
        onsite += cfg.omega * n + 0.5 * cfg.g * n * n;
    }
    double hop = 0.0;
    const int last_bond = (cfg.boundary == Boundary::periodic) ? L : L - 1;
    for (int l = 0; l < last_bond; ++l) {
        const int r = (l + 1) % L;
        hop += bonds[l] * (std::conj(state.a[r]) * state.a[l]).real();
    }
    return onsite - cfg.J * hop;
}

ModelWorkspace::ModelWorkspace(const LatticeConfig& cfg)
    : L_(cfg.L),
      omega_(cfg.omega),
      g_(cfg.g),
      gamma_(cfg.gamma),
      dissipation_site_(cfg.dissipation_site),
      hop_right_(cfg.L),
      hop_left_(cfg.L),
      next_(cfg.L),
      prev_(cfg.L) {
    cfg.validate();
    const auto bonds = cfg.resolved_bond_factors();
    const bool periodic = cfg.boundary == Boundary::periodic;
    for (int l = 0; l < L_; ++l) {
        next_[l] = (l + 1) % L_;
        prev_[l] = (l - 1 + L_) % L_;
        hop_right_[l] = 0.5 * cfg.J * bonds[l];
        hop_left_[l] = 0.5 * cfg.J * bonds[prev_[l]];
    }
    if (!periodic) {
        hop_right_[L_ - 1] = 0.0;  // no wrap-around bond
        hop_left_[0] = 0.0;
        next_[L_ - 1] = L_ - 1;
        prev_[0] = 0;
    }
}

void ModelWorkspace::rhs(const Complex* a, Complex* out) const {
    constexpr Complex I{0.0, 1.0};
    for (int l = 0; l < L_; ++l) {
        const Complex al = a[l];
        Complex h = (omega_ + g_ * std::norm(al)) * al;
        h -= hop_right_[l] * a[next_[l]] + hop_left_[l] * a[prev_[l]];
        out[l] = -I * h;
    }
    if (gamma_ != 0.0) out[dissipation_site_] -= gamma_ * a[dissipation_site_];
}

void ModelWorkspace::tangent_rhs(const Complex* a, const Complex* da, Complex* out) const {
    constexpr Complex I{0.0, 1.0};
    for (int l = 0; l < L_; ++l) {
        const Complex al = a[l];
        const Complex dal = da[l];
        Complex h = omega_ * dal;
        h += g_ * (2.0 * std::norm(al) * dal + al * al * std::conj(dal));
        h -= hop_right_[l] * da[next_[l]] + hop_left_[l] * da[prev_[l]];
        out[l] = -I * h;
    }
    if (gamma_ != 0.0) out[dissipation_site_] -= gamma_ * da[dissipation_site_];
}

std::vector<Complex> eom_rhs(const TrajectoryState& state, const LatticeConfig& cfg) {
    check_state_dims(state.a.size(), cfg, "eom_rhs");
    ModelWorkspace ws(cfg);
    std::vector<Complex> out(cfg.L);
    ws.rhs(state.a.data(), out.data());
    return out;
}

std::vector<Complex> tangent_rhs(const TrajectoryState& state, const TangentState& tangent,
                                 const LatticeConfig& cfg) {
    check_state_dims(state.a.size(), cfg, "tangent_rhs");
    check_state_dims(tangent.da.size(), cfg, "tangent_rhs (tangent)");
    ModelWorkspace ws(cfg);
    std::vector<Complex> out(cfg.L);
    ws.tangent_rhs(state.a.data(), tangent.da.data(), out.data());
    return out;
}

Complex bloch_wave_amplitude(int k, int l, double t, const LatticeConfig& cfg) {
    const double kappa = 2.0 * std::numbers::pi * k / cfg.L;
    const double phase = kappa * l + cfg.J * std::cos(kappa) * t - cfg.g * t - cfg.omega * t;
    return std::polar(1.0, phase);
}

TrajectoryState bloch_wave_state(int k, const LatticeConfig& cfg) {
    TrajectoryState state;
    state.t = 0.0;
    state.a.resize(cfg.L);
    for (int l = 0; l < cfg.L; ++l) state.a[l] = bloch_wave_amplitude(k, l, 0.0, cfg);
    return state;
}

}  // namespace bhc
