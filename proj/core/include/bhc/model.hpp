// model.hpp — dissipative Bose-Hubbard chain in the classical (mean-field) limit:
// lattice parameters, classical Hamiltonian, equations of motion, and their
// tangent-space linearization.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bhc {

using Complex = std::complex<double>;

enum class Boundary { periodic, open };

// All model parameters. Time is measured in units of 1/J (J = 1 reference);
// amplitudes are normalized so a uniform condensate has |a_l|^2 = 1.
struct LatticeConfig {
    int L = 6;                        // site count, even and >= 2
    double J = 1.0;                   // hopping energy
    double g = 4.0;                   // macroscopic interaction constant (U * nbar)
    double omega = 0.0;               // on-site frequency
    double gamma = 0.0;               // depletion rate at the dissipation site
    int dissipation_site = 3;         // conventionally L/2
    std::vector<double> bond_factors; // per-bond multiplier on J across l <-> l+1;
                                      // empty means all 1. Bond L-1 wraps around and
                                      // is ignored for open boundaries.
    Boundary boundary = Boundary::periodic;
    double nbar = 700.0;              // mean site occupation, sets the 1/sqrt(nbar)
                                      // fluctuation scale of the quantum ensembles

    // throws std::invalid_argument listing the offending field
    void validate() const;

    // bond factors with the all-ones default made explicit
    std::vector<double> resolved_bond_factors() const;
};

LatticeConfig closed_lattice(int L, double J, double g, double omega = 0.0);
LatticeConfig dissipative_lattice(int L, double J, double g, double gamma,
                                  double nbar = 700.0);

// Marks the two bonds that are the `distance`-th bond away from `site` on each
// side with the factor epsilon (distance 1 = the bonds adjacent to the site).
void set_weak_links(LatticeConfig& cfg, int site, int distance, double epsilon);

struct TrajectoryState {
    double t = 0.0;
    std::vector<Complex> a;  // L complex site amplitudes
};

struct TangentState {
    std::vector<Complex> da;  // L complex tangent amplitudes
};

double total_norm(const TrajectoryState& state);  // sum_l |a_l|^2

// H = omega sum |a|^2 - (J/2) sum_l b_l (a*_{l+1} a_l + c.c.) + (g/2) sum |a|^4
double hamiltonian_energy(const TrajectoryState& state, const LatticeConfig& cfg);

// da_l/dt = -i [ (omega - i gamma delta_{l,d}) a_l
//                - (J/2)(b_l a_{l+1} + b_{l-1} a_{l-1}) + g |a_l|^2 a_l ]
std::vector<Complex> eom_rhs(const TrajectoryState& state, const LatticeConfig& cfg);

// Jacobian action of the flow:
// d(da_l)/dt = -i [ (omega - i gamma delta_{l,d}) da_l
//                   - (J/2)(b_l da_{l+1} + b_{l-1} da_{l-1})
//                   + 2 g |a_l|^2 da_l + g a_l^2 da*_l ]
std::vector<Complex> tangent_rhs(const TrajectoryState& state,
                                 const TangentState& tangent,
                                 const LatticeConfig& cfg);

// Precomputed couplings for the integrator hot loop. Open boundaries are
// realized as zero hop strength toward the missing neighbor.
class ModelWorkspace {
public:
    explicit ModelWorkspace(const LatticeConfig& cfg);

    int sites() const { return L_; }
    double gamma() const { return gamma_; }

    void rhs(const Complex* a, Complex* out) const;
    void tangent_rhs(const Complex* a, const Complex* da, Complex* out) const;

private:
    int L_;
    double omega_;
    double g_;
    double gamma_;
    int dissipation_site_;
    std::vector<double> hop_right_;  // J b_l / 2, coupling to site next_[l]
    std::vector<double> hop_left_;   // J b_{l-1} / 2, coupling to site prev_[l]
    std::vector<int> next_;
    std::vector<int> prev_;
};

// Plane-wave solutions a_l(t) = exp[i kappa l + i (J cos(kappa) - g - omega) t]
// with kappa = 2 pi k / L; exact orbits of the closed periodic lattice.
Complex bloch_wave_amplitude(int k, int l, double t, const LatticeConfig& cfg);
TrajectoryState bloch_wave_state(int k, const LatticeConfig& cfg);

}  // namespace bhc
