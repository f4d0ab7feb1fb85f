/*
 * finite.hpp — brute-force ground truth on finite-dimensional contractions
 *
 * unitary_part computes H_u = cap_n ker(I - T*^n T^n) cap ker(I - T^n T*^n)
 * by cumulative kernel intersection (SVD nullspaces, rank tolerance 1e-9,
 * surfaced in the report) and verifies that the restriction is unitary.
 *
 * In finite dimensions the flight space is the orthogonal complement of the
 * unimodular eigenvectors and every flight vector is strongly stable, so the
 * splitting must return a trivial recurrent part there; classify_finite
 * cross-checks this with a long-power decay probe.
 *
 * Scope note: the oracle deliberately covers point-spectrum unitaries, which
 * the measure-backed models exclude — it is the regime where brute force is
 * possible, and it validates the limit-operator machinery itself.
 */
#pragma once

#include <vector>

#include "specdyn/model.hpp"

namespace specdyn {

struct FiniteAnalysis {
    ComplexMatrix matrix;
    ComplexMatrix unitary_basis; // d x r, orthonormal columns
    ComplexMatrix cnu_basis;     // d x (d - r), orthonormal complement
    std::vector<Complex> unitary_eigenvalues;
    double rank_tolerance = 1e-9;
    double unitarity_defect = 0.0; // ||(T B)*(T B) - I||_max on H_u
};

FiniteAnalysis unitary_part(const ComplexMatrix& t);

struct FiniteSplitting {
    FiniteAnalysis analysis;
    bool recurrent_part_trivial = false; // decay probe verdict on the flight part
    double max_late_pairing = 0.0;       // max |<T^n f, e_i>| at the probe power
    long long probe_power = 500;
};

FiniteSplitting classify_finite(const ComplexMatrix& t, long long probe_power = 500);

struct LimitSample {
    ComplexMatrix representative;
    long long first_power = 0; // n of the first visit
    long long visits = 0;
    double radius = 0.0;
};

// Scans U^n for n <= budget and clusters the visited powers; representatives
// approximate the closure of the power orbit. Diagonal unitaries use an exact
// phase-grid clustering, dense ones a max-abs distance scan.
std::vector<LimitSample> sample_limit_operators(const ComplexMatrix& u, long long budget,
                                                double cluster_radius,
                                                std::size_t max_clusters = 4096);

} // namespace specdyn
