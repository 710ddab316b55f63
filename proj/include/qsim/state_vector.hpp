#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qsim/dense.hpp"
#include "qsim/gates.hpp"
#include "qsim/qudit_spec.hpp"

namespace qsim {

struct FieldMoments {
    double mean = 0.0;    // <phi>
    double second = 0.0;  // <phi^2>
};

// Dense state vector over L identical qudits. Site 0 is the fastest-varying
// tensor index: basis index  i = sum_j level_j * total_dim^j,  so the state
// equals (1 ⊗ ... ⊗ U_j ⊗ ... ⊗ 1)|psi> when U acts at site j counting from
// the right of the Kronecker product.
class StateVector {
public:
    StateVector(const QuditSpec& spec, int sites, cvector amplitudes);

    // |0...0>: amplitude 1 on basis index 0.
    static StateVector vacuum(const QuditSpec& spec, int sites);
    // Tensor product of one single-site amplitude vector on every site.
    static StateVector product(const QuditSpec& spec, int sites, const cvector& site_amps);

    int sites() const { return sites_; }
    const QuditSpec& spec() const { return spec_; }
    std::size_t dim() const { return amps_.size(); }
    const cvector& amplitudes() const { return amps_; }
    cvector& amplitudes() { return amps_; }

    double norm() const;
    void normalize();

    std::size_t basis_index(const std::vector<int>& levels) const;
    int level_at(std::size_t index, int site) const;

    // Single-site gate application. Diagonal gates are applied elementwise;
    // dense gates by a strided block kernel with an n-sized scratch.
    void apply_single_site(const DiagonalGate& g, int site);
    void apply_single_site(const DenseGate& g, int site);

    // Two-site diagonal: amplitude with local occupations (n_j, n_k) picks up
    // phase_fn(n_j, n_k). The phase table is built once (total_dim^2 calls).
    void apply_two_site_diagonal(const std::function<cx(int, int)>& phase_fn, int site_j, int site_k);

    std::vector<double> marginal_probabilities(int site) const;
    double bumper_leakage(int site) const;
    FieldMoments field_expectations(int site) const;

private:
    void check_site(int site) const;

    QuditSpec spec_;
    int sites_ = 0;
    cvector amps_;
};

cx overlap(const StateVector& a, const StateVector& b);  // <a|b>

}  // namespace qsim
