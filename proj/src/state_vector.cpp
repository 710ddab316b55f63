#include "qsim/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

namespace {

std::size_t pow_dim(int base, int exp) {
    std::size_t d = 1;
    for (int i = 0; i < exp; ++i) {
        const std::size_t next = d * static_cast<std::size_t>(base);
        if (base != 0 && next / static_cast<std::size_t>(base) != d)
            throw std::invalid_argument("StateVector: dimension overflow");
        d = next;
    }
    return d;
}

}  // namespace

StateVector::StateVector(const QuditSpec& spec, int sites, cvector amplitudes)
    : spec_(spec), sites_(sites), amps_(std::move(amplitudes)) {
    if (sites_ < 1) throw std::invalid_argument("StateVector: sites must be >= 1");
    if (spec_.total_dim() < 1) throw std::invalid_argument("StateVector: empty site space");
    if (amps_.size() != pow_dim(spec_.total_dim(), sites_))
        throw std::invalid_argument("StateVector: amplitude count does not match total_dim^sites");
}

StateVector StateVector::vacuum(const QuditSpec& spec, int sites) {
    if (sites < 1) throw std::invalid_argument("StateVector: sites must be >= 1");
    if (spec.total_dim() < 1) throw std::invalid_argument("StateVector: empty site space");
    cvector amps(pow_dim(spec.total_dim(), sites));
    amps[0] = 1.0;
    return StateVector(spec, sites, std::move(amps));
}

StateVector StateVector::product(const QuditSpec& spec, int sites, const cvector& site_amps) {
    if (static_cast<int>(site_amps.size()) != spec.total_dim())
        throw std::invalid_argument("StateVector::product: site amplitude length mismatch");
    StateVector st = vacuum(spec, sites);
    const int n = spec.total_dim();
    cvector& amps = st.amps_;
    std::size_t filled = 1;  // prefix of sites already expanded
    amps[0] = 1.0;
    for (int j = 0; j < sites; ++j) {
        // expand site j: amps[0..filled) holds the j-site product state
        for (std::size_t idx = filled; idx-- > 0;) {
            const cx base = amps[idx];
            for (int lev = n - 1; lev >= 0; --lev)
                amps[idx * n + lev] = base * site_amps[lev];
        }
        filled *= n;
    }
    return st;
}

double StateVector::norm() const { return std::sqrt(norm2(amps_)); }

void StateVector::normalize() {
    const double nrm = norm();
    if (nrm <= 0.0) throw std::runtime_error("StateVector: cannot normalize zero state");
    for (cx& a : amps_) a /= nrm;
}

std::size_t StateVector::basis_index(const std::vector<int>& levels) const {
    if (static_cast<int>(levels.size()) != sites_)
        throw std::invalid_argument("basis_index: level count != sites");
    const int n = spec_.total_dim();
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (int j = 0; j < sites_; ++j) {
        if (levels[j] < 0 || levels[j] >= n) throw std::out_of_range("basis_index: level out of range");
        idx += static_cast<std::size_t>(levels[j]) * stride;
        stride *= static_cast<std::size_t>(n);
    }
    return idx;
}

int StateVector::level_at(std::size_t index, int site) const {
    check_site(site);
    std::size_t stride = 1;
    for (int j = 0; j < site; ++j) stride *= static_cast<std::size_t>(spec_.total_dim());
    return static_cast<int>((index / stride) % static_cast<std::size_t>(spec_.total_dim()));
}

void StateVector::check_site(int site) const {
    if (site < 0 || site >= sites_) throw std::out_of_range("StateVector: site index out of range");
}

void StateVector::apply_single_site(const DiagonalGate& g, int site) {
    check_site(site);
    const int n = spec_.total_dim();
    if (g.dim() != n) throw std::invalid_argument("apply_single_site: gate dimension mismatch");
    std::size_t stride = 1;
    for (int j = 0; j < site; ++j) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    const std::size_t dim = amps_.size();
    for (std::size_t base = 0; base < dim; base += block)
        for (int lev = 0; lev < n; ++lev) {
            const cx p = g.phases[lev];
            cx* cur = &amps_[base + static_cast<std::size_t>(lev) * stride];
            for (std::size_t off = 0; off < stride; ++off) cur[off] *= p;
        }
}

void StateVector::apply_single_site(const DenseGate& g, int site) {
    check_site(site);
    const int n = spec_.total_dim();
    if (g.dim() != n) throw std::invalid_argument("apply_single_site: gate dimension mismatch");
    std::size_t stride = 1;
    for (int j = 0; j < site; ++j) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    const std::size_t dim = amps_.size();
    cvector scratch(static_cast<std::size_t>(n));
    const cx* u = g.matrix.a.data();
    for (std::size_t base = 0; base < dim; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            cx* slot = &amps_[base + off];
            for (int r = 0; r < n; ++r) {
                const cx* row = u + static_cast<std::size_t>(r) * n;
                cx s{};
                for (int c = 0; c < n; ++c) s += row[c] * slot[static_cast<std::size_t>(c) * stride];
                scratch[r] = s;
            }
            for (int r = 0; r < n; ++r) slot[static_cast<std::size_t>(r) * stride] = scratch[r];
        }
    }
}

void StateVector::apply_two_site_diagonal(const std::function<cx(int, int)>& phase_fn, int site_j,
                                          int site_k) {
    check_site(site_j);
    check_site(site_k);
    if (site_j == site_k) throw std::invalid_argument("apply_two_site_diagonal: sites must differ");
    const int n = spec_.total_dim();
    CMatrix table(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const cx p = phase_fn(a, b);
            if (std::abs(std::abs(p) - 1.0) > 1e-12)
                throw std::invalid_argument("apply_two_site_diagonal: phase_fn not unit modulus");
            table(a, b) = p;
        }
    std::size_t stride_j = 1, stride_k = 1;
    for (int j = 0; j < site_j; ++j) stride_j *= static_cast<std::size_t>(n);
    for (int j = 0; j < site_k; ++j) stride_k *= static_cast<std::size_t>(n);
    const std::size_t dim = amps_.size();
    for (std::size_t i = 0; i < dim; ++i) {
        const int nj = static_cast<int>((i / stride_j) % static_cast<std::size_t>(n));
        const int nk = static_cast<int>((i / stride_k) % static_cast<std::size_t>(n));
        amps_[i] *= table(nj, nk);
    }
}

std::vector<double> StateVector::marginal_probabilities(int site) const {
    check_site(site);
    const int n = spec_.total_dim();
    std::size_t stride = 1;
    for (int j = 0; j < site; ++j) stride *= static_cast<std::size_t>(n);
    std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
    const std::size_t dim = amps_.size();
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < dim; base += block)
        for (int lev = 0; lev < n; ++lev) {
            const cx* cur = &amps_[base + static_cast<std::size_t>(lev) * stride];
            double s = 0.0;
            for (std::size_t off = 0; off < stride; ++off) s += std::norm(cur[off]);
            probs[lev] += s;
        }
    return probs;
}

double StateVector::bumper_leakage(int site) const {
    check_site(site);
    if (spec_.n_bumper == 0) return 0.0;
    const std::vector<double> probs = marginal_probabilities(site);
    double s = 0.0;
    for (int lev = spec_.n_logical; lev < spec_.total_dim(); ++lev) s += probs[lev];
    return s;
}

FieldMoments StateVector::field_expectations(int site) const {
    const std::vector<double> probs = marginal_probabilities(site);
    FieldMoments m;
    for (int nu = 0; nu < spec_.n_logical; ++nu) {
        const double x = spec_.grid_point(nu);
        m.mean += probs[nu] * x;
        m.second += probs[nu] * x * x;
    }
    return m;
}

cx overlap(const StateVector& a, const StateVector& b) {
    if (a.sites() != b.sites() || a.dim() != b.dim())
        throw std::invalid_argument("overlap: shape mismatch");
    return inner(a.amplitudes(), b.amplitudes());
}

}  // namespace qsim
