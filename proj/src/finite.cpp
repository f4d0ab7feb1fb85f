#include "specdyn/finite.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace specdyn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
    Eigen::MatrixXcd out(m.n, m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out(i, j) = m.at(i, j);
    return out;
}

ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
    ComplexMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m(i, j);
    return out;
}

} // namespace

FiniteAnalysis unitary_part(const ComplexMatrix& t) {
    const int d = t.n;
    Eigen::MatrixXcd mat = to_eigen(t);
    double norm = mat.jacobiSvd().singularValues()(0);
    if (norm > 1.0 + 1e-12)
        throw std::invalid_argument("unitary_part: operator norm exceeds 1 + 1e-12");

    constexpr double kRankTol = 1e-9;
    Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd basis = identity; // current intersection basis, d x r
    Eigen::MatrixXcd power = identity;
    Eigen::MatrixXcd adj_power = identity;
    Eigen::MatrixXcd adj = mat.adjoint();

    for (int n = 1; n <= d && basis.cols() > 0; ++n) {
        power = mat * power;
        adj_power = adj * adj_power;
        Eigen::MatrixXcd defect(2 * d, d);
        defect.topRows(d) = identity - adj_power * power;    // I - T*^n T^n
        defect.bottomRows(d) = identity - power * adj_power; // I - T^n T*^n
        Eigen::MatrixXcd restricted = defect * basis;        // 2d x r
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(restricted, Eigen::ComputeFullV);
        int null_dim = 0;
        for (int i = static_cast<int>(svd.singularValues().size()) - 1; i >= 0; --i) {
            if (svd.singularValues()(i) <= kRankTol)
                ++null_dim;
            else
                break;
        }
        if (null_dim == 0) {
            basis = Eigen::MatrixXcd(d, 0);
            break;
        }
        basis = basis * svd.matrixV().rightCols(null_dim);
        // re-orthonormalize the running basis
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
        basis = Eigen::MatrixXcd(qr.householderQ()).leftCols(basis.cols());
    }

    FiniteAnalysis out;
    out.matrix = t;
    out.rank_tolerance = kRankTol;
    const int r = static_cast<int>(basis.cols());

    Eigen::MatrixXcd complement(d, d - r);
    if (r == 0) {
        complement = identity;
    } else if (r == d) {
        complement = Eigen::MatrixXcd(d, 0);
    } else {
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(basis);
        complement = Eigen::MatrixXcd(qr.householderQ()).rightCols(d - r);
    }
    out.unitary_basis = from_eigen(basis);
    out.cnu_basis = from_eigen(complement);

    if (r > 0) {
        Eigen::MatrixXcd tb = mat * basis;
        out.unitarity_defect =
            (tb.adjoint() * tb - Eigen::MatrixXcd::Identity(r, r)).cwiseAbs().maxCoeff();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(basis.adjoint() * mat * basis);
        for (int i = 0; i < r; ++i) out.unitary_eigenvalues.push_back(eig.eigenvalues()(i));
    }
    return out;
}

FiniteSplitting classify_finite(const ComplexMatrix& t, long long probe_power) {
    FiniteSplitting out;
    out.analysis = unitary_part(t);
    out.probe_power = probe_power;

    const int d = t.n;
    const int r = out.analysis.unitary_basis.m;
    Eigen::MatrixXcd mat = to_eigen(t);
    if (r == d) {
        out.max_late_pairing = 0.0;
        out.recurrent_part_trivial = true; // empty flight space
        return out;
    }
    Eigen::MatrixXcd flight(d, d - r);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d - r; ++j) flight(i, j) = out.analysis.cnu_basis.at(i, j);

    // decay probe: |<T^n f, e_i>| over the flight basis at the probe power
    Eigen::MatrixXcd acc = flight;
    Eigen::MatrixXcd base = mat;
    long long n = probe_power;
    while (n > 0) { // binary power applied to the basis
        if (n & 1) acc = base * acc;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    out.max_late_pairing = acc.cwiseAbs().maxCoeff();
    out.recurrent_part_trivial = out.max_late_pairing <= 1e-6;
    return out;
}

// ---------------------------------------------------------------------------
// limit operator sampling

namespace {

bool is_diagonal(const Eigen::MatrixXcd& u) {
    double off = 0.0;
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < u.cols(); ++j)
            if (i != j) off = std::max(off, std::abs(u(i, j)));
    return off <= 1e-12;
}

std::vector<LimitSample> sample_diagonal(const Eigen::MatrixXcd& u, long long budget,
                                         double radius, std::size_t max_clusters) {
    const int d = static_cast<int>(u.rows());
    std::vector<double> alpha(d);
    for (int i = 0; i < d; ++i) alpha[i] = std::arg(u(i, i)) / kTwoPi;

    long long cells = std::max<long long>(2, static_cast<long long>(std::ceil(1.0 / radius)));
    std::unordered_map<std::size_t, std::size_t> seen; // cell key -> sample index
    std::vector<LimitSample> samples;
    std::vector<double> phase(d, 0.0);
    for (long long n = 1; n <= budget; ++n) {
        std::size_t key = 0;
        for (int i = 0; i < d; ++i) {
            phase[i] += alpha[i];
            phase[i] -= std::floor(phase[i]);
            key = key * static_cast<std::size_t>(cells) +
                  static_cast<std::size_t>(phase[i] * cells) % cells;
        }
        auto it = seen.find(key);
        if (it != seen.end()) {
            ++samples[it->second].visits;
            continue;
        }
        if (samples.size() >= max_clusters) continue;
        Eigen::MatrixXcd rep = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 0; i < d; ++i)
            rep(i, i) = std::polar(1.0, kTwoPi * phase[i]);
        LimitSample s;
        s.representative = from_eigen(rep);
        s.first_power = n;
        s.visits = 1;
        s.radius = radius;
        seen.emplace(key, samples.size());
        samples.push_back(std::move(s));
    }
    return samples;
}

} // namespace

std::vector<LimitSample> sample_limit_operators(const ComplexMatrix& u, long long budget,
                                                double cluster_radius,
                                                std::size_t max_clusters) {
    if (budget < 1) throw std::invalid_argument("sample_limit_operators: budget must be >= 1");
    if (!(cluster_radius > 0.0))
        throw std::invalid_argument("sample_limit_operators: cluster radius must be > 0");
    Eigen::MatrixXcd mat = to_eigen(u);
    if ((mat.adjoint() * mat - Eigen::MatrixXcd::Identity(u.n, u.n)).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("sample_limit_operators: input is not unitary");

    if (is_diagonal(mat)) return sample_diagonal(mat, budget, cluster_radius, max_clusters);

    if (budget * static_cast<long long>(max_clusters) > 200'000'000LL)
        throw BudgetError("sample_limit_operators: budget * clusters too large for the dense scan");
    std::vector<LimitSample> samples;
    std::vector<Eigen::MatrixXcd> reps;
    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(u.n, u.n);
    for (long long n = 1; n <= budget; ++n) {
        power = mat * power;
        bool matched = false;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            if ((power - reps[i]).cwiseAbs().maxCoeff() <= cluster_radius) {
                ++samples[i].visits;
                matched = true;
                break;
            }
        }
        if (!matched && reps.size() < max_clusters) {
            reps.push_back(power);
            LimitSample s;
            s.representative = from_eigen(power);
            s.first_power = n;
            s.visits = 1;
            s.radius = cluster_radius;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

} // namespace specdyn
