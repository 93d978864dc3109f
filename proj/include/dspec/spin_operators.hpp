#pragma once

// Angular-momentum operator matrices for arbitrary half-integer spin, in the
// descending-m basis |s>, |s-1>, ..., |-s>. Matrix entries are dimensionless;
// energy scales enter when Hamiltonian terms are assembled.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "dspec/errors.hpp"

namespace dspec {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;

struct SpinOperatorSet {
    double s = 0.0;
    int dim = 1;  // 2s+1
    MatrixXcd sx, sy, sz, splus, sminus;
};

/// Round a half-integer spin to its exact twice-value, rejecting anything
/// that is not a nonnegative multiple of 1/2.
inline int twice_spin(double s) {
    const double twice = 2.0 * s;
    const double rounded = std::round(twice);
    if (s < 0.0 || std::abs(twice - rounded) > 1e-9)
        throw InvalidSpin("spin must be a nonnegative half-integer, got " + std::to_string(s));
    return static_cast<int>(rounded);
}

inline SpinOperatorSet spin_operators(double s) {
    const int twice = twice_spin(s);
    SpinOperatorSet ops;
    ops.s = twice / 2.0;
    ops.dim = twice + 1;
    const int n = ops.dim;

    ops.sz = MatrixXcd::Zero(n, n);
    ops.splus = MatrixXcd::Zero(n, n);
    ops.sminus = MatrixXcd::Zero(n, n);

    // basis index k holds m = s - k
    for (int k = 0; k < n; ++k) {
        const double m = ops.s - k;
        ops.sz(k, k) = m;
        if (k > 0) {
            // S+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>
            const double c = std::sqrt(ops.s * (ops.s + 1.0) - m * (m + 1.0));
            ops.splus(k - 1, k) = c;
        }
        if (k < n - 1) {
            const double c = std::sqrt(ops.s * (ops.s + 1.0) - m * (m - 1.0));
            ops.sminus(k + 1, k) = c;
        }
    }
    ops.sx = 0.5 * (ops.splus + ops.sminus);
    ops.sy = Complex(0.0, -0.5) * (ops.splus - ops.sminus);
    return ops;
}

/// Kronecker product, row-major convention: (A @ B)(i*p+k, j*q+l) = A(i,j) B(k,l).
inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}
