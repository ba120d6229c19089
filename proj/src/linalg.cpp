// linalg.cpp: LAPACK/ARPACK wrappers

#include "ermea/linalg.hpp"

#include <algorithm>
#include <numeric>

#include <arpack/arpack.hpp>
#include <lapacke.h>

#include "ermea/errors.hpp"

namespace ermea {

Eigen::VectorXcd dense_eigenvalues(Eigen::MatrixXcd A)
{
    const lapack_int n = static_cast<lapack_int>(A.rows());
    Eigen::VectorXcd w(n);
    if (n == 0) return w;
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n,
                                          reinterpret_cast<lapack_complex_double*>(A.data()), n,
                                          reinterpret_cast<lapack_complex_double*>(w.data()),
                                          nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError("zgeev failed, info = " + std::to_string(info));
    return w;
}

void dense_eigen(Eigen::MatrixXcd A, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors)
{
    const lapack_int n = static_cast<lapack_int>(A.rows());
    values.resize(n);
    vectors.resize(n, n);
    if (n == 0) return;
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n,
                                          reinterpret_cast<lapack_complex_double*>(A.data()), n,
                                          reinterpret_cast<lapack_complex_double*>(values.data()),
                                          nullptr, 1,
                                          reinterpret_cast<lapack_complex_double*>(vectors.data()), n);
    if (info != 0) throw NumericalError("zgeev failed, info = " + std::to_string(info));
}

ShiftInvertResult shift_invert_eigs(const SpMat& A, int nev, cplx shift, bool want_vectors, double tol,
                                    int max_iter)
{
    const int n = static_cast<int>(A.rows());
    if (nev < 1 || nev > n - 2) throw ValidationError("shift_invert_eigs: need 1 <= nev <= n - 2");

    SpMat S = A;
    for (int i = 0; i < n; ++i) S.coeffRef(i, i) -= shift;
    S.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success) throw NumericalError("sparse LU of the shifted generator failed");

    const int ncv = std::min(n, std::max(2 * nev + 1, 20));
    const int lworkl = 3 * ncv * ncv + 5 * ncv;
    std::vector<cplx> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * static_cast<std::size_t>(n)),
        workl(lworkl);
    std::vector<double> rwork(ncv);
    a_int iparam[11] = {};
    a_int ipntr[14] = {};
    iparam[0] = 1;
    iparam[2] = max_iter;
    iparam[6] = 1;
    a_int ido = 0, info = 0;

    Eigen::VectorXcd rhs(n);
    while (true) {
        arpack::naupd(ido, arpack::bmat::identity, n, arpack::which::largest_magnitude, nev, tol, resid.data(),
                      ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, rwork.data(), info);
        if (ido == -1 || ido == 1) {
            Eigen::Map<Eigen::VectorXcd> x(workd.data() + ipntr[0] - 1, n);
            Eigen::Map<Eigen::VectorXcd> y(workd.data() + ipntr[1] - 1, n);
            rhs = x;
            y = lu.solve(rhs);
            continue;
        }
        break;
    }
    if (info < 0) throw NumericalError("znaupd error, info = " + std::to_string(info));
    if (info == 1) throw NumericalError("Arnoldi iteration limit reached before convergence");

    std::vector<a_int> select(ncv);
    std::vector<cplx> d(nev + 1), z(want_vectors ? static_cast<std::size_t>(n) * nev : 1), workev(2 * ncv);
    a_int info2 = 0;
    arpack::neupd(want_vectors ? 1 : 0, arpack::howmny::ritz_vectors, select.data(), d.data(),
                  want_vectors ? z.data() : v.data(), n, cplx(0.0), workev.data(), arpack::bmat::identity, n,
                  arpack::which::largest_magnitude, nev, tol, resid.data(), ncv, v.data(), n, iparam, ipntr,
                  workd.data(), workl.data(), lworkl, rwork.data(), info2);
    if (info2 != 0) throw NumericalError("zneupd error, info = " + std::to_string(info2));

    const int got = iparam[4];
    std::vector<cplx> lam(got);
    for (int k = 0; k < got; ++k) lam[k] = shift + 1.0 / d[k];
    std::vector<int> idx(got);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(lam[a]) < std::abs(lam[b]); });

    ShiftInvertResult r;
    r.iterations = iparam[2];
    r.values.resize(got);
    if (want_vectors) r.vectors.resize(n, got);
    for (int k = 0; k < got; ++k) {
        r.values(k) = lam[idx[k]];
        if (want_vectors)
            r.vectors.col(k) = Eigen::Map<Eigen::VectorXcd>(z.data() + static_cast<std::size_t>(idx[k]) * n, n);
    }
    return r;
}

Eigen::VectorXcd bordered_kernel_solve(const SpMat& A, const Eigen::VectorXcd& t)
{
    const int n = static_cast<int>(A.rows());
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(A.nonZeros() + 2 * n);
    for (int j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i) {
        if (t(i) == 0.0) continue;
        trips.emplace_back(n, i, t(i));
        trips.emplace_back(i, n, std::conj(t(i)));
    }
    SpMat B(n + 1, n + 1);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(B);
    if (lu.info() != Eigen::Success) throw NumericalError("bordered steady-state system is singular");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NumericalError("bordered steady-state solve failed");
    return x.head(n);
}

} // namespace ermea
