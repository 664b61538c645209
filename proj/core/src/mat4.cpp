#include "spinfiber/mat4.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <type_traits>
#include <utility>

#include "spinfiber/errors.hpp"

namespace spinfiber {

namespace {

template <class M>
double frob(const M& m) {
    double s = 0.0;
    for (const auto& x : m.a) s += std::norm(cplx(x));
    return std::sqrt(s);
}

template <class M>
double maxabs(const M& m) {
    double s = 0.0;
    for (const auto& x : m.a) s = std::max(s, std::abs(cplx(x)));
    return s;
}

template <class M>
double l1(const M& m) {
    double best = 0.0;
    for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int r = 0; r < 4; ++r) s += std::abs(cplx(m(r, c)));
        best = std::max(best, s);
    }
    return best;
}

// LU factorization with partial pivoting. Works for both scalar kinds; the
// pivot floor is relative to the largest input entry.
template <class M>
struct Lu4 {
    using scalar = std::remove_reference_t<decltype(std::declval<M&>()(0, 0))>;
    M lu;
    std::array<int, 4> perm{};
    int sign = 1;
    bool singular = false;

    explicit Lu4(const M& m, double pivot_rel = tol::singularity) : lu(m) {
        const double floor_abs = pivot_rel * std::max(maxabs(m), 1e-300);
        std::iota(perm.begin(), perm.end(), 0);
        for (int col = 0; col < 4; ++col) {
            int pivot = col;
            double best = std::abs(cplx(lu(col, col)));
            for (int r = col + 1; r < 4; ++r) {
                const double cand = std::abs(cplx(lu(r, col)));
                if (cand > best) {
                    best = cand;
                    pivot = r;
                }
            }
            if (best <= floor_abs) {
                singular = true;
                return;
            }
            if (pivot != col) {
                for (int c = 0; c < 4; ++c) std::swap(lu(pivot, c), lu(col, c));
                std::swap(perm[static_cast<std::size_t>(pivot)], perm[static_cast<std::size_t>(col)]);
                sign = -sign;
            }
            for (int r = col + 1; r < 4; ++r) {
                const scalar f = lu(r, col) / lu(col, col);
                lu(r, col) = f;
                for (int c = col + 1; c < 4; ++c) lu(r, c) -= f * lu(col, c);
            }
        }
    }

    std::array<scalar, 4> solve(const std::array<scalar, 4>& b) const {
        std::array<scalar, 4> x{};
        for (int i = 0; i < 4; ++i) x[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < i; ++j) x[static_cast<std::size_t>(i)] -= lu(i, j) * x[static_cast<std::size_t>(j)];
        for (int i = 3; i >= 0; --i) {
            for (int j = i + 1; j < 4; ++j) x[static_cast<std::size_t>(i)] -= lu(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] /= lu(i, i);
        }
        return x;
    }

    // Solves A X = B column by column.
    M solve(const M& b) const {
        M x;
        for (int c = 0; c < 4; ++c) {
            std::array<scalar, 4> col{};
            for (int r = 0; r < 4; ++r) col[static_cast<std::size_t>(r)] = b(r, c);
            const auto sol = solve(col);
            for (int r = 0; r < 4; ++r) x(r, c) = sol[static_cast<std::size_t>(r)];
        }
        return x;
    }

    scalar det() const {
        scalar d = lu(0, 0);
        for (int i = 1; i < 4; ++i) d *= lu(i, i);
        return static_cast<double>(sign) * d;
    }
};

template <class M>
M inverse_impl(const M& m) {
    Lu4<M> lu(m);
    if (lu.singular) throw SingularTransformError("matrix is singular to working precision");
    return lu.solve(M::identity());
}

// Degree-6 diagonal Pade coefficients for exp.
constexpr std::array<double, 7> kExpPade6 = {
    1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};

template <class M>
M exp_impl(const M& a) {
    const double nrm = l1(a);
    int squarings = 0;
    if (nrm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
    const double down = std::ldexp(1.0, -squarings);

    M as = a;
    for (auto& x : as.a) x *= down;

    const M i4 = M::identity();
    const M a2 = as * as;
    const M a4 = a2 * a2;
    const M a6 = a2 * a4;
    const M u = as * (kExpPade6[1] * i4 + kExpPade6[3] * a2 + kExpPade6[5] * a4);
    const M v = kExpPade6[0] * i4 + kExpPade6[2] * a2 + kExpPade6[4] * a4 + kExpPade6[6] * a6;

    Lu4<M> denom(v - u);
    if (denom.singular) throw SingularTransformError("exp denominator is singular; input is not finite-scaled");
    M r = denom.solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

cplx poly_eval(const std::array<cplx, 5>& coeff, cplx z) {
    // coeff[k] multiplies z^k; coeff[4] = 1.
    cplx acc = coeff[4];
    for (int k = 3; k >= 0; --k) acc = acc * z + coeff[static_cast<std::size_t>(k)];
    return acc;
}

} // namespace

double Mat4::frobenius_norm() const { return frob(*this); }
double Mat4::max_abs() const { return maxabs(*this); }
double Mat4::l1_norm() const { return l1(*this); }
double Mat4c::frobenius_norm() const { return frob(*this); }
double Mat4c::max_abs() const { return maxabs(*this); }
double Mat4c::l1_norm() const { return l1(*this); }

Mat4c to_complex(const Mat4& m) {
    Mat4c r;
    for (std::size_t i = 0; i < 16; ++i) r.a[i] = m.a[i];
    return r;
}

Mat4 inverse(const Mat4& m) { return inverse_impl(m); }
Mat4c inverse(const Mat4c& m) { return inverse_impl(m); }

double determinant(const Mat4& m) {
    Lu4<Mat4> lu(m, 0.0);
    if (lu.singular) return 0.0;
    return lu.det();
}

Mat4 mat_exp(const Mat4& a) { return exp_impl(a); }
Mat4c mat_exp(const Mat4c& a) { return exp_impl(a); }

std::array<cplx, 4> eigenvalues(const Mat4& m) {
    const double scale = std::max(m.max_abs(), 1e-300);
    Mat4 a = (1.0 / scale) * m;

    // Characteristic polynomial by the Faddeev-LeVerrier recursion.
    const Mat4 i4 = Mat4::identity();
    auto trace = [](const Mat4& x) { return x(0, 0) + x(1, 1) + x(2, 2) + x(3, 3); };
    const Mat4 b1 = a;
    const double c3 = -trace(b1);
    const Mat4 b2 = a * (b1 + c3 * i4);
    const double c2 = -trace(b2) / 2.0;
    const Mat4 b3 = a * (b2 + c2 * i4);
    const double c1 = -trace(b3) / 3.0;
    const Mat4 b4 = a * (b3 + c1 * i4);
    const double c0 = -trace(b4) / 4.0;
    const std::array<cplx, 5> coeff = {cplx(c0), cplx(c1), cplx(c2), cplx(c3), cplx(1.0)};

    // Durand-Kerner iteration from the standard staggered start.
    std::array<cplx, 4> z;
    const cplx seed(0.4, 0.9);
    z[0] = seed;
    for (int j = 1; j < 4; ++j) z[static_cast<std::size_t>(j)] = z[static_cast<std::size_t>(j - 1)] * seed;

    for (int iter = 0; iter < 200; ++iter) {
        double step = 0.0;
        double mag = 1.0;
        for (int j = 0; j < 4; ++j) {
            cplx denom = 1.0;
            for (int k = 0; k < 4; ++k)
                if (k != j) denom *= z[static_cast<std::size_t>(j)] - z[static_cast<std::size_t>(k)];
            if (std::abs(denom) == 0.0) denom = 1e-30;
            const cplx delta = poly_eval(coeff, z[static_cast<std::size_t>(j)]) / denom;
            z[static_cast<std::size_t>(j)] -= delta;
            step = std::max(step, std::abs(delta));
            mag = std::max(mag, std::abs(z[static_cast<std::size_t>(j)]));
        }
        if (step <= 1e-14 * mag) break;
    }

    for (auto& x : z) x *= scale;
    return z;
}

bool has_principal_log(const Mat4& m) {
    const auto ev = eigenvalues(m);
    double spectral = 0.0;
    for (const auto& z : ev) spectral = std::max(spectral, std::abs(z));
    for (const auto& z : ev) {
        if (std::abs(z) <= tol::singularity * std::max(spectral, 1e-300)) return false;
        const bool nearly_real = std::abs(z.imag()) <= tol::branch_cut_imag * std::max(std::abs(z), 1e-300);
        if (nearly_real && z.real() < 0.0) return false;
    }
    return true;
}

namespace {

// One Denman-Beavers square-root pass (principal branch).
Mat4 sqrt_db(const Mat4& a) {
    Mat4 y = a;
    Mat4 z = Mat4::identity();
    try {
        for (int iter = 0; iter < 60; ++iter) {
            const Mat4 yn = 0.5 * (y + inverse(z));
            const Mat4 zn = 0.5 * (z + inverse(y));
            const double drift = (yn - y).frobenius_norm();
            y = yn;
            z = zn;
            if (drift <= 1e-15 * std::max(y.frobenius_norm(), 1e-300)) return y;
        }
    } catch (const SingularTransformError&) {
        // A singular iterate means an eigenvalue sits on the branch cut.
        throw BranchCutError("matrix square-root iteration hit a singular iterate; input is outside the principal-log domain");
    }
    throw BranchCutError("matrix square-root iteration did not converge; input is outside the principal-log domain");
}

} // namespace

Mat4 mat_log(const Mat4& t) {
    if (!has_principal_log(t))
        throw BranchCutError("eigenvalue on the closed negative real axis; no principal logarithm");

    const Mat4 i4 = Mat4::identity();
    Mat4 a = t;
    int halvings = 0;
    while ((a - i4).frobenius_norm() > 0.2) {
        if (halvings >= 64)
            throw BranchCutError("inverse scaling did not reach the series domain; no principal logarithm");
        a = sqrt_db(a);
        ++halvings;
    }

    // Mercator series for log(I + X) with ||X|| <= 0.2.
    const Mat4 x = a - i4;
    Mat4 power = x;
    Mat4 acc = x;
    double sign = -1.0;
    for (int m = 2; m <= 100; ++m) {
        power = power * x;
        const Mat4 term = (sign / static_cast<double>(m)) * power;
        acc = acc + term;
        sign = -sign;
        if (term.frobenius_norm() <= 1e-18 * std::max(acc.frobenius_norm(), 1.0)) break;
    }
    return std::ldexp(1.0, halvings) * acc;
}

EigSym4 eig_sym4(const Mat4& s, double symmetry_tol) {
    double asym = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = r + 1; c < 4; ++c) asym = std::max(asym, std::abs(s(r, c) - s(c, r)));
    const double scale = s.max_abs();
    if (asym > symmetry_tol * std::max(scale, 1e-300))
        throw PreconditionError("matrix is not symmetric within the stated relative tolerance");

    Mat4 a;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = 0.5 * (s(r, c) + s(c, r));
    Mat4 v = Mat4::identity();

    const double base = a.frobenius_norm();
    auto off_norm = [](const Mat4& m) {
        double acc = 0.0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (r != c) acc += m(r, c) * m(r, c);
        return std::sqrt(acc);
    };

    for (int sweep = 0; sweep < tol::jacobi_max_sweeps; ++sweep) {
        if (off_norm(a) <= tol::jacobi_off_diagonal * base) break;
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e10) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                Mat4 rot = Mat4::identity();
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = sn;
                rot(q, p) = -sn;
                a = rot.transposed() * a * rot;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                v = v * rot;
            }
        }
    }

    EigSym4 out;
    std::array<int, 4> order = {0, 1, 2, 3};
    std::array<double, 4> lam = {a(0, 0), a(1, 1), a(2, 2), a(3, 3)};
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return lam[static_cast<std::size_t>(i)] > lam[static_cast<std::size_t>(j)];
    });
    Mat4 vv;
    for (int c = 0; c < 4; ++c) {
        const int src = order[static_cast<std::size_t>(c)];
        out.eigenvalues[static_cast<std::size_t>(c)] = lam[static_cast<std::size_t>(src)];
        for (int r = 0; r < 4; ++r) vv(r, c) = v(r, src);
    }

    // Deterministic column signs: largest-magnitude entry positive.
    for (int c = 0; c < 4; ++c) {
        int lead = 0;
        double best = std::abs(vv(0, c));
        for (int r = 1; r < 4; ++r) {
            if (std::abs(vv(r, c)) > best) {
                best = std::abs(vv(r, c));
                lead = r;
            }
        }
        if (vv(lead, c) < 0.0)
            for (int r = 0; r < 4; ++r) vv(r, c) = -vv(r, c);
    }
    if (determinant(vv) < 0.0)
        for (int r = 0; r < 4; ++r) vv(r, 3) = -vv(r, 3);

    out.eigenvectors = vv;
    return out;
}

} // namespace spinfiber
