#include "fraclab/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fraclab::specfun {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr long double kPiL = 3.14159265358979323846264338327950288L;

bool near_integer(double x, double tol = 1e-12) {
    return std::abs(x - std::round(x)) < tol;
}

// zeta(n), n >= 2, by Euler-Maclaurin in long double (error ~ 1e-21)
long double zeta_l(int n) {
    const long double big_n = 64.0L;
    long double s = 0.0L;
    for (int j = 1; j < 64; ++j)
        s += std::pow(static_cast<long double>(j), static_cast<long double>(-n));
    const long double nn = n;
    long double t = std::pow(big_n, 1.0L - nn) / (nn - 1.0L) + 0.5L * std::pow(big_n, -nn);
    long double rise = nn;  // rising factorials (n)_1, (n)_3, ...
    t += rise / 12.0L * std::pow(big_n, -nn - 1.0L);       // B2/2!
    rise *= (nn + 1.0L) * (nn + 2.0L);
    t -= rise / 720.0L * std::pow(big_n, -nn - 3.0L);      // B4/4!
    rise *= (nn + 3.0L) * (nn + 4.0L);
    t += rise / 30240.0L * std::pow(big_n, -nn - 5.0L);    // B6/6!
    rise *= (nn + 5.0L) * (nn + 6.0L);
    t -= rise / 1209600.0L * std::pow(big_n, -nn - 7.0L);  // B8/8!
    return s + t;
}

// Taylor coefficients of the entire function 1/Gamma via the zeta
// recurrence; the Bessel power series needs its initial terms to full long
// double accuracy (the e^{2z} cancellation amplifies any Gamma error).
const std::array<long double, 61>& recip_gamma_coeffs() {
    static const auto coeffs = [] {
        std::array<long double, 61> a{};
        const long double euler = 0.577215664901532860606512090082402431042159335939924L;
        a[1] = 1.0L;
        a[2] = euler;
        std::array<long double, 61> z{};
        for (int n = 2; n < 61; ++n) z[n] = zeta_l(n);
        for (int k = 3; k < 61; ++k) {
            long double s = euler * a[k - 1];
            long double sign = -1.0L;
            for (int j = 2; j <= k - 1; ++j) {
                s += sign * z[j] * a[k - j];
                sign = -sign;
            }
            a[k] = s / (k - 1);
        }
        return a;
    }();
    return coeffs;
}

// 1/Gamma(1+x) for |x| < 1: the shifted series keeps |x|^k <= 1 so the
// absolute accuracy of the high-order coefficients carries through
long double recip_gamma1p(long double x) {
    const auto& c = recip_gamma_coeffs();
    long double acc = 0.0L, xp = 1.0L;
    for (int k = 1; k < 61; ++k) {
        acc += c[k] * xp;
        xp *= x;
    }
    return acc;
}

}  // namespace

double gamma_series_recip(double x) {
    if (!(x > 0.0 && x <= 2.0))
        throw std::invalid_argument("gamma_series_recip: argument outside (0,2]");
    return static_cast<double>(1.0L / recip_gamma1p(static_cast<long double>(x) - 1.0L));
}

namespace {
}  // namespace

double gamma_fn(double x) {
    if (x <= 0.0 && near_integer(x)) throw std::invalid_argument("gamma: pole at non-positive integer");
    if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
    // Lanczos, g = 7, 9 coefficients
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
        771.32342877765313,    -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};
    const double z = x - 1.0;
    double acc = c[0];
    for (int i = 1; i < 9; ++i) acc += c[i] / (z + i);
    const double t = z + g + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

namespace {

// K_nu by the defining series K = (pi/2)(I_{-nu} - I_nu)/sin(pi nu). The two
// I-series cancel catastrophically for moderate z, so everything runs in long
// double with Spouge initial terms; the residual amplification e^{2z} * eps_L
// stays below 1e-10 up to the switch point.
double bessel_k_series(double nu, double z) {
    const long double nuL = nu, zL = z;
    const long double q = zL * zL / 4.0L;
    const long double half_pow = std::pow(zL / 2.0L, nuL);
    long double tm = recip_gamma1p(-nuL) / half_pow;  // m = 0, order -nu
    long double tp = half_pow * recip_gamma1p(nuL);    // m = 0, order +nu
    long double sum = tm - tp;
    for (int m = 1; m < 400; ++m) {
        tm *= q / (m * (m - nuL));
        tp *= q / (m * (m + nuL));
        const long double add = tm - tp;
        sum += add;
        if (std::fabs(tm) + std::fabs(tp) < 1e-24L * std::fabs(sum)) break;
    }
    const long double k = kPiL / 2.0L * sum / std::sin(kPiL * nuL);
    return static_cast<double>(k);
}

// large-z expansion sqrt(pi/(2z)) e^{-z} sum_k prod_j (4nu^2-(2j-1)^2)/(k! (8z)^k),
// truncated at the smallest term
double bessel_k_asymptotic(double nu, double z) {
    const long double mu = 4.0L * static_cast<long double>(nu) * nu;
    const long double zL = z;
    long double term = 1.0L, sum = 1.0L, prev = std::numeric_limits<long double>::max();
    for (int k = 1; k <= 60; ++k) {
        const long double f = (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (8.0L * zL * k);
        term *= f;
        if (std::fabs(term) >= prev) break;  // divergence onset
        sum += term;
        prev = std::fabs(term);
        if (prev < 1e-19L * std::fabs(sum)) break;
    }
    const long double pre = std::sqrt(kPiL / (2.0L * zL)) * std::exp(-zL);
    return static_cast<double>(pre * sum);
}

}  // namespace

double bessel_k(double nu, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("bessel_k: z must be positive");
    if (near_integer(nu)) throw std::invalid_argument("bessel_k: integer order not supported");
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("bessel_k: order outside (0,1)");
    if (z > 705.0) return 0.0;  // underflow of e^{-z}
    return z <= kBesselKSwitch ? bessel_k_series(nu, z) : bessel_k_asymptotic(nu, z);
}

namespace {

double bessel_j_series(double nu, double z) {
    const long double nuL = nu, zL = z;
    const long double q = zL * zL / 4.0L;
    long double t = std::pow(zL / 2.0L, nuL) * recip_gamma1p(nuL);
    long double sum = t;
    for (int m = 1; m < 400; ++m) {
        t *= -q / (m * (m + nuL));
        sum += t;
        if (std::fabs(t) < 1e-24L * (std::fabs(sum) + 1e-30L)) break;
    }
    return static_cast<double>(sum);
}

// Hankel expansion J_nu(z) = sqrt(2/(pi z)) (P cos(chi) - Q sin(chi)),
// chi = z - nu pi/2 - pi/4
double bessel_j_asymptotic(double nu, double z) {
    const long double mu = 4.0L * static_cast<long double>(nu) * nu;
    const long double zL = z;
    long double p = 1.0L, q = 0.0L;
    long double term = 1.0L;
    for (int k = 1; k <= 40; ++k) {
        term *= (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (8.0L * zL * k);
        if (k % 4 == 1) q += term;
        else if (k % 4 == 2) p -= term;
        else if (k % 4 == 3) q -= term;
        else p += term;
        if (std::fabs(term) < 1e-20L) break;
    }
    const long double chi = zL - static_cast<long double>(nu) * kPiL / 2.0L - kPiL / 4.0L;
    const long double amp = std::sqrt(2.0L / (kPiL * zL));
    return static_cast<double>(amp * (p * std::cos(chi) - q * std::sin(chi)));
}

}  // namespace

double bessel_j(double nu, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("bessel_j: z must be positive");
    if (!(nu > -1.0 && nu < 1.0)) throw std::invalid_argument("bessel_j: order outside (-1,1)");
    return z <= 20.0 ? bessel_j_series(nu, z) : bessel_j_asymptotic(nu, z);
}

double mcmahon_zero(double nu, int m) { return (m + 0.5 * nu - 0.25) * kPi; }

std::vector<double> bessel_j_neg_zeros(double s, int m_max) {
    if (m_max < 1) throw std::invalid_argument("bessel_j_neg_zeros: m_max >= 1 required");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("bessel_j_neg_zeros: s outside (0,1)");
    const double nu = -s;
    auto f = [&](double z) { return bessel_j(nu, z); };

    std::vector<double> zeros;
    zeros.reserve(m_max);
    // march for sign changes; the first zero can sit near 2 sqrt(1-s) for s -> 1
    double z = 1e-6, fz = f(z);
    while (static_cast<int>(zeros.size()) < m_max) {
        const double step = z < 8.0 ? 0.02 : 0.25;
        double z2 = z + step, fz2 = f(z2);
        if ((fz < 0.0) != (fz2 < 0.0)) {
            double a = z, b = z2;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if ((fm < 0.0) == (fz < 0.0)) a = mid; else b = mid;
                if (b - a < 1e-14 * (1.0 + b)) break;
            }
            const double root = 0.5 * (a + b);
            if (std::abs(f(root)) > 1e-10)
                throw std::runtime_error("bessel_j_neg_zeros: refinement stalled");
            const int m = static_cast<int>(zeros.size()) + 1;
            if (m >= 10 && std::abs(root - mcmahon_zero(nu, m)) > 1.0 / m)
                throw std::runtime_error("bessel_j_neg_zeros: McMahon consistency violated");
            zeros.push_back(root);
        }
        z = z2;
        fz = fz2;
        if (z > 10.0 * (m_max + 2)) throw std::runtime_error("bessel_j_neg_zeros: zero search overran");
    }
    return zeros;
}

FracConstants FracConstants::make(double s) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("frac constants: s outside (0,1)");
    FracConstants f;
    f.s = s;
    const double gs = gamma_fn(s), g1ms = gamma_fn(1.0 - s);
    f.c_s = std::pow(2.0, 2.0 * s - 1.0) * gs / g1ms;
    f.cbar_s = std::pow(4.0, s) * gs / (2.0 * s * std::abs(gamma_fn(-s)));
    f.ctilde_s = std::pow(2.0, 1.0 - s) / gs;
    f.kernel_mass = std::pow(2.0, -s) * g1ms;
    return f;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a >= b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {

// termwise-exact integral of z^{1-s} K_s(z) over [lo, hi] using the defining
// series; valid for small hi (no cancellation growth)
double kernel_tail_series_int(double s, double lo, double hi) {
    const long double sL = s;
    const long double pref = kPiL / (2.0L * std::sin(kPiL * sL));
    long double sum = 0.0L;
    // series coefficients over (z/2)^{2m -+ s}
    long double cm = recip_gamma1p(-sL), cp = recip_gamma1p(sL);
    for (int m = 0; m < 200; ++m) {
        // minus branch: z^{1-s} (z/2)^{2m-s} -> exponent 1 - 2s + 2m
        const long double em = 2.0L + 2.0L * m - 2.0L * sL;
        const long double ep = 2.0L + 2.0L * m;
        const long double sm = cm * std::pow(0.5L, 2.0L * m - sL) *
                               (std::pow((long double)hi, em) - std::pow((long double)lo, em)) / em;
        const long double sp = cp * std::pow(0.5L, 2.0L * m + sL) *
                               (std::pow((long double)hi, ep) - std::pow((long double)lo, ep)) / ep;
        sum += sm - sp;
        cm /= (m + 1.0L) * (m + 1.0L - sL);
        cp /= (m + 1.0L) * (m + 1.0L + sL);
        if (std::fabs(sm) + std::fabs(sp) < 1e-22L * std::fabs(sum) && m > 2) break;
    }
    return static_cast<double>(pref * sum);
}

// int_Z^infty z^p e^{-z} dz ~ Z^p e^{-Z} (1 + p/Z + p(p-1)/Z^2 + ...)
double exp_tail_moment(double p, double z) {
    double corr = 1.0 + p / z + p * (p - 1.0) / (z * z) + p * (p - 1.0) * (p - 2.0) / (z * z * z);
    return std::pow(z, p) * std::exp(-z) * corr;
}

}  // namespace

double kernel_head(double s, double hi) {
    if (!(hi > 0.0 && hi <= 2.0)) throw std::invalid_argument("kernel_head: hi outside (0,2]");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kernel_head: s outside (0,1)");
    return kernel_tail_series_int(s, 0.0, hi);
}

double kernel_tail(double s, double L) {
    if (L < 0.0) throw std::invalid_argument("kernel_tail: L >= 0 required");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kernel_tail: s outside (0,1)");
    const double zc = 1.0;
    const double zstar = std::max(L, 40.0);
    double total = 0.0;
    if (L < zc) total += kernel_tail_series_int(s, L, zc);
    const double a = std::max(L, zc);
    if (a < zstar)
        total += adaptive_simpson([&](double z) { return std::pow(z, 1.0 - s) * bessel_k(s, z); },
                                  a, zstar, 1e-11, 40);
    // closed-form asymptotic remainder beyond Z*
    const double mu = 4.0 * s * s;
    total += std::sqrt(kPi / 2.0) *
             (exp_tail_moment(0.5 - s, zstar) + (mu - 1.0) / 8.0 * exp_tail_moment(-0.5 - s, zstar));
    return total;
}

double kernel_tail_sq(double nu, double L) {
    if (!(L >= 1.0)) throw std::invalid_argument("kernel_tail_sq: L >= 1 required");
    const double zstar = L + 30.0;
    // tolerance scaled to the expected magnitude (pi/4) e^{-2L}; a fixed
    // absolute tolerance would swamp the integrand for large L
    const double tol = 1e-9 * 0.25 * kPi * std::exp(-2.0 * L);
    double total = adaptive_simpson(
        [&](double z) { const double k = bessel_k(nu, z); return z * k * k; }, L, zstar, tol, 40);
    // z K_nu^2 ~ (pi/2) e^{-2z} (1 + (mu-1)/(4z) + ...)
    const double mu = 4.0 * nu * nu;
    total += kPi / 2.0 *
             (0.5 * std::exp(-2.0 * zstar) +
              (mu - 1.0) / 4.0 * exp_tail_moment(-1.0, 2.0 * zstar) / 2.0);
    return total;
}

const std::array<double, 12>& gl12_nodes() {
    static const std::array<double, 12> x = {
        -0.9815606342467192, -0.9041172563704749, -0.7699026741943047, -0.5873179542866175,
        -0.3678314989981802, -0.1252334085114689, 0.1252334085114689,  0.3678314989981802,
        0.5873179542866175,  0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
    return x;
}

const std::array<double, 12>& gl12_weights() {
    static const std::array<double, 12> w = {
        0.0471753363865118, 0.1069393259953184, 0.1600783285433462, 0.2031674267230659,
        0.2334925365383548, 0.2491470458134028, 0.2491470458134028, 0.2334925365383548,
        0.2031674267230659, 0.1600783285433462, 0.1069393259953184, 0.0471753363865118};
    return w;
}

}  // namespace fraclab::specfun
