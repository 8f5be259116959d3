#include "apos/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace apos {

namespace {

constexpr double kRescale = 1e250;

void check_bessel_args(const char* where, int k, double x) {
    if (k < 0 || k > kBesselMaxOrder)
        throw NumericalFailure(where, "order out of range", static_cast<double>(k));
    if (!(x >= 0.0) || x > kBesselMaxArgument) throw NumericalFailure(where, "argument out of range", x);
}

int miller_start(int kmax, double x) {
    const double m = std::max(static_cast<double>(kmax), x);
    int n = static_cast<int>(std::ceil(m + 30.0 + 2.0 * std::sqrt(30.0 * m)));
    if (n % 2) ++n;
    return n;
}

// J_0..J_kmax at x > 0 by backward recurrence normalized with
// J_0 + 2ΣJ_{2m} = 1.
std::vector<double> bessel_j_sequence(int kmax, double x) {
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int n = miller_start(kmax, x);
    double next = 0.0;
    double cur = 1e-30;
    double sum = 0.0;
    for (int m = n; m >= 1; --m) {
        if (m <= kmax) out[static_cast<std::size_t>(m)] = cur;
        if (m % 2 == 0) sum += 2.0 * cur;
        const double prev = (2.0 * m / x) * cur - next;
        next = cur;
        cur = prev;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            next /= kRescale;
            sum /= kRescale;
            for (auto& v : out) v /= kRescale;
        }
    }
    out[0] = cur;
    sum += cur;
    for (auto& v : out) v /= sum;
    return out;
}

// I_0..I_kmax at x > 0 normalized with I_0 + 2ΣI_m = e^x.
std::vector<double> bessel_i_sequence(int kmax, double x) {
    std::vector<double> out(static_cast<std::size_t>(kmax) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const int n = miller_start(kmax, x);
    double next = 0.0;
    double cur = 1e-30;
    double sum = 0.0;
    for (int m = n; m >= 1; --m) {
        if (m <= kmax) out[static_cast<std::size_t>(m)] = cur;
        sum += 2.0 * cur;
        const double prev = (2.0 * m / x) * cur + next;
        next = cur;
        cur = prev;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            next /= kRescale;
            sum /= kRescale;
            for (auto& v : out) v /= kRescale;
        }
    }
    out[0] = cur;
    sum += cur;
    const double log_scale = x - std::log(sum);
    for (auto& v : out) {
        if (v == 0.0) continue;
        const double lv = std::log(v) + log_scale;
        if (lv > 709.0) throw NumericalFailure("bessel_i", "value overflows", x);
        v = std::exp(lv);
    }
    return out;
}

}  // namespace

double bessel_j(int k, double x) {
    check_bessel_args("bessel_j", k, x);
    return bessel_j_sequence(k, x)[static_cast<std::size_t>(k)];
}

double bessel_j_prime(int k, double x) {
    check_bessel_args("bessel_j_prime", k, x);
    const auto j = bessel_j_sequence(k + 1, x);
    if (k == 0) return -j[1];
    if (x == 0.0) return k == 1 ? 0.5 : 0.0;
    return j[static_cast<std::size_t>(k - 1)] - (k / x) * j[static_cast<std::size_t>(k)];
}

double bessel_i(int k, double x) {
    check_bessel_args("bessel_i", k, x);
    return bessel_i_sequence(k, x)[static_cast<std::size_t>(k)];
}

double bessel_i_prime(int k, double x) {
    check_bessel_args("bessel_i_prime", k, x);
    const auto v = bessel_i_sequence(k + 1, x);
    if (k == 0) return v[1];
    if (x == 0.0) return k == 1 ? 0.5 : 0.0;
    return v[static_cast<std::size_t>(k - 1)] - (k / x) * v[static_cast<std::size_t>(k)];
}

double bessel_zero(int k, int l) {
    if (k < 0 || k > kBesselMaxOrder) throw NumericalFailure("bessel_zero", "order out of range", k);
    if (l < 1 || l > 20) throw NumericalFailure("bessel_zero", "index out of range", l);

    // Bracket the l-th sign change; J_k > 0 on (0, j_{k,1}).
    const double step = 0.05;
    double a = 1e-3;
    double fa = bessel_j(k, a);
    int found = 0;
    double lo = 0.0, hi = 0.0;
    while (found < l) {
        const double b = a + step;
        if (b > kBesselMaxArgument) throw NumericalFailure("bessel_zero", "zero beyond argument range", b);
        const double fb = bessel_j(k, b);
        if (fa == 0.0 || fa * fb < 0.0) {
            ++found;
            lo = a;
            hi = b;
        }
        a = b;
        fa = fb;
    }
    if (bessel_j(k, lo) == 0.0) return lo;

    // McMahon expansion as the Newton starting point.
    const double mu = 4.0 * k * k;
    const double beta = (l + 0.5 * k - 0.25) * std::numbers::pi;
    double x = beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(8.0 * beta, 3));
    bool newton_ok = false;
    for (int it = 0; it < 50; ++it) {
        const double f = bessel_j(k, x);
        const double df = bessel_j_prime(k, x);
        if (df == 0.0) break;
        const double dx = f / df;
        x -= dx;
        if (!(x > lo && x < hi)) break;
        if (std::abs(dx) < 1e-15 * x) {
            newton_ok = true;
            break;
        }
    }
    if (!newton_ok || !(x > lo && x < hi)) {
        double flo = bessel_j(k, lo);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = bessel_j(k, mid);
            if (fm == 0.0) return mid;
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        x = 0.5 * (lo + hi);
        for (int it = 0; it < 3; ++it) x -= bessel_j(k, x) / bessel_j_prime(k, x);
    }
    return x;
}

bool Rect::contains(Complex z, double margin) const {
    return z.real() >= re_min - margin && z.real() <= re_max + margin && z.imag() >= im_min - margin &&
           z.imag() <= im_max + margin;
}

std::vector<Rect> Rect::split(double fx, double fy) const {
    const double x = re_min + fx * (re_max - re_min);
    const double y = im_min + fy * (im_max - im_min);
    return {{re_min, x, im_min, y}, {x, re_max, im_min, y}, {re_min, x, y, im_max}, {x, re_max, y, im_max}};
}

namespace {

struct WindingSample {
    int count = 0;
    double gap = 0.0;
    double min_abs = 0.0;
    bool coarse = false;
};

WindingSample winding(const CharFunction& f, const Rect& r, int n) {
    const Complex corners[5] = {
        {r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}, {r.re_min, r.im_min}};
    double unwrapped = 0.0;
    double trapezoid = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    bool coarse = false;

    Complex z0 = corners[0];
    Complex f0 = f.value(z0);
    Complex g0 = f.derivative(z0) / f0;
    for (int side = 0; side < 4; ++side) {
        const Complex a = corners[side];
        const Complex b = corners[side + 1];
        for (int i = 1; i <= n; ++i) {
            const Complex z1 = a + (b - a) * (static_cast<double>(i) / n);
            const Complex f1 = f.value(z1);
            if (!std::isfinite(f1.real()) || !std::isfinite(f1.imag()))
                throw NumericalFailure("count_roots", "non-finite value on contour", std::abs(z1));
            min_abs = std::min(min_abs, std::abs(f1));
            max_abs = std::max(max_abs, std::abs(f1));
            const Complex g1 = f.derivative(z1) / f1;
            const double principal = std::arg(f1 / f0);
            const double trap = (0.5 * (g0 + g1) * (z1 - z0)).imag();
            const double wraps = std::round((trap - principal) / (2.0 * std::numbers::pi));
            unwrapped += principal + 2.0 * std::numbers::pi * wraps;
            trapezoid += trap;
            if (std::abs(principal) > 0.5 * std::numbers::pi || wraps != 0.0) coarse = true;
            z0 = z1;
            f0 = f1;
            g0 = g1;
        }
    }
    WindingSample s;
    const double w = unwrapped / (2.0 * std::numbers::pi);
    s.count = static_cast<int>(std::lround(w));
    s.gap = std::abs(trapezoid / (2.0 * std::numbers::pi) - s.count);
    s.min_abs = min_abs;
    s.coarse = coarse;
    if (min_abs <= 1e-12 * std::max(1.0, max_abs))
        throw NumericalFailure("count_roots", "contour too close to a root; subdivide the rectangle", min_abs);
    return s;
}

}  // namespace

RootCount count_roots_detailed(const CharFunction& f, const Rect& rect, int samples_per_side) {
    if (!(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min))
        throw UsageError("count_roots: degenerate rectangle");
    if (samples_per_side < 4) throw UsageError("count_roots: samples_per_side must be at least 4");
    constexpr int kMaxSamples = 1 << 18;
    std::vector<int> history;
    WindingSample last;
    for (int n = samples_per_side; n <= kMaxSamples; n *= 2) {
        last = winding(f, rect, n);
        history.push_back(last.count);
        const std::size_t h = history.size();
        if (h >= 3 && history[h - 1] == history[h - 2] && history[h - 2] == history[h - 3] && last.gap <= 0.1 &&
            !last.coarse) {
            return {last.count, n, last.gap, last.min_abs};
        }
    }
    throw NumericalFailure("count_roots", "rounding gap exceeded; subdivide the rectangle", last.gap);
}

int count_roots(const CharFunction& f, const Rect& rect, int samples_per_side) {
    return count_roots_detailed(f, rect, samples_per_side).count;
}

namespace {

constexpr double kNewtonResidual = 1e-11;
constexpr double kDedupRadius = 1e-8;

bool newton(const CharFunction& f, Complex& z, double& residual, std::string& reason) {
    for (int it = 0; it < 100; ++it) {
        const Complex fz = f.value(z);
        const Complex dz = f.derivative(z);
        residual = std::abs(fz);
        if (dz == Complex(0.0, 0.0)) {
            reason = "vanishing derivative";
            return residual <= kNewtonResidual;
        }
        const Complex step = fz / dz;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            reason = "iterate diverged";
            return false;
        }
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    residual = std::abs(f.value(z));
    if (residual > kNewtonResidual) {
        reason = "residual above 1e-11";
        return false;
    }
    return true;
}

bool real_axis_only(const CharFunction& f) { return f.name.rfind("bose", 0) == 0; }

// Sign changes along the real segment of rect, for functions that are only
// defined on the real axis.
int count_real_sign_changes(const CharFunction& f, const Rect& rect) {
    const int n = 4096;
    const double lo = std::max(rect.re_min, 1e-12);
    double prev = f.value(lo).real();
    int count = 0;
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (rect.re_max - lo) * i / n;
        const double v = f.value(x).real();
        if ((prev < 0.0 && v >= 0.0) || (prev > 0.0 && v <= 0.0)) ++count;
        prev = v;
    }
    return count;
}

int multiplicity_at(const CharFunction& f, Complex z, double radius) {
    try {
        const Rect r{z.real() - radius, z.real() + radius, z.imag() - radius, z.imag() + radius};
        return std::max(1, count_roots(f, r, 32));
    } catch (const NumericalFailure&) {
        return 1;
    }
}

}  // namespace

RootSet refine_roots(const CharFunction& f, const Rect& rect, const std::vector<Complex>& seeds) {
    RootSet out;
    out.region = rect;
    const double margin = 1e-9 * std::max(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
    for (const Complex& seed : seeds) {
        Complex z = seed;
        double residual = 0.0;
        std::string reason;
        if (!newton(f, z, residual, reason)) {
            out.rejected.push_back({seed, z, reason});
            continue;
        }
        if (!rect.contains(z, margin)) {
            out.rejected.push_back({seed, z, "converged outside the region"});
            continue;
        }
        const bool duplicate = std::any_of(out.roots.begin(), out.roots.end(), [&](const RefinedRoot& r) {
            return std::abs(r.value - z) <= kDedupRadius * std::max(1.0, std::abs(z));
        });
        if (!duplicate) out.roots.push_back({z, residual, 1});
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const RefinedRoot& a, const RefinedRoot& b) {
        if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
        return a.value.imag() > b.value.imag();
    });

    const bool real_only = real_axis_only(f);
    if (!real_only) {
        for (std::size_t i = 0; i < out.roots.size(); ++i) {
            double radius = 1e-3;
            for (std::size_t j = 0; j < out.roots.size(); ++j)
                if (j != i) radius = std::min(radius, 0.4 * std::abs(out.roots[i].value - out.roots[j].value));
            out.roots[i].multiplicity = multiplicity_at(f, out.roots[i].value, radius);
        }
    }
    out.count_by_argument = real_only ? count_real_sign_changes(f, rect) : count_roots(f, rect);
    int total = 0;
    for (const auto& r : out.roots) total += r.multiplicity;
    out.mismatch = total != out.count_by_argument;
    return out;
}

namespace {

// Cuts avoid the rectangle center, where symmetric problems put roots.
constexpr double kCutFractions[3][2] = {{0.4873, 0.5129}, {0.4411, 0.5537}, {0.5313, 0.4687}};

void collect_seeds(const CharFunction& f, const Rect& rect, int count, int depth, std::vector<Complex>& seeds) {
    if (count == 0) return;
    const double size = std::max(rect.re_max - rect.re_min, rect.im_max - rect.im_min);
    if (size < 1e-6 || depth >= 40) {
        seeds.push_back(rect.center());
        return;
    }
    if (count == 1) {
        Complex z = rect.center();
        double residual = 0.0;
        std::string reason;
        if (newton(f, z, residual, reason) && rect.contains(z, 1e-9 * size)) {
            seeds.push_back(z);
            return;
        }
    }
    for (const auto& frac : kCutFractions) {
        const std::vector<Rect> parts = rect.split(frac[0], frac[1]);
        std::vector<int> counts;
        try {
            for (const Rect& q : parts) counts.push_back(count_roots(f, q));
        } catch (const NumericalFailure&) {
            continue;
        }
        for (std::size_t i = 0; i < parts.size(); ++i) collect_seeds(f, parts[i], counts[i], depth + 1, seeds);
        return;
    }
    seeds.push_back(rect.center());
}

}  // namespace

RootSet find_roots(const CharFunction& f, const Rect& rect) {
    std::vector<Complex> seeds;
    if (real_axis_only(f)) {
        const int n = 4096;
        const double lo = std::max(rect.re_min, 1e-12);
        double prev = f.value(lo).real();
        for (int i = 1; i <= n; ++i) {
            const double x = lo + (rect.re_max - lo) * i / n;
            const double v = f.value(x).real();
            if ((prev < 0.0 && v >= 0.0) || (prev > 0.0 && v <= 0.0)) seeds.emplace_back(x, 0.0);
            prev = v;
        }
    } else {
        collect_seeds(f, rect, count_roots(f, rect), 0, seeds);
    }
    return refine_roots(f, rect, seeds);
}

CharFunction delay_characteristic() {
    return {"delay",
            [](Complex z) { return z - std::exp(-2.0 * z) + std::exp(-z); },
            [](Complex z) { return 1.0 + 2.0 * std::exp(-2.0 * z) - std::exp(-z); }};
}

CharFunction network_characteristic(double l) {
    if (!(l > 0.0)) throw UsageError("network_characteristic: edge length must be positive");
    return {"network",
            [l](Complex z) {
                const Complex a = std::exp(-z);
                const Complex b = std::exp(-l * z);
                return (a - 2.0) * (b - 2.0) - a * b;
            },
            [l](Complex z) { return 2.0 * std::exp(-z) + 2.0 * l * std::exp(-l * z); }};
}

CharFunction bose_characteristic(int k, double q) {
    if (k < 0 || k > kBesselMaxOrder) throw UsageError("bose_characteristic: order out of range");
    auto real_arg = [](Complex z) {
        if (std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z.real())) || !(z.real() > 0.0))
            throw NumericalFailure("bose_characteristic", "defined for real positive arguments only", std::abs(z));
        return z.real();
    };
    return {"bose",
            [k, q, real_arg](Complex z) {
                const double s = std::sqrt(real_arg(z));
                return Complex(s * bessel_j_prime(k, s) + q * bessel_j(k, s), 0.0);
            },
            [k, q, real_arg](Complex z) {
                const double s = std::sqrt(real_arg(z));
                const double j = bessel_j(k, s);
                const double jp = bessel_j_prime(k, s);
                // s J″ + J′ = −(s² − k²) J / s from Bessel's equation.
                return Complex((-(s * s - k * k) * j / s + q * jp) / (2.0 * s), 0.0);
            }};
}

double bose_first_root(int k, double q) {
    if (q < 0.0 || (q == 0.0 && k == 0))
        throw UsageError("bose_first_root: need q > 0, or q = 0 with k >= 1");
    const CharFunction f = bose_characteristic(k, q);
    const double j1 = bessel_zero(k, 1);
    double lo = 1e-10;
    double hi = j1 * j1;
    double flo = f.value(lo).real();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f.value(mid).real();
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Complex z(0.5 * (lo + hi), 0.0);
    double residual = 0.0;
    std::string reason;
    newton(f, z, residual, reason);
    return z.real();
}

}  // namespace apos
