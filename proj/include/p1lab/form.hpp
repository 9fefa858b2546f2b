#pragma once

// Binary forms in (z0, z1): the universal section representation for
// sections of O(n) on the projective line.  A degree-n form is stored as
// its n+1 coefficients, c[k] multiplying z0^k z1^(n-k).
//
// Coefficient domains used in this project:
//   Form<std::complex<double>>  sections of the complex fiber
//   Form<double>                real sections
//   Form<mpz_class>             integral sections (the lattice)
//   Form<mpq_class>             exact rational intermediates

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace p1lab {

using Complex = std::complex<double>;

namespace detail {

inline bool coeff_is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
inline bool coeff_is_zero(double c) { return c == 0.0; }
inline bool coeff_is_zero(const mpz_class& c) { return c == 0; }
inline bool coeff_is_zero(const mpq_class& c) { return c == 0; }

} // namespace detail

template <typename T>
class Form {
public:
    Form() : c_(1, T(0)) {}

    explicit Form(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty())
            throw std::invalid_argument("form needs at least one coefficient");
    }

    static Form zero(int degree) {
        return Form(std::vector<T>(static_cast<std::size_t>(degree) + 1, T(0)));
    }

    // z0^k z1^(n-k)
    static Form monomial(int degree, int k, T scale = T(1)) {
        Form f = zero(degree);
        f.c_.at(static_cast<std::size_t>(k)) = scale;
        return f;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const T& coeff(int k) const { return c_.at(static_cast<std::size_t>(k)); }
    T& coeff(int k) { return c_.at(static_cast<std::size_t>(k)); }
    const std::vector<T>& coeffs() const { return c_; }

    bool is_zero() const {
        for (const T& c : c_)
            if (!detail::coeff_is_zero(c)) return false;
        return true;
    }

    // Evaluation.  For scalar domains this is the plain bihomogeneous value;
    // Horner is run in whichever chart keeps the ratio bounded by 1.
    template <typename S>
    S eval(const S& z0, const S& z1) const {
        const int n = degree();
        if (std::abs(z0) >= std::abs(z1)) {
            if (std::abs(z0) == 0.0) return S(0); // degenerate input
            const S w = z1 / z0;
            // sum c_k z0^k z1^{n-k} = z0^n * sum c_k w^{n-k}; Horner in w,
            // highest power of w first, i.e. k ascending.
            S acc = S(to_scalar<S>(c_[0]));
            for (int k = 1; k <= n; ++k)
                acc = acc * w + S(to_scalar<S>(c_[static_cast<std::size_t>(k)]));
            S z0n = S(1);
            for (int i = 0; i < n; ++i) z0n *= z0;
            return acc * z0n;
        }
        const S w = z0 / z1;
        S acc = S(to_scalar<S>(c_[static_cast<std::size_t>(n)]));
        for (int k = n - 1; k >= 0; --k)
            acc = acc * w + S(to_scalar<S>(c_[static_cast<std::size_t>(k)]));
        S z1n = S(1);
        for (int i = 0; i < n; ++i) z1n *= z1;
        return acc * z1n;
    }

    Form operator+(const Form& o) const {
        require_same_degree(o);
        Form r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
        return r;
    }

    Form operator-(const Form& o) const {
        require_same_degree(o);
        Form r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
        return r;
    }

    Form operator-() const {
        Form r = *this;
        for (T& c : r.c_) c = -c;
        return r;
    }

    Form operator*(const T& s) const {
        Form r = *this;
        for (T& c : r.c_) c *= s;
        return r;
    }

    // Product of forms; degrees add.
    Form operator*(const Form& o) const {
        std::vector<T> r(c_.size() + o.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (detail::coeff_is_zero(c_[i])) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j)
                r[i + j] += c_[i] * o.c_[j];
        }
        return Form(std::move(r));
    }

    Form pow(int e) const {
        if (e < 0) throw std::invalid_argument("negative form power");
        Form acc = Form(std::vector<T>{T(1)});
        Form base = *this;
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = (e >>= 1) ? base * base : base;
        }
        return acc;
    }

    // d/dz0 and d/dz1: degree drops by one (zero form of degree n-1 for
    // constants of positive degree; degree-0 input is rejected).
    Form derivative_z0() const {
        const int n = degree();
        if (n == 0) throw std::invalid_argument("derivative of a constant form");
        std::vector<T> r(static_cast<std::size_t>(n), T(0));
        for (int k = 1; k <= n; ++k)
            r[static_cast<std::size_t>(k - 1)] = T(k) * c_[static_cast<std::size_t>(k)];
        return Form(std::move(r));
    }

    Form derivative_z1() const {
        const int n = degree();
        if (n == 0) throw std::invalid_argument("derivative of a constant form");
        std::vector<T> r(static_cast<std::size_t>(n), T(0));
        for (int k = 0; k < n; ++k)
            r[static_cast<std::size_t>(k)] = T(n - k) * c_[static_cast<std::size_t>(k)];
        return Form(std::move(r));
    }

    bool operator==(const Form& o) const { return c_ == o.c_; }

private:
    template <typename S, typename U>
    static S to_scalar(const U& c) { return S(c); }
    template <typename S>
    static S to_scalar(const mpz_class& c) { return S(c.get_d()); }
    template <typename S>
    static S to_scalar(const mpq_class& c) { return S(c.get_d()); }

    void require_same_degree(const Form& o) const {
        if (c_.size() != o.c_.size())
            throw std::invalid_argument("form degree mismatch");
    }

    std::vector<T> c_;
};

using ComplexForm = Form<Complex>;
using RealForm = Form<double>;
using IntForm = Form<mpz_class>;
using RatForm = Form<mpq_class>;

inline ComplexForm conjugate_form(const ComplexForm& f) {
    std::vector<Complex> c;
    c.reserve(static_cast<std::size_t>(f.degree()) + 1);
    for (int k = 0; k <= f.degree(); ++k) c.push_back(std::conj(f.coeff(k)));
    return ComplexForm(std::move(c));
}

inline ComplexForm to_complex(const RealForm& f) {
    std::vector<Complex> c;
    for (int k = 0; k <= f.degree(); ++k) c.emplace_back(f.coeff(k), 0.0);
    return ComplexForm(std::move(c));
}

inline ComplexForm to_complex(const IntForm& f) {
    std::vector<Complex> c;
    for (int k = 0; k <= f.degree(); ++k) c.emplace_back(f.coeff(k).get_d(), 0.0);
    return ComplexForm(std::move(c));
}

inline RealForm to_real(const IntForm& f) {
    std::vector<double> c;
    for (int k = 0; k <= f.degree(); ++k) c.push_back(f.coeff(k).get_d());
    return RealForm(std::move(c));
}

// f -> f * conj(f), a real form of doubled degree.  The pointwise log-norm
// of the output at x equals log||f(x)|| + log||f(xbar)||.
inline RealForm realify(const ComplexForm& f) {
    if (f.is_zero()) throw std::invalid_argument("realify of the zero form");
    ComplexForm prod = f * conjugate_form(f);
    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(prod.degree()) + 1);
    for (int k = 0; k <= prod.degree(); ++k) {
        // imaginary parts vanish identically; truncate the fp residue
        c.push_back(prod.coeff(k).real());
    }
    return RealForm(std::move(c));
}

// Content (gcd of coefficients, nonnegative) of an integer form.
inline mpz_class content(const IntForm& f) {
    mpz_class g = 0;
    for (int k = 0; k <= f.degree(); ++k) {
        mpz_class a = abs(f.coeff(k));
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    }
    return g;
}

inline IntForm primitive_part(const IntForm& f) {
    mpz_class g = content(f);
    if (g == 0 || g == 1) return f;
    std::vector<mpz_class> c;
    for (int k = 0; k <= f.degree(); ++k) c.push_back(f.coeff(k) / g);
    return IntForm(std::move(c));
}

// Canonical sign: highest nonzero z0-power coefficient positive.
inline IntForm sign_normalized(const IntForm& f) {
    for (int k = f.degree(); k >= 0; --k) {
        if (f.coeff(k) != 0) return f.coeff(k) > 0 ? f : -f;
    }
    return f;
}

inline std::string to_string(const IntForm& f) {
    std::string s;
    const int n = f.degree();
    bool first = true;
    for (int k = n; k >= 0; --k) {
        const mpz_class& c = f.coeff(k);
        if (c == 0) continue;
        mpz_class a = abs(c);
        if (!first) s += (c > 0) ? " + " : " - ";
        else if (c < 0) s += "-";
        first = false;
        std::string mag = a.get_str();
        bool need_coeff = (a != 1) || (k == 0 && n - k == 0);
        if (need_coeff) s += mag;
        if (k > 0) {
            if (need_coeff) s += "*";
            s += "z0";
            if (k > 1) s += "^" + std::to_string(k);
        }
        if (n - k > 0) {
            if (need_coeff || k > 0) s += "*";
            s += "z1";
            if (n - k > 1) s += "^" + std::to_string(n - k);
        }
    }
    if (first) s = "0";
    return s;
}

} // namespace p1lab
