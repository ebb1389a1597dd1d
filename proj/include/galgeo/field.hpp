#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "galgeo/errors.hpp"

namespace galgeo {

inline bool is_prime_u32(u32 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

class Field;
using FieldPtr = std::shared_ptr<const Field>;

// q = p^h with p prime; rejects anything else.
inline std::pair<u32, u32> prime_power_decompose(u32 q) {
    if (q < 2) throw argument_error("not a prime power: " + std::to_string(q));
    u32 p = q;
    for (u32 d = 2; static_cast<std::uint64_t>(d) * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    u32 h = 0;
    u32 v = 1;
    while (v < q) {
        v *= p;
        ++h;
        if (v == q) return {p, h};
    }
    if (q == p) return {p, 1};
    throw argument_error("not a prime power: " + std::to_string(q));
}

namespace polyfn {
// Dense polynomials over a coefficient field, stored low degree first as
// element indices. Helpers are declared here and defined after Field.
std::vector<u32> trim(std::vector<u32> a);
int degree(const std::vector<u32>& a);
std::vector<u32> mul(const Field& K, const std::vector<u32>& a, const std::vector<u32>& b);
std::vector<u32> rem(const Field& K, std::vector<u32> a, const std::vector<u32>& f);
std::vector<u32> gcd(const Field& K, std::vector<u32> a, std::vector<u32> b);
std::vector<u32> pow_mod(const Field& K, std::vector<u32> base, u64 e, const std::vector<u32>& f);
bool irreducible(const Field& K, const std::vector<u32>& f);
}  // namespace polyfn

// A finite field, either the prime field GF(p) or an extension of another
// Field by a monic irreducible modulus. Elements are integer indices
// 0..size()-1; for an extension of base size B with degree d, the index is
// sum(digit_i * B^i) where the digits are the coordinates with respect to the
// basis (1, x, ..., x^{d-1}) of the quotient ring. All state is immutable
// after construction, so shared concurrent reads are safe.
class Field {
public:
    static constexpr u64 kDefaultMaxElements = 1u << 20;

    static FieldPtr prime_field(u32 p) {
        if (!is_prime_u32(p)) throw argument_error(std::to_string(p) + " is not prime");
        return FieldPtr(new Field(p));
    }

    // Extension with the lexicographically least monic irreducible modulus of
    // the given degree over `base` (coefficients compared low degree first).
    static FieldPtr extension(FieldPtr base, u32 degree, u64 max_elements = kDefaultMaxElements) {
        return FieldPtr(new Field(std::move(base), degree, max_elements));
    }

    static FieldPtr extension_with_modulus(FieldPtr base, std::vector<u32> modulus,
                                           u64 max_elements = kDefaultMaxElements) {
        return FieldPtr(new Field(std::move(base), std::move(modulus), max_elements));
    }

    u32 size() const { return size_; }
    u32 characteristic() const { return p_; }
    u32 degree_over_base() const { return deg_base_; }
    u32 degree_over_prime() const { return deg_prime_; }
    const Field* base() const { return base_.get(); }
    bool is_prime_field() const { return base_ == nullptr; }
    // Monic modulus over the base field, low degree first; empty for GF(p).
    const std::vector<u32>& modulus() const { return modulus_; }
    u32 generator() const { return gen_; }

    // Structural equality: same construction chain, element indices agree.
    bool same_as(const Field& o) const {
        if (this == &o) return true;
        if (size_ != o.size_ || p_ != o.p_ || modulus_ != o.modulus_) return false;
        if (!base_) return !o.base_;
        return o.base_ && base_->same_as(*o.base_);
    }

    u32 add(u32 a, u32 b) const {
        if (!add_.empty()) return add_[static_cast<std::size_t>(a) * size_ + b];
        if (!base_) return a + b >= p_ ? a + b - p_ : a + b;
        return digitwise_add(a, b);
    }

    u32 neg(u32 a) const { return neg_[a]; }
    u32 sub(u32 a, u32 b) const { return add(a, neg_[b]); }

    u32 mul(u32 a, u32 b) const {
        if (a == 0 || b == 0) return 0;
        u32 s = log_[a] + log_[b];
        if (s >= size_ - 1) s -= size_ - 1;
        return exp_[s];
    }

    u32 inv(u32 a) const {
        if (a == 0) throw argument_error("inverse of zero");
        u32 e = size_ - 1 - log_[a];
        if (e == size_ - 1) e = 0;
        return exp_[e];
    }

    u32 div(u32 a, u32 b) const {
        if (b == 0) throw argument_error("division by zero");
        return mul(a, inv(b));
    }

    u32 pow(u32 a, u64 e) const {
        if (a == 0) return e == 0 ? 1 : 0;
        u64 r = (static_cast<u64>(log_[a]) * (e % (size_ - 1))) % (size_ - 1);
        return exp_[r];
    }

    // Coordinates of `a` over the base field, length degree_over_base().
    void digits(u32 a, std::span<u32> out) const {
        u32 b = base_size();
        for (u32 i = 0; i < deg_base_; ++i) {
            out[i] = a % b;
            a /= b;
        }
    }

    std::vector<u32> digits(u32 a) const {
        std::vector<u32> out(deg_base_);
        digits(a, out);
        return out;
    }

    u32 from_digits(std::span<const u32> d) const {
        u32 b = base_size();
        u32 a = 0;
        for (std::size_t i = d.size(); i-- > 0;) {
            if (d[i] >= b) throw argument_error("digit out of range");
            a = a * b + d[i];
        }
        return a;
    }

    // Coefficients over GF(p), flattening the construction chain.
    std::vector<u32> prime_coeffs(u32 a) const {
        std::vector<u32> out;
        prime_coeffs_rec(a, out);
        return out;
    }

private:
    explicit Field(u32 p) : p_(p), size_(p), deg_base_(1), deg_prime_(1) { init_tables(); }

    Field(FieldPtr base, u32 degree, u64 max_elements) : base_(std::move(base)) {
        if (degree == 0) throw argument_error("extension degree must be positive");
        init_extension_shape(degree, max_elements);
        modulus_ = least_irreducible(*base_, degree);
        init_tables();
    }

    Field(FieldPtr base, std::vector<u32> modulus, u64 max_elements) : base_(std::move(base)) {
        modulus = polyfn::trim(std::move(modulus));
        int d = polyfn::degree(modulus);
        if (d < 1) throw argument_error("modulus must have positive degree");
        if (modulus.back() != 1) throw argument_error("modulus must be monic");
        for (u32 c : modulus)
            if (c >= base_->size()) throw argument_error("modulus coefficient out of range");
        if (!polyfn::irreducible(*base_, modulus))
            throw argument_error("modulus is reducible over its base field");
        init_extension_shape(static_cast<u32>(d), max_elements);
        modulus_ = std::move(modulus);
        init_tables();
    }

    void init_extension_shape(u32 degree, u64 max_elements) {
        p_ = base_->p_;
        deg_base_ = degree;
        deg_prime_ = base_->deg_prime_ * degree;
        u64 n = 1;
        for (u32 i = 0; i < degree; ++i) {
            n *= base_->size_;
            if (n > max_elements)
                throw bound_error("field too large for table-based arithmetic", max_elements, n);
        }
        size_ = static_cast<u32>(n);
    }

    u32 base_size() const { return base_ ? base_->size_ : size_; }

    void prime_coeffs_rec(u32 a, std::vector<u32>& out) const {
        if (!base_) {
            out.push_back(a);
            return;
        }
        u32 b = base_->size_;
        for (u32 i = 0; i < deg_base_; ++i) {
            base_->prime_coeffs_rec(a % b, out);
            a /= b;
        }
    }

    u32 digitwise_add(u32 a, u32 b) const {
        u32 bs = base_->size_;
        u32 out = 0;
        u32 mult = 1;
        for (u32 i = 0; i < deg_base_; ++i) {
            out += base_->add(a % bs, b % bs) * mult;
            a /= bs;
            b /= bs;
            mult *= bs;
        }
        return out;
    }

    // Table-free multiplication used while the tables are being built.
    u32 raw_mul(u32 a, u32 b) const;

    u32 raw_pow(u32 a, u64 e) const {
        u32 r = 1;
        while (e) {
            if (e & 1) r = raw_mul(r, a);
            a = raw_mul(a, a);
            e >>= 1;
        }
        return r;
    }

    static std::vector<u32> least_irreducible(const Field& K, u32 degree);

    void init_tables() {
        neg_.resize(size_);
        if (!base_) {
            for (u32 a = 0; a < size_; ++a) neg_[a] = a == 0 ? 0 : p_ - a;
        } else {
            u32 bs = base_->size_;
            for (u32 a = 0; a < size_; ++a) {
                u32 x = a, out = 0, mult = 1;
                for (u32 i = 0; i < deg_base_; ++i) {
                    out += base_->neg(x % bs) * mult;
                    x /= bs;
                    mult *= bs;
                }
                neg_[a] = out;
            }
        }

        gen_ = find_generator();
        exp_.assign(size_ - 1, 0);
        log_.assign(size_, 0);
        u32 cur = 1;
        for (u32 i = 0; i + 1 < size_; ++i) {
            exp_[i] = cur;
            log_[cur] = i;
            cur = raw_mul(cur, gen_);
        }
        if (cur != 1) throw internal_error("generator order mismatch");

        if (base_ && size_ <= kAddTableMax) {
            add_.resize(static_cast<std::size_t>(size_) * size_);
            for (u32 a = 0; a < size_; ++a)
                for (u32 b = 0; b <= a; ++b) {
                    u32 s = digitwise_add(a, b);
                    add_[static_cast<std::size_t>(a) * size_ + b] = s;
                    add_[static_cast<std::size_t>(b) * size_ + a] = s;
                }
        }
    }

    u32 find_generator() const {
        if (size_ == 2) return 1;
        std::vector<u32> prime_factors;
        u32 m = size_ - 1;
        for (u32 d = 2; static_cast<u64>(d) * d <= m; ++d)
            if (m % d == 0) {
                prime_factors.push_back(d);
                while (m % d == 0) m /= d;
            }
        if (m > 1) prime_factors.push_back(m);

        for (u32 g = 2; g < size_; ++g) {
            bool ok = true;
            for (u32 r : prime_factors)
                if (raw_pow(g, (size_ - 1) / r) == 1) {
                    ok = false;
                    break;
                }
            if (ok) return g;
        }
        throw internal_error("no multiplicative generator found");
    }

    static constexpr u32 kAddTableMax = 1024;

    FieldPtr base_;
    u32 p_ = 0;
    u32 size_ = 0;
    u32 deg_base_ = 0;
    u32 deg_prime_ = 0;
    std::vector<u32> modulus_;
    u32 gen_ = 0;
    std::vector<u32> exp_, log_, neg_, add_;
};

namespace polyfn {

inline std::vector<u32> trim(std::vector<u32> a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline int degree(const std::vector<u32>& a) {
    int d = static_cast<int>(a.size()) - 1;
    while (d >= 0 && a[static_cast<std::size_t>(d)] == 0) --d;
    return d;
}

inline std::vector<u32> mul(const Field& K, const std::vector<u32>& a, const std::vector<u32>& b) {
    int da = degree(a), db = degree(b);
    if (da < 0 || db < 0) return {};
    std::vector<u32> c(static_cast<std::size_t>(da + db + 1), 0);
    for (int i = 0; i <= da; ++i) {
        if (a[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j <= db; ++j)
            c[static_cast<std::size_t>(i + j)] =
                K.add(c[static_cast<std::size_t>(i + j)],
                      K.mul(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]));
    }
    return c;
}

inline std::vector<u32> rem(const Field& K, std::vector<u32> a, const std::vector<u32>& f) {
    int df = degree(f);
    if (df < 0) throw argument_error("division by zero polynomial");
    u32 lead_inv = K.inv(f[static_cast<std::size_t>(df)]);
    int da = degree(a);
    while (da >= df) {
        u32 c = K.mul(a[static_cast<std::size_t>(da)], lead_inv);
        if (c != 0)
            for (int j = 0; j <= df; ++j)
                a[static_cast<std::size_t>(da - df + j)] =
                    K.sub(a[static_cast<std::size_t>(da - df + j)],
                          K.mul(c, f[static_cast<std::size_t>(j)]));
        --da;
        while (da >= 0 && a[static_cast<std::size_t>(da)] == 0) --da;
    }
    a.resize(static_cast<std::size_t>(da + 1));
    return a;
}

inline std::vector<u32> gcd(const Field& K, std::vector<u32> a, std::vector<u32> b) {
    a = trim(std::move(a));
    b = trim(std::move(b));
    while (!b.empty()) {
        std::vector<u32> r = rem(K, a, b);
        a = std::move(b);
        b = trim(std::move(r));
    }
    if (!a.empty()) {
        u32 li = K.inv(a.back());
        for (u32& c : a) c = K.mul(c, li);
    }
    return a;
}

inline std::vector<u32> pow_mod(const Field& K, std::vector<u32> base, u64 e,
                                const std::vector<u32>& f) {
    std::vector<u32> r{1};
    base = rem(K, std::move(base), f);
    while (e) {
        if (e & 1) r = rem(K, mul(K, r, base), f);
        base = rem(K, mul(K, base, base), f);
        e >>= 1;
    }
    return r;
}

// Rabin's test: monic f of degree d over GF(Q) is irreducible iff
// x^(Q^d) = x (mod f) and gcd(x^(Q^(d/r)) - x, f) = 1 for every prime r | d.
inline bool irreducible(const Field& K, const std::vector<u32>& f) {
    int d = degree(f);
    if (d < 1) return false;
    if (d == 1) return true;

    u64 Q = K.size();
    std::vector<u32> x{0, 1};

    std::vector<int> prime_divs;
    int m = d;
    for (int r = 2; r * r <= m; ++r)
        if (m % r == 0) {
            prime_divs.push_back(r);
            while (m % r == 0) m /= r;
        }
    if (m > 1) prime_divs.push_back(m);

    // frob[i] = x^(Q^i) mod f, built by iterating y -> y^Q.
    std::vector<u32> y = x;
    for (int i = 1; i <= d; ++i) {
        y = pow_mod(K, y, Q, f);
        if (i < d) {
            bool needed = false;
            for (int r : prime_divs) needed |= (i == d / r);
            if (needed) {
                std::vector<u32> diff = y;
                if (diff.size() < 2) diff.resize(2, 0);
                diff[1] = K.sub(diff[1], 1);
                std::vector<u32> g = gcd(K, trim(std::move(diff)), f);
                if (degree(g) != 0) return false;
            }
        }
    }
    std::vector<u32> diff = y;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = K.sub(diff[1], 1);
    return degree(trim(std::move(diff))) < 0;
}

}  // namespace polyfn

inline u32 Field::raw_mul(u32 a, u32 b) const {
    if (!base_) return static_cast<u32>(static_cast<u64>(a) * b % p_);
    std::vector<u32> pa = digits(a), pb = digits(b);
    std::vector<u32> prod = polyfn::rem(*base_, polyfn::mul(*base_, pa, pb), modulus_);
    prod.resize(deg_base_, 0);
    return from_digits(prod);
}

// Lexicographically least monic irreducible: coefficient tuples
// (c_0, ..., c_{d-1}) are scanned in lexicographic order, c_0 varying slowest.
inline std::vector<u32> Field::least_irreducible(const Field& K, u32 degree) {
    if (degree == 1) return {0, 1};  // x
    u64 total = 1;
    for (u32 i = 0; i < degree; ++i) total *= K.size();
    std::vector<u32> f(degree + 1, 0);
    f[degree] = 1;
    for (u64 m = 0; m < total; ++m) {
        // m's most significant digit is c_0, so increasing m is lex order.
        u64 x = m;
        for (u32 i = degree; i-- > 0;) {
            f[i] = static_cast<u32>(x % K.size());
            x /= K.size();
        }
        if (polyfn::irreducible(K, f)) return f;
    }
    throw internal_error("no irreducible polynomial found");
}

struct TowerDescriptor {
    u32 p = 0, h = 0, t = 0;
    std::vector<u32> modulus_mid;  // degree-h modulus over GF(p), low degree first
    std::vector<u32> modulus_top;  // degree-t modulus over GF(q), low degree first
};

// The chain GF(p) < GF(q) < GF(q^t) with q = p^h. The top field's digit
// representation over the mid field realizes the basis (1, w, ..., w^{t-1})
// where w is the class of x modulo the top modulus: decompose/compose are
// plain base-q digit maps on element indices.
class FieldTower {
public:
    static FieldTower make(u32 p, u32 h, u32 t, u64 max_elements = Field::kDefaultMaxElements) {
        if (h == 0 || t == 0) throw argument_error("tower degrees must be positive");
        FieldTower tw;
        tw.p_ = p;
        tw.h_ = h;
        tw.t_ = t;
        tw.prime_ = Field::prime_field(p);
        tw.mid_ = Field::extension(tw.prime_, h, max_elements);
        tw.top_ = Field::extension(tw.mid_, t, max_elements);
        return tw;
    }

    static FieldTower from_descriptor(const TowerDescriptor& d,
                                      u64 max_elements = Field::kDefaultMaxElements) {
        if (d.h == 0 || d.t == 0) throw argument_error("tower degrees must be positive");
        FieldTower tw;
        tw.p_ = d.p;
        tw.h_ = d.h;
        tw.t_ = d.t;
        tw.prime_ = Field::prime_field(d.p);
        tw.mid_ = Field::extension_with_modulus(tw.prime_, d.modulus_mid, max_elements);
        tw.top_ = Field::extension_with_modulus(tw.mid_, d.modulus_top, max_elements);
        if (tw.mid_->degree_over_base() != d.h || tw.top_->degree_over_base() != d.t)
            throw argument_error("descriptor moduli do not match the stated degrees");
        return tw;
    }

    u32 p() const { return p_; }
    u32 h() const { return h_; }
    u32 t() const { return t_; }
    u32 q() const { return mid_->size(); }
    u32 top_order() const { return top_->size(); }

    const Field& prime() const { return *prime_; }
    const Field& mid() const { return *mid_; }
    const Field& top() const { return *top_; }
    FieldPtr prime_ptr() const { return prime_; }
    FieldPtr mid_ptr() const { return mid_; }
    FieldPtr top_ptr() const { return top_; }

    // Index of the basis element w (valid for t >= 2).
    u32 omega() const {
        if (t_ < 2) throw argument_error("omega undefined for a degree-1 top extension");
        return q();
    }

    // As omega(), degenerating to 1 when the top extension has degree 1.
    u32 omega_or_one() const { return t_ < 2 ? 1 : q(); }

    std::vector<u32> decompose(u32 x) const { return top_->digits(x); }
    u32 compose(std::span<const u32> coords) const { return top_->from_digits(coords); }

    // GF(q) -> GF(q^t): the identity on element indices below q.
    u32 embed(u32 mid_elem) const {
        if (mid_elem >= q()) throw argument_error("element is not in the mid field");
        return mid_elem;
    }

    TowerDescriptor descriptor() const {
        return TowerDescriptor{p_, h_, t_, mid_->modulus(), top_->modulus()};
    }

private:
    u32 p_ = 0, h_ = 0, t_ = 0;
    FieldPtr prime_, mid_, top_;
};

// A field element paired with its field, for call sites where mixing levels
// must be caught. Hot paths use raw indices and the Field API directly.
class FieldElement {
public:
    FieldElement(FieldPtr f, u32 v) : f_(std::move(f)), v_(v) {
        if (v_ >= f_->size()) throw argument_error("element index out of range");
    }

    u32 value() const { return v_; }
    const Field& field() const { return *f_; }
    std::vector<u32> coeffs_over_prime() const { return f_->prime_coeffs(v_); }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return {a.f_, a.f_->add(a.v_, b.v_)};
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return {a.f_, a.f_->sub(a.v_, b.v_)};
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return {a.f_, a.f_->mul(a.v_, b.v_)};
    }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return {a.f_, a.f_->div(a.v_, b.v_)};
    }
    FieldElement inverse() const { return {f_, f_->inv(v_)}; }
    FieldElement pow(u64 e) const { return {f_, f_->pow(v_, e)}; }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.f_->same_as(*b.f_) && a.v_ == b.v_;
    }

private:
    void check(const FieldElement& o) const {
        if (!f_->same_as(*o.f_))
            throw argument_error("elements belong to different fields; embed explicitly");
    }

    FieldPtr f_;
    u32 v_;
};

}  // namespace galgeo
