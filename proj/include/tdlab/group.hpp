#pragma once

// Finite abelian groups Z_{n1} x ... x Z_{nk}, real functions on them, and the
// symmetric Fourier transform / convolution used throughout the library.
//
// Elements are enumerated in mixed-radix order with the first factor most
// significant: (x1, ..., xk) <-> ((x1 * n2 + x2) * n3 + x3) ...
// The dual group is identified with the same index space through the pairing
// gamma_t(x) = exp(2 pi i sum_j t_j x_j / n_j).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tdlab {

/// Tolerance for every exact-equality predicate on floating values.
inline constexpr double kTolerance = 1e-9;

class FiniteAbelianGroup {
public:
    FiniteAbelianGroup() : FiniteAbelianGroup(std::vector<int>{1}) {}

    explicit FiniteAbelianGroup(std::vector<int> factors)
    {
        if (factors.empty()) {
            throw std::invalid_argument("group needs at least one cyclic factor");
        }
        auto impl = std::make_shared<Impl>();
        impl->factors = std::move(factors);
        std::size_t order = 1;
        std::int64_t lcm = 1;
        for (int n : impl->factors) {
            if (n < 1) {
                throw std::invalid_argument("cyclic factor orders must be >= 1");
            }
            if (order > (std::size_t{1} << 40) / static_cast<std::size_t>(n)) {
                throw std::invalid_argument("group order too large");
            }
            order *= static_cast<std::size_t>(n);
            lcm = std::lcm(lcm, static_cast<std::int64_t>(n));
        }
        impl->order = order;
        impl->lcm = lcm;
        impl->strides.resize(impl->factors.size());
        std::size_t stride = 1;
        for (std::size_t j = impl->factors.size(); j-- > 0;) {
            impl->strides[j] = stride;
            stride *= static_cast<std::size_t>(impl->factors[j]);
        }
        impl->phase_weight.resize(impl->factors.size());
        for (std::size_t j = 0; j < impl->factors.size(); ++j) {
            impl->phase_weight[j] = lcm / impl->factors[j];
        }
        impl->unit_roots.resize(static_cast<std::size_t>(lcm));
        for (std::int64_t p = 0; p < lcm; ++p) {
            // Reduce to the first octant-free form so that exact values (1, i, -1, -i)
            // come out exactly.
            const std::int64_t g = std::gcd(p, lcm);
            const std::int64_t num = p / g;
            const std::int64_t den = lcm / g;
            std::complex<double> z;
            if (num == 0) {
                z = {1.0, 0.0};
            } else if (den == 2) {
                z = {-1.0, 0.0};
            } else if (den == 4) {
                z = num == 1 ? std::complex<double>{0.0, 1.0} : std::complex<double>{0.0, -1.0};
            } else {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
                z = {std::cos(angle), std::sin(angle)};
            }
            impl->unit_roots[static_cast<std::size_t>(p)] = z;
        }
        impl_ = std::move(impl);
    }

    /// Parses literals such as "Z4" or "Z2xZ2xZ3".
    static FiniteAbelianGroup parse(std::string_view literal)
    {
        std::vector<int> factors;
        std::size_t pos = 0;
        while (pos < literal.size()) {
            if (literal[pos] != 'Z' && literal[pos] != 'z') {
                throw std::invalid_argument("bad group literal '" + std::string(literal) + "'");
            }
            ++pos;
            std::size_t end = pos;
            while (end < literal.size() && literal[end] >= '0' && literal[end] <= '9') {
                ++end;
            }
            if (end == pos || end - pos > 6) {
                throw std::invalid_argument("bad group literal '" + std::string(literal) + "'");
            }
            factors.push_back(std::stoi(std::string(literal.substr(pos, end - pos))));
            pos = end;
            if (pos < literal.size()) {
                if (literal[pos] != 'x' && literal[pos] != 'X') {
                    throw std::invalid_argument("bad group literal '" + std::string(literal) + "'");
                }
                ++pos;
                if (pos == literal.size()) {
                    throw std::invalid_argument("bad group literal '" + std::string(literal) + "'");
                }
            }
        }
        if (factors.empty()) {
            throw std::invalid_argument("empty group literal");
        }
        return FiniteAbelianGroup(std::move(factors));
    }

    std::string literal() const
    {
        std::string out;
        for (std::size_t j = 0; j < impl_->factors.size(); ++j) {
            if (j > 0) {
                out += 'x';
            }
            out += 'Z' + std::to_string(impl_->factors[j]);
        }
        return out;
    }

    const std::vector<int>& factors() const { return impl_->factors; }
    std::size_t rank() const { return impl_->factors.size(); }
    std::size_t order() const { return impl_->order; }

    bool operator==(const FiniteAbelianGroup& other) const
    {
        return impl_ == other.impl_ || impl_->factors == other.impl_->factors;
    }

    void check_index(std::size_t x) const
    {
        if (x >= impl_->order) {
            throw std::out_of_range("element index " + std::to_string(x) + " out of range for " + literal());
        }
    }

    std::vector<int> coords(std::size_t x) const
    {
        check_index(x);
        std::vector<int> c(rank());
        for (std::size_t j = 0; j < rank(); ++j) {
            c[j] = static_cast<int>((x / impl_->strides[j]) % static_cast<std::size_t>(impl_->factors[j]));
        }
        return c;
    }

    /// Coordinates are reduced modulo the factor orders, so negative offsets are fine.
    std::size_t index(std::span<const int> c) const
    {
        if (c.size() != rank()) {
            throw std::invalid_argument("coordinate tuple has wrong length");
        }
        std::size_t x = 0;
        for (std::size_t j = 0; j < rank(); ++j) {
            const int n = impl_->factors[j];
            const int r = ((c[j] % n) + n) % n;
            x += static_cast<std::size_t>(r) * impl_->strides[j];
        }
        return x;
    }

    std::size_t add(std::size_t a, std::size_t b) const
    {
        std::size_t out = 0;
        for (std::size_t j = 0; j < rank(); ++j) {
            const auto n = static_cast<std::size_t>(impl_->factors[j]);
            const std::size_t s = impl_->strides[j];
            out += (((a / s) % n + (b / s) % n) % n) * s;
        }
        return out;
    }

    std::size_t negate(std::size_t a) const
    {
        std::size_t out = 0;
        for (std::size_t j = 0; j < rank(); ++j) {
            const auto n = static_cast<std::size_t>(impl_->factors[j]);
            const std::size_t s = impl_->strides[j];
            out += ((n - (a / s) % n) % n) * s;
        }
        return out;
    }

    std::size_t subtract(std::size_t a, std::size_t b) const { return add(a, negate(b)); }

    /// Integer p in [0, L) with gamma_t(x) = exp(2 pi i p / L), L = lcm of the factors.
    std::int64_t phase(std::size_t t, std::size_t x) const
    {
        std::int64_t p = 0;
        for (std::size_t j = 0; j < rank(); ++j) {
            const auto n = static_cast<std::size_t>(impl_->factors[j]);
            const std::size_t s = impl_->strides[j];
            const auto tj = static_cast<std::int64_t>((t / s) % n);
            const auto xj = static_cast<std::int64_t>((x / s) % n);
            p = (p + ((tj * xj) % static_cast<std::int64_t>(n)) * impl_->phase_weight[j]) % impl_->lcm;
        }
        return p;
    }

    std::int64_t phase_modulus() const { return impl_->lcm; }

    /// exp(2 pi i p / L) for an arbitrary integer phase p.
    std::complex<double> root_of_unity(std::int64_t p) const
    {
        const std::int64_t L = impl_->lcm;
        return impl_->unit_roots[static_cast<std::size_t>(((p % L) + L) % L)];
    }

    std::size_t stride(std::size_t j) const { return impl_->strides[j]; }

private:
    struct Impl {
        std::vector<int> factors;
        std::vector<std::size_t> strides;
        std::vector<std::int64_t> phase_weight;
        std::vector<std::complex<double>> unit_roots;
        std::size_t order = 1;
        std::int64_t lcm = 1;
    };
    std::shared_ptr<const Impl> impl_;
};

/// gamma_t(x) as a unit complex number.
inline std::complex<double> character_pairing(const FiniteAbelianGroup& g, std::size_t t, std::size_t x)
{
    g.check_index(t);
    g.check_index(x);
    return g.root_of_unity(g.phase(t, x));
}

class Subset {
public:
    Subset() = default;

    explicit Subset(FiniteAbelianGroup g) : group_(std::move(g)), member_(group_.order(), 0) {}

    Subset(FiniteAbelianGroup g, std::span<const std::size_t> elements) : Subset(std::move(g))
    {
        for (std::size_t x : elements) {
            group_.check_index(x);
            member_[x] = 1;
        }
    }

    Subset(FiniteAbelianGroup g, std::initializer_list<std::size_t> elements)
        : Subset(std::move(g), std::span<const std::size_t>(elements.begin(), elements.size()))
    {
    }

    static Subset whole(const FiniteAbelianGroup& g)
    {
        Subset s(g);
        std::fill(s.member_.begin(), s.member_.end(), 1);
        return s;
    }

    static Subset from_mask(const FiniteAbelianGroup& g, std::uint64_t mask)
    {
        if (g.order() > 64) {
            throw std::invalid_argument("bit masks only address groups of order <= 64");
        }
        Subset s(g);
        for (std::size_t x = 0; x < g.order(); ++x) {
            s.member_[x] = static_cast<char>((mask >> x) & 1U);
        }
        return s;
    }

    std::uint64_t mask() const
    {
        if (group_.order() > 64) {
            throw std::invalid_argument("bit masks only address groups of order <= 64");
        }
        std::uint64_t m = 0;
        for (std::size_t x = 0; x < member_.size(); ++x) {
            if (member_[x]) {
                m |= std::uint64_t{1} << x;
            }
        }
        return m;
    }

    const FiniteAbelianGroup& group() const { return group_; }
    bool contains(std::size_t x) const { return member_.at(x) != 0; }
    void insert(std::size_t x) { member_.at(x) = 1; }

    std::size_t size() const { return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), 1)); }
    bool empty() const { return size() == 0; }

    std::vector<std::size_t> elements() const
    {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < member_.size(); ++x) {
            if (member_[x]) {
                out.push_back(x);
            }
        }
        return out;
    }

    Subset complement() const
    {
        Subset s(group_);
        for (std::size_t x = 0; x < member_.size(); ++x) {
            s.member_[x] = static_cast<char>(!member_[x]);
        }
        return s;
    }

    Subset negated() const
    {
        Subset s(group_);
        for (std::size_t x = 0; x < member_.size(); ++x) {
            if (member_[x]) {
                s.member_[group_.negate(x)] = 1;
            }
        }
        return s;
    }

    Subset translated(std::size_t t) const
    {
        Subset s(group_);
        for (std::size_t x = 0; x < member_.size(); ++x) {
            if (member_[x]) {
                s.member_[group_.add(x, t)] = 1;
            }
        }
        return s;
    }

    bool is_symmetric() const
    {
        if (member_.empty() || !member_[0]) {
            return false;
        }
        for (std::size_t x = 0; x < member_.size(); ++x) {
            if (member_[x] != member_[group_.negate(x)]) {
                return false;
            }
        }
        return true;
    }

    bool is_subset_of(const Subset& other) const
    {
        for (std::size_t x = 0; x < member_.size(); ++x) {
            if (member_[x] && !other.member_.at(x)) {
                return false;
            }
        }
        return true;
    }

    bool operator==(const Subset& other) const { return group_ == other.group_ && member_ == other.member_; }

private:
    FiniteAbelianGroup group_;
    std::vector<char> member_;
};

/// A subset U with 0 in U = -U.
class SymmetricSet {
public:
    explicit SymmetricSet(Subset s) : set_(std::move(s))
    {
        if (!set_.is_symmetric()) {
            throw std::invalid_argument(set_.contains(0) ? "set not symmetric" : "set does not contain 0");
        }
    }

    SymmetricSet(const FiniteAbelianGroup& g, std::span<const std::size_t> elements) : SymmetricSet(Subset(g, elements)) {}
    SymmetricSet(const FiniteAbelianGroup& g, std::initializer_list<std::size_t> elements) : SymmetricSet(Subset(g, elements)) {}

    static SymmetricSet whole(const FiniteAbelianGroup& g) { return SymmetricSet(Subset::whole(g)); }
    static SymmetricSet origin(const FiniteAbelianGroup& g) { return SymmetricSet(g, {0}); }

    const Subset& subset() const { return set_; }
    const FiniteAbelianGroup& group() const { return set_.group(); }
    bool contains(std::size_t x) const { return set_.contains(x); }
    std::size_t size() const { return set_.size(); }
    std::vector<std::size_t> elements() const { return set_.elements(); }
    bool is_whole() const { return size() == group().order(); }
    bool operator==(const SymmetricSet& other) const { return set_ == other.set_; }

private:
    Subset set_;
};

/// A real-valued function on a group (also used for spectra on the dual group).
class GroupFunction {
public:
    GroupFunction() = default;

    explicit GroupFunction(FiniteAbelianGroup g) : group_(std::move(g)), values_(group_.order(), 0.0) {}

    GroupFunction(FiniteAbelianGroup g, std::vector<double> values) : group_(std::move(g)), values_(std::move(values))
    {
        if (values_.size() != group_.order()) {
            throw std::invalid_argument("function length does not match group order");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("function values must be finite");
            }
        }
    }

    static GroupFunction delta0(const FiniteAbelianGroup& g)
    {
        GroupFunction f(g);
        f.values_[0] = 1.0;
        return f;
    }

    static GroupFunction constant(const FiniteAbelianGroup& g, double c)
    {
        return GroupFunction(g, std::vector<double>(g.order(), c));
    }

    static GroupFunction indicator(const Subset& a)
    {
        GroupFunction f(a.group());
        for (std::size_t x : a.elements()) {
            f.values_[x] = 1.0;
        }
        return f;
    }

    const FiniteAbelianGroup& group() const { return group_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t x) const { return values_[x]; }
    double& operator[](std::size_t x) { return values_[x]; }
    const std::vector<double>& values() const { return values_; }

    double sup_norm() const
    {
        double m = 0.0;
        for (double v : values_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    double l2_norm() const
    {
        double s = 0.0;
        for (double v : values_) {
            s += v * v;
        }
        return std::sqrt(s);
    }

    double sum() const
    {
        long double s = 0.0L;
        for (double v : values_) {
            s += v;
        }
        return static_cast<double>(s);
    }

    bool is_even(double tol = kTolerance) const
    {
        const double scale = std::max(1.0, sup_norm());
        for (std::size_t x = 0; x < values_.size(); ++x) {
            if (std::abs(values_[x] - values_[group_.negate(x)]) > tol * scale) {
                return false;
            }
        }
        return true;
    }

    bool is_nonnegative(double tol = kTolerance) const
    {
        return std::all_of(values_.begin(), values_.end(), [tol](double v) { return v >= -tol; });
    }

    GroupFunction operator*(double s) const
    {
        GroupFunction out = *this;
        for (double& v : out.values_) {
            v *= s;
        }
        return out;
    }

    GroupFunction operator+(const GroupFunction& other) const
    {
        require_same_group(other);
        GroupFunction out = *this;
        for (std::size_t x = 0; x < values_.size(); ++x) {
            out.values_[x] += other.values_[x];
        }
        return out;
    }

    GroupFunction operator-(const GroupFunction& other) const { return *this + other * -1.0; }

    /// Pointwise product.
    GroupFunction pointwise(const GroupFunction& other) const
    {
        require_same_group(other);
        GroupFunction out = *this;
        for (std::size_t x = 0; x < values_.size(); ++x) {
            out.values_[x] *= other.values_[x];
        }
        return out;
    }

    void require_same_group(const GroupFunction& other) const
    {
        if (!(group_ == other.group_)) {
            throw std::invalid_argument("functions live on different groups");
        }
    }

private:
    FiniteAbelianGroup group_;
    std::vector<double> values_;
};

/// m(A) = |G|^{-1/2} |A|.
inline double measure(const Subset& a)
{
    return static_cast<double>(a.size()) / std::sqrt(static_cast<double>(a.group().order()));
}

namespace detail {

/// Reference transform: dense character sum, hat f(t) = |G|^{-1/2} sum_x f(x) gamma_t(-x).
inline std::vector<std::complex<double>> fourier_dense(const FiniteAbelianGroup& g, std::span<const std::complex<double>> f)
{
    const std::size_t n = g.order();
    if (f.size() != n) {
        throw std::invalid_argument("function length does not match group order");
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<std::complex<double>> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        std::complex<double> acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            acc += f[x] * g.root_of_unity(-g.phase(t, x));
        }
        out[t] = acc * norm;
    }
    return out;
}

/// Row-column transform: one short DFT along each cyclic factor.
inline std::vector<std::complex<double>> fourier_fast(const FiniteAbelianGroup& g, std::span<const std::complex<double>> f)
{
    const std::size_t n = g.order();
    if (f.size() != n) {
        throw std::invalid_argument("function length does not match group order");
    }
    std::vector<std::complex<double>> cur(f.begin(), f.end());
    std::vector<std::complex<double>> line;
    std::vector<std::complex<double>> res;
    const std::int64_t L = g.phase_modulus();
    for (std::size_t j = 0; j < g.rank(); ++j) {
        const auto nj = static_cast<std::size_t>(g.factors()[j]);
        if (nj == 1) {
            continue;
        }
        const std::size_t s = g.stride(j);
        const std::int64_t w = L / static_cast<std::int64_t>(nj);
        line.resize(nj);
        res.resize(nj);
        for (std::size_t base = 0; base < n; ++base) {
            if ((base / s) % nj != 0) {
                continue;
            }
            for (std::size_t k = 0; k < nj; ++k) {
                line[k] = cur[base + k * s];
            }
            for (std::size_t t = 0; t < nj; ++t) {
                std::complex<double> acc = 0.0;
                for (std::size_t k = 0; k < nj; ++k) {
                    const auto p = static_cast<std::int64_t>((t * k) % nj) * w;
                    acc += line[k] * g.root_of_unity(-p);
                }
                res[t] = acc;
            }
            for (std::size_t t = 0; t < nj; ++t) {
                cur[base + t * s] = res[t];
            }
        }
    }
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : cur) {
        v *= norm;
    }
    return cur;
}

inline std::vector<std::complex<double>> fourier_complex(const FiniteAbelianGroup& g, std::span<const double> f)
{
    std::vector<std::complex<double>> z(f.begin(), f.end());
    return fourier_fast(g, z);
}

} // namespace detail

/// Fourier transform of an even real function; the result is real and even.
inline GroupFunction fourier(const GroupFunction& f)
{
    if (!f.is_even()) {
        throw std::invalid_argument("fourier: input function is not even");
    }
    const auto z = detail::fourier_complex(f.group(), f.values());
    std::vector<double> re(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) {
        re[t] = z[t].real();
    }
    return GroupFunction(f.group(), std::move(re));
}

/// (f * h)(x) = |G|^{-1/2} sum_y f(y) h(x - y).
inline GroupFunction convolve(const GroupFunction& f, const GroupFunction& h)
{
    f.require_same_group(h);
    const auto& g = f.group();
    const std::size_t n = g.order();
    std::vector<std::size_t> support;
    for (std::size_t y = 0; y < n; ++y) {
        if (f[y] != 0.0) {
            support.push_back(y);
        }
    }
    std::vector<long double> acc(n, 0.0L);
    for (std::size_t x = 0; x < n; ++x) {
        long double s = 0.0L;
        for (std::size_t y : support) {
            s += static_cast<long double>(f[y]) * h[g.subtract(x, y)];
        }
        acc[x] = s;
    }
    const long double norm = 1.0L / std::sqrt(static_cast<long double>(n));
    std::vector<double> out(n);
    for (std::size_t x = 0; x < n; ++x) {
        out[x] = static_cast<double>(acc[x] * norm);
    }
    return GroupFunction(g, std::move(out));
}

/// The difference set A - A.
inline SymmetricSet autocorrelation_support(const Subset& a)
{
    const auto elems = a.elements();
    if (elems.empty()) {
        throw std::invalid_argument("autocorrelation_support: empty set");
    }
    Subset d(a.group());
    for (std::size_t x : elems) {
        for (std::size_t y : elems) {
            d.insert(a.group().subtract(x, y));
        }
    }
    return SymmetricSet(std::move(d));
}

inline double max_abs_difference(const GroupFunction& a, const GroupFunction& b)
{
    a.require_same_group(b);
    double m = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        m = std::max(m, std::abs(a[x] - b[x]));
    }
    return m;
}

/// Parses "0,1,3" (also accepts whitespace and surrounding brackets).
inline std::vector<std::size_t> parse_index_list(std::string_view text)
{
    std::vector<std::size_t> out;
    std::string token;
    auto flush = [&] {
        if (token.empty()) {
            return;
        }
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad index '" + token + "'");
        }
        if (used != token.size() || v < 0) {
            throw std::invalid_argument("bad index '" + token + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '[' || c == ']' || c == '\t') {
            flush();
        } else {
            token += c;
        }
    }
    flush();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace tdlab
