#pragma once

#include <array>
#include <complex>
#include <compare>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace yb {

using cx = std::complex<double>;

struct AlgebraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A spectral-parameter slot. Compared by name only, never by value.
struct Tag {
    std::string name;
    Tag() = default;
    Tag(const char* n) : name(n) {}
    Tag(std::string n) : name(std::move(n)) {}
    auto operator<=>(const Tag&) const = default;
    bool operator==(const Tag&) const = default;
};

// index is 0-based (printed as 1..m); arity is 0 (constant), 1 or 2.
struct Generator {
    int index = 0;
    int arity = 0;
    std::array<Tag, 2> slots{};

    auto operator<=>(const Generator&) const = default;
    bool operator==(const Generator&) const = default;
};

using Word = std::vector<Generator>;

std::string to_string(const Generator& g);
std::string to_string(const Word& w);

struct AlgebraSpec {
    int m = 0;
    int arity = -1;  // -1: not yet fixed (unit-only elements)
    bool operator==(const AlgebraSpec&) const = default;
};

AlgebraSpec merge_spec(const AlgebraSpec& a, const AlgebraSpec& b);

inline bool is_zero(const cx& c) { return c == cx{}; }

// Finite linear combination Key -> C with no stored zeros.
template <class Key, class C = cx>
class Combination {
public:
    using map_type = std::map<Key, C>;

    Combination() = default;

    void add(const Key& k, const C& c) {
        if (is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (is_zero(it->second)) terms_.erase(it);
        }
    }

    const map_type& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    C coeff(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? C{} : it->second;
    }

    Combination& operator+=(const Combination& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        spec = merge_spec(spec, o.spec);
        return *this;
    }
    Combination& operator-=(const Combination& o) {
        for (const auto& [k, c] : o.terms_) add(k, -c);
        spec = merge_spec(spec, o.spec);
        return *this;
    }
    friend Combination operator+(Combination a, const Combination& b) { return a += b; }
    friend Combination operator-(Combination a, const Combination& b) { return a -= b; }
    friend Combination operator-(const Combination& a) {
        Combination r;
        r.spec = a.spec;
        for (const auto& [k, c] : a.terms_) r.terms_.emplace(k, -c);
        return r;
    }
    template <class S>
    Combination scaled(const S& s) const {
        Combination r;
        r.spec = spec;
        for (const auto& [k, c] : terms_) r.add(k, c * s);
        return r;
    }
    bool operator==(const Combination& o) const { return terms_ == o.terms_; }

    AlgebraSpec spec{};

private:
    map_type terms_;
};

// ---- symbolic coefficients -------------------------------------------------
// An Atom names one entry of a coefficient function evaluated at tags, e.g.
// alpha^{pq}_{ij}(u,v) -> {fn=alpha, idx={p,q,i,j}, args={u,v}}.
struct Atom {
    int fn = 0;
    std::array<int, 4> idx{};
    std::array<Tag, 4> args{};
    int nargs = 0;
    auto operator<=>(const Atom&) const = default;
    bool operator==(const Atom&) const = default;
};

using Monomial = std::vector<Atom>;  // sorted

class Sym : public Combination<Monomial, cx> {
public:
    Sym() = default;
    Sym(cx c) { add({}, c); }
    Sym(const Combination<Monomial, cx>& c) : Combination<Monomial, cx>(c) {}
    static Sym atom(const Atom& a, cx c = 1.0) {
        Sym s;
        s.add({a}, c);
        return s;
    }
    Sym& operator+=(const Sym& o) {
        Combination::operator+=(o);
        return *this;
    }
    Sym& operator-=(const Sym& o) {
        Combination::operator-=(o);
        return *this;
    }
    friend Sym operator+(Sym a, const Sym& b) { return a += b; }
    friend Sym operator-(Sym a, const Sym& b) { return a -= b; }
    friend Sym operator-(const Sym& a) { return a.scaled(cx{-1.0}); }
    friend Sym operator*(const Sym& a, const Sym& b);
    friend Sym operator*(const Sym& a, cx s) { return a.scaled(s); }
    friend Sym operator*(cx s, const Sym& a) { return a.scaled(s); }
};

inline bool is_zero(const Sym& s) { return s.empty(); }

using AtomEval = std::function<cx(const Atom&)>;
cx evaluate(const Sym& s, const AtomEval& f);

// ---- elements ---------------------------------------------------------------
template <class C = cx>
using Free = Combination<Word, C>;
template <class C = cx>
using Tensor2 = Combination<std::array<Word, 2>, C>;
template <class C = cx>
using Tensor3 = Combination<std::array<Word, 3>, C>;
// keys are minimal cyclic rotations
template <class C = cx>
using Trace = Combination<Word, C>;

using FreeElement = Free<cx>;
using TraceElement = Trace<cx>;

// Builds generators and elements for one algebra instance (fixed m and arity).
class Algebra {
public:
    Algebra(int m, int arity);
    int m() const { return spec_.m; }
    int arity() const { return spec_.arity; }
    const AlgebraSpec& spec() const { return spec_; }

    Generator gen(int index, const Tag& a = {}, const Tag& b = {}) const;
    template <class C = cx>
    Free<C> element(const Word& w, const C& c = C{1.0}) const {
        for (const auto& g : w) check(g);
        Free<C> f;
        f.spec = spec_;
        f.add(w, c);
        return f;
    }
    template <class C = cx>
    Free<C> unit() const {
        return element<C>(Word{});
    }
    Free<cx> letter(int index, const Tag& a = {}, const Tag& b = {}) const {
        return element<cx>(Word{gen(index, a, b)});
    }
    void check(const Generator& g) const;

private:
    AlgebraSpec spec_;
};

Word concat(const Word& a, const Word& b);
Word reversed(const Word& w);
Word min_rotation(const Word& w);

template <class C>
Free<C> multiply(const Free<C>& a, const Free<C>& b) {
    Free<C> r;
    r.spec = merge_spec(a.spec, b.spec);
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) r.add(concat(wa, wb), ca * cb);
    return r;
}

template <class C>
Free<C> operator*(const Free<C>& a, const Free<C>& b) {
    return multiply(a, b);
}

template <class C>
Tensor2<C> tensor(const Free<C>& a, const Free<C>& b) {
    Tensor2<C> r;
    r.spec = merge_spec(a.spec, b.spec);
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) r.add({wa, wb}, ca * cb);
    return r;
}

template <class C>
Tensor3<C> tensor(const Free<C>& a, const Free<C>& b, const Free<C>& c) {
    Tensor3<C> r;
    r.spec = merge_spec(merge_spec(a.spec, b.spec), c.spec);
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms())
            for (const auto& [wc, cc] : c.terms()) r.add({wa, wb, wc}, ca * cb * cc);
    return r;
}

template <class C>
Tensor2<C> tensor_flip(const Tensor2<C>& t) {
    Tensor2<C> r;
    r.spec = t.spec;
    for (const auto& [k, c] : t.terms()) r.add({k[1], k[0]}, c);
    return r;
}

// v1 (x) v2 (x) v3 -> v3 (x) v1 (x) v2
template <class C>
Tensor3<C> cyclic_shift(const Tensor3<C>& t) {
    Tensor3<C> r;
    r.spec = t.spec;
    for (const auto& [k, c] : t.terms()) r.add({k[2], k[0], k[1]}, c);
    return r;
}

template <class C>
Tensor3<C> permute13(const Tensor3<C>& t) {
    Tensor3<C> r;
    r.spec = t.spec;
    for (const auto& [k, c] : t.terms()) r.add({k[2], k[1], k[0]}, c);
    return r;
}

template <class C>
Free<C> mu(const Tensor2<C>& t) {
    Free<C> r;
    r.spec = t.spec;
    for (const auto& [k, c] : t.terms()) r.add(concat(k[0], k[1]), c);
    return r;
}

template <class C>
Trace<C> trace_project(const Free<C>& a) {
    Trace<C> r;
    r.spec = a.spec;
    for (const auto& [w, c] : a.terms()) r.add(min_rotation(w), c);
    return r;
}

// (a (x) b) * (c (x) d) = ac (x) bd
template <class C>
Tensor2<C> multiply(const Tensor2<C>& a, const Tensor2<C>& b) {
    Tensor2<C> r;
    r.spec = merge_spec(a.spec, b.spec);
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms())
            r.add({concat(ka[0], kb[0]), concat(ka[1], kb[1])}, ca * cb);
    return r;
}

// Numeric evaluation of a symbolic element, then the 1e-14 relative cleanup.
template <class Key>
Combination<Key, cx> evaluate(const Combination<Key, Sym>& e, const AtomEval& f) {
    Combination<Key, cx> r;
    r.spec = e.spec;
    double big = 0.0;
    std::vector<std::pair<Key, cx>> vals;
    vals.reserve(e.size());
    for (const auto& [k, s] : e.terms()) {
        cx v = evaluate(s, f);
        big = std::max(big, std::abs(v));
        vals.emplace_back(k, v);
    }
    const double cut = 1e-14 * (1.0 + big);
    for (auto& [k, v] : vals)
        if (std::abs(v) >= cut) r.add(k, v);
    return r;
}

template <class Key, class C>
double max_abs(const Combination<Key, C>& e) {
    double m = 0.0;
    for (const auto& [k, c] : e.terms()) m = std::max(m, std::abs(c));
    return m;
}

// Lift a numeric element to constant symbolic coefficients.
template <class Key>
Combination<Key, Sym> lift(const Combination<Key, cx>& e) {
    Combination<Key, Sym> r;
    r.spec = e.spec;
    for (const auto& [k, c] : e.terms()) r.add(k, Sym(c));
    return r;
}

// Parameter values for tags.
class Assignment {
public:
    Assignment() = default;
    Assignment(std::initializer_list<std::pair<const std::string, cx>> init) : values_(init) {}
    void set(const Tag& t, cx v) { values_[t.name] = v; }
    cx at(const Tag& t) const;
    bool has(const Tag& t) const { return values_.count(t.name) != 0; }
    const std::map<std::string, cx>& values() const { return values_; }

private:
    std::map<std::string, cx> values_;
};

struct MissingTag : AlgebraError {
    using AlgebraError::AlgebraError;
};

}  // namespace yb
