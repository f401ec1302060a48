#include "yb/algebra.hpp"

#include <algorithm>

namespace yb {

std::string to_string(const Generator& g) {
    std::string s = "E" + std::to_string(g.index + 1);
    if (g.arity == 0) return s;
    s += "(" + g.slots[0].name;
    if (g.arity == 2) s += "," + g.slots[1].name;
    return s + ")";
}

std::string to_string(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (const auto& g : w) s += to_string(g);
    return s;
}

AlgebraSpec merge_spec(const AlgebraSpec& a, const AlgebraSpec& b) {
    if (a.arity < 0 && a.m == 0) return b;
    if (b.arity < 0 && b.m == 0) return a;
    if (a.m != b.m || a.arity != b.arity)
        throw AlgebraError("elements from different algebra instances (m " + std::to_string(a.m) +
                           "/" + std::to_string(b.m) + ", arity " + std::to_string(a.arity) + "/" +
                           std::to_string(b.arity) + ")");
    return a;
}

Sym operator*(const Sym& a, const Sym& b) {
    Sym r;
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) {
            Monomial m;
            m.reserve(ma.size() + mb.size());
            std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
            r.add(m, ca * cb);
        }
    return r;
}

cx evaluate(const Sym& s, const AtomEval& f) {
    cx total{};
    for (const auto& [mono, c] : s.terms()) {
        cx p = c;
        for (const auto& a : mono) p *= f(a);
        total += p;
    }
    return total;
}

Algebra::Algebra(int m, int arity) : spec_{m, arity} {
    if (m < 1) throw AlgebraError("algebra needs m >= 1");
    if (arity < 0 || arity > 2) throw AlgebraError("slot arity must be 0, 1 or 2");
}

void Algebra::check(const Generator& g) const {
    if (g.arity != spec_.arity)
        throw AlgebraError("generator " + to_string(g) + " has arity " + std::to_string(g.arity) +
                           ", algebra expects " + std::to_string(spec_.arity));
    if (g.index < 0 || g.index >= spec_.m)
        throw AlgebraError("generator index " + std::to_string(g.index + 1) + " outside 1.." +
                           std::to_string(spec_.m));
}

Generator Algebra::gen(int index, const Tag& a, const Tag& b) const {
    Generator g;
    g.index = index;
    g.arity = spec_.arity;
    if (spec_.arity >= 1) {
        if (a.name.empty()) throw AlgebraError("missing parameter tag");
        g.slots[0] = a;
    }
    if (spec_.arity == 2) {
        if (b.name.empty()) throw AlgebraError("missing second parameter tag");
        g.slots[1] = b;
    }
    check(g);
    return g;
}

Word concat(const Word& a, const Word& b) {
    Word r;
    r.reserve(a.size() + b.size());
    r.insert(r.end(), a.begin(), a.end());
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

Word reversed(const Word& w) { return Word(w.rbegin(), w.rend()); }

Word min_rotation(const Word& w) {
    Word best = w;
    Word cur = w;
    for (std::size_t i = 1; i < w.size(); ++i) {
        std::rotate(cur.begin(), cur.begin() + 1, cur.end());
        if (cur < best) best = cur;
    }
    return best;
}

cx Assignment::at(const Tag& t) const {
    auto it = values_.find(t.name);
    if (it == values_.end()) throw MissingTag("assignment has no value for tag '" + t.name + "'");
    return it->second;
}

}  // namespace yb
