#include "yb/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace yb {

Arr& Arr::operator+=(const Arr& o) {
    if (o.v_.size() != v_.size()) throw std::invalid_argument("Arr shape mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Arr& Arr::operator-=(const Arr& o) {
    if (o.v_.size() != v_.size()) throw std::invalid_argument("Arr shape mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Arr& Arr::operator*=(cx s) {
    for (auto& x : v_) x *= s;
    return *this;
}

double Arr::max_abs() const {
    double r = 0.0;
    for (const auto& x : v_) r = std::max(r, std::abs(x));
    return r;
}

Arr Arr::transposed(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != rank_) throw std::invalid_argument("bad permutation");
    std::string in, out;
    for (int k = 0; k < rank_; ++k) in += static_cast<char>('a' + k);
    for (int k = 0; k < rank_; ++k) out += static_cast<char>('a' + perm[k]);
    return einsum(in + "->" + out, *this);
}

namespace {

struct Plan {
    std::string letters;
    std::vector<std::vector<std::size_t>> strides;  // per operand, per letter
    std::size_t out_rank = 0;
};

std::vector<std::size_t> strides_for(const std::string& sub, const std::string& letters, int m) {
    std::vector<std::size_t> s(letters.size(), 0);
    std::size_t st = 1;
    for (int k = static_cast<int>(sub.size()) - 1; k >= 0; --k) {
        s[letters.find(sub[k])] += st;
        st *= m;
    }
    return s;
}

Arr run(const std::string& spec, const std::vector<const Arr*>& ops) {
    const auto arrow = spec.find("->");
    if (arrow == std::string::npos) throw std::invalid_argument("einsum spec needs ->: " + spec);
    const std::string lhs = spec.substr(0, arrow), out = spec.substr(arrow + 2);
    std::vector<std::string> subs;
    std::size_t start = 0;
    for (;;) {
        auto c = lhs.find(',', start);
        subs.push_back(lhs.substr(start, c - start));
        if (c == std::string::npos) break;
        start = c + 1;
    }
    if (subs.size() != ops.size()) throw std::invalid_argument("einsum operand count: " + spec);
    const int m = ops[0]->m();
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (static_cast<int>(subs[i].size()) != ops[i]->rank() || ops[i]->m() != m)
            throw std::invalid_argument("einsum operand shape: " + spec);

    std::string letters = out;
    for (const auto& s : subs)
        for (char ch : s)
            if (letters.find(ch) == std::string::npos) letters += ch;
    const auto n = letters.size();

    Arr result(m, static_cast<int>(out.size()));
    std::vector<std::vector<std::size_t>> strides;
    for (const auto& s : subs) strides.push_back(strides_for(s, letters, m));
    const auto ostr = strides_for(out, letters, m);

    std::vector<int> idx(n, 0);
    std::vector<std::size_t> off(ops.size() + 1, 0);
    for (;;) {
        cx p = 1.0;
        for (std::size_t o = 0; o < ops.size(); ++o) {
            std::size_t f = 0;
            for (std::size_t l = 0; l < n; ++l) f += strides[o][l] * idx[l];
            p *= (*ops[o])[f];
        }
        std::size_t f = 0;
        for (std::size_t l = 0; l < n; ++l) f += ostr[l] * idx[l];
        result[f] += p;
        std::size_t l = n;
        while (l > 0) {
            --l;
            if (++idx[l] < m) break;
            idx[l] = 0;
            if (l == 0) return result;
        }
        if (n == 0) return result;
    }
}

}  // namespace

Arr einsum(const std::string& spec, const Arr& a, const Arr& b) { return run(spec, {&a, &b}); }
Arr einsum(const std::string& spec, const Arr& a) { return run(spec, {&a}); }

Arr identity_tensor(int m) {
    Arr t(m, 4);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) t(i, j, i, j) = 1.0;
    return t;
}

Arr exchange_tensor(int m) {
    Arr t(m, 4);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) t(j, i, i, j) = 1.0;
    return t;
}

double CoefficientFunction::pole_distance(const cx* args) const {
    double d = INFINITY;
    for (const auto& p : poles) d = std::min(d, p.distance(args));
    return d;
}

Arr CoefficientFunction::eval(const cx* args, double margin) const {
    for (const auto& p : poles) {
        if (p.distance(args) < margin)
            throw PoleMarginError(name + ": evaluation within margin of pole " + p.what);
    }
    Arr r = fn(args);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (!std::isfinite(r[i].real()) || !std::isfinite(r[i].imag()))
            throw PoleMarginError(name + ": non-finite value");
    return r;
}

Arr CoefficientFunction::eval(std::initializer_list<cx> args, double margin) const {
    std::vector<cx> a(args);
    if (static_cast<int>(a.size()) != arity) throw std::invalid_argument(name + ": wrong arity");
    return eval(a.data(), margin);
}

Arr CoefficientFunction::raw(std::initializer_list<cx> args) const {
    std::vector<cx> a(args);
    if (static_cast<int>(a.size()) != arity) throw std::invalid_argument(name + ": wrong arity");
    return fn(a.data());
}

CoefficientFunction scalar4(std::string name, ScalarFn4 f, std::vector<PoleLocus> poles) {
    CoefficientFunction c;
    c.name = std::move(name);
    c.arity = 4;
    c.m = 1;
    c.fn = [f](const cx* a) {
        Arr r(1, 4);
        r[0] = f(a[0], a[1], a[2], a[3]);
        return r;
    };
    c.poles = std::move(poles);
    return c;
}

CoefficientFunction scalar2(std::string name, ScalarFn2 f, std::vector<PoleLocus> poles) {
    CoefficientFunction c;
    c.name = std::move(name);
    c.arity = 2;
    c.m = 1;
    c.fn = [f](const cx* a) {
        Arr r(1, 4);
        r[0] = f(a[0], a[1]);
        return r;
    };
    c.poles = std::move(poles);
    return c;
}

CoefficientFunction constant4(std::string name, const Arr& value, int arity) {
    CoefficientFunction c;
    c.name = std::move(name);
    c.arity = arity;
    c.m = value.m();
    c.rank = value.rank();
    c.fn = [value](const cx*) { return value; };
    return c;
}

CoefficientFunction zero_coefficient(int m, int arity, int rank) {
    return constant4("0", Arr(m, rank), arity);
}

CoefficientFunction times(const CoefficientFunction& scalar, const Arr& t) {
    CoefficientFunction c = scalar;
    c.m = t.m();
    c.rank = t.rank();
    auto f = scalar.fn;
    c.fn = [f, t](const cx* a) { return t * f(a)[0]; };
    return c;
}

CoefficientFunction sum(const CoefficientFunction& a, const CoefficientFunction& b) {
    if (a.arity != b.arity || a.m != b.m || a.rank != b.rank)
        throw std::invalid_argument("sum of incompatible coefficient functions");
    CoefficientFunction c = a;
    c.name = a.name + "+" + b.name;
    auto fa = a.fn, fb = b.fn;
    c.fn = [fa, fb](const cx* x) { return fa(x) + fb(x); };
    c.poles.insert(c.poles.end(), b.poles.begin(), b.poles.end());
    return c;
}

CoefficientFunction scale(const CoefficientFunction& a, cx s) {
    CoefficientFunction c = a;
    auto f = a.fn;
    c.fn = [f, s](const cx* x) { return f(x) * s; };
    return c;
}

PoleLocus diff_pole(std::string what, int i, int j) {
    return {std::move(what), [i, j](const cx* a) { return std::abs(a[i] - a[j]); }};
}

void ResidualAccumulator::add(const Arr& term, cx sign) {
    if (total_.size() == 0) total_ = Arr(term.m(), term.rank());
    for (std::size_t i = 0; i < term.size(); ++i) {
        total_[i] += sign * term[i];
        term_ = std::max(term_, std::abs(term[i]));
    }
}

void ResidualAccumulator::add(cx term, cx sign) {
    scalar_ = true;
    stotal_ += sign * term;
    term_ = std::max(term_, std::abs(term));
}

SampleResidual ResidualAccumulator::result() const {
    SampleResidual r;
    r.abs = std::max(total_.size() ? total_.max_abs() : 0.0, scalar_ ? std::abs(stotal_) : 0.0);
    r.term = term_;
    return r;
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t attempt) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ index) ^ (attempt * 0xd1b54a32d192ed03ULL));
}

Assignment draw_assignment(const std::vector<Tag>& tags, const SampleBox& box, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> re(box.re_lo, box.re_hi), im(box.im_lo, box.im_hi);
    Assignment a;
    for (const auto& t : tags) {
        const double x = re(gen);
        const double y = im(gen);
        a.set(t, cx{x, y});
    }
    return a;
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

ResidualReport single_report(const std::string& identity, const SampleResidual& r, double tolerance,
                             const Assignment* at) {
    ResidualReport rep;
    rep.identity = identity;
    rep.samples = 1;
    rep.max_abs_residual = r.abs;
    rep.relative_residual = r.rel();
    rep.tolerance = tolerance;
    rep.pass = r.rel() <= tolerance;
    if (at)
        for (const auto& [k, v] : at->values()) rep.argmax.emplace_back(k, v);
    return rep;
}

std::vector<ResidualReport> run_samples(const std::vector<std::string>& identities,
                                        const std::vector<Tag>& tags, const SampleFn& one,
                                        const SamplingConfig& cfg, double tolerance) {
    if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
    const int n = cfg.samples;
    std::vector<std::vector<SampleResidual>> results(n);
    std::vector<Assignment> used(n);
    std::vector<std::exception_ptr> errors(n);

    parallel_for(n, cfg.workers, [&](int i) {
        try {
            for (int attempt = 0; attempt <= cfg.max_redraws; ++attempt) {
                Assignment a = draw_assignment(tags, cfg.box, sample_seed(cfg.seed, i, attempt));
                try {
                    results[i] = one(a);
                    used[i] = a;
                    return;
                } catch (const PoleMarginError&) {
                }
            }
            throw NumericHazard("sample " + std::to_string(i) + ": pole margin not met after " +
                                std::to_string(cfg.max_redraws) + " redraws");
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (int i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    std::vector<ResidualReport> reps(identities.size());
    std::vector<int> arg(identities.size(), 0);
    for (std::size_t k = 0; k < identities.size(); ++k) {
        reps[k].identity = identities[k];
        reps[k].samples = n;
        reps[k].tolerance = tolerance;
    }
    for (int i = 0; i < n; ++i) {
        if (results[i].size() != identities.size())
            throw std::logic_error("sample function returned wrong number of residuals");
        for (std::size_t k = 0; k < identities.size(); ++k) {
            const auto& r = results[i][k];
            const double a = std::isfinite(r.abs) ? r.abs : INFINITY;
            const double rel = std::isfinite(r.rel()) ? r.rel() : INFINITY;
            reps[k].max_abs_residual = std::max(reps[k].max_abs_residual, a);
            if (i == 0 || rel > reps[k].relative_residual) {
                arg[k] = i;
                reps[k].relative_residual = rel;
            }
        }
    }
    for (std::size_t k = 0; k < identities.size(); ++k) {
        for (const auto& [t, v] : used[arg[k]].values()) reps[k].argmax.emplace_back(t, v);
        reps[k].pass = reps[k].relative_residual <= tolerance;
    }
    return reps;
}

}  // namespace yb
